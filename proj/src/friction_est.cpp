#include "chebybal/friction_est.hpp"

#include <cmath>

namespace chebybal {

double measureMu(const Vec3 & f_local)
{
  double fz = std::abs(f_local.z());
  if(fz == 0.0)
  {
    throw Error("measureMu: zero normal force, measurement undefined");
  }
  return std::hypot(f_local.x(), f_local.y()) / fz;
}

FrictionEstimator::FrictionEstimator(double gamma, double fz_threshold, double initial_guess)
    : gamma_(gamma), fz_threshold_(fz_threshold), initial_guess_(initial_guess),
      mu_measured_prev_(initial_guess), mu_filtered_(initial_guess)
{
  if(gamma < 0.0 || gamma > 1.0)
  {
    throw Error("FrictionEstimator: gamma must be in [0, 1]");
  }
  if(fz_threshold <= 0.0)
  {
    throw Error("FrictionEstimator: fz_threshold must be positive");
  }
}

void FrictionEstimator::update(const Vec3 & f_local)
{
  if(std::abs(f_local.z()) < fz_threshold_)
  {
    return;
  }
  double mes = measureMu(f_local);
  mu_filtered_ = gamma_ * mu_measured_prev_ + (1.0 - gamma_) * mes;
  mu_measured_prev_ = mes;
}

void FrictionEstimator::updateRecursive(const Vec3 & f_local)
{
  if(std::abs(f_local.z()) < fz_threshold_)
  {
    return;
  }
  double mes = measureMu(f_local);
  mu_filtered_ = gamma_ * mu_filtered_ + (1.0 - gamma_) * mes;
  mu_measured_prev_ = mes;
}

void FrictionEstimator::apply(FilterKind kind, const Vec3 & f_local)
{
  if(kind == FilterKind::Paper)
  {
    update(f_local);
  }
  else
  {
    updateRecursive(f_local);
  }
}

} // namespace chebybal
