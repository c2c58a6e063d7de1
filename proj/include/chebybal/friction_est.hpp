#pragma once

#include "chebybal/spatial.hpp"

namespace chebybal {

// mu = |f_tan| / |f_z| from a local force measurement. Throws on f_z = 0.
double measureMu(const Vec3 & f_local);

enum class FilterKind {
  Paper,    // two-tap blend with the previous raw measurement
  Recursive // exponential smoothing over the filtered value
};

// Running dynamic-friction estimate of one sliding contact. Measurements
// with |f_z| below the threshold leave the state untouched, so the estimate
// holds through contact making/breaking.
class FrictionEstimator {
public:
  FrictionEstimator(double gamma = 0.9, double fz_threshold = 5.0, double initial_guess = 0.5);

  // mu_filt = gamma * mu_mes(t-1) + (1 - gamma) * mu_mes(t)
  void update(const Vec3 & f_local);

  // mu_filt = gamma * mu_filt(t-1) + (1 - gamma) * mu_mes(t)
  void updateRecursive(const Vec3 & f_local);

  void apply(FilterKind kind, const Vec3 & f_local);

  double muFiltered() const { return mu_filtered_; }
  double muMeasuredPrev() const { return mu_measured_prev_; }
  double gamma() const { return gamma_; }
  double fzThreshold() const { return fz_threshold_; }
  double initialGuess() const { return initial_guess_; }

private:
  double gamma_;
  double fz_threshold_;
  double initial_guess_;
  double mu_measured_prev_;
  double mu_filtered_;
};

} // namespace chebybal
