#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace chebybal {

// Seeded generator with hand-rolled distributions on top of mt19937_64, so
// identical seeds give identical streams regardless of the standard
// library's distribution implementations.
class Rng {
public:
  explicit Rng(uint64_t seed) : engine_(seed) {}

  // Uniform in [0, 1).
  double uniform()
  {
    return (engine_() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi)
  {
    return lo + (hi - lo) * uniform();
  }

  int uniformInt(int lo, int hi) // inclusive bounds
  {
    return lo + static_cast<int>(engine_() % static_cast<uint64_t>(hi - lo + 1));
  }

  // Standard normal via Box-Muller.
  double gaussian()
  {
    if(have_spare_)
    {
      have_spare_ = false;
      return spare_;
    }
    double u1 = 0.0;
    while(u1 == 0.0)
    {
      u1 = uniform();
    }
    double u2 = uniform();
    double r = std::sqrt(-2.0 * std::log(u1));
    double theta = 6.283185307179586476925286766559 * u2;
    spare_ = r * std::sin(theta);
    have_spare_ = true;
    return r * std::cos(theta);
  }

  double gaussian(double mean, double sigma)
  {
    return mean + sigma * gaussian();
  }

private:
  std::mt19937_64 engine_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

} // namespace chebybal
