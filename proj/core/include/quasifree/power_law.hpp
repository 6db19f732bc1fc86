#pragma once

#include <span>
#include <vector>

namespace quasifree {

/// y ~ prefactor * t^exponent, from ordinary least squares on (ln t, ln y).
struct PowerLawFit {
  double exponent = 0.0;
  double prefactor = 0.0;
  double t_lo = 0.0;
  double t_hi = 0.0;
  double r_squared = 0.0;
  int points = 0;
  /// exponent > -0.01
  bool non_decaying = false;
};

/// Uses only samples with t_lo < t < t_hi. Needs at least five of them, all with y > 0.
PowerLawFit power_law_fit(std::span<const double> t, std::span<const double> y, double t_lo, double t_hi);

/// `count` increasing times from t_min to t_max, equally spaced in t or in ln t.
std::vector<double> time_grid(double t_min, double t_max, int count, bool logarithmic);

}  // namespace quasifree
