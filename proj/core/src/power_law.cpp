#include "quasifree/power_law.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "quasifree/errors.hpp"

namespace quasifree {

PowerLawFit power_law_fit(std::span<const double> t, std::span<const double> y, double t_lo, double t_hi) {
  if (t.size() != y.size()) throw DimensionMismatch("power_law_fit: t and y differ in length");
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (!(t[i] > t_lo && t[i] < t_hi)) continue;
    if (!(y[i] > 0.0)) {
      throw PreconditionViolated("power_law_fit: non-positive value at t = " + std::to_string(t[i]));
    }
    lx.push_back(std::log(t[i]));
    ly.push_back(std::log(y[i]));
  }
  const auto n = static_cast<double>(lx.size());
  if (lx.size() < 5) {
    throw PreconditionViolated("power_law_fit: " + std::to_string(lx.size()) + " points in window, need 5");
  }
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    mx += lx[i];
    my += ly[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
    syy += (ly[i] - my) * (ly[i] - my);
  }
  PowerLawFit fit;
  fit.t_lo = t_lo;
  fit.t_hi = t_hi;
  fit.points = static_cast<int>(lx.size());
  fit.exponent = sxy / sxx;
  fit.prefactor = std::exp(my - fit.exponent * mx);
  double ss_res = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    const double r = ly[i] - (my + fit.exponent * (lx[i] - mx));
    ss_res += r * r;
  }
  // A perfectly constant series is fitted exactly.
  fit.r_squared = syy > 0.0 ? std::clamp(1.0 - ss_res / syy, 0.0, 1.0) : 1.0;
  fit.non_decaying = fit.exponent > -0.01;
  return fit;
}

std::vector<double> time_grid(double t_min, double t_max, int count, bool logarithmic) {
  if (count < 1) throw PreconditionViolated("time_grid: count must be positive");
  if (!(t_min >= 0.0) || !(t_max >= t_min)) throw PreconditionViolated("time_grid: need 0 <= t_min <= t_max");
  if (count > 1 && !(t_max > t_min)) throw PreconditionViolated("time_grid: need t_max > t_min for several points");
  if (logarithmic && !(t_min > 0.0)) throw PreconditionViolated("time_grid: logarithmic grid needs t_min > 0");
  std::vector<double> g(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    const double f = count == 1 ? 0.0 : static_cast<double>(i) / (count - 1);
    g[i] = logarithmic ? t_min * std::pow(t_max / t_min, f) : t_min + (t_max - t_min) * f;
  }
  g.back() = t_max;
  return g;
}

}  // namespace quasifree
