#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>

#include "quasifree/bounds.hpp"
#include "quasifree/errors.hpp"

namespace quasifree {

namespace {

// Loose on purpose: a root of multiplicity m moves off the circle by ~eps^(1/m).
// Candidates are confirmed by the residual after polishing.
constexpr double kUnitCircleTol = 1e-3;
constexpr double kMergeTol = 1e-6;

struct TrigPoly {
  cplx a0;
  std::vector<cplx> a, b;

  cplx value(double p) const {
    cplx v = a0;
    for (std::size_t i = 0; i < a.size(); ++i) {
      const double z = static_cast<double>(i + 1);
      v += a[i] * std::polar(1.0, z * p) + b[i] * std::polar(1.0, -z * p);
    }
    return v;
  }

  cplx slope(double p) const {
    cplx v = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
      const double z = static_cast<double>(i + 1);
      v += cplx(0.0, z) * (a[i] * std::polar(1.0, z * p) - b[i] * std::polar(1.0, -z * p));
    }
    return v;
  }

  double scale() const {
    double s = std::abs(a0);
    for (std::size_t i = 0; i < a.size(); ++i) s += std::abs(a[i]) + std::abs(b[i]);
    return s;
  }
};

double circular_gap(double p, double q) {
  const double d = std::fmod(std::abs(p - q), kTwoPi);
  return std::min(d, kTwoPi - d);
}

double to_unit_interval(double p) {
  p = std::fmod(p, kTwoPi);
  if (p < 0.0) p += kTwoPi;
  return p >= kTwoPi ? 0.0 : p;
}

// Newton restricted to the real axis: p <- p - Re(Omega / Omega').
double polish(const TrigPoly& f, double p) {
  for (int it = 0; it < 60; ++it) {
    const cplx s = f.slope(p);
    if (s == cplx(0.0)) break;
    double step = (f.value(p) / s).real();
    step = std::clamp(step, -0.1, 0.1);
    p -= step;
    if (std::abs(step) < 1e-15) break;
  }
  return to_unit_interval(p);
}

}  // namespace

std::vector<double> trig_roots(cplx a0, std::span<const cplx> a, std::span<const cplx> b) {
  if (a.size() != b.size()) throw DimensionMismatch("trig_roots: a and b must have equal length");
  const int R = static_cast<int>(a.size());
  TrigPoly f{a0, {a.begin(), a.end()}, {b.begin(), b.end()}};
  const double scale = f.scale();
  if (scale == 0.0) throw PreconditionViolated("trig_roots: all coefficients vanish");

  // Y(u) = sum_j c_j u^j with c_R = a0, c_{R+z} = a_z, c_{R-z} = b_z.
  std::vector<cplx> c(static_cast<std::size_t>(2 * R + 1), cplx(0.0));
  c[R] = a0;
  for (int z = 1; z <= R; ++z) {
    c[R + z] = a[z - 1];
    c[R - z] = b[z - 1];
  }
  const double zero = 1e-14 * scale;
  int hi = 2 * R;
  while (hi >= 0 && std::abs(c[hi]) <= zero) --hi;
  int lo = 0;
  while (lo < hi && std::abs(c[lo]) <= zero) ++lo;  // roots at u = 0 are off the circle
  const int degree = hi - lo;

  std::vector<double> roots;
  if (degree >= 1) {
    ComplexMatrix companion = ComplexMatrix::Zero(degree, degree);
    for (int i = 1; i < degree; ++i) companion(i, i - 1) = 1.0;
    for (int i = 0; i < degree; ++i) companion(i, degree - 1) = -c[lo + i] / c[hi];
    Eigen::ComplexEigenSolver<ComplexMatrix> solver(companion, false);
    for (const cplx& u : solver.eigenvalues()) {
      if (std::abs(std::abs(u) - 1.0) > kUnitCircleTol) continue;
      const double p = polish(f, std::arg(u));
      if (std::abs(f.value(p)) <= 1e-9 * scale) roots.push_back(p);
    }
  }
  std::sort(roots.begin(), roots.end());
  std::vector<double> merged;
  for (double p : roots) {
    if (merged.empty() || circular_gap(p, merged.back()) > kMergeTol) merged.push_back(p);
  }
  if (merged.size() > 1 && circular_gap(merged.front(), merged.back()) <= kMergeTol) merged.pop_back();
  return merged;
}

std::vector<double> trig_roots_real(double c0, std::span<const double> cos_coeffs,
                                    std::span<const double> sin_coeffs) {
  if (cos_coeffs.size() != sin_coeffs.size()) {
    throw DimensionMismatch("trig_roots_real: cos and sin coefficients must have equal length");
  }
  std::vector<cplx> a(cos_coeffs.size()), b(cos_coeffs.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    a[i] = cplx(cos_coeffs[i], -sin_coeffs[i]) / 2.0;
    b[i] = cplx(cos_coeffs[i], sin_coeffs[i]) / 2.0;
  }
  return trig_roots(c0, a, b);
}

}  // namespace quasifree
