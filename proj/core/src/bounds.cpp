#include "quasifree/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "quasifree/errors.hpp"

namespace quasifree {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

int reduce_drift(int drift, int size) {
  int m = wrap(drift, size);
  if (2 * m > size) m -= size;
  return m;
}

double factorial(int k) {
  double f = 1.0;
  for (int i = 2; i <= k; ++i) f *= i;
  return f;
}

double circular_gap(double p, double q) {
  const double d = std::fmod(std::abs(p - q), kTwoPi);
  return std::min(d, kTwoPi - d);
}

// Real cos/sin coefficients of d^m Phi / dp^m.
void derivative_coefficients(const PhaseFunction& phi, int order, std::vector<double>& cs,
                             std::vector<double>& sn) {
  const auto h = phi.harmonics();
  cs.assign(h.size(), 0.0);
  sn.assign(h.size(), 0.0);
  for (std::size_t i = 0; i < h.size(); ++i) {
    const double z = static_cast<double>(i + 1);
    const double psi = h[i].phase + order * kPi / 2.0;
    const double amp = h[i].amplitude * std::pow(z, order);
    cs[i] = amp * std::cos(psi);
    sn[i] = -amp * std::sin(psi);
  }
}

// Minimal kappa >= 1 with |Phi^(kappa+offset)(p)| above the relative floor.
// A root of multiplicity m comes out of the eigenvalue solver only to ~eps^(1/m).
// The (m-1)-th derivative has a simple root there, so Newton on it recovers full
// precision; m is read off with a loose tolerance at the rough position.
double refine_multiple_root(const PhaseFunction& phi, double p, int offset) {
  const int max_order = 2 * phi.range() + 3;
  int order = offset + 1;
  while (order <= max_order && std::abs(phi.shape_derivative(order, p)) <= 1e-3 * phi.c_max(order)) ++order;
  if (order == offset + 1 || order > max_order) return p;
  double q = p;
  for (int it = 0; it < 50; ++it) {
    const double step = phi.shape_derivative(order - 1, q) / phi.shape_derivative(order, q);
    q -= std::clamp(step, -1e-3, 1e-3);
    if (std::abs(step) < 1e-16) break;
  }
  auto residual = [&](double x) {
    return offset == 1 ? std::abs(phi.derivative(1, x)) : std::abs(phi.shape_derivative(2, x));
  };
  // keep the refined point only if it is at least as good a root
  return residual(q) <= 10.0 * residual(p) + 1e-14 * phi.c_max(offset) * std::max(1.0, std::abs(phi.time())) ? q : p;
}

StationaryPoint classify_root(const PhaseFunction& phi, double p, int offset, double rel_tol) {
  const int max_order = 2 * phi.range() + 3;
  p = refine_multiple_root(phi, p, offset);
  for (int kappa = 1; kappa + offset <= max_order; ++kappa) {
    const int order = kappa + offset;
    const double v = phi.shape_derivative(order, p);
    if (std::abs(v) > rel_tol * phi.c_max(order)) return {p, kappa, v};
  }
  throw DegenerateStructure("stationary point at p = " + std::to_string(p) +
                            " has no non-vanishing derivative up to order " + std::to_string(max_order));
}

}  // namespace

PhaseFunction::PhaseFunction(double drift, double time, std::vector<Harmonic> harmonics)
    : drift_(drift), time_(time), harmonics_(std::move(harmonics)) {
  if (!std::isfinite(drift_) || !std::isfinite(time_)) throw PreconditionViolated("PhaseFunction: non-finite drift or time");
  for (const auto& h : harmonics_) {
    if (!std::isfinite(h.amplitude) || !std::isfinite(h.phase)) {
      throw PreconditionViolated("PhaseFunction: non-finite harmonic");
    }
  }
}

PhaseFunction PhaseFunction::propagator(const HoppingModel& model, int drift, double t) {
  std::vector<Harmonic> h(static_cast<std::size_t>(model.range()));
  for (int z = 1; z <= model.range(); ++z) h[z - 1] = {2.0 * model.coupling(z), 0.0};
  return PhaseFunction(reduce_drift(drift, model.size()), t, std::move(h));
}

PhaseFunction PhaseFunction::band_mixing(const HoppingModel& model, int n, int drift, double t) {
  const int L = model.size();
  const double alpha = kPi * n / L;
  std::vector<Harmonic> h(static_cast<std::size_t>(model.range()));
  for (int z = 1; z <= model.range(); ++z) {
    // sin(z alpha) vanishes exactly when z n = 0 mod L; do not leave rounding noise there.
    const bool vanishes = wrap(static_cast<long>(z) * n, L) == 0;
    h[z - 1] = {vanishes ? 0.0 : -4.0 * model.coupling(z) * std::sin(z * alpha), z * alpha - kPi / 2.0};
  }
  return PhaseFunction(reduce_drift(drift, L), t, std::move(h));
}

bool PhaseFunction::drift_only() const {
  return std::all_of(harmonics_.begin(), harmonics_.end(), [](const Harmonic& h) { return h.amplitude == 0.0; });
}

double PhaseFunction::value(double p) const {
  double v = 0.0;
  for (std::size_t i = 0; i < harmonics_.size(); ++i) {
    v += harmonics_[i].amplitude * std::cos(static_cast<double>(i + 1) * p + harmonics_[i].phase);
  }
  return drift_ * p + time_ * v;
}

double PhaseFunction::shape_derivative(int order, double p) const {
  if (order < 1) throw PreconditionViolated("shape_derivative: order must be >= 1");
  double v = 0.0;
  for (std::size_t i = 0; i < harmonics_.size(); ++i) {
    const double z = static_cast<double>(i + 1);
    v += harmonics_[i].amplitude * std::pow(z, order) * std::cos(z * p + harmonics_[i].phase + order * kPi / 2.0);
  }
  return v;
}

double PhaseFunction::derivative(int order, double p) const {
  if (order == 0) return value(p);
  const double v = time_ * shape_derivative(order, p);
  return order == 1 ? drift_ + v : v;
}

double PhaseFunction::c_max(int k) const {
  double c = 0.0;
  for (std::size_t i = 0; i < harmonics_.size(); ++i) {
    c += std::pow(static_cast<double>(i + 1), k) * std::abs(harmonics_[i].amplitude);
  }
  return c;
}

StationaryStructure stationary_structure(const PhaseFunction& phi, double rel_tol) {
  if (!(rel_tol > 0.0)) throw PreconditionViolated("stationary_structure: tolerance must be positive");
  if (phi.drift_only()) throw PreconditionViolated("stationary_structure: phase has no harmonics");
  StationaryStructure s;
  std::vector<double> cs, sn;

  // S1: drift + t Phi'(p) = 0
  derivative_coefficients(phi, 1, cs, sn);
  if (phi.time() != 0.0) {
    for (auto& v : cs) v *= phi.time();
    for (auto& v : sn) v *= phi.time();
    for (double p : trig_roots_real(phi.drift(), cs, sn)) s.s1.push_back(classify_root(phi, p, 1, rel_tol));
  } else if (phi.drift() == 0.0) {
    throw DegenerateStructure("stationary_structure: Phi_t is constant at t = 0");
  }

  derivative_coefficients(phi, 2, cs, sn);
  for (double p : trig_roots_real(0.0, cs, sn)) s.s2.push_back(classify_root(phi, p, 2, rel_tol));

  s.kappa0 = 1;
  double m1 = kInf, m2 = kInf;
  for (const auto& r : s.s1) {
    s.kappa0 = std::max(s.kappa0, r.kappa);
    m1 = std::min(m1, std::abs(r.derivative));
  }
  for (const auto& r : s.s2) {
    s.kappa0 = std::max(s.kappa0, r.kappa);
    if (r.kappa != 1) s.generic = false;
    const double third = phi.shape_derivative(3, r.p);
    m2 = std::min(m2, third * third);
  }
  s.m = 0.25 * std::min(m1, m2);
  return s;
}

double DephasingCertificate::bound(double t) const {
  if (c_sharp == 0.0) return 0.0;
  return c_sharp * std::pow(t, -gamma);
}

DephasingCertificate certificate(const PhaseFunction& phi, int size) {
  if (size < 1) throw PreconditionViolated("certificate: L must be positive");
  DephasingCertificate c;
  c.time = phi.time();
  if (phi.drift_only()) {
    c.drift_only = true;
    const double m = phi.drift();
    const bool integral = m == std::round(m);
    const bool zero_winding = integral && wrap(static_cast<long>(std::llround(m)), size) == 0;
    c.c_sharp = (integral && !zero_winding) ? 0.0 : kInf;
    c.c_sharp_general = c.c_sharp;
    c.t0 = 1.0;
    c.tR = kInf;
    return c;
  }

  c.structure = stationary_structure(phi);
  const auto& s = c.structure;
  const int R = phi.range();
  const double c3 = phi.c_max(3);
  const double prefactor = 6.0 * (2 * R + 1);

  c.c0 = kInf;
  for (const auto& r : s.s2) c.c0 = std::min(c.c0, std::abs(r.derivative) / (2.0 * c3 * factorial(r.kappa)));
  if (s.s2.empty()) c.c0 = 0.0;

  double c1 = kInf;
  for (const auto& r : s.s1) c1 = std::min(c1, std::abs(r.derivative) / factorial(r.kappa));
  for (const auto& r : s.s2) c1 = std::min(c1, std::abs(r.derivative) / factorial(r.kappa) * c.c0);
  c.c1 = 0.25 * c1;

  double general = std::max(1.0, c.c0);
  for (const auto& r : s.s2) {
    const double kf = factorial(r.kappa);
    general = std::max(general, 8.0 * kf * kf * c3 / (r.derivative * r.derivative));
  }
  for (const auto& r : s.s1) general = std::max(general, 4.0 * factorial(r.kappa) / std::abs(r.derivative));
  c.c_sharp_general = prefactor * general;

  c.generic = s.generic;
  if (s.generic) {
    c.c_sharp = prefactor * std::max(1.0, 8.0 * c3 / (s.m * s.m));
    c.gamma = 1.0 / 3.0;
  } else {
    c.c_sharp = c.c_sharp_general;
    c.gamma = 1.0 / (3.0 * s.kappa0);
  }

  double t0 = 1.0;
  for (const auto& r : s.s2) {
    const double ratio = phi.shape_derivative(r.kappa + 3, r.p) / ((r.kappa + 1) * r.derivative);
    t0 = std::max(t0, std::pow(std::abs(ratio), 3.0 * r.kappa));
  }
  for (const auto& r : s.s1) {
    const double ratio = phi.c_max(r.kappa + 2) / ((r.kappa + 1) * r.derivative);
    t0 = std::max(t0, std::pow(std::abs(ratio), 3.0 * r.kappa));
  }
  std::vector<double> points;
  for (const auto& r : s.s1) points.push_back(r.p);
  for (const auto& r : s.s2) points.push_back(r.p);
  std::sort(points.begin(), points.end());
  // A point in both S1 and S2 is one element of the union.
  std::vector<double> distinct;
  for (double p : points)
    if (distinct.empty() || circular_gap(p, distinct.back()) > 1e-6) distinct.push_back(p);
  if (distinct.size() > 1 && circular_gap(distinct.front(), distinct.back()) <= 1e-6) distinct.pop_back();
  if (distinct.size() > 1) {
    double sep = kInf;
    for (std::size_t i = 0; i < distinct.size(); ++i)
      for (std::size_t j = i + 1; j < distinct.size(); ++j) sep = std::min(sep, circular_gap(distinct[i], distinct[j]));
    t0 = std::max(t0, std::pow((c.c0 + 1.0) / sep, 2.0 * R + 2.0));
  }
  c.t0 = t0;
  c.tR = size / (4.0 * std::max(phi.c_max(1), c.c1));
  return c;
}

cplx exponential_sum(const PhaseFunction& phi, int size) {
  if (size < 1) throw PreconditionViolated("exponential_sum: L must be positive");
  cplx s = 0.0;
  for (int k = 1; k <= size; ++k) s += std::polar(1.0, phi.value(kTwoPi * k / size));
  return s / static_cast<double>(size);
}

double kusmin_landau_bound(std::span<const double> phases) {
  if (phases.size() < 2) return static_cast<double>(phases.size());
  std::vector<double> gaps(phases.size() - 1);
  for (std::size_t i = 0; i + 1 < phases.size(); ++i) gaps[i] = phases[i + 1] - phases[i];
  // monotone up to rounding in the phases themselves
  double mag = 0.0;
  for (double v : phases) mag = std::max(mag, std::abs(v));
  const double slack = 8.0 * std::numeric_limits<double>::epsilon() * mag;
  bool up = true, down = true;
  for (std::size_t i = 0; i + 1 < gaps.size(); ++i) {
    up = up && gaps[i + 1] >= gaps[i] - slack;
    down = down && gaps[i + 1] <= gaps[i] + slack;
  }
  if (!up && !down) return kInf;
  double lambda = kInf;
  for (double g : gaps) {
    if (!(g > 0.0 && g < kTwoPi)) return kInf;
    lambda = std::min({lambda, g, kTwoPi - g});
  }
  return 1.0 / std::tan(lambda / 4.0);
}

FnBound bound_f_n(const HoppingModel& model, int n, int drift, double t, double c_th) {
  const int L = model.size();
  if (n < 1 || n > L) throw PreconditionViolated("bound_f_n: n must lie in 1..L");
  FnBound b;
  if (n == L) {
    b.conserved = true;
    return b;
  }
  DephasingCertificate c;
  try {
    c = certificate(PhaseFunction::band_mixing(model, n, drift, t), L);
  } catch (const DegenerateStructure&) {
    return b;
  }
  b.c_sharp = c.c_sharp;
  if (c.drift_only) {
    b.certified = true;
    b.value = c.c_sharp == 0.0 ? 0.0 : 1.0;
    return b;
  }
  if (c.c_sharp < c_th && c.covers(t)) {
    b.certified = true;
    b.value = std::min(1.0, c.bound(t));
  }
  return b;
}

double propagator_bound(const HoppingModel& model, double t) {
  if (model.is_flat()) throw PreconditionViolated("propagator_bound: flat band, G_{x,x} never decays");
  const int L = model.size();
  const auto c0 = certificate(PhaseFunction::propagator(model, 0, t), L);
  if (!c0.covers(t)) {
    throw OutsideWindow("propagator_bound: t = " + std::to_string(t) + " outside [" + std::to_string(c0.t0) +
                        ", " + std::to_string(c0.tR) + "]");
  }
  double worst = 0.0;
  for (int m = -(L - 1) / 2; m <= L / 2 && worst < 1.0; ++m) {
    double b = 1.0;
    try {
      const auto c = m == 0 ? c0 : certificate(PhaseFunction::propagator(model, m, t), L);
      if (c.covers(t)) b = std::min(1.0, c.bound(t));
    } catch (const DegenerateStructure&) {
    }
    worst = std::max(worst, b);
  }
  return worst;
}

std::vector<double> band_constants(const HoppingModel& model) {
  const int L = model.size();
  std::vector<double> c(static_cast<std::size_t>(L - 1), kInf);
  for (int n = 1; n < L; ++n) {
    try {
      c[n - 1] = certificate(PhaseFunction::band_mixing(model, n, 0, 1.0), L).c_sharp;
    } catch (const DegenerateStructure&) {
    }
  }
  return c;
}

double default_resilience_threshold(const HoppingModel& model) {
  double best = kInf;
  for (double c : band_constants(model))
    if (std::isfinite(c) && c > 0.0) best = std::min(best, c);
  if (!std::isfinite(best)) throw PreconditionViolated("default_resilience_threshold: no finite dephasing constant");
  return 10.0 * best;
}

namespace {

std::vector<int> resilient_from_constants(const std::vector<double>& constants, double c_th) {
  std::vector<int> set;
  for (std::size_t i = 0; i < constants.size(); ++i)
    if (constants[i] >= c_th) set.push_back(static_cast<int>(i) + 1);
  return set;
}

}  // namespace

std::vector<int> resilient_set(const HoppingModel& model, double c_th) {
  if (!(c_th > 0.0)) throw PreconditionViolated("resilient_set: C_th must be positive");
  return resilient_from_constants(band_constants(model), c_th);
}

ResilienceThresholds default_thresholds(const HoppingModel& model) {
  return ResilienceThresholds{default_resilience_threshold(model), 1.0, 10.0};
}

ResilienceReport classify_resilience(const Covariance& gamma, const HoppingModel& model,
                                     const ResilienceThresholds& thresholds) {
  const int L = model.size();
  if (gamma.size() != L) throw DimensionMismatch("classify_resilience: model and covariance differ in L");
  if (!(thresholds.c_th > 0.0)) throw PreconditionViolated("classify_resilience: C_th must be positive");
  ResilienceReport r;
  r.thresholds = thresholds;
  r.resilient = resilient_from_constants(band_constants(model), thresholds.c_th);
  std::vector<char> is_res(static_cast<std::size_t>(L), 0);
  for (int n : r.resilient) is_res[n] = 1;

  for (int d = -(L - 1) / 2; d <= L / 2; ++d) {
    const auto spec = band_spectrum(gamma, d);
    BandWeight w{d, 0.0, 0.0};
    for (int n = 1; n < L; ++n) (is_res[n] ? w.w_res : w.w_ok) += std::abs(spec.coefficient(n));
    if (w.w_res + w.w_ok <= 1e-12) continue;
    r.max_w_res = std::max(r.max_w_res, w.w_res);
    r.max_w_ok = std::max(r.max_w_ok, w.w_ok);
    r.bands.push_back(w);
  }
  r.non_resilient = r.max_w_res <= thresholds.c_rs / L && r.max_w_ok <= thresholds.c_nrs;
  return r;
}

ResilienceReport classify_resilience(const Covariance& gamma, const HoppingModel& model) {
  return classify_resilience(gamma, model, default_thresholds(model));
}

EquilibrationBound equilibration_bound(const Covariance& gamma, const HoppingModel& model, double t,
                                       const ResilienceReport& report) {
  const int L = model.size();
  if (gamma.size() != L) throw DimensionMismatch("equilibration_bound: model and covariance differ in L");
  if (!report.non_resilient) throw PreconditionViolated("equilibration_bound: second moments are resilient");
  const auto c0 = certificate(PhaseFunction::propagator(model, 0, t), L);
  if (!c0.covers(t)) {
    throw OutsideWindow("equilibration_bound: t = " + std::to_string(t) + " outside [" + std::to_string(c0.t0) +
                        ", " + std::to_string(c0.tR) + "]");
  }

  EquilibrationBound e;
  e.gamma = c0.gamma;
  e.clustering = clustering_fit(gamma);
  const double xi = e.clustering.xi;
  e.d_xi = xi == 0.0 ? 0.0 : xi * e.gamma * std::log(t);

  // Every certificate has C_sharp >= 6(2R+1) and gamma <= 1/3, so below this
  // time no f_n bound can beat the trivial one.
  std::vector<double> fn(static_cast<std::size_t>(L), 1.0);
  if (6.0 * (2 * model.range() + 1) * std::pow(t, -1.0 / 3.0) < 1.0) {
    std::vector<char> is_res(static_cast<std::size_t>(L), 0);
    for (int n : report.resilient) is_res[n] = 1;
    for (int n = 1; n < L; ++n) {
      if (is_res[n]) continue;
      double worst = 0.0;
      for (int m = -(L - 1) / 2; m <= L / 2 && worst < 1.0; ++m) {
        worst = std::max(worst, bound_f_n(model, n, m, t, report.thresholds.c_th).value);
      }
      fn[n] = worst;
    }
  }

  double far_conserved = 0.0;
  for (int d = -(L - 1) / 2; d <= L / 2; ++d) {
    if (std::abs(d) <= e.d_xi) {
      const auto spec = band_spectrum(gamma, d);
      for (int n = 1; n < L; ++n) e.near += std::abs(spec.coefficient(n)) * fn[n];
    } else {
      double band_max = 0.0;
      cplx avg = 0.0;
      for (int z = 0; z < L; ++z) {
        const cplx v = gamma(z + d, z);
        band_max = std::max(band_max, std::abs(v));
        avg += v;
      }
      e.tail += band_max;
      far_conserved = std::max(far_conserved, std::abs(avg) / L);
    }
  }
  e.tail += far_conserved;
  if (xi > 0.0 && std::isfinite(xi)) {
    e.fitted_tail = e.clustering.c_clust / (1.0 - std::exp(-1.0 / xi)) * std::pow(t, -e.gamma);
  } else {
    e.fitted_tail = xi == 0.0 ? 0.0 : kInf;
  }
  e.value = e.near + e.tail;
  return e;
}

EquilibrationBound equilibration_bound(const Covariance& gamma, const HoppingModel& model, double t) {
  return equilibration_bound(gamma, model, t, classify_resilience(gamma, model));
}

}  // namespace quasifree
