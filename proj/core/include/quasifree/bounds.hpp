#pragma once

#include <limits>
#include <span>
#include <vector>

#include "quasifree/covariance.hpp"
#include "quasifree/model.hpp"
#include "quasifree/types.hpp"

namespace quasifree {

/// Real roots in [0, 2pi) of Omega(p) = a0 + sum_{z=1..R} (a_z e^{ipz} + b_z e^{-ipz}).
///
/// Roots of the degree-2R polynomial u^R Omega are found as companion matrix
/// eigenvalues; those within 1e-7 of the unit circle are mapped back to p,
/// Newton polished and merged when closer than 1e-6. Sorted ascending.
std::vector<double> trig_roots(cplx a0, std::span<const cplx> a, std::span<const cplx> b);

/// Same for the real form c0 + sum_z (A_z cos(zp) + B_z sin(zp)).
std::vector<double> trig_roots_real(double c0, std::span<const double> cos_coeffs,
                                    std::span<const double> sin_coeffs);

/// amplitude * cos(z p + phase); the harmonic order z is the position in the list plus one.
struct Harmonic {
  double amplitude = 0.0;
  double phase = 0.0;
};

/// Phi_t(p) = drift * p + t * Phi(p),  Phi(p) = sum_z a_z cos(z p + phi_z).
class PhaseFunction {
 public:
  PhaseFunction(double drift, double time, std::vector<Harmonic> harmonics);

  /// Phase of G_{x,y}(t): drift x - y and harmonics (2 J_z, 0). J_0 only adds a
  /// global phase and is dropped.
  static PhaseFunction propagator(const HoppingModel& model, int drift, double t);

  /// Phase of f_n(t) = (1/L) sum_s exp(i (omega_{s+n} - omega_s) t + 2 pi i s m / L):
  /// omega_{s+n} - omega_s = -4 sum_z J_z sin(z alpha) sin(z p + z alpha) with
  /// alpha = n pi / L, written as cosines with phase z alpha - pi/2.
  static PhaseFunction band_mixing(const HoppingModel& model, int n, int drift, double t);

  double drift() const { return drift_; }
  double time() const { return time_; }
  int range() const { return static_cast<int>(harmonics_.size()); }
  std::span<const Harmonic> harmonics() const { return harmonics_; }
  /// No non-zero harmonic: the sum is a geometric series.
  bool drift_only() const;

  double value(double p) const;
  /// d^m Phi_t / dp^m, including the drift for m = 1 and the factor t.
  double derivative(int order, double p) const;
  /// d^m Phi / dp^m of the time-free part (no drift, no t).
  double shape_derivative(int order, double p) const;
  /// C^(k)_max = sum_z z^k |a_z|.
  double c_max(int k) const;

 private:
  double drift_;
  double time_;
  std::vector<Harmonic> harmonics_;
};

struct StationaryPoint {
  double p = 0.0;
  /// Minimal kappa >= 1 with Phi^(kappa+a)(p) != 0 (a = 1 for S1, 2 for S2).
  int kappa = 1;
  /// Phi^(kappa+a)(p) of the time-free part.
  double derivative = 0.0;
};

struct StationaryStructure {
  std::vector<StationaryPoint> s1;  ///< roots of Phi_t'
  std::vector<StationaryPoint> s2;  ///< roots of Phi_t''
  int kappa0 = 1;
  /// M = (1/4) min{ min_S1 |Phi^(kappa+1)|, min_S2 |Phi'''|^2 }.
  double m = 0.0;
  /// No point with Phi'' = Phi''' = 0.
  bool generic = true;
};

/// A derivative of order k counts as zero when |Phi^(k)| <= rel_tol * C^(k)_max.
/// Throws DegenerateStructure if no order up to 2R+3 clears the threshold.
StationaryStructure stationary_structure(const PhaseFunction& phi, double rel_tol = 1e-8);

/// Bound |(1/L) sum_k exp(i Phi_t(2 pi k / L))| <= c_sharp * t^-gamma, valid for t0 <= t <= tR.
struct DephasingCertificate {
  double time = 0.0;
  double c_sharp = 0.0;
  /// Constant of the general (non-generic) formula; equals c_sharp when not generic.
  double c_sharp_general = 0.0;
  double gamma = 1.0 / 3.0;
  double t0 = 1.0;
  double tR = 0.0;
  double c0 = 0.0;
  double c1 = 0.0;
  bool generic = true;
  /// Pure drift: the sum is exactly 1 (winding 0 mod L, c_sharp = inf) or 0 (c_sharp = 0).
  bool drift_only = false;
  StationaryStructure structure;

  bool covers(double t) const { return t >= t0 && t <= tR; }
  double bound(double t) const;
};

DephasingCertificate certificate(const PhaseFunction& phi, int size);

/// (1/L) sum_{k=1..L} exp(i Phi_t(2 pi k / L)), summed directly.
cplx exponential_sum(const PhaseFunction& phi, int size);

/// cot(lambda / 4) for a phase sequence whose gaps are monotone and lie in
/// [lambda, 2pi - lambda]; +inf when the sequence does not qualify.
double kusmin_landau_bound(std::span<const double> phases);

struct FnBound {
  double value = 1.0;
  /// n = L: f_L = 1 is the conserved part.
  bool conserved = false;
  /// A certificate applied (value < 1 is possible only then).
  bool certified = false;
  double c_sharp = std::numeric_limits<double>::infinity();
};

/// Bound on |f_n(t)| for drift m. Falls back to 1 outside the certificate
/// window or when c_sharp >= c_th.
FnBound bound_f_n(const HoppingModel& model, int n, int drift, double t,
                  double c_th = std::numeric_limits<double>::infinity());

/// Uniform bound on max_{x,y} |G_{x,y}(t)|: the worst over all drifts of
/// min(1, c_sharp t^-gamma), using 1 for drifts whose window misses t.
/// Throws PreconditionViolated for a flat band, OutsideWindow when t is outside
/// the drift-0 window.
double propagator_bound(const HoppingModel& model, double t);

/// C_sharp(n pi / L) at drift 0 for n = 1..L-1; element n-1 holds n.
std::vector<double> band_constants(const HoppingModel& model);

/// 10 * min_n C_sharp(n pi / L) over the finite constants.
double default_resilience_threshold(const HoppingModel& model);

/// {n in 1..L-1 : C_sharp(n pi / L) >= c_th}
std::vector<int> resilient_set(const HoppingModel& model, double c_th);

struct ResilienceThresholds {
  double c_th = 0.0;
  double c_rs = 1.0;
  double c_nrs = 10.0;
};

ResilienceThresholds default_thresholds(const HoppingModel& model);

struct BandWeight {
  int d = 0;
  double w_res = 0.0;
  double w_ok = 0.0;
};

struct ResilienceReport {
  ResilienceThresholds thresholds;
  std::vector<int> resilient;
  std::vector<BandWeight> bands;
  double max_w_res = 0.0;
  double max_w_ok = 0.0;
  /// max W_res <= c_rs / L and max W_ok <= c_nrs
  bool non_resilient = false;
};

ResilienceReport classify_resilience(const Covariance& gamma, const HoppingModel& model,
                                     const ResilienceThresholds& thresholds);
ResilienceReport classify_resilience(const Covariance& gamma, const HoppingModel& model);

struct EquilibrationBound {
  double value = 0.0;
  /// Bands |d| <= d_xi: sum_{n != L} |X_n| * (bound on |f_n|).
  double near = 0.0;
  /// Bands |d| > d_xi: their initial maxima plus the largest conserved value among them.
  double tail = 0.0;
  /// C_clust / (1 - e^{-1/xi}) * t^-gamma, for reference only.
  double fitted_tail = 0.0;
  double d_xi = 0.0;
  double gamma = 0.0;
  ClusteringFit clustering;
};

/// Upper bound on max_{x,y} |Gamma(t) - Gamma^eq|. Requires a non-resilient
/// report and t in the drift-0 propagator window.
EquilibrationBound equilibration_bound(const Covariance& gamma, const HoppingModel& model, double t,
                                       const ResilienceReport& report);
EquilibrationBound equilibration_bound(const Covariance& gamma, const HoppingModel& model, double t);

}  // namespace quasifree
