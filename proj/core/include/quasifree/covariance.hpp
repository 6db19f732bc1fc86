#pragma once

#include <limits>
#include <span>
#include <vector>

#include "quasifree/model.hpp"
#include "quasifree/propagator.hpp"
#include "quasifree/types.hpp"

namespace quasifree {

/// Second moments Gamma_{x,y} = <f^dag_x f_y> of a number-conserving state.
///
/// Construction checks that the matrix is square and Hermitian; the spectral
/// condition 0 <= Gamma <= 1 costs an eigendecomposition and is checked on
/// request by admissibility().
class Covariance {
 public:
  explicit Covariance(ComplexMatrix entries, double hermiticity_tol = 1e-10);

  int size() const { return static_cast<int>(entries_.rows()); }
  const ComplexMatrix& matrix() const { return entries_; }
  /// Indices modulo L.
  cplx operator()(int x, int y) const { return entries_(wrap(x, size()), wrap(y, size())); }
  /// Expected particle number.
  double trace() const { return entries_.trace().real(); }

  struct Admissibility {
    double min_eigenvalue;
    double max_eigenvalue;
    bool admissible;
  };
  Admissibility admissibility(double tol = 1e-10) const;

 private:
  ComplexMatrix entries_;
};

/// Fock state: Gamma = diag(occ), occ_x in {0, 1}.
Covariance from_occupations(std::span<const int> occupations);

/// Grand-canonical state exp(-beta (H - mu N)) / Z of H = sum h_{xy} f^dag_x f_y.
/// Gamma = f(h)^T with f the Fermi function; for real h the transpose is inert.
Covariance thermal_covariance(const RealMatrix& h, double beta, double mu);
Covariance thermal_covariance(const ComplexMatrix& h, double beta, double mu);

/// Gamma(t) = G Gamma G^dag. Circulant propagators act diagonally on the
/// two-dimensional Fourier transform of Gamma.
Covariance evolve(const Covariance& gamma, const Propagator& g);

/// z -> Gamma_{z+d, z}; requires -(L-1)/2 <= d <= L/2.
std::vector<cplx> band(const Covariance& gamma, int d);

/// Gamma_{z+d,z} = sum_{n=1..L} X_n exp(2 pi i n z / L).
struct BandSpectrum {
  int offset;
  /// X_n stored at index n mod L, so element 0 is X_L.
  std::vector<cplx> weights;

  cplx coefficient(int n) const { return weights[wrap(n, static_cast<int>(weights.size()))]; }
  /// X_L = (1/L) sum_z Gamma_{z+d,z}, the conserved part.
  cplx average() const { return weights[0]; }
};

BandSpectrum band_spectrum(const Covariance& gamma, int d);

/// Every band replaced by its average: Gamma^eq_{x,y} = (1/L) sum_z Gamma_{x+z, y+z}.
Covariance equilibrium_covariance(const Covariance& gamma);

/// Infinite-time average under a clean model: Fourier components (k, q) of
/// Gamma survive iff |omega_k - omega_{-q}| <= tol. A negative tol selects
/// 1e-9 times the spectral range.
Covariance dephase(const Covariance& gamma, const HoppingModel& model, double tol = -1.0);

/// Same in an arbitrary real eigenbasis h = V diag(w) V^T.
Covariance dephase(const Covariance& gamma, const Eigensystem& system, double tol = -1.0);
Covariance dephase(const Covariance& gamma, const DisorderedModel& model, double tol = -1.0);

/// Currents I_d = (1/L) sum_x Gamma_{x, x+d}, d = 0..floor(L/2), and their
/// Peierls angles eta_d = arg I_d (0 where I_d vanishes).
struct CurrentTable {
  std::vector<cplx> values;
  std::vector<double> angles;

  int max_distance() const { return static_cast<int>(values.size()) - 1; }
};

CurrentTable currents(const Covariance& gamma);
CurrentTable make_current_table(std::vector<cplx> values);

/// Translation-invariant covariance with Gamma_{x, x+d} = I_d (and I_{-d} = conj I_d).
Covariance circulant_from_currents(const CurrentTable& table, int size);

/// n_k = (1/L) sum_{x,y} exp(2 pi i k (y - x) / L) Gamma_{x,y}, stored at index k mod L.
std::vector<double> momentum_occupations(const Covariance& gamma);

double max_norm_distance(const Covariance& a, const Covariance& b);

/// |Gamma_{x,x+d}| <= C exp(-d / xi), fitted to the band maxima.
struct ClusteringFit {
  double c_clust = 0.0;
  double xi = 0.0;
  /// Bands with maximum above the 1e-12 floor.
  int usable_bands = 0;
  bool reliable = false;
  /// max_x |Gamma_{x,x+d}| for d = 0..floor(L/2).
  std::vector<double> band_maxima;
};

/// Least-squares slope of ln(band max) against d, with the intercept raised
/// until the line lies on or above every fitted point. xi = +inf when the
/// slope is non-negative; a diagonal Gamma gives xi = 0.
ClusteringFit clustering_fit(const Covariance& gamma);

/// Repeated evolution of one initial state under one clean model. Keeps the
/// Fourier representation so each time point costs a single 2D FFT.
class MomentumEvolver {
 public:
  MomentumEvolver(const Covariance& gamma, const HoppingModel& model);

  Covariance at(double t) const;
  /// Gamma^infinity, see dephase().
  Covariance dephased(double tol = -1.0) const;
  /// max_{x,y} |Gamma(t) - Gamma^infinity|.
  double distance_to_dephased(double t, double tol = -1.0) const;

 private:
  ComplexMatrix transformed(double t, bool oscillating_only, double tol) const;
  double resolve_tol(double tol) const;

  int size_;
  std::vector<double> energies_;
  ComplexMatrix momentum_;
};

}  // namespace quasifree
