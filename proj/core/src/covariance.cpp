#include "quasifree/covariance.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/Eigenvalues>

#include "quasifree/errors.hpp"
#include "quasifree/fft.hpp"

namespace quasifree {

Covariance::Covariance(ComplexMatrix entries, double hermiticity_tol) {
  if (entries.rows() != entries.cols()) throw DimensionMismatch("Covariance: matrix must be square");
  if (entries.rows() == 0) throw PreconditionViolated("Covariance: empty matrix");
  const double scale = std::max(1.0, entries.cwiseAbs().maxCoeff());
  const double dev = (entries - entries.adjoint()).cwiseAbs().maxCoeff();
  if (!(dev <= hermiticity_tol * scale)) {
    throw PreconditionViolated("Covariance: not Hermitian (deviation " + std::to_string(dev) + ")");
  }
  entries_ = 0.5 * (entries + entries.adjoint());
}

Covariance::Admissibility Covariance::admissibility(double tol) const {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(entries_, Eigen::EigenvaluesOnly);
  const auto& w = solver.eigenvalues();
  Admissibility a{w.minCoeff(), w.maxCoeff(), false};
  a.admissible = a.min_eigenvalue >= -tol && a.max_eigenvalue <= 1.0 + tol;
  return a;
}

Covariance from_occupations(std::span<const int> occupations) {
  const int L = static_cast<int>(occupations.size());
  ComplexMatrix m = ComplexMatrix::Zero(L, L);
  for (int x = 0; x < L; ++x) {
    if (occupations[x] != 0 && occupations[x] != 1) {
      throw PreconditionViolated("from_occupations: entries must be 0 or 1");
    }
    m(x, x) = occupations[x];
  }
  return Covariance(std::move(m));
}

namespace {

double fermi(double beta, double energy, double mu) { return 1.0 / (1.0 + std::exp(beta * (energy - mu))); }

void check_beta(double beta) {
  if (!(beta > 0.0) || !std::isfinite(beta)) throw PreconditionViolated("thermal_covariance: beta must be > 0");
}

}  // namespace

Covariance thermal_covariance(const RealMatrix& h, double beta, double mu) {
  check_beta(beta);
  if (h.rows() != h.cols()) throw DimensionMismatch("thermal_covariance: h must be square");
  if ((h - h.transpose()).cwiseAbs().maxCoeff() > 1e-12 * std::max(1.0, h.cwiseAbs().maxCoeff())) {
    throw PreconditionViolated("thermal_covariance: h must be symmetric");
  }
  Eigen::SelfAdjointEigenSolver<RealMatrix> solver(h);
  const RealVector n = solver.eigenvalues().unaryExpr([&](double w) { return fermi(beta, w, mu); });
  const RealMatrix& v = solver.eigenvectors();
  const RealMatrix gamma = v * n.asDiagonal() * v.transpose();
  return Covariance(gamma.cast<cplx>());
}

Covariance thermal_covariance(const ComplexMatrix& h, double beta, double mu) {
  check_beta(beta);
  if (h.rows() != h.cols()) throw DimensionMismatch("thermal_covariance: h must be square");
  if ((h - h.adjoint()).cwiseAbs().maxCoeff() > 1e-12 * std::max(1.0, h.cwiseAbs().maxCoeff())) {
    throw PreconditionViolated("thermal_covariance: h must be Hermitian");
  }
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(h);
  const RealVector n = solver.eigenvalues().unaryExpr([&](double w) { return fermi(beta, w, mu); });
  const ComplexMatrix& u = solver.eigenvectors();
  // <f^dag_x f_y> = sum_k conj(U_xk) U_yk n_k
  const ComplexMatrix gamma = (u * n.cast<cplx>().asDiagonal() * u.adjoint()).transpose();
  return Covariance(gamma);
}

Covariance evolve(const Covariance& gamma, const Propagator& g) {
  if (gamma.size() != g.size()) throw DimensionMismatch("evolve: propagator and covariance differ in L");
  if (g.kind() == Propagator::Kind::Dense) {
    return Covariance(g.matrix() * gamma.matrix() * g.matrix().adjoint());
  }
  const int L = gamma.size();
  const auto phases = g.mode_phases();
  ComplexMatrix m = gamma.matrix();
  fft2_inplace(m, FftSign::Forward);
  for (int q = 0; q < L; ++q) {
    const cplx right = std::conj(phases[wrap(-q, L)]);
    for (int k = 0; k < L; ++k) m(k, q) *= phases[k] * right;
  }
  fft2_inplace(m, FftSign::Backward);
  m /= static_cast<double>(L) * L;
  return Covariance(std::move(m));
}

namespace {

void check_band_offset(int d, int L) {
  if (d < -(L - 1) / 2 || d > L / 2) {
    throw PreconditionViolated("band offset " + std::to_string(d) + " outside [-(L-1)/2, L/2]");
  }
}

// a_d = (1/L) sum_z Gamma_{z+d, z} for d = 0..L-1
std::vector<cplx> band_averages(const Covariance& gamma) {
  const int L = gamma.size();
  const auto& m = gamma.matrix();
  std::vector<cplx> a(static_cast<std::size_t>(L), cplx(0.0));
  for (int z = 0; z < L; ++z)
    for (int x = 0; x < L; ++x) a[wrap(x - z, L)] += m(x, z);
  for (auto& v : a) v /= static_cast<double>(L);
  return a;
}

}  // namespace

std::vector<cplx> band(const Covariance& gamma, int d) {
  const int L = gamma.size();
  check_band_offset(d, L);
  std::vector<cplx> b(static_cast<std::size_t>(L));
  for (int z = 0; z < L; ++z) b[z] = gamma(z + d, z);
  return b;
}

BandSpectrum band_spectrum(const Covariance& gamma, int d) {
  auto x = band(gamma, d);
  fft_inplace(x, FftSign::Forward);
  const double inv = 1.0 / gamma.size();
  for (auto& v : x) v *= inv;
  return BandSpectrum{d, std::move(x)};
}

Covariance equilibrium_covariance(const Covariance& gamma) {
  const int L = gamma.size();
  const auto a = band_averages(gamma);
  ComplexMatrix m(L, L);
  for (int y = 0; y < L; ++y)
    for (int x = 0; x < L; ++x) m(x, y) = a[wrap(x - y, L)];
  return Covariance(std::move(m));
}

Covariance dephase(const Covariance& gamma, const HoppingModel& model, double tol) {
  if (gamma.size() != model.size()) throw DimensionMismatch("dephase: model and covariance differ in L");
  return MomentumEvolver(gamma, model).dephased(tol);
}

Covariance dephase(const Covariance& gamma, const Eigensystem& system, double tol) {
  const int L = gamma.size();
  if (system.values.size() != L || system.vectors.rows() != L) {
    throw DimensionMismatch("dephase: eigensystem and covariance differ in L");
  }
  const auto& w = system.values;
  if (tol < 0.0) tol = 1e-9 * (w.maxCoeff() - w.minCoeff());
  const ComplexMatrix v = system.vectors.cast<cplx>();
  ComplexMatrix rotated = v.transpose() * gamma.matrix() * v;
  for (int q = 0; q < L; ++q)
    for (int k = 0; k < L; ++k)
      if (std::abs(w[k] - w[q]) > tol) rotated(k, q) = 0.0;
  return Covariance(v * rotated * v.transpose());
}

Covariance dephase(const Covariance& gamma, const DisorderedModel& model, double tol) {
  return dephase(gamma, model.eigensystem(), tol);
}

CurrentTable make_current_table(std::vector<cplx> values) {
  CurrentTable t;
  t.angles.reserve(values.size());
  for (const auto& v : values) t.angles.push_back(v == cplx(0.0) ? 0.0 : std::arg(v));
  t.values = std::move(values);
  return t;
}

CurrentTable currents(const Covariance& gamma) {
  const int L = gamma.size();
  const auto a = band_averages(gamma);
  std::vector<cplx> values(static_cast<std::size_t>(L / 2 + 1));
  // (1/L) sum_x Gamma_{x, x+d} = a_{-d}
  for (int d = 0; d <= L / 2; ++d) values[d] = a[wrap(-d, L)];
  values[0] = values[0].real();
  return make_current_table(std::move(values));
}

Covariance circulant_from_currents(const CurrentTable& table, int size) {
  const int L = size;
  ComplexMatrix m = ComplexMatrix::Zero(L, L);
  const int dmax = std::min(table.max_distance(), L / 2);
  for (int d = 0; d <= dmax; ++d) {
    cplx v = table.values[d];
    if (d == 0 || 2 * d == L) v = v.real();
    for (int x = 0; x < L; ++x) {
      m(x, wrap(x + d, L)) = v;
      m(wrap(x + d, L), x) = std::conj(v);
    }
  }
  return Covariance(std::move(m));
}

std::vector<double> momentum_occupations(const Covariance& gamma) {
  const int L = gamma.size();
  const auto a = band_averages(gamma);
  // n_k = sum_d exp(2 pi i k d / L) (1/L) sum_x Gamma_{x,x+d}, and the inner average is a_{-d}.
  std::vector<cplx> c(static_cast<std::size_t>(L));
  for (int d = 0; d < L; ++d) c[d] = a[wrap(-d, L)];
  fft_inplace(c, FftSign::Backward);
  std::vector<double> n(static_cast<std::size_t>(L));
  for (int k = 0; k < L; ++k) n[k] = c[k].real();
  return n;
}

double max_norm_distance(const Covariance& a, const Covariance& b) {
  if (a.size() != b.size()) throw DimensionMismatch("max_norm_distance: sizes differ");
  return (a.matrix() - b.matrix()).cwiseAbs().maxCoeff();
}

ClusteringFit clustering_fit(const Covariance& gamma) {
  const int L = gamma.size();
  ClusteringFit fit;
  fit.band_maxima.assign(static_cast<std::size_t>(L / 2 + 1), 0.0);
  for (int d = 0; d <= L / 2; ++d)
    for (int x = 0; x < L; ++x) fit.band_maxima[d] = std::max(fit.band_maxima[d], std::abs(gamma(x, x + d)));

  std::vector<double> ds, ys;
  for (int d = 0; d <= L / 2; ++d) {
    if (fit.band_maxima[d] > 1e-12) {
      ds.push_back(d);
      ys.push_back(std::log(fit.band_maxima[d]));
    }
  }
  fit.usable_bands = static_cast<int>(ds.size());
  fit.reliable = fit.usable_bands >= 3;
  if (ds.empty()) return fit;  // Gamma = 0
  if (ds.size() == 1 && ds[0] == 0.0) {
    // ultralocal
    fit.c_clust = fit.band_maxima[0];
    fit.xi = 0.0;
    return fit;
  }
  if (ds.size() == 1) {
    fit.c_clust = std::exp(ys[0]);
    fit.xi = std::numeric_limits<double>::infinity();
    return fit;
  }

  const double n = static_cast<double>(ds.size());
  double md = 0.0, my = 0.0;
  for (std::size_t i = 0; i < ds.size(); ++i) {
    md += ds[i];
    my += ys[i];
  }
  md /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < ds.size(); ++i) {
    sxy += (ds[i] - md) * (ys[i] - my);
    sxx += (ds[i] - md) * (ds[i] - md);
  }
  const double slope = sxy / sxx;
  double intercept = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < ds.size(); ++i) intercept = std::max(intercept, ys[i] - slope * ds[i]);
  fit.c_clust = std::exp(intercept);
  fit.xi = slope < 0.0 ? -1.0 / slope : std::numeric_limits<double>::infinity();
  return fit;
}

MomentumEvolver::MomentumEvolver(const Covariance& gamma, const HoppingModel& model)
    : size_(gamma.size()), energies_(mode_energies(model)), momentum_(gamma.matrix()) {
  if (gamma.size() != model.size()) throw DimensionMismatch("MomentumEvolver: model and covariance differ in L");
  fft2_inplace(momentum_, FftSign::Forward);
}

double MomentumEvolver::resolve_tol(double tol) const {
  if (tol >= 0.0) return tol;
  const auto [lo, hi] = std::minmax_element(energies_.begin(), energies_.end());
  return 1e-9 * (*hi - *lo);
}

ComplexMatrix MomentumEvolver::transformed(double t, bool oscillating_only, double tol) const {
  const int L = size_;
  ComplexMatrix m = momentum_;
  for (int q = 0; q < L; ++q) {
    const double right = energies_[wrap(-q, L)];
    for (int k = 0; k < L; ++k) {
      const double diff = energies_[k] - right;
      if (oscillating_only && std::abs(diff) <= tol) {
        m(k, q) = 0.0;
      } else {
        m(k, q) *= std::polar(1.0, diff * t);
      }
    }
  }
  fft2_inplace(m, FftSign::Backward);
  m /= static_cast<double>(L) * L;
  return m;
}

Covariance MomentumEvolver::at(double t) const { return Covariance(transformed(t, false, 0.0)); }

Covariance MomentumEvolver::dephased(double tol) const {
  tol = resolve_tol(tol);
  const int L = size_;
  ComplexMatrix m = momentum_;
  for (int q = 0; q < L; ++q) {
    const double right = energies_[wrap(-q, L)];
    for (int k = 0; k < L; ++k)
      if (std::abs(energies_[k] - right) > tol) m(k, q) = 0.0;
  }
  fft2_inplace(m, FftSign::Backward);
  m /= static_cast<double>(L) * L;
  return Covariance(std::move(m));
}

double MomentumEvolver::distance_to_dephased(double t, double tol) const {
  return transformed(t, true, resolve_tol(tol)).cwiseAbs().maxCoeff();
}

}  // namespace quasifree
