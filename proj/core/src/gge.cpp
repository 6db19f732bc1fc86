#include "quasifree/gge.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Cholesky>

#include "quasifree/errors.hpp"
#include "quasifree/fft.hpp"

namespace quasifree {

namespace {

double fermi(double eps) { return 1.0 / (1.0 + std::exp(eps)); }

// ln(1 + e^{-x}) without overflow
double softplus_neg(double x) { return x > 0 ? std::log1p(std::exp(-x)) : -x + std::log1p(std::exp(x)); }

}  // namespace

std::vector<double> gge_occupations(const GGEParams& params, int size) {
  if (size < 1) throw PreconditionViolated("gge_occupations: L must be positive");
  if (params.lambda.empty()) throw PreconditionViolated("gge_occupations: need lambda_0");
  if (!params.eta.empty() && params.eta.size() != params.lambda.size()) {
    throw DimensionMismatch("gge_occupations: eta must match lambda");
  }
  std::vector<double> n(static_cast<std::size_t>(size));
  for (int k = 0; k < size; ++k) {
    double eps = params.lambda[0];
    for (int z = 1; z <= params.z_xi(); ++z) {
      const double eta = params.eta.empty() ? 0.0 : params.eta[z];
      eps += 2.0 * params.lambda[z] * std::cos(kTwoPi * k * z / size + eta);
    }
    if (!std::isfinite(eps)) throw PreconditionViolated("gge_occupations: non-finite mode energy");
    n[k] = fermi(eps);
  }
  return n;
}

Covariance covariance_from_occupations_k(const std::vector<double>& occupations) {
  const int L = static_cast<int>(occupations.size());
  // I_d = (1/L) sum_k n_k exp(-2 pi i k d / L) and Gamma_{x, x+d} = I_d.
  std::vector<cplx> c(occupations.begin(), occupations.end());
  fft_inplace(c, FftSign::Forward);
  ComplexMatrix m(L, L);
  for (int y = 0; y < L; ++y)
    for (int x = 0; x < L; ++x) m(x, y) = c[wrap(y - x, L)] / static_cast<double>(L);
  return Covariance(std::move(m));
}

Covariance gge_covariance(const GGEParams& params, int size) {
  return covariance_from_occupations_k(gge_occupations(params, size));
}

GGEFit fit_gge(const CurrentTable& targets, int z_xi, int size, double tol, int max_iterations) {
  const int L = size;
  if (z_xi < 0) throw PreconditionViolated("fit_gge: z_xi must be >= 0");
  if (z_xi > targets.max_distance()) throw PreconditionViolated("fit_gge: not enough target currents");
  if (2 * z_xi >= L) throw PreconditionViolated("fit_gge: z_xi must be below L/2");

  GGEFit fit;
  const double i0 = targets.values[0].real();
  bool complex_targets = false;
  for (int z = 1; z <= z_xi; ++z) complex_targets |= std::abs(targets.values[z].imag()) > 1e-15;

  // Necessary conditions: I_0 = mean n_k, and |I_z| <= min(mean n, mean(1 - n)).
  if (!(i0 > 0.0 && i0 < 1.0)) {
    fit.feasible = false;
    fit.message = "I_0 must lie strictly inside (0, 1)";
  }
  for (int z = 1; z <= z_xi && fit.feasible; ++z) {
    if (std::abs(targets.values[z]) >= std::min(i0, 1.0 - i0)) {
      fit.feasible = false;
      fit.message = "|I_" + std::to_string(z) + "| exceeds min(I_0, 1 - I_0)";
    }
  }
  if (!fit.feasible) {
    fit.params.lambda.assign(static_cast<std::size_t>(z_xi + 1), 0.0);
    return fit;
  }

  // Variables: lambda_0, then a_z (cos) and, for complex targets, b_z (sin).
  const int nv = 1 + z_xi * (complex_targets ? 2 : 1);
  Eigen::MatrixXd basis(L, nv);
  Eigen::VectorXd target(nv);
  target[0] = i0;
  for (int k = 0; k < L; ++k) basis(k, 0) = 1.0;
  for (int z = 1; z <= z_xi; ++z) {
    for (int k = 0; k < L; ++k) basis(k, z) = 2.0 * std::cos(kTwoPi * k * z / L);
    // (1/L) sum_k n_k 2cos = 2 Re I_z, (1/L) sum_k n_k 2sin = -2 Im I_z
    target[z] = 2.0 * targets.values[z].real();
    if (complex_targets) {
      for (int k = 0; k < L; ++k) basis(k, z_xi + z) = 2.0 * std::sin(kTwoPi * k * z / L);
      target[z_xi + z] = -2.0 * targets.values[z].imag();
    }
  }

  auto objective = [&](const Eigen::VectorXd& lam) {
    const Eigen::VectorXd eps = basis * lam;
    double f = 0.0;
    for (int k = 0; k < L; ++k) f += softplus_neg(eps[k]);
    return f / L + lam.dot(target);
  };

  Eigen::VectorXd lam = Eigen::VectorXd::Zero(nv);
  // Start at the right filling.
  lam[0] = std::log((1.0 - i0) / i0);
  double f = objective(lam);
  Eigen::VectorXd grad(nv);
  for (fit.iterations = 0; fit.iterations < max_iterations; ++fit.iterations) {
    const Eigen::VectorXd eps = basis * lam;
    Eigen::VectorXd n(L), w(L);
    for (int k = 0; k < L; ++k) {
      n[k] = fermi(eps[k]);
      w[k] = n[k] * (1.0 - n[k]);
    }
    grad = target - basis.transpose() * n / L;
    if (grad.cwiseAbs().maxCoeff() <= tol) {
      fit.converged = true;
      break;
    }
    Eigen::MatrixXd hess = basis.transpose() * w.asDiagonal() * basis / L;
    hess.diagonal().array() += 1e-14 * std::max(1.0, hess.diagonal().maxCoeff());
    const Eigen::VectorXd step = -hess.ldlt().solve(grad);
    auto gradient_at = [&](const Eigen::VectorXd& at) {
      const Eigen::VectorXd e = basis * at;
      Eigen::VectorXd occ(L);
      for (int k = 0; k < L; ++k) occ[k] = fermi(e[k]);
      return Eigen::VectorXd(target - basis.transpose() * occ / L);
    };
    double s = 1.0;
    double f_new = objective(lam + step);
    // Close to the optimum the decrease in F is below its rounding; a full step
    // that halves the gradient is taken regardless.
    if (!(f_new <= f + 1e-4 * grad.dot(step)) && gradient_at(lam + step).norm() < 0.5 * grad.norm()) {
      lam += step;
      f = f_new;
      continue;
    }
    while (!(f_new <= f + 1e-4 * s * grad.dot(step)) && s > 1e-12) {
      s *= 0.5;
      f_new = objective(lam + s * step);
    }
    if (s <= 1e-12) {
      fit.message = "line search stalled";
      break;
    }
    lam += s * step;
    f = f_new;
    if (lam.cwiseAbs().maxCoeff() > 1e4) {
      fit.feasible = false;
      fit.message = "multipliers diverge; targets on or outside the realizable boundary";
      break;
    }
  }
  if (!fit.converged && fit.message.empty()) fit.message = "no convergence within the iteration limit";

  fit.params.lambda.assign(static_cast<std::size_t>(z_xi + 1), 0.0);
  fit.params.lambda[0] = lam[0];
  if (complex_targets) {
    fit.params.eta.assign(static_cast<std::size_t>(z_xi + 1), 0.0);
    for (int z = 1; z <= z_xi; ++z) {
      // a cos x + b sin x = lambda cos(x + eta) with a = lambda cos eta, b = -lambda sin eta
      const double a = lam[z], b = lam[z_xi + z];
      fit.params.lambda[z] = std::hypot(a, b);
      fit.params.eta[z] = std::atan2(-b, a);
    }
  } else {
    for (int z = 1; z <= z_xi; ++z) fit.params.lambda[z] = lam[z];
  }

  const auto achieved = currents(gge_covariance(fit.params, L));
  fit.residuals.resize(static_cast<std::size_t>(z_xi + 1));
  for (int z = 0; z <= z_xi; ++z) {
    fit.residuals[z] = std::abs(achieved.values[z] - targets.values[z]);
    fit.max_residual = std::max(fit.max_residual, fit.residuals[z]);
  }
  return fit;
}

Covariance clean_thermal_covariance(const HoppingModel& model, double beta, double mu) {
  if (!(beta > 0.0)) throw PreconditionViolated("clean_thermal_covariance: beta must be > 0");
  const auto w = mode_energies(model);
  std::vector<double> n(w.size());
  for (std::size_t k = 0; k < w.size(); ++k) n[k] = fermi(beta * (w[k] - mu));
  return covariance_from_occupations_k(n);
}

namespace {

// Distances of `target` to the circulant with first row given by currents c_d = Gamma_{x, x+d}.
struct Distances {
  double max_norm;
  double frobenius;
};

Distances circulant_distance(const ComplexMatrix& target, const std::vector<cplx>& row) {
  const int L = static_cast<int>(row.size());
  Distances d{0.0, 0.0};
  for (int y = 0; y < L; ++y)
    for (int x = 0; x < L; ++x) {
      const double e = std::norm(target(x, y) - row[wrap(y - x, L)]);
      d.max_norm = std::max(d.max_norm, e);
      d.frobenius += e;
    }
  d.max_norm = std::sqrt(d.max_norm);
  d.frobenius = std::sqrt(d.frobenius);
  return d;
}

}  // namespace

ThermalFit fit_thermal(const Covariance& target, const HoppingModel& model, const ThermalSearch& search) {
  const int L = model.size();
  if (target.size() != L) throw DimensionMismatch("fit_thermal: model and covariance differ in L");
  if (search.grid < 2 || !(search.log_beta_max > search.log_beta_min) || !(search.nu_max > search.nu_min)) {
    throw PreconditionViolated("fit_thermal: empty search box");
  }
  const auto w = mode_energies(model);
  ThermalFit fit;
  fit.log_beta_min = search.log_beta_min;
  fit.log_beta_max = search.log_beta_max;
  fit.nu_min = search.nu_min;
  fit.nu_max = search.nu_max;
  fit.grid_points = search.grid * search.grid;

  std::vector<cplx> row(static_cast<std::size_t>(L));
  auto evaluate = [&](double lb, double nu) {
    ++fit.evaluations;
    const double beta = std::exp(lb);
    for (int k = 0; k < L; ++k) row[k] = fermi(beta * w[k] - nu);
    fft_inplace(row, FftSign::Forward);
    for (auto& v : row) v /= static_cast<double>(L);
    return circulant_distance(target.matrix(), row);
  };

  double best_lb = search.log_beta_min, best_nu = search.nu_min;
  double best = std::numeric_limits<double>::infinity();
  const int g = search.grid;
  for (int i = 0; i < g; ++i) {
    const double lb = search.log_beta_min + (search.log_beta_max - search.log_beta_min) * i / (g - 1);
    for (int j = 0; j < g; ++j) {
      const double nu = search.nu_min + (search.nu_max - search.nu_min) * j / (g - 1);
      const double v = evaluate(lb, nu).max_norm;
      if (v < best) {
        best = v;
        best_lb = lb;
        best_nu = nu;
      }
    }
  }

  auto compass = [&](bool use_max, double step_lb, double step_nu) {
    auto cost = [&](double lb, double nu) {
      const auto d = evaluate(lb, nu);
      return use_max ? d.max_norm : d.frobenius;
    };
    double current = cost(best_lb, best_nu);
    static constexpr int kDirs[8][2] = {{1, 0}, {-1, 0}, {0, 1}, {0, -1}, {1, 1}, {1, -1}, {-1, 1}, {-1, -1}};
    while (step_lb > 1e-10 || step_nu > 1e-10) {
      bool moved = false;
      for (const auto& dir : kDirs) {
        const double lb = std::clamp(best_lb + dir[0] * step_lb, search.log_beta_min, search.log_beta_max);
        const double nu = std::clamp(best_nu + dir[1] * step_nu, search.nu_min, search.nu_max);
        const double v = cost(lb, nu);
        if (v < current) {
          current = v;
          best_lb = lb;
          best_nu = nu;
          moved = true;
          break;
        }
      }
      if (!moved) {
        step_lb *= 0.5;
        step_nu *= 0.5;
      }
    }
  };
  const double cell_lb = (search.log_beta_max - search.log_beta_min) / (g - 1);
  const double cell_nu = (search.nu_max - search.nu_min) / (g - 1);
  compass(false, cell_lb, cell_nu);
  compass(true, cell_lb / 4, cell_nu / 4);

  fit.beta = std::exp(best_lb);
  fit.mu = best_nu / fit.beta;
  fit.residual = evaluate(best_lb, best_nu).max_norm;
  const double edge_lb = 1e-6 * (search.log_beta_max - search.log_beta_min);
  const double edge_nu = 1e-6 * (search.nu_max - search.nu_min);
  fit.boundary_hit = best_lb - search.log_beta_min < edge_lb || search.log_beta_max - best_lb < edge_lb ||
                     best_nu - search.nu_min < edge_nu || search.nu_max - best_nu < edge_nu;
  return fit;
}

int relevant_range(double c_clust, double xi, double eps) {
  if (!(eps > 0.0) || !(c_clust > 0.0)) throw PreconditionViolated("relevant_range: need C_clust > 0 and eps > 0");
  if (!(xi >= 0.0)) throw PreconditionViolated("relevant_range: xi must be >= 0");
  const double z = std::ceil(xi * std::log(c_clust / eps));
  return z > 0.0 ? static_cast<int>(z) : 0;
}

}  // namespace quasifree
