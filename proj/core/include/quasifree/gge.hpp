#pragma once

#include <string>
#include <vector>

#include "quasifree/covariance.hpp"
#include "quasifree/model.hpp"

namespace quasifree {

/// Generalized Gibbs ensemble exp(-sum_k eps_k b^dag_k b_k) / Z with mode energies
///
///   eps_k = lambda_0 + 2 sum_{z=1..z_xi} lambda_z cos(2 pi k z / L + eta_z),
///
/// so n_k = 1 / (1 + exp(eps_k)). The 1/L of the current operators is absorbed
/// into lambda, which keeps the multipliers independent of L. A thermal state of
/// a clean model is lambda_0 = beta (J_0 - mu), lambda_z = beta J_z, eta = 0.
struct GGEParams {
  std::vector<double> lambda;
  /// Empty, or one angle per lambda (eta_0 is ignored).
  std::vector<double> eta;

  int z_xi() const { return static_cast<int>(lambda.size()) - 1; }
};

/// n_k at index k mod L.
std::vector<double> gge_occupations(const GGEParams& params, int size);
Covariance gge_covariance(const GGEParams& params, int size);
/// Translation-invariant covariance with the given occupations (index k mod L).
Covariance covariance_from_occupations_k(const std::vector<double>& occupations);

struct GGEFit {
  GGEParams params;
  bool feasible = true;
  bool converged = false;
  int iterations = 0;
  /// |I_z(fit) - I_z(target)| for z = 0..z_xi
  std::vector<double> residuals;
  double max_residual = 0.0;
  std::string message;
};

/// Multipliers reproducing I_0..I_{z_xi} of `targets`, found by damped Newton on
/// the convex dual F(lambda) = (1/L) sum_k ln(1 + e^{-eps_k}) + lambda . T, whose
/// gradient is the current mismatch. Complex targets add a sine partner to each
/// cosine term. Never throws on infeasible or stalled solves; see the flags.
GGEFit fit_gge(const CurrentTable& targets, int z_xi, int size, double tol = 1e-12, int max_iterations = 200);

struct ThermalFit {
  double beta = 0.0;
  double mu = 0.0;
  double residual = 0.0;
  bool boundary_hit = false;
  /// Search box in (ln beta, beta mu).
  double log_beta_min = 0.0, log_beta_max = 0.0, nu_min = 0.0, nu_max = 0.0;
  int grid_points = 0;
  int evaluations = 0;
};

struct ThermalSearch {
  double log_beta_min = -9.0;  // beta ~ 1.2e-4
  double log_beta_max = 4.0;   // beta ~ 55
  double nu_min = -30.0;
  double nu_max = 30.0;
  int grid = 41;
};

/// Minimizes max_norm_distance(target, thermal state of the clean model) over
/// (beta, mu): grid in (ln beta, beta mu), then compass search, first on the
/// Frobenius distance and then on the max norm.
ThermalFit fit_thermal(const Covariance& target, const HoppingModel& model, const ThermalSearch& search = {});

/// Thermal covariance of a clean model via its Fourier diagonalization.
Covariance clean_thermal_covariance(const HoppingModel& model, double beta, double mu);

/// z_xi = ceil(xi ln(C_clust / eps)), floored at 0.
int relevant_range(double c_clust, double xi, double eps);

}  // namespace quasifree
