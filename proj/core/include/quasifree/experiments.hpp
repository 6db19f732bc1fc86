#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "quasifree/bounds.hpp"
#include "quasifree/config.hpp"
#include "quasifree/covariance.hpp"
#include "quasifree/gge.hpp"
#include "quasifree/power_law.hpp"

namespace quasifree {

/// Library version recorded in manifests.
std::string version();

/// Drift-0 recurrence time of a clean model; +inf for a flat band.
double recurrence_time(const HoppingModel& model);

/// Model the state is evolved with: quench.J if given, otherwise the clean part of model.J.
HoppingModel post_quench_model(const RunConfig& config);

/// Initial covariance from the state block. A thermal state uses the disordered
/// model when model.disorder is set.
Covariance initial_covariance(const RunConfig& config);

/// diag(1, 0, 1, 0, ...); odd L ends with two neighbouring particles.
Covariance charge_density_wave(int size);

/// Embeds Gamma on L sites into 2L sites: Gamma'(2x, 2y) = Gamma(x, y), zero elsewhere.
Covariance embed_sublattice(const Covariance& gamma);

struct QuenchResult {
  std::vector<double> times;
  /// max-norm distance of Gamma(t) to Gamma^infinity
  std::vector<double> distances;
  double recurrence_time = 0.0;
  double fit_lo = 0.0;
  double fit_hi = 0.0;
  std::optional<PowerLawFit> fit;
  std::string fit_message;
  ThermalFit thermal;
  Covariance initial{ComplexMatrix::Zero(1, 1)};
  Covariance steady{ComplexMatrix::Zero(1, 1)};
  std::vector<double> potentials;
  std::vector<std::string> failures;
};

/// Prepares the initial state (thermal Anderson state by default), evolves it under
/// the clean post-quench model and compares with the dephased state.
QuenchResult run_anderson_quench(const RunConfig& config);

struct CdwResult {
  std::vector<double> times;
  std::vector<double> distance_to_initial;
  std::vector<double> distance_to_equilibrium;
  std::vector<double> snapshot_times;
  std::vector<Covariance> snapshots;
  Covariance initial{ComplexMatrix::Zero(1, 1)};
  Covariance equilibrium{ComplexMatrix::Zero(1, 1)};
  /// max |Gamma^eq - 1/2|
  double equilibrium_deviation_from_half = 0.0;
  ResilienceReport report;
  /// Every occupied band frequency n is a shift symmetry of the spectrum.
  bool stationary_expected = false;
  double max_stationary_deviation = 0.0;
  /// Largest distance to Gamma^eq per decade [10^k, 10^(k+1)) of the grid, inside the window.
  std::vector<double> decade_starts;
  std::vector<double> decade_maxima;
  bool relaxing = false;
  std::vector<std::string> failures;
};

CdwResult run_cdw(const RunConfig& config);

struct SuperlatticeResult {
  CurrentTable before;
  CurrentTable after;
  Covariance initial{ComplexMatrix::Zero(1, 1)};
  Covariance embedded{ComplexMatrix::Zero(1, 1)};
  Covariance steady{ComplexMatrix::Zero(1, 1)};
  ThermalFit thermal_before;
  ThermalFit thermal_after;
  double i1 = 0.0;
  double i2_deviation = 0.0;
  double tolerance = 0.0;
  /// Mean steady-state density on the initially empty sites.
  double empty_sublattice_density = 0.0;
  double filling = 0.0;
  std::vector<std::string> failures;
};

SuperlatticeResult run_superlattice(const RunConfig& config);

/// Runs the configured experiment, writes CSV files and manifest.json into
/// output_directory(config) and returns that directory. Throws
/// PostConditionFailed after writing when a physical check failed.
std::filesystem::path simulate(const RunConfig& config);

struct ConventionCheck {
  std::string name;
  double deviation = 0.0;
  double tolerance = 0.0;
  bool passed = false;
};

/// Sign and ordering conventions checked against the Fock-space oracle.
std::vector<ConventionCheck> convention_checks();

}  // namespace quasifree
