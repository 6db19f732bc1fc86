#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "quasifree/model.hpp"

namespace quasifree {

enum class Experiment { AndersonQuench, Cdw, Superlattice, Custom };

struct ModelBlock {
  int L = 0;
  std::vector<double> J;
  /// Disorder half-width; absent for a clean model.
  std::optional<double> w;
  /// Interval for one-sided disorder, e.g. [0, w]. Defaults to [-w, w].
  std::optional<double> lo, hi;
  std::uint64_t seed = 0;
  /// Explicit potentials; override sampling.
  std::optional<std::vector<double>> xi;
};

struct StateBlock {
  enum class Kind { Thermal, Occupations, Cdw, File };
  Kind kind = Kind::Thermal;
  double beta = 1.0;
  double mu = 0.0;
  std::vector<int> occupations;
  std::string path;
};

struct TimeBlock {
  double t_min = 0.5;
  /// Absent: the drift-0 recurrence time of the post-quench model.
  std::optional<double> t_max;
  int count = 40;
  bool logarithmic = true;
};

struct ThresholdBlock {
  /// Absent: 10 * min_n C_sharp(n pi / L).
  std::optional<double> c_th;
  double c_rs = 1.0;
  double c_nrs = 10.0;
  /// Absent: 1e-9 * spectral range.
  std::optional<double> dephase_tol;
  /// Superlattice current tolerance, in units of 1/L.
  double current_c = 5.0;
};

struct RunConfig {
  Experiment experiment = Experiment::Custom;
  ModelBlock model;
  /// Post-quench couplings; absent: the clean part of `model`.
  std::optional<std::vector<double>> quench_J;
  StateBlock state;
  TimeBlock time;
  ThresholdBlock thresholds;
  /// Power-law window; absent upper end: tR / 3.
  double fit_lo = 5.0;
  std::optional<double> fit_hi;
  std::vector<double> snapshots;
  std::string output = "run";
  std::uint64_t seed = 0;
};

/// JSON config. Unknown keys are rejected; missing keys take the defaults above.
/// Throws ConfigError.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::filesystem::path& path);

/// Config with every default written out.
std::string config_to_json(const RunConfig& config);

std::string experiment_name(Experiment e);

/// Clean model from the model block (disorder ignored).
HoppingModel clean_model(const ModelBlock& block);
/// Disordered model from the model block (w = 0 when absent).
DisorderedModel disordered_model(const ModelBlock& block);

/// Output directory: `output`, relative to $QUASIFREE_OUTPUT_ROOT when set.
std::filesystem::path output_directory(const RunConfig& config);

}  // namespace quasifree
