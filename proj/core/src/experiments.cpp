#include "quasifree/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <limits>
#include <map>
#include <set>
#include <sstream>

#include <json.hpp>

#include "quasifree/covariance_io.hpp"
#include "quasifree/errors.hpp"
#include "quasifree/propagator.hpp"

#ifndef QUASIFREE_VERSION
#define QUASIFREE_VERSION "0.0.0"
#endif

namespace quasifree {

namespace {

using nlohmann::json;

constexpr double kInf = std::numeric_limits<double>::infinity();

bool has_disorder(const ModelBlock& block) { return block.w || block.xi || block.lo || block.hi; }

ResilienceThresholds thresholds_for(const RunConfig& config, const HoppingModel& model) {
  ResilienceThresholds th;
  th.c_th = config.thresholds.c_th ? *config.thresholds.c_th : default_resilience_threshold(model);
  th.c_rs = config.thresholds.c_rs;
  th.c_nrs = config.thresholds.c_nrs;
  return th;
}

std::vector<double> grid_for(const RunConfig& config, double recurrence) {
  const double t_max = config.time.t_max.value_or(recurrence);
  if (!std::isfinite(t_max)) throw ConfigError("time.t_max is required when the model has no recurrence time");
  if (!(t_max > config.time.t_min)) {
    throw ConfigError("time grid: t_max = " + std::to_string(t_max) + " does not exceed t_min");
  }
  return time_grid(config.time.t_min, t_max, config.time.count, config.time.logarithmic);
}

std::ofstream open_csv(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  out << std::setprecision(17);
  return out;
}

void write_currents_csv(const std::filesystem::path& path, const CurrentTable& table) {
  auto out = open_csv(path);
  out << "d,re,im,abs,angle\n";
  for (int d = 0; d <= table.max_distance(); ++d) {
    const cplx v = table.values[d];
    out << d << ',' << v.real() << ',' << v.imag() << ',' << std::abs(v) << ',' << table.angles[d] << '\n';
  }
}

json to_json(const ThermalFit& f) {
  return {{"beta", f.beta},
          {"mu", f.mu},
          {"residual", f.residual},
          {"boundary_hit", f.boundary_hit},
          {"search_box", {{"log_beta", {f.log_beta_min, f.log_beta_max}}, {"beta_mu", {f.nu_min, f.nu_max}}}},
          {"grid_points", f.grid_points},
          {"evaluations", f.evaluations}};
}

json to_json(const ResilienceReport& r) {
  json bands = json::array();
  for (const auto& b : r.bands) bands.push_back({{"d", b.d}, {"w_res", b.w_res}, {"w_ok", b.w_ok}});
  return {{"verdict", r.non_resilient ? "NON-RESILIENT" : "RESILIENT"},
          {"C_th", r.thresholds.c_th},
          {"c_rs", r.thresholds.c_rs},
          {"c_nrs", r.thresholds.c_nrs},
          {"resilient_set", r.resilient},
          {"max_w_res", r.max_w_res},
          {"max_w_ok", r.max_w_ok},
          {"bands", bands}};
}

std::string utc_now() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::ostringstream s;
  s << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return s.str();
}

}  // namespace

std::string version() { return QUASIFREE_VERSION; }

double recurrence_time(const HoppingModel& model) {
  if (model.is_flat()) return kInf;
  return certificate(PhaseFunction::propagator(model, 0, 1.0), model.size()).tR;
}

HoppingModel post_quench_model(const RunConfig& config) {
  return HoppingModel(config.model.L, config.quench_J.value_or(config.model.J));
}

Covariance charge_density_wave(int size) {
  std::vector<int> occ(static_cast<std::size_t>(size));
  for (int x = 0; x < size; ++x) occ[x] = x % 2 == 0 ? 1 : 0;
  return from_occupations(occ);
}

Covariance embed_sublattice(const Covariance& gamma) {
  const int L = gamma.size();
  ComplexMatrix m = ComplexMatrix::Zero(2 * L, 2 * L);
  for (int x = 0; x < L; ++x)
    for (int y = 0; y < L; ++y) m(2 * x, 2 * y) = gamma.matrix()(x, y);
  return Covariance(std::move(m));
}

Covariance initial_covariance(const RunConfig& config) {
  const auto& s = config.state;
  switch (s.kind) {
    case StateBlock::Kind::Thermal:
      if (has_disorder(config.model)) {
        return thermal_covariance(coupling_matrix(disordered_model(config.model)), s.beta, s.mu);
      }
      return clean_thermal_covariance(clean_model(config.model), s.beta, s.mu);
    case StateBlock::Kind::Occupations:
      return from_occupations(s.occupations);
    case StateBlock::Kind::Cdw:
      return charge_density_wave(config.model.L);
    case StateBlock::Kind::File: {
      Covariance g = read_covariance(s.path);
      if (g.size() != config.model.L) {
        throw ConfigError("state.path holds L = " + std::to_string(g.size()) + ", model.L = " +
                          std::to_string(config.model.L));
      }
      return g;
    }
  }
  throw ConfigError("state.kind: unsupported");
}

QuenchResult run_anderson_quench(const RunConfig& config) {
  QuenchResult r;
  const HoppingModel post = post_quench_model(config);
  if (has_disorder(config.model)) {
    const auto model = disordered_model(config.model);
    r.potentials.assign(model.potentials().begin(), model.potentials().end());
  }
  r.initial = initial_covariance(config);
  r.recurrence_time = recurrence_time(post);
  r.times = grid_for(config, r.recurrence_time);

  const double tol = config.thresholds.dephase_tol.value_or(-1.0);
  MomentumEvolver evolver(r.initial, post);
  r.steady = evolver.dephased(tol);
  r.distances.reserve(r.times.size());
  for (double t : r.times) r.distances.push_back(evolver.distance_to_dephased(t, tol));

  r.fit_lo = config.fit_lo;
  r.fit_hi = config.fit_hi.value_or(r.recurrence_time / 3.0);
  try {
    r.fit = power_law_fit(r.times, r.distances, r.fit_lo, r.fit_hi);
  } catch (const Error& e) {
    r.fit_message = e.what();
  }
  r.thermal = fit_thermal(r.steady, post);

  // Dephasing keeps every n_k, hence the particle number.
  const double drift = std::abs(r.steady.trace() - r.initial.trace());
  if (drift > 1e-8 * std::max(1.0, r.initial.trace())) {
    r.failures.push_back("particle number not conserved by dephasing (" + std::to_string(drift) + ")");
  }
  return r;
}

CdwResult run_cdw(const RunConfig& config) {
  CdwResult r;
  const HoppingModel model = post_quench_model(config);
  const int L = model.size();
  r.initial = charge_density_wave(L);
  r.equilibrium = equilibrium_covariance(r.initial);
  r.equilibrium_deviation_from_half =
      (r.equilibrium.matrix() - 0.5 * ComplexMatrix::Identity(L, L)).cwiseAbs().maxCoeff();
  r.report = classify_resilience(r.initial, model, thresholds_for(config, model));

  const auto shifts = shift_symmetries(model);
  const std::set<int> symmetric(shifts.begin(), shifts.end());
  r.stationary_expected = true;
  for (int d = -(L - 1) / 2; d <= L / 2 && r.stationary_expected; ++d) {
    const auto spec = band_spectrum(r.initial, d);
    for (int n = 1; n < L; ++n) {
      if (std::abs(spec.coefficient(n)) > 1e-12 && !symmetric.count(n)) {
        r.stationary_expected = false;
        break;
      }
    }
  }

  r.times = grid_for(config, recurrence_time(model));
  MomentumEvolver evolver(r.initial, model);
  for (double t : r.times) {
    const Covariance g = evolver.at(t);
    r.distance_to_initial.push_back(max_norm_distance(g, r.initial));
    r.distance_to_equilibrium.push_back(max_norm_distance(g, r.equilibrium));
  }
  r.snapshot_times = config.snapshots.empty() ? std::vector<double>{0.5, 1.5, 5.0} : config.snapshots;
  for (double t : r.snapshot_times) r.snapshots.push_back(evolver.at(t));

  r.max_stationary_deviation = 0.0;
  for (double d : r.distance_to_initial) r.max_stationary_deviation = std::max(r.max_stationary_deviation, d);
  for (const auto& g : r.snapshots)
    r.max_stationary_deviation = std::max(r.max_stationary_deviation, max_norm_distance(g, r.initial));

  // Decades from t = 1 on; earlier times are the initial transient.
  std::map<int, double> decades;
  for (std::size_t i = 0; i < r.times.size(); ++i) {
    if (r.times[i] < 1.0) continue;
    const int k = static_cast<int>(std::floor(std::log10(r.times[i])));
    decades[k] = std::max(decades[k], r.distance_to_equilibrium[i]);
  }
  for (const auto& [k, v] : decades) {
    r.decade_starts.push_back(std::pow(10.0, k));
    r.decade_maxima.push_back(v);
  }
  r.relaxing = r.decade_maxima.size() >= 2;
  for (std::size_t i = 1; i < r.decade_maxima.size(); ++i)
    if (!(r.decade_maxima[i] < r.decade_maxima[i - 1])) r.relaxing = false;

  if (r.stationary_expected && r.max_stationary_deviation > 1e-10) {
    r.failures.push_back("expected an exact steady state, max |Gamma(t) - Gamma(0)| = " +
                         std::to_string(r.max_stationary_deviation));
  }
  // Needs two decades of t >= 1 to say anything.
  if (!r.stationary_expected && r.report.non_resilient && r.decade_maxima.size() >= 2 && !r.relaxing) {
    r.failures.push_back("non-resilient state does not relax across decades of t");
  }
  return r;
}

SuperlatticeResult run_superlattice(const RunConfig& config) {
  SuperlatticeResult r;
  const HoppingModel small = clean_model(config.model);
  const int L = small.size();
  r.initial = initial_covariance(config);
  r.before = currents(r.initial);
  r.embedded = embed_sublattice(r.initial);
  const HoppingModel big(2 * L, config.quench_J.value_or(config.model.J));
  r.steady = dephase(r.embedded, big, config.thresholds.dephase_tol.value_or(-1.0));
  r.after = currents(r.steady);

  r.i1 = std::abs(r.after.values[1]);
  r.i2_deviation = std::abs(r.after.values[2] - 0.5 * r.before.values[1]);
  r.tolerance = config.thresholds.current_c / (2.0 * L);
  double empty = 0.0;
  for (int x = 1; x < 2 * L; x += 2) empty += r.steady.matrix()(x, x).real();
  r.empty_sublattice_density = empty / L;
  r.filling = r.steady.trace() / (2.0 * L);

  r.thermal_before = fit_thermal(r.initial, small);
  r.thermal_after = fit_thermal(r.steady, big);

  if (r.i1 > r.tolerance) r.failures.push_back("steady-state |I'_1| = " + std::to_string(r.i1) + " above tolerance");
  if (r.i2_deviation > r.tolerance) {
    r.failures.push_back("steady-state |I'_2 - I_1/2| = " + std::to_string(r.i2_deviation) + " above tolerance");
  }
  return r;
}

std::filesystem::path simulate(const RunConfig& config) {
  const auto wall_start = std::chrono::steady_clock::now();
  const std::string started = utc_now();
  const auto dir = output_directory(config);
  std::filesystem::create_directories(dir);

  json results;
  json files = json::array();
  std::vector<std::string> failures;
  std::vector<double> potentials;

  switch (config.experiment) {
    case Experiment::AndersonQuench:
    case Experiment::Custom: {
      auto r = run_anderson_quench(config);
      {
        auto out = open_csv(dir / "distance.csv");
        out << "t,distance\n";
        for (std::size_t i = 0; i < r.times.size(); ++i) out << r.times[i] << ',' << r.distances[i] << '\n';
      }
      files.push_back("distance.csv");
      write_covariance_binary(dir / "steady_state.qlcv", r.steady);
      files.push_back("steady_state.qlcv");
      if (!r.potentials.empty()) {
        auto out = open_csv(dir / "potentials.csv");
        out << "x,xi\n";
        for (std::size_t x = 0; x < r.potentials.size(); ++x) out << x + 1 << ',' << r.potentials[x] << '\n';
        files.push_back("potentials.csv");
      }
      json fit = nullptr;
      if (r.fit) {
        fit = {{"exponent", r.fit->exponent}, {"prefactor", r.fit->prefactor}, {"window", {r.fit->t_lo, r.fit->t_hi}},
               {"r_squared", r.fit->r_squared}, {"points", r.fit->points}, {"non_decaying", r.fit->non_decaying}};
      }
      results = {{"recurrence_time", r.recurrence_time},
                 {"fit_window", {r.fit_lo, r.fit_hi}},
                 {"power_law", fit},
                 {"power_law_message", r.fit_message},
                 {"thermal_fit", to_json(r.thermal)}};
      if (config.experiment == Experiment::Custom) {
        const HoppingModel post = post_quench_model(config);
        results["resilience"] = to_json(classify_resilience(r.initial, post, thresholds_for(config, post)));
      }
      potentials = std::move(r.potentials);
      failures = std::move(r.failures);
      break;
    }
    case Experiment::Cdw: {
      auto r = run_cdw(config);
      {
        auto out = open_csv(dir / "distance.csv");
        out << "t,to_initial,to_equilibrium\n";
        for (std::size_t i = 0; i < r.times.size(); ++i)
          out << r.times[i] << ',' << r.distance_to_initial[i] << ',' << r.distance_to_equilibrium[i] << '\n';
      }
      files.push_back("distance.csv");
      json snaps = json::array();
      for (std::size_t i = 0; i < r.snapshots.size(); ++i) {
        std::ostringstream name;
        name << "snapshot_" << std::setfill('0') << std::setw(3) << i << ".csv";
        write_covariance_csv(dir / name.str(), r.snapshots[i]);
        files.push_back(name.str());
        snaps.push_back({{"t", r.snapshot_times[i]}, {"file", name.str()}});
      }
      results = {{"snapshots", snaps},
                 {"resilience", to_json(r.report)},
                 {"stationary_expected", r.stationary_expected},
                 {"max_stationary_deviation", r.max_stationary_deviation},
                 {"equilibrium_deviation_from_half", r.equilibrium_deviation_from_half},
                 {"decade_starts", r.decade_starts},
                 {"decade_maxima", r.decade_maxima},
                 {"relaxing", r.relaxing}};
      failures = std::move(r.failures);
      break;
    }
    case Experiment::Superlattice: {
      auto r = run_superlattice(config);
      write_currents_csv(dir / "currents_before.csv", r.before);
      write_currents_csv(dir / "currents_after.csv", r.after);
      write_covariance_binary(dir / "steady_state.qlcv", r.steady);
      {
        auto out = open_csv(dir / "steady_diagonal.csv");
        out << "x,density\n";
        for (int x = 0; x < r.steady.size(); ++x) out << x + 1 << ',' << r.steady.matrix()(x, x).real() << '\n';
      }
      for (const char* f : {"currents_before.csv", "currents_after.csv", "steady_state.qlcv", "steady_diagonal.csv"})
        files.push_back(f);
      results = {{"I1_after", r.i1},
                 {"I2_deviation", r.i2_deviation},
                 {"tolerance", r.tolerance},
                 {"empty_sublattice_density", r.empty_sublattice_density},
                 {"filling", r.filling},
                 {"thermal_fit_before", to_json(r.thermal_before)},
                 {"thermal_fit_after", to_json(r.thermal_after)}};
      failures = std::move(r.failures);
      break;
    }
  }

  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - wall_start).count();
  json manifest = {{"tool", "quasifree"},
                   {"version", version()},
                   {"experiment", experiment_name(config.experiment)},
                   {"config", json::parse(config_to_json(config))},
                   {"seeds", {{"disorder", config.model.seed}, {"run", config.seed}}},
                   {"rng", std::string(kDisorderRng)},
                   {"potentials", potentials},
                   {"started_utc", started},
                   {"wall_clock_seconds", wall},
                   {"files", files},
                   {"results", results},
                   {"post_conditions", {{"passed", failures.empty()}, {"failures", failures}}}};
  {
    std::ofstream out(dir / "manifest.json");
    if (!out) throw Error("cannot write manifest in " + dir.string());
    out << std::setprecision(17) << manifest.dump(2) << '\n';
  }
  if (!failures.empty()) {
    std::string msg;
    for (const auto& f : failures) msg += (msg.empty() ? "" : "; ") + f;
    throw PostConditionFailed(msg);
  }
  return dir;
}

}  // namespace quasifree
