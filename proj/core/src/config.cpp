#include "quasifree/config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "quasifree/errors.hpp"

namespace quasifree {

namespace {

using nlohmann::json;

void reject_unknown(const json& j, const std::set<std::string>& known, const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + ": expected a table");
  for (const auto& [key, value] : j.items()) {
    if (!known.count(key)) throw ConfigError(where + ": unknown key '" + key + "'");
  }
}

template <class T>
T get(const json& j, const char* key, const std::string& where) {
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(where + "." + key + ": " + e.what());
  }
}

template <class T>
void read_optional(const json& j, const char* key, std::optional<T>& out, const std::string& where) {
  if (j.contains(key) && !j.at(key).is_null()) out = get<T>(j, key, where);
}

template <class T>
void read_default(const json& j, const char* key, T& out, const std::string& where) {
  if (j.contains(key) && !j.at(key).is_null()) out = get<T>(j, key, where);
}

Experiment parse_experiment(const std::string& s) {
  if (s == "anderson_quench") return Experiment::AndersonQuench;
  if (s == "cdw") return Experiment::Cdw;
  if (s == "superlattice") return Experiment::Superlattice;
  if (s == "custom") return Experiment::Custom;
  throw ConfigError("experiment: unknown value '" + s + "'");
}

StateBlock::Kind parse_kind(const std::string& s) {
  if (s == "thermal") return StateBlock::Kind::Thermal;
  if (s == "occupations") return StateBlock::Kind::Occupations;
  if (s == "cdw") return StateBlock::Kind::Cdw;
  if (s == "file") return StateBlock::Kind::File;
  throw ConfigError("state.kind: unknown value '" + s + "'");
}

std::string kind_name(StateBlock::Kind k) {
  switch (k) {
    case StateBlock::Kind::Thermal: return "thermal";
    case StateBlock::Kind::Occupations: return "occupations";
    case StateBlock::Kind::Cdw: return "cdw";
    case StateBlock::Kind::File: return "file";
  }
  return "thermal";
}

template <class T>
json optional_json(const std::optional<T>& v) {
  return v ? json(*v) : json(nullptr);
}

void validate(const RunConfig& c) {
  if (c.model.L <= 0) throw ConfigError("model.L must be positive");
  if (c.model.J.empty()) throw ConfigError("model.J must hold J_0..J_R");
  if (c.model.L <= 2 * (static_cast<int>(c.model.J.size()) - 1)) throw ConfigError("model: need L > 2R");
  if (c.model.w && *c.model.w < 0.0) throw ConfigError("model.disorder.w must be >= 0");
  if (c.model.xi && static_cast<int>(c.model.xi->size()) != c.model.L) {
    throw ConfigError("model.disorder.xi must have L entries");
  }
  if (c.quench_J && c.quench_J->empty()) throw ConfigError("quench.J must not be empty");
  if (c.state.kind == StateBlock::Kind::Thermal && !(c.state.beta > 0.0)) throw ConfigError("state.beta must be > 0");
  if (c.state.kind == StateBlock::Kind::Occupations && static_cast<int>(c.state.occupations.size()) != c.model.L) {
    throw ConfigError("state.occupations must have L entries");
  }
  if (c.state.kind == StateBlock::Kind::File && c.state.path.empty()) throw ConfigError("state.path is required");
  if (c.time.count < 1) throw ConfigError("time.count must be positive");
  if (!(c.time.t_min >= 0.0)) throw ConfigError("time.t_min must be >= 0");
  if (c.time.logarithmic && !(c.time.t_min > 0.0)) throw ConfigError("time.t_min must be > 0 on a log grid");
  if (c.time.t_max && !(*c.time.t_max > c.time.t_min)) throw ConfigError("time grid must be increasing");
  if (c.thresholds.c_th && !(*c.thresholds.c_th > 0.0)) throw ConfigError("thresholds.C_th must be > 0");
  if (!(c.thresholds.c_rs > 0.0) || !(c.thresholds.c_nrs > 0.0)) throw ConfigError("thresholds.c_rs/c_nrs must be > 0");
  if (c.fit_hi && !(*c.fit_hi > c.fit_lo)) throw ConfigError("fit_window must be increasing");
  for (double t : c.snapshots)
    if (!(t >= 0.0)) throw ConfigError("snapshots must be >= 0");
}

}  // namespace

RunConfig parse_config(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  // A run manifest carries its resolved config; rerunning from it reproduces the run.
  if (j.is_object() && j.contains("tool") && j.contains("config")) j = json(j.at("config"));
  reject_unknown(j, {"experiment", "model", "quench", "state", "time", "thresholds", "fit_window", "snapshots", "output", "seed"},
                 "config");
  RunConfig c;
  if (j.contains("experiment")) c.experiment = parse_experiment(get<std::string>(j, "experiment", "config"));

  if (!j.contains("model")) throw ConfigError("config: missing model table");
  const auto& m = j.at("model");
  reject_unknown(m, {"L", "R", "J", "disorder"}, "model");
  c.model.L = get<int>(m, "L", "model");
  c.model.J = get<std::vector<double>>(m, "J", "model");
  if (m.contains("R") && get<int>(m, "R", "model") != static_cast<int>(c.model.J.size()) - 1) {
    throw ConfigError("model.R disagrees with the length of model.J");
  }
  if (m.contains("disorder")) {
    const auto& d = m.at("disorder");
    reject_unknown(d, {"w", "lo", "hi", "seed", "xi"}, "model.disorder");
    read_optional(d, "w", c.model.w, "model.disorder");
    read_optional(d, "lo", c.model.lo, "model.disorder");
    read_optional(d, "hi", c.model.hi, "model.disorder");
    read_default(d, "seed", c.model.seed, "model.disorder");
    read_optional(d, "xi", c.model.xi, "model.disorder");
  }
  if (j.contains("quench")) {
    const auto& q = j.at("quench");
    reject_unknown(q, {"J"}, "quench");
    read_optional(q, "J", c.quench_J, "quench");
  }
  if (j.contains("state")) {
    const auto& s = j.at("state");
    reject_unknown(s, {"kind", "beta", "mu", "occupations", "path"}, "state");
    if (s.contains("kind")) c.state.kind = parse_kind(get<std::string>(s, "kind", "state"));
    read_default(s, "beta", c.state.beta, "state");
    read_default(s, "mu", c.state.mu, "state");
    read_default(s, "occupations", c.state.occupations, "state");
    read_default(s, "path", c.state.path, "state");
  }
  if (j.contains("time")) {
    const auto& t = j.at("time");
    reject_unknown(t, {"t_min", "t_max", "count", "spacing"}, "time");
    read_default(t, "t_min", c.time.t_min, "time");
    read_optional(t, "t_max", c.time.t_max, "time");
    read_default(t, "count", c.time.count, "time");
    if (t.contains("spacing")) {
      const auto sp = get<std::string>(t, "spacing", "time");
      if (sp != "log" && sp != "linear") throw ConfigError("time.spacing must be 'log' or 'linear'");
      c.time.logarithmic = sp == "log";
    }
  }
  if (j.contains("thresholds")) {
    const auto& th = j.at("thresholds");
    reject_unknown(th, {"C_th", "c_rs", "c_nrs", "dephase_tol", "current_c"}, "thresholds");
    read_optional(th, "C_th", c.thresholds.c_th, "thresholds");
    read_default(th, "c_rs", c.thresholds.c_rs, "thresholds");
    read_default(th, "c_nrs", c.thresholds.c_nrs, "thresholds");
    read_optional(th, "dephase_tol", c.thresholds.dephase_tol, "thresholds");
    read_default(th, "current_c", c.thresholds.current_c, "thresholds");
  }
  if (j.contains("fit_window")) {
    const auto& fw = j.at("fit_window");
    if (!fw.is_array() || fw.size() != 2) throw ConfigError("fit_window must be [lo, hi]");
    c.fit_lo = fw[0].get<double>();
    if (!fw[1].is_null()) c.fit_hi = fw[1].get<double>();
  }
  read_default(j, "snapshots", c.snapshots, "config");
  read_default(j, "output", c.output, "config");
  read_default(j, "seed", c.seed, "config");
  validate(c);
  return c;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config " + path.string());
  std::ostringstream s;
  s << in.rdbuf();
  return parse_config(s.str());
}

std::string experiment_name(Experiment e) {
  switch (e) {
    case Experiment::AndersonQuench: return "anderson_quench";
    case Experiment::Cdw: return "cdw";
    case Experiment::Superlattice: return "superlattice";
    case Experiment::Custom: return "custom";
  }
  return "custom";
}

std::string config_to_json(const RunConfig& c) {
  json j;
  j["experiment"] = experiment_name(c.experiment);
  j["model"] = {{"L", c.model.L},
                {"R", static_cast<int>(c.model.J.size()) - 1},
                {"J", c.model.J},
                {"disorder",
                 {{"w", optional_json(c.model.w)},
                  {"lo", optional_json(c.model.lo)},
                  {"hi", optional_json(c.model.hi)},
                  {"seed", c.model.seed},
                  {"xi", optional_json(c.model.xi)}}}};
  j["quench"] = {{"J", optional_json(c.quench_J)}};
  j["state"] = {{"kind", kind_name(c.state.kind)},
                {"beta", c.state.beta},
                {"mu", c.state.mu},
                {"occupations", c.state.occupations},
                {"path", c.state.path}};
  j["time"] = {{"t_min", c.time.t_min},
               {"t_max", optional_json(c.time.t_max)},
               {"count", c.time.count},
               {"spacing", c.time.logarithmic ? "log" : "linear"}};
  j["thresholds"] = {{"C_th", optional_json(c.thresholds.c_th)},
                     {"c_rs", c.thresholds.c_rs},
                     {"c_nrs", c.thresholds.c_nrs},
                     {"dephase_tol", optional_json(c.thresholds.dephase_tol)},
                     {"current_c", c.thresholds.current_c}};
  j["fit_window"] = {c.fit_lo, optional_json(c.fit_hi)};
  j["snapshots"] = c.snapshots;
  j["output"] = c.output;
  j["seed"] = c.seed;
  return j.dump(2);
}

HoppingModel clean_model(const ModelBlock& block) { return HoppingModel(block.L, block.J); }

DisorderedModel disordered_model(const ModelBlock& block) {
  if (block.xi) {
    double half = block.w.value_or(0.0);
    for (double v : *block.xi) half = std::max(half, std::abs(v));
    return DisorderedModel(clean_model(block), *block.xi, half, block.seed);
  }
  const double w = block.w.value_or(0.0);
  const double lo = block.lo.value_or(-w);
  const double hi = block.hi.value_or(w);
  return sample_uniform_disorder(block.L, lo, hi, block.J, block.seed);
}

std::filesystem::path output_directory(const RunConfig& config) {
  std::filesystem::path out(config.output);
  if (out.is_absolute()) return out;
  if (const char* root = std::getenv("QUASIFREE_OUTPUT_ROOT"); root && *root) return std::filesystem::path(root) / out;
  return out;
}

}  // namespace quasifree
