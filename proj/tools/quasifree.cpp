// quasifree: command line front end for the quench laboratory.
//
// Exit codes: 0 success, 1 other failure, 2 bad config or arguments,
// 3 a post-condition or convention check failed.

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "quasifree/bounds.hpp"
#include "quasifree/config.hpp"
#include "quasifree/covariance_io.hpp"
#include "quasifree/errors.hpp"
#include "quasifree/experiments.hpp"
#include "quasifree/gge.hpp"
#include "quasifree/power_law.hpp"

namespace fs = std::filesystem;
using namespace quasifree;

namespace {

template <class T>
std::string list(const std::vector<T>& v) {
  std::ostringstream s;
  s << std::setprecision(17) << '[';
  for (std::size_t i = 0; i < v.size(); ++i) s << (i ? ", " : "") << v[i];
  s << ']';
  return s.str();
}

// `model` is either a config file or an inline coupling list "J0,J1,...".
HoppingModel model_argument(const std::string& arg, int size) {
  if (fs::exists(arg)) {
    const RunConfig c = load_config(arg);
    if (c.model.L != size) {
      throw ConfigError("model L = " + std::to_string(c.model.L) + " but covariance has L = " + std::to_string(size));
    }
    return post_quench_model(c);
  }
  std::vector<double> j;
  std::stringstream s(arg);
  std::string item;
  while (std::getline(s, item, ',')) {
    try {
      j.push_back(std::stod(item));
    } catch (const std::exception&) {
      throw ConfigError("model: '" + arg + "' is neither a file nor a list of couplings");
    }
  }
  if (j.empty()) throw ConfigError("model: empty coupling list");
  return HoppingModel(size, j);
}

void print_thermal(const ThermalFit& f) {
  std::cout << "beta = " << f.beta << "\nmu = " << f.mu << "\nresidual = " << f.residual
            << "\nboundary_hit = " << (f.boundary_hit ? "true" : "false") << "\nevaluations = " << f.evaluations << '\n';
}

int cmd_simulate(const std::string& path) {
  const RunConfig config = load_config(path);
  const fs::path dir = simulate(config);
  std::cout << "experiment = " << experiment_name(config.experiment) << "\noutput = " << dir.string() << '\n';
  return 0;
}

struct CertifyOptions {
  std::string config;
  int n = 0;
  int drift = 0;
  std::string csv;
  int count = 50;
};

int cmd_certify(const CertifyOptions& o) {
  const RunConfig config = load_config(o.config);
  const HoppingModel model = post_quench_model(config);
  const int L = model.size();
  auto phase = [&](double t) {
    return o.n == 0 ? PhaseFunction::propagator(model, o.drift, t) : PhaseFunction::band_mixing(model, o.n, o.drift, t);
  };
  const DephasingCertificate c = certificate(phase(1.0), L);
  std::cout << "phase = " << (o.n == 0 ? "propagator" : "band_mixing") << "\nn = " << o.n << "\ndrift = " << o.drift
            << "\nL = " << L << '\n';
  std::cout << "C_sharp = " << c.c_sharp << "\nC_sharp_general = " << c.c_sharp_general << "\ngamma = " << c.gamma
            << "\nt0 = " << c.t0 << "\ntR = " << c.tR << "\nC0 = " << c.c0 << "\nC1 = " << c.c1
            << "\ndrift_only = " << (c.drift_only ? "true" : "false") << '\n';
  if (!c.drift_only) {
    std::vector<double> r1, r2;
    std::vector<int> k1, k2;
    for (const auto& p : c.structure.s1) r1.push_back(p.p), k1.push_back(p.kappa);
    for (const auto& p : c.structure.s2) r2.push_back(p.p), k2.push_back(p.kappa);
    std::cout << "roots_S1 = " << list(r1) << "\nroots_S2 = " << list(r2) << "\nkappa_S1 = " << list(k1)
              << "\nkappa_S2 = " << list(k2) << "\nkappa0 = " << c.structure.kappa0 << "\nM = " << c.structure.m
              << "\ngeneric = " << (c.generic ? "true" : "false") << '\n';
  }
  if (!o.csv.empty()) {
    if (!(c.tR > c.t0) || !std::isfinite(c.tR)) throw PreconditionViolated("certificate window is empty or unbounded");
    std::ofstream out(o.csv);
    if (!out) throw Error("cannot write " + o.csv);
    out << std::setprecision(17) << "t,bound,empirical_sum\n";
    for (double t : time_grid(c.t0, c.tR, o.count, true)) {
      const PhaseFunction phi = phase(t);
      const DephasingCertificate ct = certificate(phi, L);
      out << t << ',';
      if (ct.covers(t)) out << ct.bound(t);
      out << ',' << std::abs(exponential_sum(phi, L)) << '\n';
    }
    std::cout << "csv = " << o.csv << '\n';
  }
  return 0;
}

int cmd_classify(const std::string& path) {
  const RunConfig config = load_config(path);
  const HoppingModel model = post_quench_model(config);
  const Covariance gamma = initial_covariance(config);
  ResilienceThresholds th = default_thresholds(model);
  if (config.thresholds.c_th) th.c_th = *config.thresholds.c_th;
  th.c_rs = config.thresholds.c_rs;
  th.c_nrs = config.thresholds.c_nrs;
  const ResilienceReport r = classify_resilience(gamma, model, th);
  std::cout << "verdict = " << (r.non_resilient ? "NON-RESILIENT" : "RESILIENT") << "\nC_th = " << th.c_th
            << "\nc_rs = " << th.c_rs << "\nc_nrs = " << th.c_nrs << "\nresilient_set = " << list(r.resilient)
            << "\nmax_W_res = " << r.max_w_res << "\nmax_W_ok = " << r.max_w_ok << "\nW_res_limit = " << th.c_rs / model.size()
            << '\n';
  return 0;
}

int cmd_fit_thermal(const std::string& cov, const std::string& model_arg) {
  const Covariance gamma = read_covariance(cov);
  print_thermal(fit_thermal(gamma, model_argument(model_arg, gamma.size())));
  return 0;
}

int cmd_fit_gge(const std::string& cov, int z_xi, double eps) {
  const Covariance gamma = read_covariance(cov);
  const int L = gamma.size();
  if (z_xi < 0) {
    const ClusteringFit cl = clustering_fit(gamma);
    z_xi = std::isfinite(cl.xi) && cl.c_clust > 0.0 ? relevant_range(cl.c_clust, cl.xi, eps) : (L - 1) / 2;
    z_xi = std::min(z_xi, (L - 1) / 2);
    std::cout << "C_clust = " << cl.c_clust << "\nxi = " << cl.xi << '\n';
  }
  const GGEFit f = fit_gge(currents(gamma), z_xi, L);
  std::cout << "z_xi = " << z_xi << "\nfeasible = " << (f.feasible ? "true" : "false")
            << "\nconverged = " << (f.converged ? "true" : "false") << "\niterations = " << f.iterations
            << "\nlambda = " << list(f.params.lambda) << "\neta = " << list(f.params.eta)
            << "\nresiduals = " << list(f.residuals) << "\nmax_residual = " << f.max_residual << '\n';
  if (!f.message.empty()) std::cout << "message = " << f.message << '\n';
  return f.feasible && f.converged ? 0 : 3;
}

int cmd_oracle_check() {
  bool ok = true;
  for (const auto& c : convention_checks()) {
    std::cout << (c.passed ? "PASS " : "FAIL ") << c.name << " (deviation " << c.deviation << ", tolerance "
              << c.tolerance << ")\n";
    ok = ok && c.passed;
  }
  return ok ? 0 : 3;
}

int cmd_plot(const std::string& run_dir) {
  const fs::path dir(run_dir);
  std::ifstream in(dir / "manifest.json");
  if (!in) throw ConfigError("no manifest.json in " + run_dir);
  const auto manifest = nlohmann::json::parse(in);
  const std::string experiment = manifest.at("experiment").get<std::string>();
  std::ostringstream gp;
  gp << "set datafile separator ','\nset key top right\n";
  if (experiment == "anderson_quench" || experiment == "custom") {
    gp << "set logscale xy\nset xlabel 't'\nset ylabel 'max |Gamma(t) - Gamma_inf|'\n";
    const auto& fit = manifest.at("results").at("power_law");
    gp << "plot 'distance.csv' every ::1 using 1:2 with linespoints title 'distance'";
    if (!fit.is_null()) {
      gp << ", " << std::setprecision(17) << fit.at("prefactor").get<double>() << " * x**(" << fit.at("exponent").get<double>()
         << ") with lines title 'power law'";
    }
    gp << '\n';
  } else if (experiment == "cdw") {
    gp << "set logscale x\nset xlabel 't'\nset ylabel 'max-norm distance'\n"
          "plot 'distance.csv' every ::1 using 1:2 with lines title 'to Gamma(0)', "
          "'distance.csv' every ::1 using 1:3 with lines title 'to Gamma_eq'\n";
  } else if (experiment == "superlattice") {
    gp << "set xlabel 'd'\nset ylabel '|I_d|'\n"
          "plot 'currents_before.csv' every ::1 using 1:4 with linespoints title 'before', "
          "'currents_after.csv' every ::1 using 1:4 with linespoints title 'steady state'\n";
  } else {
    throw ConfigError("plot: unknown experiment '" + experiment + "'");
  }
  std::ofstream script(dir / "plot.gp");
  if (!script) throw Error("cannot write plot.gp");
  script << gp.str();
  std::cout << gp.str();
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"quasifree: quenches of free-fermion chains"};
  app.require_subcommand(1);
  std::cout << std::setprecision(10);

  std::string config_path, cov_path, model_arg, run_dir;
  auto* simulate_cmd = app.add_subcommand("simulate", "Run the experiment described by a config file");
  simulate_cmd->add_option("config", config_path, "JSON config or run manifest")->required();

  CertifyOptions certify_opts;
  auto* certify_cmd = app.add_subcommand("certify-bound", "Dephasing certificate of the configured model");
  certify_cmd->add_option("config", certify_opts.config)->required();
  certify_cmd->add_option("--n", certify_opts.n, "band-mixing frequency n (0: propagator phase)");
  certify_cmd->add_option("--drift", certify_opts.drift, "integer drift x - y (or x - y - d)");
  certify_cmd->add_option("--csv", certify_opts.csv, "write (t, bound, empirical_sum) over the window");
  certify_cmd->add_option("--count", certify_opts.count, "CSV rows")->check(CLI::PositiveNumber);

  auto* classify_cmd = app.add_subcommand("classify-resilience", "Resilience report of the configured initial state");
  classify_cmd->add_option("config", config_path)->required();

  auto* thermal_cmd = app.add_subcommand("fit-thermal", "Closest thermal state of a clean model");
  thermal_cmd->add_option("cov-file", cov_path)->required()->check(CLI::ExistingFile);
  thermal_cmd->add_option("model", model_arg, "config file or couplings J0,J1,...")->required();

  int z_xi = -1;
  double eps = 1e-2;
  auto* gge_cmd = app.add_subcommand("fit-gge", "Generalized Gibbs ensemble matching the currents");
  gge_cmd->add_option("cov-file", cov_path)->required()->check(CLI::ExistingFile);
  gge_cmd->add_option("--z-xi", z_xi, "number of currents (default: from the clustering fit)");
  gge_cmd->add_option("--eps", eps, "current cutoff for the default z_xi");

  auto* oracle_cmd = app.add_subcommand("oracle-check", "Check sign conventions against exact diagonalization");

  auto* plot_cmd = app.add_subcommand("plot", "Write a gnuplot script for a run directory");
  plot_cmd->add_option("run-dir", run_dir)->required()->check(CLI::ExistingDirectory);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (*simulate_cmd) return cmd_simulate(config_path);
    if (*certify_cmd) return cmd_certify(certify_opts);
    if (*classify_cmd) return cmd_classify(config_path);
    if (*thermal_cmd) return cmd_fit_thermal(cov_path, model_arg);
    if (*gge_cmd) return cmd_fit_gge(cov_path, z_xi, eps);
    if (*oracle_cmd) return cmd_oracle_check();
    if (*plot_cmd) return cmd_plot(run_dir);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const PostConditionFailed& e) {
    std::cerr << "post-condition failed: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
