// Acceptance run: one PASS/FAIL line per criterion.
//
//   acceptance [--only N[,M...]] [--expected-fail N[,M...]]
//
// Exit status is 0 when every failing criterion is listed in --expected-fail.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/QR>
#include <unsupported/Eigen/MatrixFunctions>

#include "quasifree/bounds.hpp"
#include "quasifree/config.hpp"
#include "quasifree/covariance.hpp"
#include "quasifree/errors.hpp"
#include "quasifree/experiments.hpp"
#include "quasifree/gge.hpp"
#include "quasifree/model.hpp"
#include "quasifree/oracle.hpp"
#include "quasifree/power_law.hpp"
#include "quasifree/propagator.hpp"

using namespace quasifree;

namespace {

struct Verdict {
  bool pass = false;
  std::string detail;
};

struct Criterion {
  int id;
  const char* name;
  double limit_seconds;
  std::function<Verdict()> run;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

std::vector<double> random_couplings(std::mt19937_64& rng, int range) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> j(static_cast<std::size_t>(range + 1));
  for (auto& v : j) v = u(rng);
  return j;
}

ComplexMatrix random_admissible(std::mt19937_64& rng, int L) {
  std::normal_distribution<double> n(0.0, 1.0);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  ComplexMatrix a(L, L);
  for (int i = 0; i < L; ++i)
    for (int j = 0; j < L; ++j) a(i, j) = cplx(n(rng), n(rng));
  Eigen::HouseholderQR<ComplexMatrix> qr(a);
  ComplexMatrix q = qr.householderQ();
  Eigen::VectorXcd occ(L);
  for (int i = 0; i < L; ++i) occ(i) = u(rng);
  return q * occ.asDiagonal() * q.adjoint();
}

std::vector<int> cdw_pattern(int L) {
  std::vector<int> occ(L);
  for (int x = 0; x < L; ++x) occ[x] = 1 - x % 2;
  return occ;
}

// least-squares slope of log y against log x
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double a = std::log(x[i]), b = std::log(y[i]);
    sx += a, sy += b, sxx += a * a, sxy += a * b;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

// ---------------------------------------------------------------------------

Verdict unitarity() {
  std::mt19937_64 rng(101);
  std::uniform_real_distribution<double> ut(0.1, 50.0);
  double worst = 0.0;
  int count = 0;
  for (int L : {64, 512, 4096}) {
    const std::vector<HoppingModel> models{HoppingModel(L, {0.0, 1.0}), HoppingModel(L, random_couplings(rng, 3))};
    for (const auto& m : models)
      for (int i = 0; i < 10; ++i, ++count) worst = std::max(worst, propagate(m, ut(rng)).unitarity_deviation());
  }
  return {worst <= 1e-10, fmt("%d propagators, max row-norm deviation %.3g (<= 1e-10)", count, worst)};
}

Verdict propagator_oracles() {
  std::mt19937_64 rng(202);
  std::uniform_real_distribution<double> ut(0.1, 10.0);
  const int L = 32;
  double dense_dev = 0.0;
  for (int i = 0; i < 20; ++i) {
    const HoppingModel m(L, random_couplings(rng, 1 + i % 3));
    const double t = ut(rng);
    const ComplexMatrix ref = (cplx(0.0, t) * coupling_matrix(m).cast<cplx>()).eval().exp();
    const Propagator g = propagate(m, t);
    for (int x = 0; x < L; ++x)
      for (int y = 0; y < L; ++y) dense_dev = std::max(dense_dev, std::abs(g(x, y) - ref(x, y)));
  }
  // one-particle sector of the Fock-space evolution: amplitude at y is conj(G_yx)
  const HoppingModel m(10, random_couplings(rng, 2));
  const double t = 2.7;
  const Propagator g = propagate(m, t);
  const SectorEvolution evo(build_hamiltonian(m), 10);
  double sector_dev = 0.0;
  for (int x = 0; x < 10; ++x) {
    const auto psi = evo.evolve(ManyBodyState::single_particle(10, x), t);
    for (int y = 0; y < 10; ++y)
      sector_dev = std::max(sector_dev, std::abs(psi.vector()(std::size_t{1} << y) - std::conj(g(y, x))));
  }
  return {dense_dev <= 1e-8 && sector_dev <= 1e-10,
          fmt("expm deviation %.3g (<= 1e-8), Fock-space sector deviation %.3g (<= 1e-10)", dense_dev, sector_dev)};
}

Verdict bessel() {
  const int L = 1000;
  const HoppingModel nn(L, {0.0, 1.0});
  int violations = 0, checks = 0;
  double worst_ratio = 0.0;
  for (double t : {5.0, 10.0, 20.0}) {
    const Propagator g = propagate(nn, t);
    for (int d = -60; d <= 60; ++d, ++checks) {
      const double err = std::abs(std::conj(g(wrap(d, L), 0)) - bessel_approximation(d, t));
      const double bound = bessel_error_bound(d, t, L);
      // rounding slack: the bound is exactly zero at d = 2t
      if (err > bound + 1e-12) ++violations;
      if (bound > 0.0) worst_ratio = std::max(worst_ratio, err / bound);
    }
  }
  return {violations == 0, fmt("%d (t, d) pairs, %d violations, max error/bound %.3g", checks, violations, worst_ratio)};
}

Verdict kusmin_landau() {
  std::mt19937_64 rng(404);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::uniform_int_distribution<int> pick_drift(-3, 3);
  int models = 0, attempts = 0, checks = 0, violations = 0, structure_bad = 0;
  double worst = 0.0;
  while (models < 120 && attempts < 5000) {
    ++attempts;
    const int R = 1 + attempts % 3;
    const int L = 2000 + 500 * (attempts % 5);
    const HoppingModel model(L, random_couplings(rng, R));
    const int drift = pick_drift(rng);
    // alternate between propagator phases and band-mixing phases
    const int n = 1 + static_cast<int>((u(rng) + 1.0) * 0.5 * (L - 2));
    auto phase = [&](double t) {
      return attempts % 2 ? PhaseFunction::propagator(model, drift, t) : PhaseFunction::band_mixing(model, n, drift, t);
    };
    DephasingCertificate c;
    try {
      c = certificate(phase(1.0), L);
    } catch (const DegenerateStructure&) {
      continue;
    }
    if (c.drift_only || !c.generic || !(c.t0 < c.tR)) continue;
    int here = 0;
    for (int i = 0; i < 12; ++i) {
      const double t = c.t0 * std::pow(c.tR / c.t0, i / 11.0);
      const PhaseFunction phi = phase(t);
      DephasingCertificate ct;
      try {
        ct = certificate(phi, L);
      } catch (const DegenerateStructure&) {
        continue;
      }
      const auto& s = ct.structure;
      if (s.s1.size() > static_cast<std::size_t>(2 * R) || s.s2.size() > static_cast<std::size_t>(2 * R) ||
          ct.gamma < 1.0 / (6 * R + 6) - 1e-15)
        ++structure_bad;
      if (!ct.covers(t)) continue;
      ++here, ++checks;
      const double sum = std::abs(exponential_sum(phi, L));
      worst = std::max(worst, sum / ct.bound(t));
      if (sum > ct.bound(t)) ++violations;
    }
    if (here >= 10) ++models;
  }
  return {models >= 100 && violations == 0 && structure_bad == 0,
          fmt("%d generic models with >= 10 t each, %d checks, %d violations, %d structure violations, max |S|/bound %.3g",
              models, checks, violations, structure_bad, worst)};
}

Verdict anderson_exponent() {
  const RunConfig c = parse_config(R"({"experiment": "anderson_quench",
    "model": {"L": 1000, "J": [0.0, 1.0], "disorder": {"w": 5.0, "seed": 0}},
    "state": {"kind": "thermal", "beta": 1.0, "mu": 0.0}})");
  const auto r = run_anderson_quench(c);
  if (!r.fit) return {false, "no fit: " + r.fit_message};
  const auto& f = *r.fit;
  return {f.exponent >= -0.6 && f.exponent <= -0.25 && f.r_squared >= 0.9,
          fmt("exponent %.3f in [-0.6, -0.25], r^2 %.3f (>= 0.9), window [%.3g, %.3g] with %d points", f.exponent,
              f.r_squared, f.t_lo, f.t_hi, f.points)};
}

Verdict thermal_residual() {
  const RunConfig c = parse_config(R"({"experiment": "anderson_quench",
    "model": {"L": 100, "J": [0.0, 1.0], "disorder": {"w": 5.0, "seed": 0}},
    "state": {"kind": "thermal", "beta": 1.0, "mu": 0.0}, "time": {"count": 4}})");
  const auto r = run_anderson_quench(c);
  const HoppingModel nn(100, {0.0, 1.0});
  // for reference: the same fit against the translation-invariant part only
  const auto circ = fit_thermal(circulant_from_currents(currents(r.steady), 100), nn);
  return {r.thermal.residual <= 1e-2,
          fmt("residual %.4g (<= 1e-2) at beta %.3g, mu %.3g; circulant part alone %.3g", r.thermal.residual,
              r.thermal.beta, r.thermal.mu, circ.residual)};
}

Verdict dephasing_average() {
  std::mt19937_64 rng(707);
  const int L = 20;
  const HoppingModel nn(L, {0.0, 1.0});
  const Covariance g0(random_admissible(rng, L));
  const Covariance inf = dephase(g0, nn);
  std::uniform_real_distribution<double> ut(0.0, 1e4);
  const int samples = 2000;
  ComplexMatrix avg = ComplexMatrix::Zero(L, L);
  for (int s = 0; s < samples; ++s) avg += evolve(g0, propagate(nn, ut(rng))).matrix();
  avg /= double(samples);
  const double dev = (avg - inf.matrix()).cwiseAbs().maxCoeff();
  return {dev <= 2e-2, fmt("max entry deviation %.3g (<= 2e-2) over %d samples", dev, samples)};
}

Verdict circulant_scaling() {
  // Thermal state of the Anderson model (w = 5, beta = 1), dephased under the clean chain.
  // Five realizations per size, averaged.
  std::vector<double> sizes, devs;
  std::string per;
  for (int L : {50, 100, 200, 400}) {
    double mean = 0.0;
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      const auto dis = sample_anderson(L, 5.0, {0.0, 1.0}, seed);
      const Covariance g0 = thermal_covariance(coupling_matrix(dis), 1.0, 0.0);
      const Covariance inf = dephase(g0, dis.base());
      mean += max_norm_distance(inf, circulant_from_currents(currents(inf), L)) / 5.0;
    }
    sizes.push_back(L);
    devs.push_back(mean);
    per += fmt(" %d:%.3g", L, mean);
  }
  const double slope = loglog_slope(sizes, devs);
  return {std::abs(slope + 1.0) <= 0.2, fmt("slope %.3f (-1 +- 0.2); mean deviation per L%s", slope, per.c_str())};
}

Verdict cdw_exactness() {
  const int L = 100;
  const Covariance g0 = from_occupations(cdw_pattern(L));
  const HoppingModel nnn(L, {0.0, 0.0, 1.0});
  double stat = 0.0;
  for (double t : {0.5, 1.5, 5.0}) stat = std::max(stat, max_norm_distance(evolve(g0, propagate(nnn, t)), g0));

  const RunConfig c = parse_config(R"({"experiment": "cdw", "model": {"L": 100, "J": [0.0, 1.0]},
    "time": {"t_min": 0.1, "count": 80}})");
  const auto r = run_cdw(c);
  std::string maxima;
  for (std::size_t i = 0; i < r.decade_maxima.size(); ++i)
    maxima += fmt(" [%g..): %.3g", r.decade_starts[i], r.decade_maxima[i]);
  return {stat <= 1e-10 && r.relaxing && r.equilibrium_deviation_from_half <= 1e-14,
          fmt("NNN drift %.3g (<= 1e-10); NN eq - 1/2 = %.3g; decade maxima%s", stat,
              r.equilibrium_deviation_from_half, maxima.c_str())};
}

Verdict superlattice() {
  const RunConfig c = parse_config(R"({"experiment": "superlattice", "model": {"L": 200, "J": [0.0, 1.0]},
    "state": {"kind": "thermal", "beta": 1.0, "mu": 0.0}})");
  const auto r = run_superlattice(c);
  const double tol = 5.0 / 400.0;
  const double ratio = r.thermal_after.residual / r.thermal_before.residual;
  return {r.i1 <= tol && r.i2_deviation <= tol && ratio >= 10.0,
          fmt("|I'_1| %.3g, |I'_2 - I_1/2| %.3g (<= %.3g); thermal residual %.3g -> %.3g (ratio %.3g >= 10)", r.i1,
              r.i2_deviation, tol, r.thermal_before.residual, r.thermal_after.residual, ratio)};
}

Verdict resilience() {
  bool ok = true;
  std::string detail;
  std::vector<double> wres;
  for (int L : {64, 128, 256}) {
    const HoppingModel nn(L, {0.0, 1.0});
    const HoppingModel nnn(L, {0.0, 0.0, 1.0});
    std::vector<int> block(L);
    for (int x = 0; x < L; ++x) block[x] = x < L / 2;
    const auto cdw_nn = classify_resilience(from_occupations(cdw_pattern(L)), nn);
    const auto blk = classify_resilience(from_occupations(block), nn);
    const auto cdw_nnn = classify_resilience(from_occupations(cdw_pattern(L)), nnn);
    ok = ok && cdw_nn.non_resilient && !blk.non_resilient && !cdw_nnn.non_resilient;
    wres.push_back(blk.max_w_res);
    detail += fmt(" L=%d: CDW/NN %s, block %s W_res %.3g, CDW/NNN %s;", L, cdw_nn.non_resilient ? "NR" : "R",
                  blk.non_resilient ? "NR" : "R", blk.max_w_res, cdw_nnn.non_resilient ? "NR" : "R");
  }
  // Theta(1): bounded away from zero and not drifting with L
  const auto [lo, hi] = std::minmax_element(wres.begin(), wres.end());
  ok = ok && *lo > 0.1 && *hi / *lo < 2.0;

  // m-periodic bands: spectra vanish off n = alpha L / m
  std::mt19937_64 rng(1111);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double off = 0.0;
  const int L = 60;
  for (int m : {2, 3, 4, 5, 6}) {
    std::vector<double> cell(m);
    std::vector<cplx> hop(m);
    for (int i = 0; i < m; ++i) cell[i] = u(rng), hop[i] = 0.2 * cplx(u(rng), u(rng));
    ComplexMatrix g = ComplexMatrix::Zero(L, L);
    for (int x = 0; x < L; ++x) {
      g(x, x) = cell[x % m];
      g(x, wrap(x + 1, L)) = hop[x % m];
      g(wrap(x + 1, L), x) = std::conj(hop[x % m]);
    }
    const Covariance gamma(g);
    for (int d : {0, 1, -1}) {
      const auto spec = band_spectrum(gamma, d);
      for (int n = 1; n <= L; ++n)
        if (n % (L / m) != 0) off = std::max(off, std::abs(spec.coefficient(n)));
    }
  }
  ok = ok && off <= 1e-13;
  return {ok, fmt("%s m-periodic off-support weight %.3g (<= 1e-13)", detail.c_str(), off)};
}

Verdict equilibration_soundness() {
  const int L = 256;
  const HoppingModel nn(L, {0.0, 1.0});
  const Covariance g0 = from_occupations(cdw_pattern(L));
  const Covariance eq = equilibrium_covariance(g0);
  const auto c = certificate(PhaseFunction::propagator(nn, 0, 1.0), L);
  int violations = 0;
  double worst = 0.0;
  for (double t : time_grid(c.t0, c.tR, 20, true)) {
    const double seen = max_norm_distance(evolve(g0, propagate(nn, t)), eq);
    const double b = equilibration_bound(g0, nn, t).value;
    worst = std::max(worst, seen / b);
    if (seen > b) ++violations;
  }
  return {violations == 0, fmt("20 times in [%.3g, %.3g], %d violations, max observed/bound %.3g", c.t0, c.tR,
                               violations, worst)};
}

Verdict gaussification() {
  const ManyBodyState psi = paired_state(3);
  const int L = psi.sites();
  const HoppingModel nn(L, {0.0, 1.0});
  const SectorEvolution evo(build_hamiltonian(nn), L);
  const auto quartets = local_quartets(L, 4);
  const double t0 = certificate(PhaseFunction::propagator(nn, 0, 1.0), L).t0;
  const double w0 = wick_deviation(psi, quartets);
  double worst = 0.0;
  std::string trace;
  for (int k = 0; k <= 5; ++k) {
    const double w = wick_deviation(evo.evolve(psi, t0 + k), quartets);
    worst = std::max(worst, w);
    trace += fmt(" %.3g", w);
  }
  return {worst < 0.5 * w0, fmt("t=0: %.3g; t = t0 + 0..5:%s (all < %.3g)", w0, trace.c_str(), 0.5 * w0)};
}

Verdict gge_round_trip() {
  std::mt19937_64 rng(1414);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const int L = 256;
  double worst = 0.0;
  int unconverged = 0;
  for (int trial = 0; trial < 50; ++trial) {
    const int z = 1 + trial % 6;
    GGEParams p;
    p.lambda.resize(z + 1);
    for (auto& v : p.lambda) v = u(rng);
    if (trial % 2) {
      p.eta.resize(z + 1);
      for (auto& v : p.eta) v = kPi * u(rng);
    }
    const auto targets = currents(gge_covariance(p, L));
    const auto fit = fit_gge(targets, z, L);
    if (!fit.feasible || !fit.converged) ++unconverged;
    const auto back = currents(gge_covariance(fit.params, L));
    for (int d = 0; d <= z; ++d) worst = std::max(worst, std::abs(back.values[d] - targets.values[d]));
  }
  const double zero = (gge_covariance(GGEParams{{0.0}, {}}, L).matrix() -
                       0.5 * ComplexMatrix::Identity(L, L)).cwiseAbs().maxCoeff();

  // |X_n|^2 of an i.i.d. uniform [a, b] diagonal has mean (a - b)^2 / (12 L)
  const double a = 0.1, b = 0.8;
  std::uniform_real_distribution<double> ud(a, b);
  const int samples = 200;
  std::vector<double> sq;
  for (int s = 0; s < samples; ++s) {
    ComplexMatrix m = ComplexMatrix::Zero(L, L);
    for (int i = 0; i < L; ++i) m(i, i) = ud(rng);
    sq.push_back(std::norm(band_spectrum(Covariance(m), 0).coefficient(17)));
  }
  const double mean = std::accumulate(sq.begin(), sq.end(), 0.0) / samples;
  double var = 0.0;
  for (double v : sq) var += (v - mean) * (v - mean);
  const double sigma = std::sqrt(var / (samples - 1) / samples);
  const double expected = (a - b) * (a - b) / (12.0 * L);
  const bool stats = std::abs(mean - expected) <= 3.0 * sigma;
  return {worst <= 1e-8 && unconverged == 0 && zero == 0.0 && stats,
          fmt("50 tables: max current error %.3g (<= 1e-8), %d unconverged; lambda = 0 gives |Gamma - I/2| = %.3g; "
              "<|X_17|^2> %.4g vs %.4g (3 sigma = %.3g)",
              worst, unconverged, zero, mean, expected, 3.0 * sigma)};
}

std::set<int> parse_list(const std::string& s) {
  std::set<int> out;
  std::stringstream in(s);
  std::string item;
  while (std::getline(in, item, ',')) out.insert(std::stoi(item));
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  std::set<int> only, expected_fail;
  for (int i = 1; i + 1 < argc; i += 2) {
    const std::string flag = argv[i];
    if (flag == "--only") only = parse_list(argv[i + 1]);
    else if (flag == "--expected-fail") expected_fail = parse_list(argv[i + 1]);
    else {
      std::fprintf(stderr, "unknown option %s\n", argv[i]);
      return 2;
    }
  }

  const std::vector<Criterion> criteria{
      {1, "propagator unitarity", 10, unitarity},
      {2, "propagator vs expm and Fock-space oracle", 30, propagator_oracles},
      {3, "Bessel wavefront bound", 10, bessel},
      {4, "Kusmin-Landau soundness", 120, kusmin_landau},
      {5, "Anderson quench exponent", 300, anderson_exponent},
      {6, "thermal-fit residual", 60, thermal_residual},
      {7, "dephasing vs long-time average", 60, dephasing_average},
      {8, "steady-state circulant 1/L scaling", 120, circulant_scaling},
      {9, "CDW exactness and relaxation", 30, cdw_exactness},
      {10, "superlattice memory", 120, superlattice},
      {11, "resilience classifier", 60, resilience},
      {12, "equilibration-bound soundness", 60, equilibration_soundness},
      {13, "Gaussification trend", 300, gaussification},
      {14, "GGE round trip", 120, gge_round_trip},
  };

  int unexpected = 0;
  for (const auto& c : criteria) {
    if (!only.empty() && !only.count(c.id)) continue;
    const auto start = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = c.run();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool in_time = secs < c.limit_seconds;
    const bool pass = v.pass && in_time;
    if (!pass && !expected_fail.count(c.id)) ++unexpected;
    std::printf("%s %2d %s: %s [%.2f s, limit %.0f s%s]%s\n", pass ? "PASS" : "FAIL", c.id, c.name, v.detail.c_str(),
                secs, c.limit_seconds, in_time ? "" : ", too slow",
                !pass && expected_fail.count(c.id) ? " (known failure)" : "");
    std::fflush(stdout);
  }
  return unexpected == 0 ? 0 : 1;
}
