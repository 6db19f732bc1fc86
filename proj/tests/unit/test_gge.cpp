#include <doctest.h>

#include "helpers.hpp"
#include "quasifree/errors.hpp"
#include "quasifree/gge.hpp"

using namespace quasifree;

TEST_CASE("lambda = 0 is the infinite-temperature state") {
  const Covariance g = gge_covariance(GGEParams{{0.0, 0.0, 0.0}, {}}, 32);
  CHECK(testing::max_abs(g.matrix() - 0.5 * ComplexMatrix::Identity(32, 32)) < 1e-15);
}

TEST_CASE("a thermal state is a GGE with lambda = beta (J - mu)") {
  const HoppingModel model(24, {0.4, 1.0, -0.3});
  const double beta = 1.3, mu = -0.2;
  const GGEParams p{{beta * (0.4 - mu), beta * 1.0, beta * -0.3}, {}};
  CHECK(testing::max_abs(gge_covariance(p, 24).matrix() - clean_thermal_covariance(model, beta, mu).matrix()) < 1e-14);
}

TEST_CASE("GGE occupations and currents by hand") {
  const GGEParams p{{0.3, 0.8, -0.2}, {0.0, 0.4, 1.1}};
  const int L = 20;
  const auto n = gge_occupations(p, L);
  const auto cur = currents(gge_covariance(p, L));
  for (int z = 0; z <= 3; ++z) {
    cplx iz = 0.0;
    for (int k = 0; k < L; ++k) iz += n[k] * std::polar(1.0, -kTwoPi * k * z / L);
    CHECK(std::abs(cur.values[z] - iz / double(L)) < 1e-14);
  }
  const double eps5 = 0.3 + 2 * 0.8 * std::cos(kTwoPi * 5 / L + 0.4) + 2 * -0.2 * std::cos(kTwoPi * 10 / L + 1.1);
  CHECK(n[5] == doctest::Approx(1.0 / (1.0 + std::exp(eps5))));
  CHECK_THROWS_AS(gge_occupations(GGEParams{{0.0, 1.0}, {0.0}}, 8), DimensionMismatch);
}

TEST_CASE("fit_gge reproduces currents of random ensembles") {
  std::mt19937_64 rng(41);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const int L = 256;
  for (int trial = 0; trial < 12; ++trial) {
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
    REQUIRE(fit.feasible);
    CHECK(fit.converged);
    CHECK(fit.max_residual <= 1e-8);
    const auto back = currents(gge_covariance(fit.params, L));
    for (int d = 0; d <= z; ++d) CHECK(std::abs(back.values[d] - targets.values[d]) <= 1e-8);
    // The dual is strictly convex, so the multipliers are recovered too.
    CHECK(std::abs(fit.params.lambda[0] - p.lambda[0]) < 1e-6);
    for (int d = 1; d <= z; ++d) {
      const double eta_fit = fit.params.eta.empty() ? 0.0 : fit.params.eta[d];
      const double eta_ref = p.eta.empty() ? 0.0 : p.eta[d];
      const cplx got = fit.params.lambda[d] * std::exp(cplx(0.0, eta_fit));
      const cplx ref = p.lambda[d] * std::exp(cplx(0.0, eta_ref));
      CHECK(std::abs(got - ref) < 1e-6);
    }
  }
}

TEST_CASE("infeasible targets are reported, not thrown") {
  auto t = make_current_table({1.2, 0.1});
  const auto f = fit_gge(t, 1, 64);
  CHECK(!f.feasible);
  CHECK(!f.message.empty());
  const auto g = fit_gge(make_current_table({0.5, 0.6}), 1, 64);
  CHECK(!g.feasible);
  CHECK_THROWS_AS(fit_gge(make_current_table({0.5, 0.1, 0.0}), 2, 4), PreconditionViolated);
  // A Fermi sea maximizes I_1 at fixed filling, so it sits on the boundary of the
  // realizable set. Within double precision a fit may still "converge", but only
  // with multipliers far outside the O(1) range of interior points.
  std::vector<double> occ(32, 0.0);
  for (int k = 0; k < 8; ++k) occ[k] = 1.0, occ[32 - 1 - k] = 1.0;
  const auto edge = currents(covariance_from_occupations_k(occ));
  const auto h = fit_gge(edge, 3, 32);
  CHECK((!h.feasible || !h.converged || std::abs(h.params.lambda[1]) > 20.0));
}

TEST_CASE("fit_thermal recovers beta and mu") {
  const HoppingModel model(60, {0.0, 1.0});
  for (auto [beta, mu] : {std::pair{1.0, 0.0}, std::pair{0.3, 0.7}, std::pair{4.0, -1.2}}) {
    const auto fit = fit_thermal(clean_thermal_covariance(model, beta, mu), model);
    CHECK(fit.residual < 1e-7);
    CHECK(fit.beta == doctest::Approx(beta).epsilon(1e-4));
    CHECK(fit.mu == doctest::Approx(mu).epsilon(1e-4).scale(1.0));
    CHECK(!fit.boundary_hit);
  }
  // Infinite temperature at quarter filling sits on the box edge.
  std::vector<int> occ(60, 0);
  for (int x = 0; x < 60; x += 4) occ[x] = 1;
  CHECK(fit_thermal(equilibrium_covariance(from_occupations(occ)), model).boundary_hit);
}

TEST_CASE("relevant range") {
  CHECK(relevant_range(0.5, 2.0, 1e-2) == static_cast<int>(std::ceil(2.0 * std::log(50.0))));
  CHECK(relevant_range(0.5, 0.0, 1e-2) == 0);
  CHECK(relevant_range(1e-3, 2.0, 1e-2) == 0);
  CHECK_THROWS_AS(relevant_range(0.5, 2.0, 0.0), PreconditionViolated);
}

TEST_CASE("uniformly random diagonal: band statistics") {
  std::mt19937_64 rng(42);
  const double a = 0.2, b = 0.9;
  std::uniform_real_distribution<double> u(a, b);
  const int L = 256, samples = 200;
  const std::vector<int> freqs{1, 37, L / 2, L};
  std::vector<std::vector<cplx>> x(freqs.size());
  for (int s = 0; s < samples; ++s) {
    ComplexMatrix m = ComplexMatrix::Zero(L, L);
    for (int i = 0; i < L; ++i) m(i, i) = u(rng);
    const auto spec = band_spectrum(Covariance(m), 0);
    for (std::size_t i = 0; i < freqs.size(); ++i) x[i].push_back(spec.coefficient(freqs[i]));
  }
  const double var = (a - b) * (a - b) / (12.0 * L);
  for (std::size_t i = 0; i < freqs.size(); ++i) {
    const cplx mean = freqs[i] == L ? cplx(0.5 * (a + b)) : cplx(0.0);
    std::vector<double> sq;
    for (auto v : x[i]) sq.push_back(std::norm(v - mean));
    double m1 = 0.0, m2 = 0.0;
    for (double v : sq) m1 += v;
    m1 /= samples;
    for (double v : sq) m2 += (v - m1) * (v - m1);
    const double sigma = std::sqrt(m2 / (samples - 1) / samples);
    CHECK(std::abs(m1 - var) <= 3.0 * sigma);
  }
}
