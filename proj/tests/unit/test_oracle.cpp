#include <doctest.h>

#include <algorithm>
#include <bit>

#include "helpers.hpp"
#include "quasifree/errors.hpp"
#include "quasifree/experiments.hpp"
#include "quasifree/oracle.hpp"
#include "quasifree/propagator.hpp"

using namespace quasifree;

TEST_CASE("canonical anticommutation relations") {
  for (int L : {1, 3, 6}) CHECK(FockOperatorSet(L).anticommutation_deviation() < 1e-15);
  const FockOperatorSet ops(4);
  // f_2 on |site0, site2 occupied> = -|site0>: one occupied site below.
  ComplexVector v = ComplexVector::Zero(16);
  v(0b0101) = 1.0;
  const ComplexVector out = ops.annihilation(2) * v;
  CHECK(out(0b0001) == cplx(-1.0));
  CHECK(out.cwiseAbs().sum() == doctest::Approx(1.0));
  CHECK_THROWS_AS(FockOperatorSet(kMaxOracleSites + 1), PreconditionViolated);
}

TEST_CASE("many-body spectrum is all sums of single-particle energies") {
  const HoppingModel model(6, {0.2, 1.0, -0.35});
  const auto w = eigenvalues(model);
  std::vector<double> sums;
  for (unsigned s = 0; s < 64; ++s) {
    double e = 0.0;
    for (int k = 0; k < 6; ++k)
      if (s >> k & 1u) e += w[k];
    sums.push_back(e);
  }
  std::sort(sums.begin(), sums.end());
  const auto spec = SectorEvolution(build_hamiltonian(model), 6).spectrum();
  REQUIRE(spec.size() == 64);
  for (int i = 0; i < 64; ++i) CHECK(spec[i] == doctest::Approx(sums[i]).epsilon(1e-12).scale(1.0));
}

TEST_CASE("sector evolution equals the dense exponential of H") {
  const auto model = sample_anderson(5, 1.0, {0.0, 1.0}, 4);
  const SparseOperator h = build_hamiltonian(model);
  const ComplexMatrix dense = ComplexMatrix(h);
  std::mt19937_64 rng(5);
  std::normal_distribution<double> n(0.0, 1.0);
  ComplexVector psi(32);
  for (int i = 0; i < 32; ++i) psi(i) = (std::popcount(static_cast<unsigned>(i)) % 2 == 0) ? cplx(n(rng), n(rng)) : 0.0;
  psi.normalize();
  const double t = 1.4;
  const ComplexMatrix u = (cplx(0.0, -t) * dense).exp();
  const auto evolved = evolve_state(ManyBodyState::pure(5, psi), h, t);
  CHECK((evolved.vector() - u * psi).cwiseAbs().maxCoeff() < 1e-11);
  CHECK(evolved.norm() == doctest::Approx(1.0));
}

TEST_CASE("parity bookkeeping") {
  CHECK(ManyBodyState::fock(std::vector<int>{1, 1, 0}).parity() == ManyBodyState::Parity::Even);
  CHECK(ManyBodyState::single_particle(3, 1).parity() == ManyBodyState::Parity::Odd);
  ComplexVector mix = ComplexVector::Zero(4);
  mix(0) = mix(1) = std::sqrt(0.5);
  CHECK_THROWS_AS(ManyBodyState::pure(2, mix), PreconditionViolated);
  const auto g = gibbs_state(build_hamiltonian(HoppingModel(4, {0.0, 1.0})), 4, 1.0, 0.0);
  CHECK(g.parity() == ManyBodyState::Parity::Mixed);
  CHECK(g.parity_violation() < 1e-15);
}

TEST_CASE("Wick's theorem: Gaussian states pass, paired states do not") {
  const auto fock = ManyBodyState::fock(std::vector<int>{1, 0, 1, 1, 0, 0});
  CHECK(wick_deviation(fock, local_quartets(6, 4)) < 1e-15);

  const auto paired = paired_state(2);
  CHECK(paired.sites() == 8);
  const auto q = local_quartets(8, 4);
  CHECK(wick_deviation(paired, q) == doctest::Approx(0.5));
  CHECK(covariance_of(paired).trace() == doctest::Approx(4.0));

  // Gaussian states stay Gaussian under quadratic evolution.
  const auto evolved = evolve_state(fock, build_hamiltonian(HoppingModel(6, {0.0, 1.0})), 2.0);
  CHECK(wick_deviation(evolved, local_quartets(6, 4)) < 1e-12);
}

TEST_CASE("local quartets stay inside a window") {
  const auto q = local_quartets(8, 3);
  CHECK(!q.empty());
  for (const auto& a : q) {
    bool inside = false;
    for (int s = 0; s < 8 && !inside; ++s) {
      inside = std::all_of(a.begin(), a.end(), [&](int x) { return wrap(x - s, 8) < 3; });
    }
    CHECK(inside);
  }
}

TEST_CASE("convention checks") {
  for (const auto& c : convention_checks()) {
    INFO(c.name);
    CHECK(c.passed);
  }
}
