#include <doctest.h>

#include "helpers.hpp"
#include "quasifree/errors.hpp"
#include "quasifree/oracle.hpp"
#include "quasifree/propagator.hpp"

using namespace quasifree;

namespace {

double max_entry_deviation(const Propagator& g, const ComplexMatrix& ref) {
  double dev = 0.0;
  for (int x = 0; x < g.size(); ++x)
    for (int y = 0; y < g.size(); ++y) dev = std::max(dev, std::abs(g(x, y) - ref(x, y)));
  return dev;
}

}  // namespace

TEST_CASE("clean propagator equals the matrix exponential") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> time(0.0, 20.0);
  for (int trial = 0; trial < 8; ++trial) {
    const auto j = testing::random_couplings(rng, 1 + trial % 3);
    const HoppingModel model(32, j);
    const double t = time(rng);
    const Propagator g = propagate(model, t);
    CHECK(g.kind() == Propagator::Kind::Circulant);
    CHECK(max_entry_deviation(g, testing::expm_i(testing::naive_coupling_matrix(32, j), t)) < 1e-8);
    CHECK(g.unitarity_deviation() < 1e-10);
  }
}

TEST_CASE("disordered propagator equals the matrix exponential") {
  const auto model = sample_anderson(24, 2.0, {0.0, 1.0, 0.3}, 9);
  const double t = 3.7;
  const Propagator g = propagate_disordered(model, t);
  CHECK(g.kind() == Propagator::Kind::Dense);
  CHECK(max_entry_deviation(g, testing::expm_i(coupling_matrix(model), t)) < 1e-9);
  CHECK(g.unitarity_deviation() < 1e-10);
}

TEST_CASE("composition and time zero") {
  const HoppingModel model(40, {0.3, 1.0, -0.5});
  const Propagator a = propagate(model, 1.3), b = propagate(model, 2.1), ab = propagate(model, 3.4);
  const Propagator c = a.compose(b);
  double dev = 0.0;
  for (int x = 0; x < 40; ++x)
    for (int y = 0; y < 40; ++y) dev = std::max(dev, std::abs(c(x, y) - ab(x, y)));
  CHECK(dev < 1e-12);

  const Propagator id = propagate(model, 0.0);
  for (int x = 0; x < 40; ++x) CHECK(std::abs(id(x, x) - 1.0) < 1e-14);
  CHECK(std::abs(id(3, 5)) < 1e-14);
}

TEST_CASE("translation invariance and index wrapping") {
  const HoppingModel model(17, {0.0, 1.0, 0.4});
  const Propagator g = propagate(model, 2.5);
  for (int s = 0; s < 17; ++s) CHECK(std::abs(g(s + 3, s) - g(3, 0)) < 1e-14);
  CHECK(std::abs(g(-1, 0) - g(16, 0)) < 1e-15);
}

TEST_CASE("single-particle sector of the Fock-space oracle") {
  std::mt19937_64 rng(21);
  const auto j = testing::random_couplings(rng, 2);
  const HoppingModel model(10, j);
  const double t = 1.9;
  const Propagator g = propagate(model, t);
  const SectorEvolution evo(build_hamiltonian(model), 10);
  double dev = 0.0;
  for (int x = 0; x < 10; ++x) {
    const auto psi = evo.evolve(ManyBodyState::single_particle(10, x), t);
    for (int y = 0; y < 10; ++y) dev = std::max(dev, std::abs(psi.vector()(std::size_t{1} << y) - std::conj(g(y, x))));
  }
  CHECK(dev < 1e-10);
}

TEST_CASE("Bessel wavefront") {
  // Independent value: J_0(2) = 0.22389077914123567
  CHECK(bessel_approximation(0, -1.0).real() == doctest::Approx(0.22389077914123567).epsilon(1e-14));
  // i^d J_d(-2t) = i^d (-1)^d J_d(2t)
  CHECK(std::abs(bessel_approximation(3, 1.5) - cplx(0.0, 1.0) * std::cyl_bessel_j(3.0, 3.0)) < 1e-15);
  CHECK(std::abs(bessel_approximation(-2, 1.0) - cplx(-1.0, 0.0) * std::cyl_bessel_j(2.0, 2.0)) < 1e-15);

  const HoppingModel model(1000, {0.0, 1.0});
  int violations = 0;
  for (double t : {5.0, 10.0, 20.0}) {
    const Propagator g = propagate(model, t);
    for (int d = -60; d <= 60; ++d) {
      const double err = std::abs(std::conj(g(wrap(d, 1000), 0)) - bessel_approximation(d, t));
      if (err > bessel_error_bound(d, t, 1000) + 1e-12) ++violations;
    }
  }
  CHECK(violations == 0);
  CHECK(bessel_error_bound(10, 5.0, 1000) == 0.0);
}

TEST_CASE("dense propagator checks its input") {
  CHECK_THROWS_AS(Propagator::dense(1.0, ComplexMatrix::Zero(3, 4)), DimensionMismatch);
  CHECK_THROWS_AS(propagate(HoppingModel(10, {0.0, 1.0}), 1.0).compose(propagate(HoppingModel(11, {0.0, 1.0}), 1.0)),
                  DimensionMismatch);
}
