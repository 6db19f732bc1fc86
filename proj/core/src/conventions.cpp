#include <algorithm>
#include <cmath>

#include "quasifree/experiments.hpp"
#include "quasifree/oracle.hpp"
#include "quasifree/propagator.hpp"

namespace quasifree {

std::vector<ConventionCheck> convention_checks() {
  std::vector<ConventionCheck> out;
  auto add = [&out](std::string name, double deviation, double tolerance) {
    out.push_back({std::move(name), deviation, tolerance, deviation <= tolerance});
  };

  // e^{-iHt} f^dag_x |0> has amplitude conj(G_{y,x}(t)) on site y.
  {
    const HoppingModel model(7, {0.3, 1.0, -0.4});
    const double t = 0.83;
    const Propagator g = propagate(model, t);
    const SectorEvolution evo(build_hamiltonian(model), model.size());
    double dev = 0.0;
    for (int x = 0; x < model.size(); ++x) {
      const auto psi = evo.evolve(ManyBodyState::single_particle(model.size(), x), t);
      for (int y = 0; y < model.size(); ++y)
        dev = std::max(dev, std::abs(psi.vector()(std::size_t{1} << y) - std::conj(g(y, x))));
    }
    add("single-particle amplitude equals conj G(y,x)", dev, 1e-10);
  }

  // Gamma(t) = G Gamma G^dag against the evolved Fock state.
  {
    const HoppingModel model(8, {0.1, 1.0, 0.35, -0.2});
    const std::vector<int> occ{1, 1, 0, 1, 0, 0, 1, 0};
    const double t = 1.7;
    const Covariance direct = evolve(from_occupations(occ), propagate(model, t));
    const Covariance oracle = covariance_of(evolve_state(ManyBodyState::fock(occ), build_hamiltonian(model), t));
    add("evolve matches the many-body evolution", max_norm_distance(direct, oracle), 1e-10);
  }

  // Gamma = f(h)^T for a complex Hermitian h.
  const int L = 6;
  ComplexMatrix h = coupling_matrix(HoppingModel(L, {0.2, 1.0, 0.3})).cast<cplx>();
  h(0, 2) += cplx(0.0, 0.25);
  h(2, 0) -= cplx(0.0, 0.25);
  h(1, 4) += cplx(0.1, 0.4);
  h(4, 1) += cplx(0.1, -0.4);
  const double beta = 0.7, mu = 0.3;
  const ManyBodyState gibbs = gibbs_state(build_hamiltonian(h), L, beta, mu);
  add("thermal covariance matches the Gibbs state", max_norm_distance(thermal_covariance(h, beta, mu), covariance_of(gibbs)),
      1e-10);

  // I_1 = (1/L) sum_k n_k e^{-i p_k}; negative for J_1 > 0 below half filling of the upper band.
  {
    const HoppingModel model(8, {0.0, 1.0});
    const double b = 2.0, m = 0.5;
    cplx expected = 0.0;
    for (int k = 0; k < model.size(); ++k) {
      const double p = kTwoPi * k / model.size();
      expected += std::polar(1.0 / (1.0 + std::exp(b * (dispersion(model, p) - m))), -p);
    }
    expected /= static_cast<double>(model.size());
    const cplx fast = currents(clean_thermal_covariance(model, b, m)).values[1];
    const cplx oracle = currents(covariance_of(gibbs_state(build_hamiltonian(model), model.size(), b, m))).values[1];
    double dev = std::max(std::abs(fast - expected), std::abs(oracle - expected));
    if (!(expected.real() < 0.0)) dev = std::max(dev, 1.0);
    add("nearest-neighbour current I_1 sign and value", dev, 1e-10);
  }

  add("Gibbs state satisfies Wick's theorem", wick_deviation(gibbs, local_quartets(L, 4)), 1e-10);

  // G_{x,y} ~ conj(i^d J_d(-2t)) within pi |d - 2t| / L.
  {
    const HoppingModel model(400, {0.0, 1.0});
    const double t = 4.0;
    const Propagator g = propagate(model, t);
    double excess = 0.0;
    for (int d = -15; d <= 15; ++d) {
      const double err = std::abs(std::conj(g(wrap(d, model.size()), 0)) - bessel_approximation(d, t));
      excess = std::max(excess, err - bessel_error_bound(d, t, model.size()));
    }
    add("propagator follows the Bessel wavefront", std::max(excess, 0.0), 1e-12);
  }
  return out;
}

}  // namespace quasifree
