#include <benchmark/benchmark.h>

#include <random>

#include "quasifree/bounds.hpp"
#include "quasifree/covariance.hpp"
#include "quasifree/gge.hpp"
#include "quasifree/model.hpp"
#include "quasifree/propagator.hpp"

using namespace quasifree;

static void Propagate(benchmark::State& state) {
  const HoppingModel model(static_cast<int>(state.range()), {0.0, 1.0, 0.3});
  double t = 1.0;
  for (auto _ : state) {
    auto g = propagate(model, t);
    benchmark::DoNotOptimize(g);
    t += 0.01;
  }
  state.SetComplexityN(state.range());
}
BENCHMARK(Propagate)->RangeMultiplier(4)->Range(64, 16384)->Complexity();

// full G Gamma G^dag on a dense covariance
static void Evolve(benchmark::State& state) {
  const int L = static_cast<int>(state.range());
  const HoppingModel model(L, {0.0, 1.0});
  std::vector<int> occ(L);
  for (int x = 0; x < L; ++x) occ[x] = 1 - x % 2;
  const Covariance g0 = from_occupations(occ);
  const Propagator g = propagate(model, 3.0);
  for (auto _ : state) {
    auto gt = evolve(g0, g);
    benchmark::DoNotOptimize(gt);
  }
  state.SetComplexityN(state.range());
}
BENCHMARK(Evolve)->RangeMultiplier(2)->Range(64, 1024)->Complexity();

static void MomentumEvolve(benchmark::State& state) {
  const int L = static_cast<int>(state.range());
  const auto dis = sample_anderson(L, 5.0, {0.0, 1.0}, 0);
  const MomentumEvolver evo(thermal_covariance(coupling_matrix(dis), 1.0, 0.0), dis.base());
  double t = 1.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(evo.distance_to_dephased(t));
    t *= 1.01;
  }
  state.SetComplexityN(state.range());
}
BENCHMARK(MomentumEvolve)->RangeMultiplier(2)->Range(64, 1024)->Complexity();

static void Certificate(benchmark::State& state) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const int R = static_cast<int>(state.range());
  std::vector<double> j(R + 1);
  for (auto& v : j) v = u(rng);
  const HoppingModel model(1000, j);
  int n = 1;
  for (auto _ : state) {
    try {
      auto c = certificate(PhaseFunction::band_mixing(model, n, 0, 1.0), 1000);
      benchmark::DoNotOptimize(c);
    } catch (const std::exception&) {
    }
    n = n % 999 + 1;
  }
}
BENCHMARK(Certificate)->DenseRange(1, 4);

static void FitGge(benchmark::State& state) {
  const int z = static_cast<int>(state.range());
  GGEParams p;
  p.lambda.assign(z + 1, 0.3);
  const auto targets = currents(gge_covariance(p, 256));
  for (auto _ : state) {
    auto fit = fit_gge(targets, z, 256);
    benchmark::DoNotOptimize(fit);
  }
}
BENCHMARK(FitGge)->DenseRange(1, 6);

BENCHMARK_MAIN();
