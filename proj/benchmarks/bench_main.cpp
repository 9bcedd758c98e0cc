#include <benchmark/benchmark.h>

#include "stripesim/eval.hpp"
#include "stripesim/scenario.hpp"

using namespace stripesim;

namespace {

SystemConfig bench_config(int L, int N, int K) {
  SystemConfig cfg;
  cfg.stripes = 1;
  cfg.aps_per_stripe = L;
  cfg.antennas = N;
  cfg.ues = K;
  cfg.fronthaul_bits = 2.0 * K;
  return cfg;
}

void BM_SpatialCovariance(benchmark::State& state) {
  const int N = static_cast<int>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        local_scattering_covariance(N, 1.0, 0.4, 0.26, 0.5));
  }
}
BENCHMARK(BM_SpatialCovariance)->Arg(8)->Arg(32)->Arg(128);

void BM_SolveQuantizer(benchmark::State& state) {
  const int K = static_cast<int>(state.range(0));
  Rng rng(1);
  RVec gamma(K);
  for (int k = 0; k < K; ++k) gamma(k) = 30.0 * rng.uniform();
  std::sort(gamma.data(), gamma.data() + K, std::greater<double>());
  for (auto _ : state) {
    benchmark::DoNotOptimize(solve_quantizer(gamma, 2.0 * K));
  }
}
BENCHMARK(BM_SolveQuantizer)->Arg(2)->Arg(8)->Arg(32);

void BM_RunStripe(benchmark::State& state) {
  const int L = static_cast<int>(state.range(0));
  const SystemConfig cfg = bench_config(L, 8, 4);
  const Scenario sc = make_scenario(cfg, 1);
  std::vector<StripeInput> in;
  for (const ApChannelState& ap : sc.aps[0]) in.push_back({&ap.H_hat, &ap.Sigma_w});
  for (auto _ : state) {
    benchmark::DoNotOptimize(run_stripe(in, sc.Sigma_x, cfg.fronthaul_bits));
  }
}
BENCHMARK(BM_RunStripe)->Arg(2)->Arg(4)->Arg(8);

void BM_DesignAndEvaluate(benchmark::State& state) {
  const SystemConfig cfg = bench_config(static_cast<int>(state.range(0)), 8, 4);
  const Scenario sc = make_scenario(cfg, 1);
  for (auto _ : state) {
    Rng rng(0);
    const InpStrategy st =
        design_network(sc, cfg.fronthaul_bits, SchemeOptions{}, rng);
    benchmark::DoNotOptimize(evaluate(sc, st, cfg.fronthaul_bits));
  }
}
BENCHMARK(BM_DesignAndEvaluate)->Arg(4)->Arg(8);

}  // namespace

BENCHMARK_MAIN();
