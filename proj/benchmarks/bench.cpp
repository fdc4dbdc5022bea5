#include <benchmark/benchmark.h>

#include "pdlogic/integrator.hpp"
#include "pdlogic/protocols.hpp"
#include "pdlogic/rng.hpp"

using namespace pdl;

namespace {

DpoParams gate_dpo() { return {1.0, 0.5, 2.0, 0.1, 0.0, gate_network(0.3)}; }

KpoParams gate_kpo() {
  KpoParams p;
  p.p0 = 2.5;
  p.A0 = 0.6;
  p.omega_mod = 5.5;
  p.kappa = 0.4;
  p.N = 1e3;
  p.network = gate_network(0.4);
  return p;
}

void BM_Philox(benchmark::State& state) {
  std::uint64_t k = 0;
  for (auto _ : state) benchmark::DoNotOptimize(rng::normal_pair(1, k++, 3, 0));
}
BENCHMARK(BM_Philox);

template <typename P>
void drift_bench(benchmark::State& state, const P& p) {
  SystemState s(kind_of(ModelParams{p}), p.network.sites());
  for (double& v : s.values()) v = 0.3;
  std::vector<double> out(s.values().size());
  double t = 0.0;
  for (auto _ : state) {
    if constexpr (std::is_same_v<P, DpoParams>) {
      dpo_drift(s.values(), t, p, {}, out);
    } else {
      kpo_drift(s.values(), t, p, {}, out);
    }
    benchmark::DoNotOptimize(out.data());
    t += 1e-3;
  }
}
void BM_DriftDpo4(benchmark::State& state) { drift_bench(state, gate_dpo()); }
void BM_DriftKpo4(benchmark::State& state) { drift_bench(state, gate_kpo()); }
BENCHMARK(BM_DriftDpo4);
BENCHMARK(BM_DriftKpo4);

// 160 drive periods of the four-site gate network, noiseless or noisy.
void BM_IntegrateDpo4(benchmark::State& state) {
  DpoParams p = gate_dpo();
  p.T_tilde = state.range(0) ? 1e-3 : 0.0;
  SystemState s(ModelKind::Dpo, 4);
  s.set_dpo(0, 0.5, 0.0);
  IntegrationConfig cfg = make_config(p, 0.0, 160 * drive_period(p));
  cfg.noise_enabled_from = 0.0;
  cfg.record_from = cfg.tf - 18 * drive_period(p);
  for (auto _ : state) benchmark::DoNotOptimize(integrate(p, {}, s, cfg).final_state);
  state.SetItemsProcessed(state.iterations() * 160 * 512);
}
BENCHMARK(BM_IntegrateDpo4)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_TruthTableDpo(benchmark::State& state) {
  const ProtocolContext ctx(DpoParams{1.0, 0.5, 2.0, 0.1, state.range(0) ? 1e-3 : 0.0, Network(1)});
  (void)run_truth_table(ctx, GateKind::Nand, 0.3, 2 * ctx.drive_period());  // warm the init cache
  std::uint64_t seed = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        run_truth_table(ctx, GateKind::Nand, 0.3, 2 * ctx.drive_period(), seed++).aggregate);
  }
}
BENCHMARK(BM_TruthTableDpo)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
