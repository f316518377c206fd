#include <benchmark/benchmark.h>

#include "aoigf/asymptotics.hpp"
#include "aoigf/config.hpp"
#include "aoigf/markov.hpp"
#include "aoigf/simulator.hpp"
#include "aoigf/slot_oracle.hpp"

using namespace aoigf;

namespace {

SystemConfig noma_config(int users, int levels, int slots, double q) {
  SystemConfig cfg;
  cfg.num_users = users;
  cfg.scheme = Scheme::Noma;
  cfg.num_levels = levels;
  cfg.slots_per_frame = slots;
  cfg.slot_duration = 6.0;
  cfg.tx_policy = TxPolicy::fixed(q);
  return cfg;
}

void BM_SolveEta(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(solve_eta());
}
BENCHMARK(BM_SolveEta);

void BM_NomaTransitions(benchmark::State& state) {
  const int users = static_cast<int>(state.range(0));
  const SystemConfig cfg = noma_config(users, 4, 1, 0.1);
  for (auto _ : state) benchmark::DoNotOptimize(noma_transitions(cfg));
}
BENCHMARK(BM_NomaTransitions)->Arg(8)->Arg(50)->Arg(200);

void BM_RenewalMoments(benchmark::State& state) {
  const SystemConfig cfg = noma_config(200, 4, 8, 0.02);
  const TransitionModel model = noma_transitions(cfg);
  for (auto _ : state)
    benchmark::DoNotOptimize(renewal_moments(model, 8, 6.0));
}
BENCHMARK(BM_RenewalMoments);

void BM_EnumerateNomaSlot(benchmark::State& state) {
  const std::vector<double> succ(4, 1.0);
  for (auto _ : state)
    benchmark::DoNotOptimize(enumerate_noma_slot(6, 4, 0.3, succ));
}
BENCHMARK(BM_EnumerateNomaSlot);

void BM_Simulate(benchmark::State& state) {
  SystemConfig cfg = noma_config(8, 2, 1, 0.2);
  cfg.tx_power = 100.0;
  const long frames = 2000;
  uint64_t seed = 1;
  for (auto _ : state)
    benchmark::DoNotOptimize(simulate(cfg, frames, seed++));
  state.SetItemsProcessed(state.iterations() * frames);
}
BENCHMARK(BM_Simulate);

}  // namespace

BENCHMARK_MAIN();
