#include <benchmark/benchmark.h>

#include "sbt/batch_eval.hpp"
#include "sbt/harness.hpp"

namespace {

std::vector<sbt::Genome> batch(std::size_t n) {
    const sbt::avp::SimConfig sim;
    sbt::SearchSpace space{{sim.bounds.v0c.lower, sim.bounds.v0p.lower, sim.bounds.t_wait.lower},
                           {sim.bounds.v0c.upper, sim.bounds.v0p.upper, sim.bounds.t_wait.upper}};
    return sbt::lhs_sample(space, n, 7);
}

void BM_AvpSerial(benchmark::State& state) {
    const auto genomes = batch(static_cast<std::size_t>(state.range(0)));
    const auto eval = sbt::harness::avp_evaluator({}, {});
    for (auto _ : state) benchmark::DoNotOptimize(sbt::evaluate_batch_serial(eval, genomes));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_AvpParallel(benchmark::State& state) {
    const auto genomes = batch(static_cast<std::size_t>(state.range(0)));
    const auto eval = sbt::harness::avp_evaluator({}, {});
    for (auto _ : state) benchmark::DoNotOptimize(sbt::evaluate_batch_parallel(eval, genomes));
    state.SetItemsProcessed(state.iterations() * state.range(0));
    state.counters["threads"] = sbt::parallel_thread_count();
}

}  // namespace

BENCHMARK(BM_AvpSerial)->Arg(20)->Arg(100)->Arg(1000)->UseRealTime();
BENCHMARK(BM_AvpParallel)->Arg(20)->Arg(100)->Arg(1000)->UseRealTime();

BENCHMARK_MAIN();
