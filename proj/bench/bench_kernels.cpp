// Parallel kernels against their serial references.
//   ./bench_kernels --benchmark_filter=Graph
// Thread count follows OMP_NUM_THREADS.

#include <benchmark/benchmark.h>

#include <map>

#include "lexdiv/diversity.hpp"
#include "lexdiv/popgen.hpp"
#include "lexdiv/reference.hpp"
#include "lexdiv/simulate.hpp"

using namespace lexdiv;

namespace {

const DedupProfile& uniform(std::size_t n) {
    static std::map<std::size_t, DedupProfile> cache;
    auto it = cache.find(n);
    if (it == cache.end()) it = cache.emplace(n, deduplicate(gen_random_uniform(n, 200, 4, RngStream(1)))).first;
    return it->second;
}

const DedupProfile& clustered() {
    static const DedupProfile p = deduplicate(gen_clustered(400, 200, 8, 0.05, RngStream(2)));
    return p;
}

const Epsilon kEps = Epsilon::from_ratio(1, 2);

void BM_GraphParallel(benchmark::State& state) {
    const auto& p = uniform(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(build_similarity_graph(p, kEps, 0.0));
    state.SetComplexityN(state.range(0));
}

void BM_GraphReference(benchmark::State& state) {
    const auto& p = uniform(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(reference::build_similarity_graph(p, kEps, 0.0));
    state.SetComplexityN(state.range(0));
}

void BM_CliqueNumber(benchmark::State& state) {
    const auto g = build_similarity_graph(clustered(), Epsilon::from_ratio(3, 10), 0.0);
    for (auto _ : state) benchmark::DoNotOptimize(clique_number(g));
}

void BM_RuntimeParallel(benchmark::State& state) {
    const auto& p = clustered();
    const auto trials = static_cast<std::uint64_t>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(estimate_runtime(p, trials, RngStream(3)));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_RuntimeReference(benchmark::State& state) {
    const auto& p = clustered();
    const auto trials = static_cast<std::uint64_t>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(reference::estimate_runtime(p, trials, RngStream(3)));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_DistributionParallel(benchmark::State& state) {
    const auto& p = clustered();
    const auto trials = static_cast<std::uint64_t>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(selection_distribution(p, trials, RngStream(4)));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_DistributionReference(benchmark::State& state) {
    const auto& p = clustered();
    const auto trials = static_cast<std::uint64_t>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(reference::selection_distribution(p, trials, RngStream(4)));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

}  // namespace

BENCHMARK(BM_GraphParallel)->Arg(250)->Arg(500)->Arg(1000)->Unit(benchmark::kMillisecond)->Complexity();
BENCHMARK(BM_GraphReference)->Arg(250)->Arg(500)->Arg(1000)->Unit(benchmark::kMillisecond)->Complexity();
BENCHMARK(BM_CliqueNumber)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_RuntimeParallel)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_RuntimeReference)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_DistributionParallel)->Arg(10000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_DistributionReference)->Arg(10000)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
