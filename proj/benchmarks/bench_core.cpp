#include <random>

#include <benchmark/benchmark.h>

#include "argo/explore.hpp"
#include "argo/graph.hpp"
#include "argo/layout.hpp"
#include "argo/snapshot.hpp"
#include "support.hpp"

using namespace argo;

namespace {

CitationNetwork network_of(std::size_t nodes, std::size_t edges) {
    std::mt19937_64 rng(nodes * 7919 + edges);
    std::vector<Paper> papers;
    for (std::size_t i = 1; i <= nodes; ++i) papers.push_back(argo::test::make_paper(static_cast<std::int64_t>(i)));
    std::set<CitationEdge> chosen;
    std::uniform_int_distribution<std::int64_t> pick(1, static_cast<std::int64_t>(nodes));
    while (chosen.size() < edges) {
        auto a = pick(rng), b = pick(rng);
        if (a != b) chosen.insert({corpus_id(a), corpus_id(b)});
    }
    CitationNetwork net;
    net.merge(std::move(papers), std::vector<CitationEdge>(chosen.begin(), chosen.end()));
    return net;
}

} // namespace

static void BM_PageRank(benchmark::State& state) {
    auto nodes = static_cast<std::size_t>(state.range(0));
    auto net = network_of(nodes, nodes * 3);
    for (auto _ : state) {
        auto copy = net;
        copy.add_paper(argo::test::make_paper(static_cast<std::int64_t>(nodes) + 1));  // forces a recompute
        benchmark::DoNotOptimize(copy.metrics());
    }
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_PageRank)->RangeMultiplier(4)->Range(16, 1024)->Complexity();

static void BM_Layout(benchmark::State& state) {
    auto nodes = static_cast<std::size_t>(state.range(0));
    auto net = network_of(nodes, nodes * 2);
    LayoutParams p;
    for (auto _ : state) benchmark::DoNotOptimize(run_layout(net, p));
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_Layout)->RangeMultiplier(2)->Range(16, 256)->Complexity()->Unit(benchmark::kMillisecond);

static void BM_PlaceExpansion(benchmark::State& state) {
    LayoutParams p;
    for (auto _ : state) benchmark::DoNotOptimize(place_expansion({10, 5}, 5, p));
}
BENCHMARK(BM_PlaceExpansion);

static void BM_Serialize(benchmark::State& state) {
    Exploration ex;
    ex.network = network_of(static_cast<std::size_t>(state.range(0)), static_cast<std::size_t>(state.range(0)) * 2);
    auto snap = to_snapshot(ex, "bench", std::chrono::sys_seconds{});
    std::size_t bytes = 0;
    for (auto _ : state) {
        auto text = serialize(snap);
        bytes += text.size();
        benchmark::DoNotOptimize(text);
    }
    state.SetBytesProcessed(static_cast<std::int64_t>(bytes));
}
BENCHMARK(BM_Serialize)->Arg(50)->Arg(500);

static void BM_Deserialize(benchmark::State& state) {
    Exploration ex;
    ex.network = network_of(static_cast<std::size_t>(state.range(0)), static_cast<std::size_t>(state.range(0)) * 2);
    auto text = serialize(to_snapshot(ex, "bench", std::chrono::sys_seconds{}));
    for (auto _ : state) benchmark::DoNotOptimize(deserialize(text));
    state.SetBytesProcessed(static_cast<std::int64_t>(text.size() * state.iterations()));
}
BENCHMARK(BM_Deserialize)->Arg(50)->Arg(500);

static void BM_ExpandReplay(benchmark::State& state) {
    ScholarClient client(argo::test::replay());
    Explorer explorer(client);
    for (auto _ : state) {
        Exploration ex;
        explorer.seed(ex, corpus_id(9999));
        benchmark::DoNotOptimize(explorer.expand(ex, {corpus_id(9999), Direction::citations}));
    }
}
BENCHMARK(BM_ExpandReplay);
BENCHMARK_MAIN();
