#include <random>

#include <benchmark/benchmark.h>

#include "sparcas/instances.hpp"
#include "sparcas/mechanism.hpp"
#include "sparcas/simulator.hpp"

using namespace sparcas;

namespace {

void BM_Auction(benchmark::State& state) {
    std::mt19937_64 rng(7);
    std::vector<AuctionInstance> instances;
    for (int i = 0; i < 64; ++i) {
        instances.push_back(random_auction_instance(rng, static_cast<int>(state.range(0))));
    }
    size_t i = 0;
    for (auto _ : state) {
        const auto& inst = instances[i++ % instances.size()];
        benchmark::DoNotOptimize(sparcas_auction(inst.ring, inst.announcements, inst.blocked));
    }
}
BENCHMARK(BM_Auction)->DenseRange(1, 6);

void BM_GenerateGrid(benchmark::State& state) {
    const int size = static_cast<int>(state.range(0));
    for (auto _ : state) {
        benchmark::DoNotOptimize(generate_grid(size, size, 8));
    }
}
BENCHMARK(BM_GenerateGrid)->Arg(100)->Arg(200)->Arg(400)->Unit(benchmark::kMillisecond);

void BM_ShortestPath(benchmark::State& state) {
    const int size = static_cast<int>(state.range(0));
    auto w = generate_grid(size, size, 8);
    const auto& service = w.service_cells();
    std::mt19937_64 rng(3);
    std::uniform_int_distribution<size_t> pick(0, service.size() - 1);
    for (auto _ : state) {
        auto a = w.access_lane(service[pick(rng)]);
        auto b = w.access_lane(service[pick(rng)]);
        benchmark::DoNotOptimize(shortest_path(w, a, b));
    }
}
BENCHMARK(BM_ShortestPath)->Arg(100)->Arg(400)->Unit(benchmark::kMicrosecond);

void BM_Simulation(benchmark::State& state) {
    SimConfig config;
    config.robots = static_cast<int>(state.range(0));
    config.seed = 1;
    RunOptions options;
    options.capture_trace = false;
    options.capture_audit = false;
    for (auto _ : state) {
        benchmark::DoNotOptimize(run(config, options));
    }
}
BENCHMARK(BM_Simulation)->Arg(50)->Arg(100)->Arg(200)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
