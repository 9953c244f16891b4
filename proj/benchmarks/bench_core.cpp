#include <benchmark/benchmark.h>

#include <random>

#include "fogcache/cache.hpp"
#include "fogcache/geo.hpp"
#include "fogcache/rng.hpp"
#include "fogcache/sweep.hpp"
#include "fogcache/synth.hpp"
#include "fogcache/topology.hpp"

using namespace fogcache;

namespace {

std::vector<CellEstimate> random_cells(std::size_t n) {
  std::mt19937_64 gen(1);
  std::uniform_real_distribution<double> lat(33.7, 34.3);
  std::uniform_real_distribution<double> lon(-118.7, -117.9);
  std::vector<CellEstimate> cells(n);
  for (std::size_t i = 0; i < n; ++i) {
    cells[i].operator_name = "op";
    cells[i].cell_id = "c" + std::to_string(i);
    cells[i].barycenter = {lat(gen), lon(gen)};
    cells[i].hull = {cells[i].barycenter};
  }
  return cells;
}

const Scenario& default_scenario() {
  static const Scenario scenario = [] {
    SyntheticOptions so;
    DemandConfig dc;
    dc.seed = 7;
    auto generated = generate_synthetic_scenario(so, dc);
    Scenario s;
    s.topologies = build_topologies(generated.cells, {10, Grouping::Hilbert, derive_seed(7, "topology")});
    s.requests = std::move(generated.requests);
    s.catalog = std::move(generated.catalog);
    s.size_policy = so.size_policy;
    return s;
  }();
  return scenario;
}

void BM_Haversine(benchmark::State& state) {
  LatLon a{34.05, -118.25};
  const LatLon b{33.94, -118.40};
  for (auto _ : state) {
    benchmark::DoNotOptimize(great_circle_distance(a, b));
    a.lat += 1e-9;
  }
}
BENCHMARK(BM_Haversine);

void BM_BuildTree(benchmark::State& state) {
  const auto cells = random_cells(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(build_tree(cells, {10}));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_BuildTree)->Arg(200)->Arg(3882)->Arg(20000);

void BM_TallyAndMark(benchmark::State& state) {
  const auto& s = default_scenario();
  for (auto _ : state) benchmark::DoNotOptimize(mark_cache_worthy(tally_popularity(s.requests), 0.5));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(s.requests.size()));
}
BENCHMARK(BM_TallyAndMark);

void BM_PlaceCaches(benchmark::State& state) {
  const auto& s = default_scenario();
  const auto worthy = mark_cache_worthy(tally_popularity(s.requests), 0.5);
  const auto sizes = item_sizes(s.requests, s.catalog, s.size_policy);
  const auto level = kLevels[static_cast<std::size_t>(state.range(0))];
  for (auto _ : state) benchmark::DoNotOptimize(place_caches(worthy, s.topologies.front(), level, &sizes));
  state.SetLabel(std::string(to_string(level)));
}
BENCHMARK(BM_PlaceCaches)->DenseRange(0, 3);

void BM_Evaluate(benchmark::State& state) {
  const auto& s = default_scenario();
  for (auto _ : state) benchmark::DoNotOptimize(evaluate(s, s.requests, {}));
}
BENCHMARK(BM_Evaluate)->Unit(benchmark::kMillisecond);

void BM_Sweep(benchmark::State& state) {
  const auto& s = default_scenario();
  SweepOptions o;
  o.grid = {0.0, 0.25, 0.5};
  o.seeds = {1, 2};
  o.jobs = static_cast<unsigned>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(run_sweep(s, o));
}
BENCHMARK(BM_Sweep)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond)->UseRealTime();

}  // namespace

BENCHMARK_MAIN();
