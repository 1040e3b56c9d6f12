#include <benchmark/benchmark.h>

#include "xkm/builder.hpp"
#include "xkm/eval.hpp"
#include "xkm/instances.hpp"
#include "xkm/seeding.hpp"

namespace {

void BM_BuildTree(benchmark::State& state) {
  const auto k = static_cast<std::size_t>(state.range(0));
  const auto inst = xkm::gen_gaussian_mixture(k, 10, 1, 10.0, 0.0, 42);
  xkm::BuildConfig cfg;
  cfg.delta = 0.1;
  for (auto _ : state) {
    ++cfg.seed;
    auto res = xkm::build_tree(inst.planted_centers, cfg);
    benchmark::DoNotOptimize(res.tree);
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_BuildTree)->RangeMultiplier(4)->Range(8, 512)->Complexity();

void BM_TreeCost(benchmark::State& state) {
  const auto k = static_cast<std::size_t>(state.range(0));
  const auto inst = xkm::gen_gaussian_mixture(k, 10, 50, 10.0, 1.0, 7);
  xkm::BuildConfig cfg;
  const auto tree = xkm::build_tree(inst.planted_centers, cfg).tree;
  for (auto _ : state) {
    benchmark::DoNotOptimize(xkm::tree_cost(inst.points, tree, inst.planted_centers));
  }
}
BENCHMARK(BM_TreeCost)->Arg(10)->Arg(100);

void BM_KMeansPP(benchmark::State& state) {
  const auto k = static_cast<std::size_t>(state.range(0));
  const auto inst = xkm::gen_gaussian_mixture(k, 10, 20, 10.0, 1.0, 3);
  std::uint64_t seed = 0;
  for (auto _ : state) {
    auto r = xkm::kmeanspp_seed(inst.points, {k, ++seed, 0, 0});
    benchmark::DoNotOptimize(r.centers);
  }
}
BENCHMARK(BM_KMeansPP)->Arg(10)->Arg(100);

}  // namespace

BENCHMARK_MAIN();
