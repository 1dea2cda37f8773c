#include <benchmark/benchmark.h>

#include <numbers>

#include "curlspec/assembly.hpp"
#include "curlspec/mesh.hpp"

using namespace curlspec;

namespace {

void BM_BuildBoxMesh(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(build_box_mesh({1, 1, 1, n, n, n}));
  state.counters["tets"] = 6.0 * n * n * n;
}
BENCHMARK(BM_BuildBoxMesh)->Arg(8)->Arg(16)->Unit(benchmark::kMillisecond);

void BM_Assemble(benchmark::State& state, OperatorKind op, int order) {
  const int n = static_cast<int>(state.range(0));
  const TetMesh m = build_box_mesh({std::numbers::pi, std::numbers::pi, std::numbers::pi, n, n, n});
  std::size_t dofs = 0;
  for (auto _ : state) {
    const Pencil p = assemble(m, op, {order, static_cast<int>(state.range(1)), true});
    dofs = p.dofs.free_count;
    benchmark::DoNotOptimize(p.K.nonzeros());
  }
  state.counters["dofs"] = static_cast<double>(dofs);
}
BENCHMARK_CAPTURE(BM_Assemble, dirichlet_p1, OperatorKind::DirichletLaplacian, 1)
    ->Args({16, 1})
    ->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_Assemble, dirichlet_p2, OperatorKind::DirichletLaplacian, 2)
    ->Args({8, 1})
    ->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_Assemble, curlcurl, OperatorKind::CurlCurl, 1)
    ->Args({8, 1})
    ->Args({16, 1})
    ->Args({16, 4})
    ->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_Assemble, bform, OperatorKind::BForm, 1)->Args({16, 1})->Unit(benchmark::kMillisecond);

void BM_GradientEmbedding(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const TetMesh m = build_box_mesh({1, 1, 1, n, n, n});
  for (auto _ : state) benchmark::DoNotOptimize(gradient_embedding(m).nonZeros());
}
BENCHMARK(BM_GradientEmbedding)->Arg(16)->Unit(benchmark::kMillisecond);

}  // namespace
