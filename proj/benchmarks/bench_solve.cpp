#include <benchmark/benchmark.h>

#include <numbers>

#include "curlspec/assembly.hpp"
#include "curlspec/eigensolve.hpp"
#include "curlspec/oracle.hpp"

using namespace curlspec;

namespace {

constexpr double kPi = std::numbers::pi;

void BM_LobpcgDirichlet(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const Pencil p = assemble(build_box_mesh({kPi, kPi, kPi, n, n, n}), OperatorKind::DirichletLaplacian);
  SolveOptions o;
  o.nev = 6;
  o.preconditioner = state.range(1) ? PreconditionerKind::Factorized : PreconditionerKind::Diagonal;
  o.max_iterations = 5000;
  int iterations = 0;
  for (auto _ : state) {
    const SolveResult r = solve_lowest(p.K, p.M, o);
    iterations = r.iterations;
    benchmark::DoNotOptimize(r.pairs.front().value);
  }
  state.counters["iterations"] = iterations;
  state.counters["dofs"] = p.K.dim();
}
BENCHMARK(BM_LobpcgDirichlet)->Args({8, 1})->Args({8, 0})->Args({16, 1})->Unit(benchmark::kMillisecond);

void BM_LobpcgCurlDeflated(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const TetMesh m = build_box_mesh({kPi, kPi, kPi, n, n, n});
  const Pencil p = assemble(m, OperatorKind::CurlCurl);
  const auto G = gradient_embedding(m);
  SolveOptions o;
  o.nev = 7;
  for (auto _ : state) benchmark::DoNotOptimize(solve_lowest(p.K, p.M, o, &G).pairs.front().value);
  state.counters["dofs"] = p.K.dim();
}
BENCHMARK(BM_LobpcgCurlDeflated)->Arg(8)->Arg(12)->Unit(benchmark::kMillisecond);

void BM_ShiftInvertCurl(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const Pencil p = assemble(build_box_mesh({kPi, kPi, kPi, n, n, n}), OperatorKind::CurlCurl);
  for (auto _ : state) benchmark::DoNotOptimize(solve_shift_invert(p.K, p.M, 1.5, 6).pairs.size());
  state.counters["dofs"] = p.K.dim();
}
BENCHMARK(BM_ShiftInvertCurl)->Arg(8)->Unit(benchmark::kMillisecond);

void BM_OracleInterlace(benchmark::State& state) {
  const int kmax = static_cast<int>(state.range(0));
  for (auto _ : state) {
    const auto alpha = cube_spectrum_integers(ModeFamily::Maxwell, 2 * kmax + 1);
    const auto lambda = cube_spectrum_integers(ModeFamily::Dirichlet, kmax);
    benchmark::DoNotOptimize(interlace_check_exact(alpha, lambda, kmax).pass);
  }
}
BENCHMARK(BM_OracleInterlace)->Arg(50)->Arg(1000)->Unit(benchmark::kMicrosecond);

}  // namespace
