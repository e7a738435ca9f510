#include <benchmark/benchmark.h>

#include <random>

#include "optor/endomorphism.hpp"
#include "optor/lifting.hpp"
#include "optor/resolution.hpp"
#include "optor/stock.hpp"
#include "optor/zigzag.hpp"

using namespace optor;

namespace {

Matrix random_matrix(std::size_t n, std::uint32_t seed) {
  std::mt19937 g(seed);
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (g() % 3 == 0) m.set(i, j, static_cast<int>(g() % 7) - 3);
  return m;
}

OperadPtr operad_by_index(int i) {
  switch (i) {
    case 0: return group_algebra_operad(named_group("z2"));
    case 1: return com_operad(3);
    default: return ass_operad(3);
  }
}

void BM_KernelBasis(benchmark::State& st) {
  const Matrix m = random_matrix(static_cast<std::size_t>(st.range(0)), 7);
  for (auto _ : st) benchmark::DoNotOptimize(kernel_basis(m));
}
BENCHMARK(BM_KernelBasis)->Arg(16)->Arg(32)->Arg(64);

void BM_Inverse(benchmark::State& st) {
  Matrix m = random_matrix(static_cast<std::size_t>(st.range(0)), 11) + Matrix::identity(st.range(0)) +
             Matrix::identity(st.range(0));
  for (auto _ : st) benchmark::DoNotOptimize(inverse(m));
}
BENCHMARK(BM_Inverse)->Arg(16)->Arg(32);

// tree enumeration plus the differential on every tree
void BM_Resolution(benchmark::State& st) {
  auto Q = operad_by_index(static_cast<int>(st.range(0)));
  auto M = std::make_shared<CanonicalBimodule>(Q);
  const int A = std::min(3, Q->max_arity());
  for (auto _ : st) {
    auto R = build_resolution(M, ResolutionOptions{A, static_cast<int>(st.range(1)), std::nullopt});
    benchmark::DoNotOptimize(verify_d_squared(*R));
  }
}
BENCHMARK(BM_Resolution)->Args({0, 5})->Args({0, 8})->Args({1, 4})->Args({2, 4})->Unit(benchmark::kMillisecond);

void BM_Retraction(benchmark::State& st) {
  auto Q = operad_by_index(static_cast<int>(st.range(0)));
  const int A = std::min(3, Q->max_arity());
  auto R = build_resolution(std::make_shared<CanonicalBimodule>(Q), ResolutionOptions{A, 5, std::nullopt});
  for (auto _ : st) benchmark::DoNotOptimize(retraction_mu(R, 4));
}
BENCHMARK(BM_Retraction)->Arg(0)->Arg(1)->Arg(2)->Unit(benchmark::kMillisecond);

void BM_InvariantEnd(benchmark::State& st) {
  auto Q = com_operad(static_cast<int>(st.range(0)));
  auto M = std::make_shared<CanonicalBimodule>(Q);
  for (auto _ : st) benchmark::DoNotOptimize(invariant_endomorphism_operad(M, static_cast<int>(st.range(0))));
}
BENCHMARK(BM_InvariantEnd)->Arg(3)->Arg(4)->Unit(benchmark::kMillisecond);

void BM_PipelineStrict(benchmark::State& st) {
  auto M = std::make_shared<CanonicalBimodule>(ass_operad(3));
  for (auto _ : st) benchmark::DoNotOptimize(quasi_torsor_pipeline(M, Window{3, 0, 0}));
}
BENCHMARK(BM_PipelineStrict)->Unit(benchmark::kMillisecond);

void BM_PipelineResolution(benchmark::State& st) {
  auto M = std::make_shared<CanonicalBimodule>(operad_by_index(static_cast<int>(st.range(0))));
  const Window w{static_cast<int>(st.range(0)) == 0 ? 1 : 3, 0, 2};
  for (auto _ : st) benchmark::DoNotOptimize(quasi_torsor_pipeline(M, w, PipelineOptions{true}));
}
BENCHMARK(BM_PipelineResolution)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
