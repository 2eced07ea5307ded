#include <csmc/matrix.hpp>
#include <csmc/sampling.hpp>

#include <benchmark/benchmark.h>

using namespace csmc;

namespace {

Matrix random_matrix(Index n1, Index n2, std::uint64_t seed) {
  Rng rng(seed);
  Matrix m(n1, n2);
  for (Index j = 0; j < n2; ++j)
    for (Index i = 0; i < n1; ++i) m(i, j) = rng.normal();
  return m;
}

void BM_ThinSvd(benchmark::State& state) {
  const Matrix m = random_matrix(state.range(0), state.range(1), 1);
  for (auto _ : state) benchmark::DoNotOptimize(thin_svd(m));
}

void BM_Svt(benchmark::State& state) {
  const Matrix m = random_matrix(state.range(0), state.range(1), 2);
  const double tau = 0.5 * spectral_norm(m);
  for (auto _ : state) benchmark::DoNotOptimize(svt(m, tau));
}

}  // namespace

BENCHMARK(BM_ThinSvd)->Args({100, 200})->Args({300, 1000})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Svt)->Args({100, 200})->Args({300, 200})->Args({300, 1000})->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
