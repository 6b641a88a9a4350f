#include <benchmark/benchmark.h>

#include <numeric>
#include <vector>

#include "kst/classical_tests.hpp"
#include "kst/data_io.hpp"
#include "kst/mmd.hpp"
#include "kst/ocsvm.hpp"
#include "kst/set_kernel.hpp"

namespace {

void BM_SetKernel(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto d = static_cast<std::size_t>(state.range(1));
  const kst::SampleSet x(kst::sample_isotropic(d, 1.5, n, 1));
  const kst::SampleSet y(kst::sample_isotropic(d, 3.5, n, 2));
  const auto spec = kst::BaseKernelSpec::gaussian(10.0);
  for (auto _ : state) benchmark::DoNotOptimize(kst::set_kernel(x, y, spec));
}
BENCHMARK(BM_SetKernel)->Args({7, 10})->Args({7, 50})->Args({25, 50})->Args({7, 7129});

void BM_TrainPooled(benchmark::State& state) {
  const auto l = static_cast<std::size_t>(state.range(0));
  const auto points = kst::sample_isotropic(10, 1.5, 250, 3);
  const kst::PooledSetKernel pool(points, kst::BaseKernelSpec::gaussian(10.0));
  std::vector<std::size_t> rows(250);
  std::iota(rows.begin(), rows.end(), std::size_t{0});
  kst::OcsvmConfig config;
  config.subset_count = l;
  for (auto _ : state) benchmark::DoNotOptimize(kst::train_pooled(pool, rows, config, 4).rho);
}
BENCHMARK(BM_TrainPooled)->Arg(50)->Arg(100)->Arg(200)->Unit(benchmark::kMillisecond);

void BM_MmdBootstrap(benchmark::State& state) {
  const auto iters = static_cast<std::size_t>(state.range(0));
  const kst::SampleSet x(kst::sample_isotropic(10, 1.5, 250, 5));
  const auto spec = kst::BaseKernelSpec::gaussian(4.0);
  for (auto _ : state) benchmark::DoNotOptimize(kst::bootstrap_threshold(x, 7, 0.05, iters, spec, 6).value);
}
BENCHMARK(BM_MmdBootstrap)->Arg(100)->Arg(1000)->Unit(benchmark::kMicrosecond);

void BM_IncompleteBeta(benchmark::State& state) {
  const double ab = static_cast<double>(state.range(0));
  double x = 0.01;
  for (auto _ : state) {
    benchmark::DoNotOptimize(kst::reg_incomplete_beta(x, ab, ab + 0.5));
    x = x < 0.98 ? x + 0.01 : 0.01;
  }
}
BENCHMARK(BM_IncompleteBeta)->Arg(1)->Arg(6)->Arg(50);

void BM_UnionFTest(benchmark::State& state) {
  const auto d = static_cast<std::size_t>(state.range(0));
  const kst::SampleSet a(kst::sample_isotropic(d, 1.5, 7, 7));
  const kst::SampleSet b(kst::sample_isotropic(d, 1.5, 7, 8));
  for (auto _ : state)
    benchmark::DoNotOptimize(kst::union_multivariate_test(a, b, kst::UnivariateTest::FTest, 0.05).decision);
}
BENCHMARK(BM_UnionFTest)->Arg(10)->Arg(50);

}  // namespace

BENCHMARK_MAIN();
