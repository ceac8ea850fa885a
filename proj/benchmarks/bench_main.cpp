#include <benchmark/benchmark.h>

#include <cmath>

#include "combmat/clcd.hpp"
#include "combmat/ensemble.hpp"
#include "combmat/experiments.hpp"
#include "combmat/geometry.hpp"
#include "combmat/linalg.hpp"
#include "combmat/smallball.hpp"

using namespace combmat;

static void BM_SampleMatrix(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const auto rng = derive_stream(1, {"bench", "sample"});
  long k = 0;
  for (auto _ : state) benchmark::DoNotOptimize(sample_matrix(EnsembleParams::balanced(n), n, rng.child(k++)));
}
BENCHMARK(BM_SampleMatrix)->Arg(16)->Arg(64)->Arg(256);

static void BM_SingularValues(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const Matrix m = sample_matrix(EnsembleParams::balanced(n), n, derive_stream(2, {"bench", "svd"})).to_real();
  for (auto _ : state) benchmark::DoNotOptimize(singular_values(m).smallest);
}
BENCHMARK(BM_SingularValues)->Arg(16)->Arg(64)->Unit(benchmark::kMicrosecond);

static void BM_ExactRank(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const IntMatrix m = sample_matrix(EnsembleParams::balanced(n), n, derive_stream(3, {"bench", "rank"})).to_integer();
  for (auto _ : state) benchmark::DoNotOptimize(exact_rank(m));
}
BENCHMARK(BM_ExactRank)->Arg(8)->Arg(32)->Arg(64)->Unit(benchmark::kMicrosecond);

static void BM_BareissRank(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const IntMatrix m = sample_matrix(EnsembleParams::balanced(n), n, derive_stream(4, {"bench", "bareiss"})).to_integer();
  for (auto _ : state) benchmark::DoNotOptimize(bareiss_rank(m));
}
BENCHMARK(BM_BareissRank)->Arg(8)->Arg(32)->Unit(benchmark::kMicrosecond);

static void BM_EnumerateWv(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  auto rng = derive_stream(5, {"bench", "enumerate"});
  const Vector v = random_unit_vector(n, rng);
  for (auto _ : state) benchmark::DoNotOptimize(enumerate_Wv(v, EnsembleParams::balanced(n)).atoms.size());
}
BENCHMARK(BM_EnumerateWv)->Arg(8)->Arg(12)->Arg(14)->Unit(benchmark::kMillisecond);

static void BM_LevyExact(benchmark::State& state) {
  auto rng = derive_stream(6, {"bench", "levy"});
  const auto law = enumerate_Wv(random_unit_vector(12, rng), EnsembleParams::balanced(12));
  for (auto _ : state) benchmark::DoNotOptimize(levy_exact(law, 0.05).estimate);
}
BENCHMARK(BM_LevyExact)->Unit(benchmark::kMicrosecond);

static void BM_ClcdScan(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  auto rng = derive_stream(7, {"bench", "clcd"});
  const Vector v = random_unit_vector(n, rng);
  const ClcdQuery q{1.0, 0.01, std::sqrt(0.1 * n) / 7, {}};
  for (auto _ : state) benchmark::DoNotOptimize(clcd_scan(v, q).certified_lower_bound());
}
BENCHMARK(BM_ClcdScan)->Arg(8)->Arg(16)->Unit(benchmark::kMillisecond);

static void BM_TailCurve(benchmark::State& state) {
  ExperimentConfig cfg;
  cfg.params = EnsembleParams::balanced(static_cast<int>(state.range(0)));
  cfg.reps = 100;
  cfg.seed = 8;
  cfg.workers = 1;
  cfg.eps_grid = {0.1, 0.5};
  for (auto _ : state) benchmark::DoNotOptimize(tail_curve(cfg));
}
BENCHMARK(BM_TailCurve)->Arg(32)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
