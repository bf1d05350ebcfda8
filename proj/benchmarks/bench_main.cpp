#include <benchmark/benchmark.h>

#include <random>

#include "qttrank/densela.hpp"
#include "qttrank/hankel.hpp"
#include "qttrank/seqgen.hpp"
#include "qttrank/tensor_train.hpp"
#include "qttrank/ttsvd.hpp"

namespace {

using namespace qtt;

void BM_Decompose(benchmark::State& state) {
  const int d = static_cast<int>(state.range(0));
  const auto v = generate_vector(SequenceSpec::power_law(1.5), d);
  for (auto _ : state) benchmark::DoNotOptimize(decompose(v, TruncationPolicy::relative(1e-9)));
  state.SetBytesProcessed(state.iterations() * static_cast<std::int64_t>(v.size() * sizeof(double)));
}
BENCHMARK(BM_Decompose)->DenseRange(12, 20, 4)->Unit(benchmark::kMillisecond);

void BM_GenerateVector(benchmark::State& state) {
  const int d = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(generate_vector(SequenceSpec::power_law(2.5), d));
}
BENCHMARK(BM_GenerateVector)->Arg(16)->Arg(20)->Unit(benchmark::kMillisecond);

void BM_SingularValues(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  std::mt19937_64 rng(1);
  std::normal_distribution<double> normal;
  DenseMatrix m(n, n);
  for (double& x : m.data()) x = normal(rng);
  for (auto _ : state) benchmark::DoNotOptimize(singular_values(m));
}
BENCHMARK(BM_SingularValues)->RangeMultiplier(4)->Range(16, 256)->Unit(benchmark::kMicrosecond);

void BM_LeftFactorWide(benchmark::State& state) {
  const auto cols = static_cast<std::size_t>(state.range(0));
  std::mt19937_64 rng(2);
  std::normal_distribution<double> normal;
  std::vector<double> m(8 * cols);
  for (double& x : m) x = normal(rng);
  for (auto _ : state) benchmark::DoNotOptimize(left_singular_factor(m, 8, cols));
}
BENCHMARK(BM_LeftFactorWide)->RangeMultiplier(8)->Range(1 << 10, 1 << 16)->Unit(benchmark::kMicrosecond);

void BM_BuildHankel(benchmark::State& state) {
  const int d = static_cast<int>(state.range(0));
  const auto spec = square_hankel(SequenceSpec::power_law(1.5), d);
  for (auto _ : state) benchmark::DoNotOptimize(build_hankel(spec));
}
BENCHMARK(BM_BuildHankel)->Arg(8)->Arg(10)->Arg(12)->Unit(benchmark::kMicrosecond);

void BM_TtNorm(benchmark::State& state) {
  const auto v = generate_vector(SequenceSpec::power_law(1.5), 20);
  const TensorTrain t = decompose(v, TruncationPolicy::relative(1e-9));
  for (auto _ : state) benchmark::DoNotOptimize(frobenius_norm(t));
}
BENCHMARK(BM_TtNorm);

void BM_Element(benchmark::State& state) {
  const auto v = generate_vector(SequenceSpec::power_law(1.5), 20);
  const TensorTrain t = decompose(v, TruncationPolicy::relative(1e-9));
  std::uint64_t k = 1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(element(t, k));
    k = k % t.length() + 7919;
    if (k > t.length()) k = 1;
  }
}
BENCHMARK(BM_Element);

}  // namespace

BENCHMARK_MAIN();
