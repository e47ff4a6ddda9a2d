#include <benchmark/benchmark.h>

#include "debut/chain.hpp"
#include "debut/kernels.hpp"
#include "debut/rng.hpp"

namespace {

using namespace debut;

// butterfly 16x16, LeNet FC1, VGG CONV13
const char* const kChains[] = {
    "16 <-(2,2,8)- 16 <-(2,2,4)- 16 <-(2,2,2)- 16 <-(2,2,1)- 16",
    "128 <-(2,2,64)- 128 <-(2,2,32)- 128 <-(1,2,32)- 256 <-(2,2,16)- 256 <-(16,25,1)- 400",
    "512 <-(2,4,256)- 1024 <-(2,4,128)- 2048 <-(2,4,64)- 4096 <-(2,2,32)- 4096 <-(2,2,16)- 4096 <-(2,2,8)- 4096 "
    "<-(8,9,1)- 4608",
};

DenseMatrix random_input(std::size_t rows, std::size_t cols) {
  Xoshiro256 rng(7);
  DenseMatrix x(rows, cols);
  for (double& v : x.data()) v = rng.gaussian();
  return x;
}

void BM_ChainApply(benchmark::State& state) {
  const DebutChain c = random_chain(parse_chain(kChains[state.range(0)]), InitScheme::gaussian(1.0), 1);
  const DenseMatrix x = random_input(c.cols_in(), static_cast<std::size_t>(state.range(1)));
  for (auto _ : state) benchmark::DoNotOptimize(chain_apply(c, x));
  state.counters["macs"] = static_cast<double>(estimate_cost(c.spec()).debut_macs_total() * x.cols());
}

void BM_DenseMultiply(benchmark::State& state) {
  const DebutChain c = random_chain(parse_chain(kChains[state.range(0)]), InitScheme::gaussian(1.0), 1);
  const DenseMatrix f = materialize(c);
  const DenseMatrix x = random_input(c.cols_in(), static_cast<std::size_t>(state.range(1)));
  for (auto _ : state) benchmark::DoNotOptimize(dense_multiply(f, x));
}

void BM_FactorApply(benchmark::State& state) {
  const DebutChain c = random_chain(parse_chain(kChains[state.range(0)]), InitScheme::gaussian(1.0), 1);
  const DebutFactor& f = c.factor(0);
  const DenseMatrix x = random_input(f.shape().q, static_cast<std::size_t>(state.range(1)));
  for (auto _ : state) benchmark::DoNotOptimize(factor_apply(f, x));
}

void BM_Materialize(benchmark::State& state) {
  const DebutChain c = random_chain(parse_chain(kChains[state.range(0)]), InitScheme::bipolar(), 1);
  for (auto _ : state) benchmark::DoNotOptimize(materialize(c));
}

}  // namespace

BENCHMARK(BM_ChainApply)->ArgsProduct({{0, 1, 2}, {64, 256}})->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_DenseMultiply)->ArgsProduct({{0, 1, 2}, {64, 256}})->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_FactorApply)->ArgsProduct({{0, 1, 2}, {256}})->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_Materialize)->DenseRange(0, 2)->Unit(benchmark::kMicrosecond);
BENCHMARK_MAIN();
