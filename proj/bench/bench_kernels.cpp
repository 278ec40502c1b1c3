// Serial reference kernels against the OpenMP kernels, plus end-to-end
// generation under both extension schedules. Arg(0) is the runtime's
// default worker count.

#include <benchmark/benchmark.h>

#include <vector>

#include "silentflow/cot.hpp"
#include "silentflow/ggm.hpp"
#include "silentflow/lpn.hpp"
#include "silentflow/reference/reference.hpp"

namespace sf = silentflow;
using sf::Block128;

namespace {

constexpr std::uint32_t kHeight = 10;
constexpr std::uint64_t kTrees = 16;
constexpr std::uint64_t kBase = 1024;
constexpr std::uint32_t kWeight = 10;

std::vector<Block128> roots() {
  std::vector<Block128> r(kTrees);
  for (std::uint64_t i = 0; i < kTrees; ++i) r[i] = Block128{i + 1, 0x726f6f74};
  return r;
}

std::vector<Block128> base() {
  std::vector<Block128> x(kBase);
  for (std::uint64_t i = 0; i < kBase; ++i) x[i] = Block128{i * 0x9e3779b97f4a7c15ULL, i};
  return x;
}

const Block128 kMatrixSeed{0x6d6174, 0x726978};

void set_cots(benchmark::State& state) {
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * (kTrees << kHeight)));
}

void BM_GgmSerial(benchmark::State& state) {
  const auto r = roots();
  std::vector<Block128> leaves(kTrees << kHeight);
  for (auto _ : state) {
    sf::reference::expand_trees_serial(r, kHeight, leaves);
    benchmark::DoNotOptimize(leaves.data());
  }
  set_cots(state);
}

void BM_GgmNaive(benchmark::State& state) {
  const auto r = roots();
  std::vector<Block128> leaves(kTrees << kHeight);
  const sf::ExecPolicy exec{static_cast<int>(state.range(0))};
  for (auto _ : state) {
    sf::expand_trees_naive(r, kHeight, leaves, exec);
    benchmark::DoNotOptimize(leaves.data());
  }
  set_cots(state);
}

void BM_GgmBox(benchmark::State& state) {
  const auto r = roots();
  std::vector<Block128> leaves(kTrees << kHeight);
  const sf::ExecPolicy exec{static_cast<int>(state.range(0))};
  const auto s = static_cast<std::uint32_t>(state.range(1));
  for (auto _ : state) {
    sf::expand_trees_box(r, kHeight, s, leaves, exec);
    benchmark::DoNotOptimize(leaves.data());
  }
  set_cots(state);
}

void BM_VmSerial(benchmark::State& state) {
  const auto x = base();
  for (auto _ : state) {
    auto out = sf::reference::vm_blocks_serial(x, kMatrixSeed, kBase, kTrees << kHeight, kWeight);
    benchmark::DoNotOptimize(out.data());
  }
  set_cots(state);
}

void BM_VmBlocks(benchmark::State& state) {
  const auto x = base();
  const sf::SparseMatrixSpec spec{kBase, kTrees << kHeight, kWeight, kMatrixSeed};
  const sf::ExecPolicy exec{static_cast<int>(state.range(0))};
  const auto batch = static_cast<std::size_t>(state.range(1));
  for (auto _ : state) {
    auto r = sf::vm_blocks(x, spec, sf::XorVariant::kPipelined, batch, exec);
    benchmark::DoNotOptimize(r.out.data());
  }
  set_cots(state);
}

void BM_Generate(benchmark::State& state) {
  sf::GenerateOptions o;
  o.exec = sf::ExecPolicy{static_cast<int>(state.range(0))};
  o.schedule = state.range(1) != 0 ? sf::ExtendSchedule::kFused : sf::ExtendSchedule::kSerial;
  const auto entropy = sf::Entropy::from_master(Block128{1, 2});
  for (auto _ : state) {
    auto g = sf::generate(sf::CotParams::desk(), entropy, o);
    benchmark::DoNotOptimize(g.sender.K.data());
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * sf::CotParams::desk().n));
}

}  // namespace

BENCHMARK(BM_GgmSerial)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_GgmNaive)->Arg(1)->Arg(0)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_GgmBox)->ArgsProduct({{1, 0}, {3, 4, 6, 10}})->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_VmSerial)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_VmBlocks)->ArgsProduct({{1, 0}, {16, 256}})->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_Generate)->ArgsProduct({{1, 0}, {0, 1}})->Unit(benchmark::kMicrosecond);

BENCHMARK_MAIN();
