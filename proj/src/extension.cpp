#include "silentflow/extension.hpp"

#include <omp.h>

#include <algorithm>
#include <exception>
#include <stdexcept>
#include <thread>

namespace silentflow {
namespace {

void check_dimensions(const SparseMatrixSpec& spec, std::size_t base_k, std::size_t trees,
                      std::uint32_t h) {
  spec.validate();
  if (spec.k != base_k) throw std::invalid_argument("extend: spec.k must equal the base size k");
  if (h == 0 || h > kMaxTreeHeight) throw std::invalid_argument("extend: tree height out of range");
  if (spec.n != (static_cast<std::uint64_t>(trees) << h)) {
    throw std::invalid_argument("extend: spec.n must equal trees·2^h");
  }
}

// Runs the GGM and VM stages (concurrently for the fused schedule), then
// the XOR stage once both have finished.
template <class GgmStage, class VmStage, class XorStage>
StageTimings run_stages(const ExtendOptions& options, GgmStage&& ggm, VmStage&& vm,
                        XorStage&& xor_stage) {
  const Stopwatch total;
  StageTimings t;
  const int workers = options.exec.threads();

  if (options.schedule == ExtendSchedule::kFused) {
    const ExecPolicy ggm_exec{std::max(1, workers / 2)};
    const ExecPolicy vm_exec{std::max(1, workers - workers / 2)};
    std::exception_ptr ggm_error;
    std::exception_ptr vm_error;
    std::thread producer([&] {
      try {
        const Stopwatch sw;
        ggm(ggm_exec);
        t.ggm_ms = sw.elapsed_ms();
      } catch (...) {
        ggm_error = std::current_exception();
      }
    });
    try {
      const Stopwatch sw;
      vm(vm_exec);
      t.vm_ms = sw.elapsed_ms();
    } catch (...) {
      vm_error = std::current_exception();
    }
    producer.join();
    if (ggm_error) std::rethrow_exception(ggm_error);
    if (vm_error) std::rethrow_exception(vm_error);
  } else {
    {
      const Stopwatch sw;
      ggm(options.exec);
      t.ggm_ms = sw.elapsed_ms();
    }
    {
      const Stopwatch sw;
      vm(options.exec);
      t.vm_ms = sw.elapsed_ms();
    }
  }

  const Stopwatch sw;
  xor_stage(options.exec);
  t.xor_ms = sw.elapsed_ms();
  t.total_ms = total.elapsed_ms();
  return t;
}

void xor_into(std::span<Block128> acc, std::span<const Block128> other, const ExecPolicy& exec) {
  const auto n = static_cast<std::int64_t>(acc.size());
#pragma omp parallel for schedule(static) num_threads(exec.threads())
  for (std::int64_t j = 0; j < n; ++j) acc[static_cast<std::size_t>(j)] ^= other[static_cast<std::size_t>(j)];
}

void apply_noise_bits(BitVec& y, std::span<const std::uint64_t> alphas, std::uint32_t h) {
  for (std::size_t tree = 0; tree < alphas.size(); ++tree) {
    y.flip((static_cast<std::uint64_t>(tree) << h) + alphas[tree]);
  }
}

}  // namespace

SenderHalf extend_sender(const SenderBase& base, std::span<const Block128> tree_roots,
                         std::uint32_t h, const SparseMatrixSpec& spec,
                         const ExtendOptions& options) {
  check_dimensions(spec, base.v.size(), tree_roots.size(), h);
  const std::uint32_t s_block = std::min(options.s_block, h);
  SenderHalf out;
  out.delta = base.delta;
  std::vector<Block128> leaves(spec.n);
  VmResult vm;

  out.timings = run_stages(
      options,
      [&](const ExecPolicy& exec) {
        out.ggm_counters = expand_trees_box(tree_roots, h, s_block, leaves, exec);
      },
      [&](const ExecPolicy& exec) {
        vm = vm_blocks(base.v, spec, options.variant, options.batch_size, exec);
      },
      [&](const ExecPolicy& exec) { xor_into(vm.out, leaves, exec); });

  out.K = std::move(vm.out);
  out.vm_counters = vm.counters;
  return out;
}

ReceiverHalf extend_receiver(const ReceiverBase& base, std::span<const PuncturedRelease> releases,
                             std::uint32_t h, const SparseMatrixSpec& spec,
                             const ExtendOptions& options) {
  check_dimensions(spec, base.w.size(), releases.size(), h);
  if (base.u.size() != base.w.size()) throw std::invalid_argument("extend: |u| must equal |w|");
  const std::uint32_t s_block = std::min(options.s_block, h);
  ReceiverHalf out;
  out.alphas.resize(releases.size());
  std::vector<Block128> leaves(spec.n);
  VmResult vm;

  out.timings = run_stages(
      options,
      [&](const ExecPolicy& exec) {
        out.ggm_counters = expand_punctured_trees(releases, h, s_block, leaves, out.alphas, exec);
      },
      [&](const ExecPolicy& exec) {
        out.y = vm_bits(base.u, spec, exec);
        vm = vm_blocks(base.w, spec, options.variant, options.batch_size, exec);
      },
      [&](const ExecPolicy& exec) {
        xor_into(vm.out, leaves, exec);
        apply_noise_bits(out.y, out.alphas, h);
      });

  out.M = std::move(vm.out);
  out.vm_counters = vm.counters;
  return out;
}

NoiseShares build_noise_shares(const SharedSeed& seed, std::uint64_t t, std::uint32_t h,
                               std::uint32_t s_block, const TeeOptions& tee, const ExecPolicy& exec,
                               ReleaseLedger* ledger) {
  if (t == 0) throw std::invalid_argument("build_noise_shares: t must be at least 1");
  ReleaseLedger local;
  ReleaseLedger& log = ledger != nullptr ? *ledger : local;
  const SenderTee sender(seed, tee);
  const ReceiverTee receiver(seed, tee);
  std::vector<Block128> roots(t);
  std::vector<PuncturedRelease> releases(t);
  for (std::uint64_t i = 0; i < t; ++i) {
    roots[i] = sender.release_tree_root(i, log);
    releases[i] = receiver.release_punctured_path(i, h, log);
  }
  NoiseShares noise;
  noise.h = h;
  noise.sender_leaves.resize(t << h);
  noise.receiver_leaves.resize(t << h);
  noise.alphas.resize(t);
  expand_trees_box(roots, h, s_block, noise.sender_leaves, exec);
  expand_punctured_trees(releases, h, s_block, noise.receiver_leaves, noise.alphas, exec);
  return noise;
}

SenderHalf extend_sender_from_noise(const BaseCorrelation& base, const NoiseShares& noise,
                                    const SparseMatrixSpec& spec, const ExtendOptions& options) {
  check_dimensions(spec, base.v.size(), noise.alphas.size(), noise.h);
  if (noise.sender_leaves.size() != spec.n) {
    throw std::invalid_argument("extend: sender leaves must hold n blocks");
  }
  SenderHalf out;
  out.delta = base.delta;
  VmResult vm;
  out.timings = run_stages(
      options, [](const ExecPolicy&) {},
      [&](const ExecPolicy& exec) {
        vm = vm_blocks(base.v, spec, options.variant, options.batch_size, exec);
      },
      [&](const ExecPolicy& exec) { xor_into(vm.out, noise.sender_leaves, exec); });
  out.K = std::move(vm.out);
  out.vm_counters = vm.counters;
  return out;
}

ReceiverHalf extend_receiver_from_noise(const BaseCorrelation& base, const NoiseShares& noise,
                                        const SparseMatrixSpec& spec,
                                        const ExtendOptions& options) {
  check_dimensions(spec, base.w.size(), noise.alphas.size(), noise.h);
  if (noise.receiver_leaves.size() != spec.n) {
    throw std::invalid_argument("extend: receiver leaves must hold n blocks");
  }
  ReceiverHalf out;
  out.alphas = noise.alphas;
  VmResult vm;
  out.timings = run_stages(
      options, [](const ExecPolicy&) {},
      [&](const ExecPolicy& exec) {
        out.y = vm_bits(base.u, spec, exec);
        vm = vm_blocks(base.w, spec, options.variant, options.batch_size, exec);
      },
      [&](const ExecPolicy& exec) {
        xor_into(vm.out, noise.receiver_leaves, exec);
        apply_noise_bits(out.y, out.alphas, noise.h);
      });
  out.M = std::move(vm.out);
  out.vm_counters = vm.counters;
  return out;
}

}  // namespace silentflow
