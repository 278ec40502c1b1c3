#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "silentflow/bitvec.hpp"
#include "silentflow/block.hpp"
#include "silentflow/ggm.hpp"
#include "silentflow/lpn.hpp"
#include "silentflow/parallel.hpp"
#include "silentflow/trusted_domain.hpp"

namespace silentflow {

enum class ExtendSchedule {
  kFused,   // GGM and VM as concurrent stages, joined at the final XOR
  kSerial,  // GGM, then VM, then XOR
};

// Wall time per stage in milliseconds. total_ms is the measured end-to-end
// time of the extend call.
struct StageTimings {
  double ggm_ms = 0;
  double vm_ms = 0;
  double xor_ms = 0;
  double total_ms = 0;

  double serial_model_ms() const { return ggm_ms + vm_ms + xor_ms; }
  double fused_model_ms() const { return (ggm_ms > vm_ms ? ggm_ms : vm_ms) + xor_ms; }
};

struct ExtendOptions {
  std::uint32_t s_block = 4;
  std::size_t batch_size = 256;
  XorVariant variant = XorVariant::kPipelined;
  ExtendSchedule schedule = ExtendSchedule::kFused;
  ExecPolicy exec;
};

struct SenderHalf {
  Block128 delta;
  std::vector<Block128> K;
  AccessCounters ggm_counters;
  TransactionCounters vm_counters;
  StageTimings timings;
};

struct ReceiverHalf {
  BitVec y;
  std::vector<Block128> M;
  std::vector<std::uint64_t> alphas;  // bucket-local holes, one per tree
  AccessCounters ggm_counters;
  TransactionCounters vm_counters;
  StageTimings timings;
};

// K = v·A ^ s, where s are the full leaves of the released tree roots.
// Requires spec.k == |v| and spec.n == |roots|·2^h.
SenderHalf extend_sender(const SenderBase& base, std::span<const Block128> tree_roots,
                         std::uint32_t h, const SparseMatrixSpec& spec,
                         const ExtendOptions& options = {});

// y = u·A ^ e and M = w·A ^ r, where r are the punctured leaves and e has
// one set bit per tree at the hole.
ReceiverHalf extend_receiver(const ReceiverBase& base, std::span<const PuncturedRelease> releases,
                             std::uint32_t h, const SparseMatrixSpec& spec,
                             const ExtendOptions& options = {});

// Both parties' tree outputs for t trees of height h: the sender expands
// its released roots, the receiver its punctured releases.
NoiseShares build_noise_shares(const SharedSeed& seed, std::uint64_t t, std::uint32_t h,
                               std::uint32_t s_block, const TeeOptions& tee = {},
                               const ExecPolicy& exec = {}, ReleaseLedger* ledger = nullptr);

// Extension over already-constituted noise shares: only the VM stage and
// the final XOR remain. Used by tests to isolate the linear part.
SenderHalf extend_sender_from_noise(const BaseCorrelation& base, const NoiseShares& noise,
                                    const SparseMatrixSpec& spec,
                                    const ExtendOptions& options = {});
ReceiverHalf extend_receiver_from_noise(const BaseCorrelation& base, const NoiseShares& noise,
                                        const SparseMatrixSpec& spec,
                                        const ExtendOptions& options = {});

}  // namespace silentflow
