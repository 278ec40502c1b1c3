#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "silentflow/block.hpp"
#include "silentflow/parallel.hpp"
#include "silentflow/trusted_domain.hpp"

namespace silentflow {

struct GgmConfig {
  std::uint32_t h = 1;
  std::uint32_t s_block = 1;
  std::uint64_t num_trees = 1;

  std::uint64_t leaves_per_tree() const { return std::uint64_t{1} << h; }
  std::uint64_t n() const { return num_trees * leaves_per_tree(); }
  // Throws std::invalid_argument unless 1 <= s_block <= h and num_trees >= 1.
  void validate() const;
};

// Memory traffic in node-sized units. "Global" is the shared leaf/level
// arrays, "local" the per-worker scratch arena used inside a block.
struct AccessCounters {
  std::uint64_t global_reads = 0;
  std::uint64_t global_writes = 0;
  std::uint64_t local_reads = 0;
  std::uint64_t local_writes = 0;

  std::uint64_t global() const { return global_reads + global_writes; }
  std::uint64_t local() const { return local_reads + local_writes; }

  AccessCounters& operator+=(const AccessCounters& o) {
    global_reads += o.global_reads;
    global_writes += o.global_writes;
    local_reads += o.local_reads;
    local_writes += o.local_writes;
    return *this;
  }
  friend bool operator==(const AccessCounters&, const AccessCounters&) = default;
};

// (global_reads + global_writes)·c_global + (local_reads + local_writes)·c_local.
double access_cost(const AccessCounters& counters, double c_global, double c_local);

// The rounded cost-table forms: naive 6·2^{h-1} global; blocked 2·2^{h-1}
// global plus 4·2^{h-1} local. Reported next to the exact counters.
struct RoundedAccessForm {
  std::uint64_t global = 0;
  std::uint64_t local = 0;
};
RoundedAccessForm rounded_naive_form(std::uint32_t h);
RoundedAccessForm rounded_box_form(std::uint32_t h);

struct ExpansionResult {
  std::vector<Block128> leaves;
  AccessCounters counters;
  std::size_t scratch_high_water = 0;  // blocks, per worker
};

// Level-by-level expansion through global storage: 1 global read and 2
// global writes per node expansion, 3·(2^h - 1) in total.
ExpansionResult expand_full_naive(const Block128& root, std::uint32_t h);

// Blocked expansion in subtree blocks of depth s_block (the last block
// layer may be shallower when s_block does not divide h).
ExpansionResult expand_full_box(const Block128& root, std::uint32_t h, std::uint32_t s_block);

// Multi-tree kernels. `leaves` holds |roots|·2^h blocks, tree i at
// [i·2^h, (i+1)·2^h). Blocks within a layer run on the OpenMP team.
AccessCounters expand_trees_naive(std::span<const Block128> roots, std::uint32_t h,
                                  std::span<Block128> leaves, const ExecPolicy& exec = {});
AccessCounters expand_trees_box(std::span<const Block128> roots, std::uint32_t h,
                                std::uint32_t s_block, std::span<Block128> leaves,
                                const ExecPolicy& exec = {},
                                std::size_t* scratch_high_water = nullptr);

struct PuncturedExpansion {
  std::vector<Block128> leaves;
  std::uint64_t hole = 0;  // bucket-local punctured position
  AccessCounters counters;
};

// Rebuilds every leaf except the hole from the released siblings and writes
// the masked leaf at the hole. Throws std::invalid_argument when the release
// does not describe a consistent path of height h.
PuncturedExpansion expand_punctured(const PuncturedRelease& release, std::uint32_t h,
                                    std::uint32_t s_block = 4);

// Multi-tree form; holes[i] receives tree i's punctured position.
AccessCounters expand_punctured_trees(std::span<const PuncturedRelease> releases,
                                      std::uint32_t h, std::uint32_t s_block,
                                      std::span<Block128> leaves,
                                      std::span<std::uint64_t> holes,
                                      const ExecPolicy& exec = {});

// Punctured position implied by a release's sibling placement.
std::uint64_t punctured_index(const PuncturedRelease& release, std::uint32_t h);

// Sender leaves s, receiver leaves r, and the per-tree hole positions. For a
// well-formed pair r[j] ^ s[j] = Δ exactly at j = tree·2^h + alphas[tree].
struct NoiseShares {
  std::uint32_t h = 0;
  std::vector<Block128> sender_leaves;
  std::vector<Block128> receiver_leaves;
  std::vector<std::uint64_t> alphas;
};

}  // namespace silentflow
