#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "silentflow/bitvec.hpp"
#include "silentflow/block.hpp"
#include "silentflow/parallel.hpp"
#include "silentflow/prims.hpp"

namespace silentflow {

// Public k x n binary matrix with d distinct nonzero rows per column, fully
// determined by the seed.
struct SparseMatrixSpec {
  std::uint64_t k = 0;
  std::uint64_t n = 0;
  std::uint32_t d = 0;
  Block128 seed;

  // Throws std::invalid_argument unless 1 <= d <= k < 2^32 and n >= 1.
  void validate() const;
};

// Column j's row indices in generation order: lanes 0, 1, 2, ... of
// index_gen, skipping repeats until d distinct values are collected.
// Throws std::out_of_range when j >= n.
std::vector<std::uint32_t> matrix_column(const SparseMatrixSpec& spec, std::uint64_t j);

// Columns [first, first + count) into out (count·d entries, column-major).
// Lane-0..d-1 counters for the whole range go through the cipher together.
void matrix_columns(const SparseMatrixSpec& spec, std::uint64_t first, std::size_t count,
                    std::span<std::uint32_t> out);

// out[j] = XOR of u at column j's rows. Throws on |u| != k.
BitVec vm_bits(const BitVec& u, const SparseMatrixSpec& spec, const ExecPolicy& exec = {});

inline constexpr std::size_t kElementsPerTransaction = 4;  // 512-bit bus / 128-bit elements

struct TransactionCounters {
  std::uint64_t element_fetches = 0;
  std::uint64_t grouped_transactions = 0;

  TransactionCounters& operator+=(const TransactionCounters& o) {
    element_fetches += o.element_fetches;
    grouped_transactions += o.grouped_transactions;
    return *this;
  }
  friend bool operator==(const TransactionCounters&, const TransactionCounters&) = default;
};

struct VmResult {
  std::vector<Block128> out;
  TransactionCounters counters;
};

// out[j] = xor_reduce(x at column j's rows). Columns run in batches of
// batch_size: indices for the batch, then a grouped gather into local
// storage, then per-column reduction. Output is independent of variant and
// batch_size. Throws on |x| != k or batch_size == 0.
VmResult vm_blocks(std::span<const Block128> x, const SparseMatrixSpec& spec, XorVariant variant,
                   std::size_t batch_size, const ExecPolicy& exec = {});

}  // namespace silentflow
