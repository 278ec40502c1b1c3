#include "silentflow/lpn.hpp"

#include <omp.h>

#include <algorithm>
#include <stdexcept>
#include <unordered_set>

namespace silentflow {
namespace {

constexpr std::size_t kBitBatch = 256;  // multiple of 64 so batches own whole words

// Appends `value` to the column if it is new. Linear probe for the usual
// small d, hash set beyond that.
class ColumnBuilder {
 public:
  ColumnBuilder(std::span<std::uint32_t> out) : out_(out) {
    if (out_.size() > 32) seen_.reserve(out_.size() * 2);
  }
  bool full() const { return filled_ == out_.size(); }
  void offer(std::uint32_t value) {
    if (out_.size() > 32) {
      if (!seen_.insert(value).second) return;
    } else if (std::find(out_.begin(), out_.begin() + static_cast<std::ptrdiff_t>(filled_),
                         value) != out_.begin() + static_cast<std::ptrdiff_t>(filled_)) {
      return;
    }
    out_[filled_++] = value;
  }

 private:
  std::span<std::uint32_t> out_;
  std::size_t filled_ = 0;
  std::unordered_set<std::uint32_t> seen_;
};

}  // namespace

void SparseMatrixSpec::validate() const {
  if (k == 0 || k > 0xffffffffULL) throw std::invalid_argument("matrix k must be in [1, 2^32)");
  if (n == 0) throw std::invalid_argument("matrix n must be at least 1");
  if (d == 0 || d > k) throw std::invalid_argument("matrix d must satisfy 1 <= d <= k");
}

void matrix_columns(const SparseMatrixSpec& spec, std::uint64_t first, std::size_t count,
                    std::span<std::uint32_t> out) {
  spec.validate();
  if (first + count > spec.n || first + count < first) {
    throw std::out_of_range("matrix column index out of range");
  }
  const std::size_t d = spec.d;
  if (out.size() != count * d) throw std::invalid_argument("matrix_columns: output size mismatch");

  std::vector<Block128> stream(count * d);
  for (std::size_t c = 0; c < count; ++c) {
    for (std::size_t lane = 0; lane < d; ++lane) {
      stream[c * d + lane] =
          spec.seed ^ encode_index_counter(first + c, static_cast<std::uint32_t>(lane), 0);
    }
  }
  fixed_key_aes().encrypt_blocks(stream, stream);

  const std::uint64_t threshold = (std::uint64_t{0} - spec.k) % spec.k;
  for (std::size_t c = 0; c < count; ++c) {
    const std::uint64_t column = first + c;
    ColumnBuilder builder(out.subspan(c * d, d));
    for (std::size_t lane = 0; lane < d; ++lane) {
      const std::uint64_t top = stream[c * d + lane].hi;
      // A rejected draw falls back to the retry chain inside index_gen.
      const std::uint64_t idx = top >= threshold
                                    ? top % spec.k
                                    : index_gen(spec.seed, column, static_cast<std::uint32_t>(lane),
                                                spec.k);
      builder.offer(static_cast<std::uint32_t>(idx));
    }
    for (std::uint32_t lane = static_cast<std::uint32_t>(d); !builder.full(); ++lane) {
      builder.offer(static_cast<std::uint32_t>(index_gen(spec.seed, column, lane, spec.k)));
    }
  }
}

std::vector<std::uint32_t> matrix_column(const SparseMatrixSpec& spec, std::uint64_t j) {
  spec.validate();
  if (j >= spec.n) throw std::out_of_range("matrix_column: j >= n");
  std::vector<std::uint32_t> out(spec.d);
  matrix_columns(spec, j, 1, out);
  return out;
}

BitVec vm_bits(const BitVec& u, const SparseMatrixSpec& spec, const ExecPolicy& exec) {
  spec.validate();
  if (u.size() != spec.k) throw std::invalid_argument("vm_bits: |u| must equal k");
  BitVec out(spec.n);
  const std::size_t d = spec.d;
  const auto batches = static_cast<std::int64_t>((spec.n + kBitBatch - 1) / kBitBatch);
  auto out_words = out.words();

#pragma omp parallel num_threads(exec.threads())
  {
    std::vector<std::uint32_t> idx(kBitBatch * d);
#pragma omp for schedule(static)
    for (std::int64_t bi = 0; bi < batches; ++bi) {
      const std::uint64_t first = static_cast<std::uint64_t>(bi) * kBitBatch;
      const std::size_t m = static_cast<std::size_t>(std::min<std::uint64_t>(kBitBatch, spec.n - first));
      matrix_columns(spec, first, m, std::span(idx.data(), m * d));
      for (std::size_t c = 0; c < m; ++c) {
        std::uint64_t bit = 0;
        for (std::size_t l = 0; l < d; ++l) bit ^= u.test_unchecked(idx[c * d + l]) ? 1U : 0U;
        const std::uint64_t j = first + c;
        out_words[j >> 6] |= bit << (j & 63);
      }
    }
  }
  return out;
}

VmResult vm_blocks(std::span<const Block128> x, const SparseMatrixSpec& spec, XorVariant variant,
                   std::size_t batch_size, const ExecPolicy& exec) {
  spec.validate();
  if (x.size() != spec.k) throw std::invalid_argument("vm_blocks: |x| must equal k");
  if (batch_size == 0) throw std::invalid_argument("vm_blocks: batch_size must be at least 1");

  VmResult result;
  result.out.resize(spec.n);
  const std::size_t d = spec.d;
  const auto batches = static_cast<std::int64_t>((spec.n + batch_size - 1) / batch_size);
  std::uint64_t fetches = 0;
  std::uint64_t transactions = 0;

#pragma omp parallel num_threads(exec.threads()) reduction(+ : fetches, transactions)
  {
    std::vector<std::uint32_t> idx(batch_size * d);
    std::vector<Block128> gathered(batch_size * d);
#pragma omp for schedule(static)
    for (std::int64_t bi = 0; bi < batches; ++bi) {
      const std::uint64_t first = static_cast<std::uint64_t>(bi) * batch_size;
      const std::size_t m = static_cast<std::size_t>(std::min<std::uint64_t>(batch_size, spec.n - first));
      const std::size_t elems = m * d;

      // Stage 1: indices for the whole batch.
      matrix_columns(spec, first, m, std::span(idx.data(), elems));
      // Stage 2: gather, grouped four elements per transaction.
      for (std::size_t e = 0; e < elems; ++e) gathered[e] = x[idx[e]];
      fetches += elems;
      transactions += (elems + kElementsPerTransaction - 1) / kElementsPerTransaction;
      // Stage 3: reduce each column out of local storage.
      for (std::size_t c = 0; c < m; ++c) {
        result.out[first + c] =
            xor_reduce(std::span<const Block128>(gathered.data() + c * d, d), variant);
      }
    }
  }
  result.counters = {fetches, transactions};
  return result;
}

}  // namespace silentflow
