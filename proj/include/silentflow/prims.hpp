#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>

#include "silentflow/aes.hpp"
#include "silentflow/block.hpp"

namespace silentflow {

// Public protocol constants. The fixed PRG key is the FIPS-197 example key
// 000102030405060708090a0b0c0d0e0f, and the right-child tweak is 0x...01.
inline constexpr Block128 kFixedPrgKey{0x0706050403020100ULL, 0x0f0e0d0c0b0a0908ULL};
inline constexpr Block128 kRightTweak{1, 0};

// Process-wide fixed-key permutation π under kFixedPrgKey.
const Aes128& fixed_key_aes();

struct ChildPair {
  Block128 left;
  Block128 right;
  friend bool operator==(const ChildPair&, const ChildPair&) = default;
};

// Length-doubling PRG: left = π(s) ^ s, right = π(s ^ C) ^ s ^ C.
ChildPair prg_expand(const Block128& seed);

// Expands every parent into two children written interleaved:
// children[2i] = left(parents[i]), children[2i+1] = right(parents[i]).
// `children` must hold 2·|parents| blocks and must not overlap `parents`.
void prg_expand_level(std::span<const Block128> parents, std::span<Block128> children);

enum class XorVariant { kPipelined, kParallel };

// Step accounting for one reduction. `stages` is the dependency depth: n-1
// for the pipelined chain, ceil(log2 n) for the balanced tree.
struct XorReduceStats {
  std::size_t xor_ops = 0;
  std::size_t stages = 0;
  std::size_t accumulator_reads = 0;
};

// XOR of all blocks. Throws std::invalid_argument on empty input.
Block128 xor_reduce(std::span<const Block128> blocks, XorVariant variant,
                    XorReduceStats* stats = nullptr);

// Stateless index in [0, k) for matrix position (column, lane), derived as
// π(seed ^ encode(column, lane, retry)) with rejection on the top 64 bits.
// Throws std::invalid_argument when k == 0.
std::uint64_t index_gen(const Block128& seed, std::uint64_t column, std::uint32_t lane,
                        std::uint64_t k);

// Counter encoding used by index_gen; exposed for the test oracle.
constexpr Block128 encode_index_counter(std::uint64_t column, std::uint32_t lane,
                                        std::uint32_t retry) {
  return {column, static_cast<std::uint64_t>(lane) | (static_cast<std::uint64_t>(retry) << 32)};
}

// Tweakable correlation-robust hash H(x, tweak) = π(π(x) ^ t) ^ π(x), with the
// tweak domain-separated from index_gen counters by its top bit.
Block128 cr_hash(const Block128& x, std::uint64_t tweak);

}  // namespace silentflow
