#include "silentflow/prims.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <stdexcept>
#include <vector>

namespace silentflow {

const Aes128& fixed_key_aes() {
  static const Aes128 aes(kFixedPrgKey);
  return aes;
}

ChildPair prg_expand(const Block128& seed) {
  const std::array<Block128, 2> in{seed, seed ^ kRightTweak};
  std::array<Block128, 2> out{};
  fixed_key_aes().encrypt_blocks(in, out);
  return {out[0] ^ in[0], out[1] ^ in[1]};
}

void prg_expand_level(std::span<const Block128> parents, std::span<Block128> children) {
  if (children.size() != 2 * parents.size()) {
    throw std::invalid_argument("prg_expand_level: children must hold two blocks per parent");
  }
  // Chunked so the AES backend sees a full pipeline of independent blocks.
  constexpr std::size_t kChunk = 8;
  std::array<Block128, 2 * kChunk> in{};
  std::array<Block128, 2 * kChunk> out{};
  const Aes128& aes = fixed_key_aes();
  for (std::size_t base = 0; base < parents.size(); base += kChunk) {
    const std::size_t m = std::min(kChunk, parents.size() - base);
    for (std::size_t i = 0; i < m; ++i) {
      in[2 * i] = parents[base + i];
      in[2 * i + 1] = parents[base + i] ^ kRightTweak;
    }
    const auto in_view = std::span<const Block128>(in.data(), 2 * m);
    aes.encrypt_blocks(in_view, std::span(out.data(), 2 * m));
    for (std::size_t i = 0; i < 2 * m; ++i) children[2 * base + i] = out[i] ^ in[i];
  }
}

Block128 xor_reduce(std::span<const Block128> blocks, XorVariant variant,
                    XorReduceStats* stats) {
  if (blocks.empty()) throw std::invalid_argument("xor_reduce: empty input");
  const std::size_t n = blocks.size();

  if (variant == XorVariant::kPipelined) {
    // Accumulator stays in a register; each element is read once.
    Block128 acc = blocks[0];
    for (std::size_t i = 1; i < n; ++i) acc ^= blocks[i];
    if (stats != nullptr) *stats = {n - 1, n - 1, 0};
    return acc;
  }

  // Balanced pairwise tree; each stage's XORs are independent of each other.
  constexpr std::size_t kInline = 64;
  std::array<Block128, kInline> small{};
  std::vector<Block128> large;
  std::span<Block128> work;
  if (n <= kInline) {
    std::copy(blocks.begin(), blocks.end(), small.begin());
    work = std::span(small.data(), n);
  } else {
    large.assign(blocks.begin(), blocks.end());
    work = large;
  }
  std::size_t width = n;
  std::size_t stages = 0;
  while (width > 1) {
    const std::size_t half = width / 2;
    for (std::size_t i = 0; i < half; ++i) work[i] = work[2 * i] ^ work[2 * i + 1];
    if (width % 2 == 1) work[half] = work[width - 1];
    width = half + (width % 2);
    ++stages;
  }
  if (stats != nullptr) *stats = {n - 1, stages, 0};
  return work[0];
}

std::uint64_t index_gen(const Block128& seed, std::uint64_t column, std::uint32_t lane,
                        std::uint64_t k) {
  if (k == 0) throw std::invalid_argument("index_gen: k must be at least 1");
  // Accept x in [2^64 mod k, 2^64): that range holds a whole number of
  // residue classes, so x % k is uniform.
  const std::uint64_t threshold = (std::uint64_t{0} - k) % k;
  for (std::uint32_t retry = 0;; ++retry) {
    const Block128 x = fixed_key_aes().encrypt(seed ^ encode_index_counter(column, lane, retry));
    if (x.hi >= threshold) return x.hi % k;
  }
}

Block128 cr_hash(const Block128& x, std::uint64_t tweak) {
  const Aes128& aes = fixed_key_aes();
  const Block128 px = aes.encrypt(x);
  const Block128 t{tweak, std::uint64_t{1} << 63};
  return aes.encrypt(px ^ t) ^ px;
}

}  // namespace silentflow
