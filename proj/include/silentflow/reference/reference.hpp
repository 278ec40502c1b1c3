#pragma once

// Straightforward serial implementations used as test oracles and as the
// benchmark baseline. The oracles share nothing with the optimized kernels
// beyond the Block128 and BitVec containers.

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "silentflow/bitvec.hpp"
#include "silentflow/block.hpp"

namespace silentflow::reference {

// Byte-oriented AES-128 with the S-box computed from the field inverse.
Block128 aes128_encrypt(const Block128& key, const Block128& plaintext);

// Fixed-key PRG and hash, re-derived from aes128_encrypt.
std::pair<Block128, Block128> prg(const Block128& seed);
Block128 hash(const Block128& x, std::uint64_t tweak);

// Leaves of the full tree by direct recursion, left to right.
std::vector<Block128> ggm_leaves(const Block128& root, std::uint32_t h);

// Index for (column, lane) with plain rejection sampling.
std::uint64_t index_gen(const Block128& seed, std::uint64_t column, std::uint32_t lane,
                        std::uint64_t k);

// First d distinct indices over lanes 0, 1, 2, ...
std::vector<std::uint32_t> matrix_column(const Block128& seed, std::uint64_t k, std::uint64_t j,
                                         std::uint32_t d);

// Dense k x n GF(2) matrix, row-major, entry (i, j) at i·n + j.
std::vector<std::uint8_t> dense_matrix(const Block128& seed, std::uint64_t k, std::uint64_t n,
                                       std::uint32_t d);

BitVec dense_vm_bits(const BitVec& u, const std::vector<std::uint8_t>& matrix, std::uint64_t k,
                     std::uint64_t n);
std::vector<Block128> dense_vm_blocks(std::span<const Block128> x,
                                      const std::vector<std::uint8_t>& matrix, std::uint64_t k,
                                      std::uint64_t n);

// Single-threaded kernels with the same layout as the parallel ones. These
// call the library's fast primitives so that benchmarks compare schedules,
// not cipher implementations.
void expand_trees_serial(std::span<const Block128> roots, std::uint32_t h,
                         std::span<Block128> leaves);
std::vector<Block128> vm_blocks_serial(std::span<const Block128> x, const Block128& seed,
                                       std::uint64_t k, std::uint64_t n, std::uint32_t d);

}  // namespace silentflow::reference
