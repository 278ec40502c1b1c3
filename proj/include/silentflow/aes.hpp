#pragma once

#include <array>
#include <cstdint>
#include <span>

#include "silentflow/block.hpp"

namespace silentflow {

enum class AesBackend { kAuto, kTable, kAesNi };

// AES-128 encryption with an expanded key schedule computed once at
// construction. Round keys and the lookup tables sit in read-only storage;
// every round but the last uses the T-table form, and the last round applies
// SubBytes/ShiftRows followed by the final round-key addition.
class Aes128 {
 public:
  explicit Aes128(const Block128& key, AesBackend backend = AesBackend::kAuto);

  Block128 encrypt(const Block128& in) const;

  // out[i] = E(in[i]); `in` and `out` may alias exactly. Sizes must match.
  void encrypt_blocks(std::span<const Block128> in, std::span<Block128> out) const;

  AesBackend backend() const { return backend_; }
  const std::array<Block128, 11>& round_keys() const { return round_keys_; }

  static bool aesni_available();

 private:
  void encrypt_table(std::span<const Block128> in, std::span<Block128> out) const;

  std::array<Block128, 11> round_keys_{};
  std::array<std::uint32_t, 44> round_words_{};
  AesBackend backend_;
};

}  // namespace silentflow
