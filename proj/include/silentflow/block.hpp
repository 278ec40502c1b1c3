#pragma once

#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <span>
#include <string>
#include <string_view>

namespace silentflow {

static_assert(std::endian::native == std::endian::little,
              "byte layout of Block128 assumes a little-endian host");

// 128-bit word. Byte i of the serialized form is byte i of `lo` for i < 8 and
// byte i-8 of `hi` otherwise, which is also the AES state byte order.
struct alignas(16) Block128 {
  std::uint64_t lo = 0;
  std::uint64_t hi = 0;

  constexpr Block128() = default;
  constexpr Block128(std::uint64_t low, std::uint64_t high) : lo(low), hi(high) {}

  static constexpr Block128 zero() { return {}; }

  static Block128 from_bytes(std::span<const std::uint8_t, 16> bytes) {
    Block128 b;
    std::memcpy(&b.lo, bytes.data(), 8);
    std::memcpy(&b.hi, bytes.data() + 8, 8);
    return b;
  }

  std::array<std::uint8_t, 16> to_bytes() const {
    std::array<std::uint8_t, 16> out{};
    std::memcpy(out.data(), &lo, 8);
    std::memcpy(out.data() + 8, &hi, 8);
    return out;
  }

  // Hex in serialized byte order, 32 lowercase digits.
  std::string to_hex() const;
  // Accepts exactly 32 hex digits; throws std::invalid_argument otherwise.
  static Block128 from_hex(std::string_view hex);

  constexpr bool is_zero() const { return (lo | hi) == 0; }
  constexpr bool lsb() const { return (lo & 1U) != 0; }

  constexpr Block128& operator^=(const Block128& o) {
    lo ^= o.lo;
    hi ^= o.hi;
    return *this;
  }
  constexpr Block128& operator&=(const Block128& o) {
    lo &= o.lo;
    hi &= o.hi;
    return *this;
  }

  friend constexpr Block128 operator^(Block128 a, const Block128& b) { return a ^= b; }
  friend constexpr Block128 operator&(Block128 a, const Block128& b) { return a &= b; }
  friend constexpr bool operator==(const Block128&, const Block128&) = default;
};

// All-ones when bit is set, zero otherwise; used for b·Δ style selections.
constexpr Block128 select_mask(bool bit) {
  const std::uint64_t m = bit ? ~std::uint64_t{0} : 0;
  return {m, m};
}

struct Block128Hash {
  std::size_t operator()(const Block128& b) const noexcept {
    return static_cast<std::size_t>(b.lo * 0x9e3779b97f4a7c15ULL ^ b.hi);
  }
};

}  // namespace silentflow
