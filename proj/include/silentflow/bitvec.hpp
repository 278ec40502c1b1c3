#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace silentflow {

// Fixed-length bit vector. Bit i lives in word i/64 at position i%64; the
// packed byte form is LSB-first, 8 bits per byte.
class BitVec {
 public:
  BitVec() = default;
  explicit BitVec(std::size_t size);

  static BitVec from_packed(std::span<const std::uint8_t> bytes, std::size_t size);

  std::size_t size() const { return size_; }

  // Bounds-checked; throws std::out_of_range.
  bool get(std::size_t i) const;
  void set(std::size_t i, bool value);
  void flip(std::size_t i);

  bool operator[](std::size_t i) const { return get(i); }

  std::size_t popcount() const;

  // Throws std::invalid_argument on length mismatch.
  BitVec& operator^=(const BitVec& other);
  friend BitVec operator^(BitVec a, const BitVec& b) { return a ^= b; }
  friend bool operator==(const BitVec&, const BitVec&) = default;

  std::vector<std::uint8_t> to_packed() const;

  std::span<const std::uint64_t> words() const { return words_; }
  std::span<std::uint64_t> words() { return words_; }

  // Unchecked access for hot loops that have already validated indices.
  bool test_unchecked(std::size_t i) const { return (words_[i >> 6] >> (i & 63)) & 1U; }

 private:
  void check(std::size_t i) const;
  void clear_tail();

  std::size_t size_ = 0;
  std::vector<std::uint64_t> words_;
};

}  // namespace silentflow
