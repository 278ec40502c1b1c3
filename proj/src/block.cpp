#include "silentflow/block.hpp"

#include <stdexcept>

#include "silentflow/bitvec.hpp"

namespace silentflow {
namespace {

int hex_value(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}

}  // namespace

std::string Block128::to_hex() const {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out;
  out.reserve(32);
  for (std::uint8_t b : to_bytes()) {
    out.push_back(kDigits[b >> 4]);
    out.push_back(kDigits[b & 0xf]);
  }
  return out;
}

Block128 Block128::from_hex(std::string_view hex) {
  if (hex.size() != 32) {
    throw std::invalid_argument("Block128::from_hex: expected 32 hex digits");
  }
  std::array<std::uint8_t, 16> bytes{};
  for (std::size_t i = 0; i < 16; ++i) {
    const int hi = hex_value(hex[2 * i]);
    const int lo = hex_value(hex[2 * i + 1]);
    if (hi < 0 || lo < 0) throw std::invalid_argument("Block128::from_hex: non-hex digit");
    bytes[i] = static_cast<std::uint8_t>((hi << 4) | lo);
  }
  return from_bytes(bytes);
}

BitVec::BitVec(std::size_t size) : size_(size), words_((size + 63) / 64, 0) {}

BitVec BitVec::from_packed(std::span<const std::uint8_t> bytes, std::size_t size) {
  if (bytes.size() != (size + 7) / 8) {
    throw std::invalid_argument("BitVec::from_packed: byte count does not match bit length");
  }
  BitVec v(size);
  for (std::size_t i = 0; i < bytes.size(); ++i) {
    v.words_[i / 8] |= static_cast<std::uint64_t>(bytes[i]) << (8 * (i % 8));
  }
  v.clear_tail();
  return v;
}

void BitVec::check(std::size_t i) const {
  if (i >= size_) throw std::out_of_range("BitVec index out of range");
}

void BitVec::clear_tail() {
  if (size_ % 64 != 0 && !words_.empty()) {
    words_.back() &= (std::uint64_t{1} << (size_ % 64)) - 1;
  }
}

bool BitVec::get(std::size_t i) const {
  check(i);
  return test_unchecked(i);
}

void BitVec::set(std::size_t i, bool value) {
  check(i);
  const std::uint64_t mask = std::uint64_t{1} << (i & 63);
  if (value) {
    words_[i >> 6] |= mask;
  } else {
    words_[i >> 6] &= ~mask;
  }
}

void BitVec::flip(std::size_t i) {
  check(i);
  words_[i >> 6] ^= std::uint64_t{1} << (i & 63);
}

std::size_t BitVec::popcount() const {
  std::size_t total = 0;
  for (std::uint64_t w : words_) total += static_cast<std::size_t>(std::popcount(w));
  return total;
}

BitVec& BitVec::operator^=(const BitVec& other) {
  if (other.size_ != size_) throw std::invalid_argument("BitVec xor: length mismatch");
  for (std::size_t i = 0; i < words_.size(); ++i) words_[i] ^= other.words_[i];
  return *this;
}

std::vector<std::uint8_t> BitVec::to_packed() const {
  std::vector<std::uint8_t> out((size_ + 7) / 8, 0);
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = static_cast<std::uint8_t>(words_[i / 8] >> (8 * (i % 8)));
  }
  return out;
}

}  // namespace silentflow
