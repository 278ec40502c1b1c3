#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "silentflow/cot.hpp"

namespace silentflow {

// Malformed or truncated batch file.
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// File could not be opened, read or written.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Little-endian layout, 22 bytes:
//   "SCOT" | version u16 | role u8 | k u32 | n u32 | t u32 | h u8 | d u8 | lambda u8
// followed by Δ (16) and K (16·n) for the sender, or y packed LSB-first
// (ceil(n/8)) and M (16·n) for the receiver.
inline constexpr char kBatchMagic[4] = {'S', 'C', 'O', 'T'};
inline constexpr std::uint16_t kBatchVersion = 1;
inline constexpr std::size_t kBatchHeaderSize = 22;

struct BatchHeader {
  std::uint16_t version = kBatchVersion;
  Party role = Party::kSender;
  std::uint32_t k = 0;
  std::uint32_t n = 0;
  std::uint32_t t = 0;
  std::uint8_t h = 0;
  std::uint8_t d = 0;
  std::uint8_t lambda = 128;
};

std::vector<std::uint8_t> serialize(const SenderView& view);
std::vector<std::uint8_t> serialize(const ReceiverView& view);

// Reads only the header. Throws ParseError on bad magic, version or role.
BatchHeader parse_header(const std::vector<std::uint8_t>& bytes);

// Throws ParseError unless the bytes are a complete batch of the right role.
SenderView parse_sender(const std::vector<std::uint8_t>& bytes);
ReceiverView parse_receiver(const std::vector<std::uint8_t>& bytes);

std::vector<std::uint8_t> read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, const std::vector<std::uint8_t>& bytes);

}  // namespace silentflow
