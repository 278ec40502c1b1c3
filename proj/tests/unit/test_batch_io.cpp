#include <gtest/gtest.h>

#include <filesystem>

#include "silentflow/batch_io.hpp"

namespace sf = silentflow;
using sf::Block128;

namespace {

const sf::GenerateResult& fixture() {
  static const sf::GenerateResult g =
      sf::generate(sf::CotParams::small(), sf::Entropy::from_master(Block128{77, 78}));
  return g;
}

}  // namespace

TEST(BatchIo, SenderLayout) {
  const auto bytes = sf::serialize(fixture().sender);
  ASSERT_EQ(bytes.size(), sf::kBatchHeaderSize + 16 + 16 * 1024);
  EXPECT_EQ(std::string(bytes.begin(), bytes.begin() + 4), "SCOT");
  EXPECT_EQ(bytes[4], 1);
  EXPECT_EQ(bytes[5], 0);
  EXPECT_EQ(bytes[6], 0);  // sender
  EXPECT_EQ(bytes[7] | (bytes[8] << 8), 64);             // k
  EXPECT_EQ(bytes[11] | (bytes[12] << 8), 1024);         // n
  EXPECT_EQ(bytes[15], 16);                              // t
  EXPECT_EQ(bytes[19], 6);                               // h
  EXPECT_EQ(bytes[20], 4);                               // d
  EXPECT_EQ(bytes[21], 128);                             // lambda
  const auto delta = fixture().sender.delta.to_bytes();
  EXPECT_TRUE(std::equal(delta.begin(), delta.end(), bytes.begin() + 22));
}

TEST(BatchIo, RoundTripByteExact) {
  const auto s = sf::serialize(fixture().sender);
  const auto r = sf::serialize(fixture().receiver);
  EXPECT_EQ(r.size(), sf::kBatchHeaderSize + 128 + 16 * 1024);
  EXPECT_EQ(r[6], 1);
  const auto sv = sf::parse_sender(s);
  const auto rv = sf::parse_receiver(r);
  EXPECT_EQ(sv.K, fixture().sender.K);
  EXPECT_EQ(sv.delta, fixture().sender.delta);
  EXPECT_EQ(rv.y, fixture().receiver.y);
  EXPECT_EQ(rv.M, fixture().receiver.M);
  EXPECT_EQ(sf::serialize(sv), s);
  EXPECT_EQ(sf::serialize(rv), r);
  EXPECT_TRUE(sf::verify(sv, rv).ok());
}

TEST(BatchIo, CorruptInputsRaiseParseError) {
  const auto s = sf::serialize(fixture().sender);
  auto bad_magic = s;
  bad_magic[0] = 'X';
  EXPECT_THROW(sf::parse_sender(bad_magic), sf::ParseError);
  auto bad_version = s;
  bad_version[4] = 9;
  EXPECT_THROW(sf::parse_sender(bad_version), sf::ParseError);
  auto truncated = s;
  truncated.resize(s.size() - 1);
  EXPECT_THROW(sf::parse_sender(truncated), sf::ParseError);
  auto extended = s;
  extended.push_back(0);
  EXPECT_THROW(sf::parse_sender(extended), sf::ParseError);
  EXPECT_THROW(sf::parse_receiver(s), sf::ParseError);
  EXPECT_THROW(sf::parse_header(std::vector<std::uint8_t>(10)), sf::ParseError);
  auto bad_params = s;
  bad_params[19] = 7;  // h no longer matches n = t·2^h
  EXPECT_THROW(sf::parse_sender(bad_params), sf::ParseError);
}

TEST(BatchIo, FileRoundTrip) {
  const auto dir = std::filesystem::temp_directory_path() / "silentflow_batch_io_test";
  std::filesystem::create_directories(dir);
  const auto path = dir / "sender.scot";
  const auto bytes = sf::serialize(fixture().sender);
  sf::write_file(path, bytes);
  EXPECT_EQ(sf::read_file(path), bytes);
  EXPECT_THROW(sf::read_file(dir / "missing.scot"), sf::IoError);
  EXPECT_THROW(sf::write_file(dir / "no_such_dir" / "x.scot", bytes), sf::IoError);
  std::filesystem::remove_all(dir);
}
