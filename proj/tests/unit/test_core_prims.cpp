#include <gtest/gtest.h>

#include <random>
#include <unordered_set>

#include "silentflow/aes.hpp"
#include "silentflow/bitvec.hpp"
#include "silentflow/prims.hpp"
#include "silentflow/reference/reference.hpp"

namespace sf = silentflow;
using sf::Block128;

namespace {

Block128 random_block(std::mt19937_64& rng) { return {rng(), rng()}; }

const Block128 kFipsKey = Block128::from_hex("000102030405060708090a0b0c0d0e0f");
const Block128 kFipsPlain = Block128::from_hex("00112233445566778899aabbccddeeff");
const Block128 kFipsCipher = Block128::from_hex("69c4e0d86a7b0430d8cdb78070b4c55a");

}  // namespace

TEST(Block, HexRoundTrip) {
  std::mt19937_64 rng(1);
  for (int i = 0; i < 100; ++i) {
    const Block128 b = random_block(rng);
    EXPECT_EQ(Block128::from_hex(b.to_hex()), b);
  }
  EXPECT_EQ(Block128::from_hex("0100000000000000ff00000000000000"), (Block128{1, 0xff}));
}

TEST(Block, HexRejectsBadInput) {
  EXPECT_THROW(Block128::from_hex("00"), std::invalid_argument);
  EXPECT_THROW(Block128::from_hex("zz112233445566778899aabbccddeeff"), std::invalid_argument);
}

TEST(BitVec, PackedRoundTripAndBounds) {
  sf::BitVec v(70);
  v.set(0, true);
  v.set(69, true);
  v.flip(8);
  EXPECT_EQ(v.popcount(), 3U);
  const auto packed = v.to_packed();
  ASSERT_EQ(packed.size(), 9U);
  EXPECT_EQ(packed[0], 0x01);
  EXPECT_EQ(packed[1], 0x01);
  EXPECT_EQ(packed[8], 0x20);
  EXPECT_EQ(sf::BitVec::from_packed(packed, 70), v);
  EXPECT_THROW(v.get(70), std::out_of_range);
  EXPECT_THROW(sf::BitVec::from_packed(packed, 80), std::invalid_argument);
  sf::BitVec w(71);
  EXPECT_THROW(v ^= w, std::invalid_argument);
}

TEST(Aes, FipsVectorBothBackends) {
  EXPECT_EQ(sf::Aes128(kFipsKey, sf::AesBackend::kTable).encrypt(kFipsPlain), kFipsCipher);
  if (sf::Aes128::aesni_available()) {
    EXPECT_EQ(sf::Aes128(kFipsKey, sf::AesBackend::kAesNi).encrypt(kFipsPlain), kFipsCipher);
  }
  EXPECT_EQ(sf::reference::aes128_encrypt(kFipsKey, kFipsPlain), kFipsCipher);
}

TEST(Aes, BackendsAgreeWithTextbookCipher) {
  std::mt19937_64 rng(2);
  for (int i = 0; i < 64; ++i) {
    const Block128 key = random_block(rng);
    std::vector<Block128> in(37);
    for (auto& b : in) b = random_block(rng);
    std::vector<Block128> table(in.size());
    sf::Aes128(key, sf::AesBackend::kTable).encrypt_blocks(in, table);
    for (std::size_t j = 0; j < in.size(); ++j) {
      ASSERT_EQ(table[j], sf::reference::aes128_encrypt(key, in[j]));
    }
    if (sf::Aes128::aesni_available()) {
      std::vector<Block128> ni(in);
      sf::Aes128(key, sf::AesBackend::kAesNi).encrypt_blocks(ni, ni);
      EXPECT_EQ(ni, table);
    }
  }
}

TEST(Aes, BatchSizeMismatchThrows) {
  std::vector<Block128> in(3), out(2);
  EXPECT_THROW(sf::fixed_key_aes().encrypt_blocks(in, out), std::invalid_argument);
}

TEST(Prg, MatchesOracle) {
  std::mt19937_64 rng(3);
  for (int i = 0; i < 200; ++i) {
    const Block128 s = random_block(rng);
    const auto [l, r] = sf::reference::prg(s);
    const sf::ChildPair c = sf::prg_expand(s);
    ASSERT_EQ(c.left, l);
    ASSERT_EQ(c.right, r);
  }
}

TEST(Prg, ZeroSeedChildrenDifferAndAreFrozen) {
  const sf::ChildPair c = sf::prg_expand(Block128{});
  EXPECT_NE(c.left, c.right);
  // π(0) under the fixed key, and π(C) ^ C.
  const Block128 pi0 = sf::reference::aes128_encrypt(kFipsKey, Block128{});
  EXPECT_EQ(c.left, pi0);
  EXPECT_EQ(c.left.to_hex(), "c6a13b37878f5b826f4f8162a1c8d879");
}

TEST(Prg, LevelKernelMatchesSingleCalls) {
  std::mt19937_64 rng(4);
  for (std::size_t m : {1U, 7U, 8U, 9U, 33U}) {
    std::vector<Block128> parents(m);
    for (auto& p : parents) p = random_block(rng);
    std::vector<Block128> kids(2 * m);
    sf::prg_expand_level(parents, kids);
    for (std::size_t i = 0; i < m; ++i) {
      const sf::ChildPair c = sf::prg_expand(parents[i]);
      ASSERT_EQ(kids[2 * i], c.left);
      ASSERT_EQ(kids[2 * i + 1], c.right);
    }
  }
}

TEST(Prg, NoCollisionsWithinEitherHalf) {
  std::mt19937_64 rng(8);
  std::unordered_set<Block128, sf::Block128Hash> lefts, rights;
  for (int i = 0; i < 100000; ++i) {
    const sf::ChildPair c = sf::prg_expand(random_block(rng));
    ASSERT_TRUE(lefts.insert(c.left).second);
    ASSERT_TRUE(rights.insert(c.right).second);
  }
}

TEST(Prg, RightChildIsLeftChildOfTweakedSeed) {
  // Structural identity of the construction; seeds differing by exactly C
  // occur with negligible probability in a tree.
  const Block128 s{0x55, 0x66};
  EXPECT_EQ(sf::prg_expand(s).right, sf::prg_expand(s ^ sf::kRightTweak).left);
}

TEST(XorReduce, SmallCases) {
  const Block128 a{5, 6};
  EXPECT_EQ(sf::xor_reduce(std::vector<Block128>{a}, sf::XorVariant::kPipelined), a);
  EXPECT_EQ(sf::xor_reduce(std::vector<Block128>{a, a}, sf::XorVariant::kParallel), Block128{});
  EXPECT_THROW(sf::xor_reduce(std::vector<Block128>{}, sf::XorVariant::kPipelined),
               std::invalid_argument);
}

TEST(XorReduce, VariantsAgreeAndCountStages) {
  std::mt19937_64 rng(5);
  for (std::size_t n = 1; n <= 8; ++n) {
    for (int trial = 0; trial < 50; ++trial) {
      std::vector<Block128> blocks(n);
      Block128 expect{};
      for (auto& b : blocks) {
        b = random_block(rng);
        expect = expect ^ b;
      }
      sf::XorReduceStats pipe, par;
      EXPECT_EQ(sf::xor_reduce(blocks, sf::XorVariant::kPipelined, &pipe), expect);
      EXPECT_EQ(sf::xor_reduce(blocks, sf::XorVariant::kParallel, &par), expect);
      EXPECT_EQ(pipe.xor_ops, n - 1);
      EXPECT_EQ(par.xor_ops, n - 1);
      EXPECT_EQ(pipe.stages, n - 1);
      std::size_t depth = 0;
      while ((std::size_t{1} << depth) < n) ++depth;
      EXPECT_EQ(par.stages, depth);
    }
  }
}

TEST(XorReduce, ExhaustivePatterns) {
  for (std::size_t n = 1; n <= 8; ++n) {
    for (unsigned mask = 0; mask < 256; ++mask) {
      std::vector<Block128> blocks(n);
      Block128 fold{};
      for (std::size_t i = 0; i < n; ++i) {
        const std::uint64_t byte = (mask >> i | mask << (8 - i)) & 0xff;
        blocks[i] = Block128{byte << (8 * i), byte * 0x0101010101010101ULL};
        fold = fold ^ blocks[i];
      }
      ASSERT_EQ(sf::xor_reduce(blocks, sf::XorVariant::kPipelined), fold);
      ASSERT_EQ(sf::xor_reduce(blocks, sf::XorVariant::kParallel), fold);
    }
  }
}

TEST(XorReduce, ParallelStagesForTen) {
  std::vector<Block128> blocks(10, Block128{1, 1});
  sf::XorReduceStats s;
  sf::xor_reduce(blocks, sf::XorVariant::kParallel, &s);
  EXPECT_EQ(s.stages, 4U);
}

TEST(IndexGen, MatchesOracleAndRange) {
  std::mt19937_64 rng(6);
  for (std::uint64_t k : {1ULL, 2ULL, 3ULL, 1000ULL, 32771ULL, (1ULL << 40) + 7}) {
    const Block128 seed = random_block(rng);
    for (std::uint64_t col = 0; col < 20; ++col) {
      for (std::uint32_t lane = 0; lane < 4; ++lane) {
        const std::uint64_t v = sf::index_gen(seed, col, lane, k);
        ASSERT_LT(v, k);
        ASSERT_EQ(v, sf::reference::index_gen(seed, col, lane, k));
      }
    }
  }
  EXPECT_EQ(sf::index_gen(Block128{9, 9}, 5, 5, 1), 0U);
  EXPECT_THROW(sf::index_gen(Block128{}, 0, 0, 0), std::invalid_argument);
}

TEST(IndexGen, OrderIndependent) {
  const Block128 seed{0x1234, 0x5678};
  std::uint64_t forward[4][4];
  for (std::uint64_t c = 0; c < 4; ++c) {
    for (std::uint32_t l = 0; l < 4; ++l) forward[c][l] = sf::index_gen(seed, c, l, 97);
  }
  for (int c = 3; c >= 0; --c) {
    for (int l = 3; l >= 0; --l) {
      EXPECT_EQ(sf::index_gen(seed, static_cast<std::uint64_t>(c), static_cast<std::uint32_t>(l), 97),
                forward[c][l]);
    }
  }
}

TEST(IndexGen, RoughlyUniform) {
  const Block128 seed{42, 43};
  constexpr std::uint64_t k = 10;
  std::array<int, k> counts{};
  constexpr int draws = 100000;
  for (int i = 0; i < draws; ++i) ++counts[sf::index_gen(seed, static_cast<std::uint64_t>(i), 0, k)];
  double chi2 = 0;
  for (int c : counts) chi2 += (c - draws / 10.0) * (c - draws / 10.0) / (draws / 10.0);
  EXPECT_LT(chi2, 27.88);  // p = 0.001 at 9 degrees of freedom
}

TEST(CrHash, MatchesOracleAndSeparatesTweaks) {
  std::mt19937_64 rng(7);
  for (int i = 0; i < 50; ++i) {
    const Block128 x = random_block(rng);
    const std::uint64_t t = rng();
    ASSERT_EQ(sf::cr_hash(x, t), sf::reference::hash(x, t));
  }
  EXPECT_NE(sf::cr_hash(Block128{1, 2}, 0), sf::cr_hash(Block128{1, 2}, 1));
}
