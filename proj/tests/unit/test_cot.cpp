#include <gtest/gtest.h>

#include <random>

#include "silentflow/batch_io.hpp"
#include "silentflow/cot.hpp"
#include "silentflow/prims.hpp"

namespace sf = silentflow;
using sf::Block128;

namespace {

sf::Entropy entropy(std::uint64_t tag) { return sf::Entropy::from_master(Block128{tag, ~tag}); }

// Recomputes every output from the released material with the library's
// building blocks in their most direct form.
void check_direct_recompute(const sf::CotParams& p, const sf::Entropy& e, const sf::GenerateResult& g) {
  const auto seed = sf::seed_agreement(e.share_sender, e.share_receiver);
  const auto base = sf::setup_base_correlation(seed, p.k);
  sf::ReleaseLedger ledger;
  const Block128 mseed = sf::SenderTee(seed).release_matrix_seed(ledger);
  const sf::SparseMatrixSpec spec{p.k, p.n, p.d, mseed};
  const sf::SenderTee sender(seed);
  for (std::uint64_t j = 0; j < p.n; ++j) {
    const auto col = sf::matrix_column(spec, j);
    Block128 k_expect{};
    for (auto i : col) k_expect = k_expect ^ base.v[i];
    const std::uint64_t tree = j >> p.h;
    const auto leaves = sf::expand_full_naive(sender.release_tree_root(tree, ledger), p.h).leaves;
    k_expect = k_expect ^ leaves[j & ((std::uint64_t{1} << p.h) - 1)];
    ASSERT_EQ(g.sender.K[j], k_expect) << j;
  }
}

}  // namespace

TEST(CotParams, PresetsValidate) {
  EXPECT_NO_THROW(sf::CotParams::desk().validate());
  EXPECT_NO_THROW(sf::CotParams::full().validate());
  EXPECT_NO_THROW(sf::CotParams::constrained().validate());
  EXPECT_NO_THROW(sf::CotParams::small().validate());
  EXPECT_EQ(sf::CotParams::full().k, 32771U);
  EXPECT_EQ(sf::CotParams::full().n, 1U << 20);
  EXPECT_EQ(sf::CotParams{}, sf::CotParams::desk());
}

TEST(CotParams, InvalidRejectedBeforeWork) {
  auto p = sf::CotParams::small();
  p.n += 1;
  EXPECT_THROW(sf::generate(p, entropy(1)), std::invalid_argument);
  p = sf::CotParams::small();
  p.k = 0;
  EXPECT_THROW(p.validate(), std::invalid_argument);
  p = sf::CotParams::small();
  p.d = 65;
  EXPECT_THROW(p.validate(), std::invalid_argument);
  p = sf::CotParams::small();
  p.s_block = 7;
  EXPECT_THROW(p.validate(), std::invalid_argument);
  p = sf::CotParams::small();
  p.lambda = 256;
  EXPECT_THROW(p.validate(), std::invalid_argument);
  p = sf::CotParams::small();
  p.batch_size = 0;
  EXPECT_THROW(p.validate(), std::invalid_argument);
}

TEST(Generate, SmallParamsVerifyAndZeroTraffic) {
  const auto p = sf::CotParams::small();
  const auto g = sf::generate(p, entropy(2));
  const auto report = sf::verify(g.sender, g.receiver);
  EXPECT_EQ(report.total, 1024U);
  EXPECT_TRUE(report.ok());
  EXPECT_EQ(g.cost.bytes_between_parties, 0U);
  EXPECT_EQ(g.cost.rounds, 0U);
  EXPECT_EQ(g.channel.bits(), 0U);
  EXPECT_TRUE(g.releases.audit().empty());
  for (std::int64_t tree = 0; tree < 16; ++tree) {
    // One root release from the sender plus h + 1 from the receiver.
    EXPECT_EQ(g.releases.crossings_for_tree(tree), 1 + p.h + 1);
  }
}

TEST(Generate, SenderOutputsMatchDirectRecompute) {
  auto p = sf::CotParams::small();
  p.h = 5;
  p.t = 8;
  p.n = 256;
  p.s_block = 2;
  const auto e = entropy(3);
  const auto g = sf::generate(p, e);
  check_direct_recompute(p, e, g);
  EXPECT_TRUE(sf::verify(g.sender, g.receiver).ok());
}

TEST(Generate, ParameterSweep) {
  std::mt19937_64 rng(40);
  for (int i = 0; i < 12; ++i) {
    sf::CotParams p;
    p.h = 1 + static_cast<std::uint32_t>(rng() % 8);
    p.t = 1 + rng() % 6;
    p.n = p.t << p.h;
    p.k = 1 + rng() % 200;
    p.d = 1 + static_cast<std::uint32_t>(rng() % std::min<std::uint64_t>(p.k, 12));
    p.s_block = 1 + static_cast<std::uint32_t>(rng() % p.h);
    p.batch_size = 1 + rng() % 300;
    sf::GenerateOptions opts;
    opts.variant = (rng() & 1) ? sf::XorVariant::kParallel : sf::XorVariant::kPipelined;
    opts.schedule = (rng() & 1) ? sf::ExtendSchedule::kSerial : sf::ExtendSchedule::kFused;
    const auto g = sf::generate(p, entropy(rng()), opts);
    EXPECT_TRUE(sf::verify(g.sender, g.receiver).ok()) << "k=" << p.k << " h=" << p.h << " t=" << p.t;
  }
}

TEST(Generate, DeterministicAcrossRunsAndWorkers) {
  const auto p = sf::CotParams::small();
  sf::GenerateOptions one, four;
  one.exec = sf::ExecPolicy{1};
  four.exec = sf::ExecPolicy{4};
  const auto a = sf::generate(p, entropy(4), one);
  const auto b = sf::generate(p, entropy(4), four);
  const auto c = sf::generate(p, entropy(4), four);
  EXPECT_EQ(sf::serialize(a.sender), sf::serialize(b.sender));
  EXPECT_EQ(sf::serialize(a.receiver), sf::serialize(b.receiver));
  EXPECT_EQ(sf::serialize(b.receiver), sf::serialize(c.receiver));
  EXPECT_EQ(a.cost, b.cost);
  const auto d = sf::generate(p, entropy(5), one);
  EXPECT_NE(sf::serialize(a.sender), sf::serialize(d.sender));
}

TEST(Verify, InjectedFault) {
  const auto g = sf::generate(sf::CotParams::small(), entropy(6));
  auto sender = g.sender;
  sender.K[123].lo ^= 1;
  const auto r = sf::verify(sender, g.receiver);
  EXPECT_EQ(r.failures, 1U);
  ASSERT_TRUE(r.first_failure.has_value());
  EXPECT_EQ(*r.first_failure, 123U);
  EXPECT_EQ(r.failing, std::vector<std::uint64_t>{123});
}

TEST(Verify, ZeroDeltaPassesIffEqual) {
  sf::GenerateOptions opts;
  opts.tee.forced_delta = Block128{};
  const auto g = sf::generate(sf::CotParams::small(), entropy(7), opts);
  EXPECT_EQ(g.sender.K, g.receiver.M);
  EXPECT_TRUE(sf::verify(g.sender, g.receiver).ok());
  auto receiver = g.receiver;
  receiver.y.flip(5);
  EXPECT_TRUE(sf::verify(g.sender, receiver).ok());
  receiver.M[5].hi ^= 4;
  EXPECT_EQ(sf::verify(g.sender, receiver).failures, 1U);
}

TEST(Verify, LengthMismatchThrows) {
  const auto g = sf::generate(sf::CotParams::small(), entropy(8));
  auto sender = g.sender;
  sender.K.pop_back();
  EXPECT_THROW(sf::verify(sender, g.receiver), std::invalid_argument);
}

TEST(Ot, MaskIdentityAndEqualMessages) {
  const auto g = sf::generate(sf::CotParams::small(), entropy(9));
  for (std::uint64_t j = 0; j < 64; ++j) {
    const auto s = sf::sender_cot(g.sender, j);
    const auto r = sf::receiver_cot(g.receiver, j);
    EXPECT_FALSE(sf::ot_mask_choice(r, r.u));
    const Block128 m{j, j + 1};
    EXPECT_EQ(sf::ot_transfer(s, r, false, m, m), m);
    EXPECT_EQ(sf::ot_transfer(s, r, true, m, m), m);
  }
}

TEST(Ot, RandomTransfers) {
  const auto g = sf::generate(sf::CotParams::small(), entropy(10));
  std::mt19937_64 rng(41);
  sf::PartyChannel channel;
  for (int i = 0; i < 1000; ++i) {
    const std::uint64_t j = rng() % g.sender.K.size();
    const bool b = rng() & 1U;
    const Block128 m0{rng(), rng()}, m1{rng(), rng()};
    const Block128 out = sf::ot_transfer(sf::sender_cot(g.sender, j), sf::receiver_cot(g.receiver, j),
                                         b, m0, m1, &channel);
    ASSERT_EQ(out, b ? m1 : m0);
  }
  EXPECT_EQ(channel.bits(), 1000 * sf::kOtTransferBits);
  EXPECT_EQ(channel.bits_from(sf::Party::kReceiver), 1000U);
  EXPECT_EQ(channel.rounds(), 1000U);
}

TEST(Ot, MaskedValuesHideDelta) {
  const auto g = sf::generate(sf::CotParams::small(), entropy(11));
  const auto s = sf::sender_cot(g.sender, 3);
  const auto msg = sf::ot_respond(s, false, Block128{}, Block128{});
  // Unhashed masking would expose K and K ^ Δ, whose XOR is Δ.
  EXPECT_NE(msg.masked0 ^ msg.masked1, g.sender.delta);
  EXPECT_NE(msg.masked0, msg.masked1);
}

TEST(Ot, InvalidCotRejected) {
  const auto g = sf::generate(sf::CotParams::small(), entropy(12));
  auto r = sf::receiver_cot(g.receiver, 4);
  r.m.lo ^= 1;
  EXPECT_THROW(sf::ot_transfer(sf::sender_cot(g.sender, 4), r, true, Block128{}, Block128{}),
               std::invalid_argument);
  EXPECT_THROW(sf::ot_transfer(sf::sender_cot(g.sender, 4), sf::receiver_cot(g.receiver, 5), true,
                               Block128{}, Block128{}),
               std::invalid_argument);
  EXPECT_THROW(sf::sender_cot(g.sender, 1024), std::out_of_range);
}
