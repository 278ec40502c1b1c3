#include <gtest/gtest.h>

#include <random>

#include "silentflow/prims.hpp"
#include "silentflow/reference/reference.hpp"
#include "silentflow/trusted_domain.hpp"

namespace sf = silentflow;
using sf::Block128;

namespace {

sf::SharedSeed test_seed(std::uint64_t tag) {
  return sf::seed_agreement(Block128{tag, 0x1111}, Block128{0x2222, tag});
}

}  // namespace

TEST(SeedAgreement, Examples) {
  const Block128 x{0xabc, 0xdef};
  EXPECT_EQ(sf::seed_agreement(Block128{}, x).value, x);
  EXPECT_EQ(sf::seed_agreement(x, x).value, Block128{});
  const Block128 a{1, 2}, b{3, 4};
  EXPECT_EQ(sf::seed_agreement(a, b).value, sf::seed_agreement(b, a).value);
}

TEST(BaseCorrelation, CaseSplitPerBit) {
  const auto base = sf::setup_base_correlation(test_seed(1), 300);
  ASSERT_EQ(base.u.size(), 300U);
  ASSERT_EQ(base.v.size(), 300U);
  ASSERT_EQ(base.w.size(), 300U);
  std::size_t ones = 0;
  for (std::size_t i = 0; i < 300; ++i) {
    if (base.u.get(i)) {
      ++ones;
      EXPECT_EQ(base.w[i], base.v[i] ^ base.delta);
    } else {
      EXPECT_EQ(base.w[i], base.v[i]);
    }
  }
  EXPECT_GT(ones, 100U);
  EXPECT_LT(ones, 200U);
}

TEST(BaseCorrelation, ForcedZeroDelta) {
  sf::TeeOptions opts;
  opts.forced_delta = Block128{};
  const auto base = sf::setup_base_correlation(test_seed(2), 64, opts);
  EXPECT_EQ(base.w, base.v);
}

TEST(BaseCorrelation, LargeK) {
  const auto base = sf::setup_base_correlation(test_seed(3), 32771);
  EXPECT_EQ(base.v.size(), 32771U);
  EXPECT_EQ(base.u.size(), 32771U);
}

TEST(BaseCorrelation, ZeroKThrows) {
  EXPECT_THROW(sf::setup_base_correlation(test_seed(4), 0), std::invalid_argument);
}

TEST(BaseCorrelation, SymmetricDerivation) {
  const sf::SharedSeed seed = test_seed(5);
  const sf::SenderTee s1(seed), s2(seed);
  const sf::ReceiverTee r1(seed), r2(seed);
  sf::ReleaseLedger l1, l2;
  const auto a = s1.release_base(100, l1);
  const auto b = s2.release_base(100, l2);
  EXPECT_EQ(a.v, b.v);
  EXPECT_EQ(a.delta, b.delta);
  const auto ra = r1.release_base(100, l1);
  const auto rb = r2.release_base(100, l2);
  EXPECT_EQ(ra.u, rb.u);
  EXPECT_EQ(ra.w, rb.w);
  for (std::uint64_t tree = 0; tree < 8; ++tree) {
    EXPECT_EQ(r1.path_word_for_testing(tree, 10).alpha, r2.path_word_for_testing(tree, 10).alpha);
  }
}

TEST(PuncturedRelease, HeightOneLeftPath) {
  const sf::SharedSeed seed = test_seed(6);
  sf::TeeOptions opts;
  opts.forced_alpha = 0;
  sf::ReleaseLedger ledger;
  const sf::ReceiverTee receiver(seed, opts);
  const sf::SenderTee sender(seed, opts);
  const auto rel = receiver.release_punctured_path(0, 1, ledger);
  const Block128 root = sender.release_tree_root(0, ledger);
  const Block128 delta = sender.release_base(1, ledger).delta;
  const auto [left, right] = sf::reference::prg(root);
  ASSERT_EQ(rel.siblings.size(), 1U);
  EXPECT_EQ(rel.siblings[0].level, 1U);
  EXPECT_EQ(rel.siblings[0].node_index, 1U);
  EXPECT_EQ(rel.siblings[0].seed, right);
  EXPECT_EQ(rel.masked_leaf, left ^ delta);
  EXPECT_EQ(rel.tee_expansions, 1U);
}

TEST(PuncturedRelease, SiblingsMatchFullTree) {
  const sf::SharedSeed seed = test_seed(7);
  const std::uint32_t h = 3;
  for (std::uint64_t alpha = 0; alpha < 8; ++alpha) {
    sf::TeeOptions opts;
    opts.forced_alpha = alpha;
    sf::ReleaseLedger ledger;
    const auto rel = sf::ReceiverTee(seed, opts).release_punctured_path(2, h, ledger);
    const Block128 root = sf::SenderTee(seed, opts).release_tree_root(2, ledger);
    EXPECT_EQ(rel.tee_expansions, h);
    for (const auto& sib : rel.siblings) {
      // Sibling at level L covers leaves [node·2^{h-L}, (node+1)·2^{h-L}).
      const std::uint32_t below = h - sib.level;
      EXPECT_EQ(sib.node_index, (alpha >> below) ^ 1U);
      const auto full = sf::reference::ggm_leaves(root, h);
      const auto sub = sf::reference::ggm_leaves(sib.seed, below);
      for (std::size_t i = 0; i < sub.size(); ++i) {
        EXPECT_EQ(sub[i], full[(sib.node_index << below) + i]);
      }
    }
  }
}

TEST(PuncturedRelease, ZeroHeightThrows) {
  sf::ReleaseLedger ledger;
  EXPECT_THROW(sf::ReceiverTee(test_seed(8)).release_punctured_path(0, 0, ledger),
               std::invalid_argument);
  EXPECT_THROW(sf::punctured_path_release(test_seed(8), 0, 0), std::invalid_argument);
}

TEST(PuncturedRelease, FreeFunctionMatchesEnclave) {
  const sf::SharedSeed seed = test_seed(9);
  sf::ReleaseLedger a, b;
  const auto x = sf::punctured_path_release(seed, 3, 7, &a);
  const auto y = sf::ReceiverTee(seed).release_punctured_path(3, 7, b);
  EXPECT_EQ(x.masked_leaf, y.masked_leaf);
  EXPECT_EQ(a.crossings(), b.crossings());
}

TEST(WorkCounts, Formula) {
  for (std::uint32_t h = 1; h <= 20; ++h) {
    const auto w = sf::punctured_work_counts(h);
    const std::uint64_t leaves = std::uint64_t{1} << h;
    EXPECT_EQ(w.tee_prg_calls, h);
    // Together the two sides expand every internal node exactly once.
    EXPECT_EQ(w.tee_prg_calls + w.untrusted_prg_calls, leaves - 1);
    EXPECT_EQ(w.untrusted_nodes, 2 * leaves - h - 2);
    EXPECT_EQ(w.crossings, h + 1);
  }
}

TEST(Ledger, CrossingsPerTreeAndBytes) {
  const sf::SharedSeed seed = test_seed(10);
  sf::ReleaseLedger ledger;
  const sf::ReceiverTee receiver(seed);
  for (std::uint64_t tree = 0; tree < 4; ++tree) receiver.release_punctured_path(tree, 9, ledger);
  for (std::int64_t tree = 0; tree < 4; ++tree) EXPECT_EQ(ledger.crossings_for_tree(tree), 10U);
  EXPECT_EQ(ledger.crossings(), 40U);
  EXPECT_EQ(ledger.total_bytes(), 40U * 16);
}

TEST(Ledger, ReceiverNeverReleasesSecrets) {
  const sf::SharedSeed seed = test_seed(11);
  sf::ReleaseLedger ledger;
  const sf::ReceiverTee receiver(seed);
  receiver.release_base(128, ledger);
  for (std::uint64_t tree = 0; tree < 16; ++tree) receiver.release_punctured_path(tree, 6, ledger);
  receiver.release_matrix_seed(ledger);
  EXPECT_TRUE(ledger.audit().empty());
  for (const auto& e : ledger.events()) {
    EXPECT_EQ(e.origin, sf::Party::kReceiver);
    EXPECT_NE(e.kind, sf::PayloadKind::kGlobalKey);
    EXPECT_NE(e.kind, sf::PayloadKind::kPathWord);
    EXPECT_NE(e.kind, sf::PayloadKind::kPuncturedIndex);
    EXPECT_NE(e.kind, sf::PayloadKind::kOnPathSeed);
  }
}

TEST(Ledger, ForbiddenReleasesAreRejected) {
  sf::ReleaseLedger ledger;
  EXPECT_THROW(ledger.record({sf::Party::kReceiver, sf::PayloadKind::kGlobalKey, -1, 0, 16}),
               sf::TrustViolation);
  EXPECT_THROW(ledger.record({sf::Party::kReceiver, sf::PayloadKind::kPathWord, 0, 0, 2}),
               sf::TrustViolation);
  EXPECT_THROW(ledger.record({sf::Party::kSender, sf::PayloadKind::kOnPathSeed, 0, 1, 16}),
               sf::TrustViolation);
  EXPECT_NO_THROW(ledger.record({sf::Party::kSender, sf::PayloadKind::kGlobalKey, -1, 0, 16}));
  EXPECT_EQ(ledger.crossings(), 1U);
}

TEST(PathWord, BitsEncodeAlphaMsbFirst) {
  sf::TeeOptions opts;
  opts.forced_alpha = 0b1011;
  const auto pw = sf::ReceiverTee(test_seed(12), opts).path_word_for_testing(0, 4);
  EXPECT_EQ(pw.alpha, 0b1011U);
  EXPECT_TRUE(pw.b.get(0));
  EXPECT_FALSE(pw.b.get(1));
  EXPECT_TRUE(pw.b.get(2));
  EXPECT_TRUE(pw.b.get(3));
  opts.forced_alpha = 16;
  EXPECT_THROW(sf::ReceiverTee(test_seed(12), opts).path_word_for_testing(0, 4), std::invalid_argument);
}
