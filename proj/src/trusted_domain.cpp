#include "silentflow/trusted_domain.hpp"

#include <algorithm>
#include <utility>

#include "silentflow/prims.hpp"

namespace silentflow {

const char* to_string(Party p) { return p == Party::kSender ? "sender_tee" : "receiver_tee"; }

const char* to_string(PayloadKind k) {
  switch (k) {
    case PayloadKind::kSenderBaseV: return "base_v";
    case PayloadKind::kGlobalKey: return "global_key";
    case PayloadKind::kChoiceBits: return "base_u";
    case PayloadKind::kReceiverBaseW: return "base_w";
    case PayloadKind::kTreeRoot: return "tree_root";
    case PayloadKind::kOffPathSeed: return "off_path_seed";
    case PayloadKind::kMaskedLeaf: return "masked_leaf";
    case PayloadKind::kMatrixSeed: return "matrix_seed";
    case PayloadKind::kPathWord: return "path_word";
    case PayloadKind::kPuncturedIndex: return "punctured_index";
    case PayloadKind::kOnPathSeed: return "on_path_seed";
  }
  return "unknown";
}

SharedSeed seed_agreement(const Block128& share_sender, const Block128& share_receiver) {
  return {share_sender ^ share_receiver, share_sender, share_receiver};
}

Block128 TeeStream::block(StreamDomain domain, std::uint64_t sub_id,
                          std::uint64_t counter) const {
  const std::uint64_t tag = (static_cast<std::uint64_t>(domain) << 56) | (sub_id & ((1ULL << 56) - 1));
  return aes_.encrypt(Block128{counter, tag});
}

void TeeStream::fill(StreamDomain domain, std::uint64_t sub_id, std::span<Block128> out) const {
  const std::uint64_t tag = (static_cast<std::uint64_t>(domain) << 56) | (sub_id & ((1ULL << 56) - 1));
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = Block128{i, tag};
  aes_.encrypt_blocks(out, out);
}

// ---------------------------------------------------------------------------

bool ReleaseLedger::forbidden(Party origin, PayloadKind kind) {
  switch (kind) {
    case PayloadKind::kPathWord:
    case PayloadKind::kPuncturedIndex:
    case PayloadKind::kOnPathSeed:
      return true;
    case PayloadKind::kGlobalKey:
      return origin == Party::kReceiver;
    default:
      return false;
  }
}

void ReleaseLedger::record(const ReleaseEvent& event) {
  if (forbidden(event.origin, event.kind)) {
    throw TrustViolation(std::string("refusing to release ") + to_string(event.kind) + " from " +
                         to_string(event.origin));
  }
  events_.push_back(event);
}

void ReleaseLedger::append(const ReleaseLedger& shard) {
  events_.insert(events_.end(), shard.events_.begin(), shard.events_.end());
}

std::uint64_t ReleaseLedger::total_bytes() const {
  std::uint64_t total = 0;
  for (const auto& e : events_) total += e.bytes;
  return total;
}

std::uint64_t ReleaseLedger::crossings_for_tree(std::int64_t tree_id) const {
  return static_cast<std::uint64_t>(std::count_if(
      events_.begin(), events_.end(), [&](const ReleaseEvent& e) { return e.tree_id == tree_id; }));
}

std::vector<std::string> ReleaseLedger::audit() const {
  std::vector<std::string> problems;
  for (std::size_t i = 0; i < events_.size(); ++i) {
    const auto& e = events_[i];
    if (forbidden(e.origin, e.kind)) {
      problems.push_back("event " + std::to_string(i) + ": " + to_string(e.kind) + " released by " +
                         to_string(e.origin));
    }
  }
  return problems;
}

// ---------------------------------------------------------------------------

PuncturedWorkCounts punctured_work_counts(std::uint32_t h) {
  const std::uint64_t leaves = std::uint64_t{1} << h;
  return {h, leaves - 1 - h, 2 * leaves - 2 - h, std::uint64_t{h} + 1};
}

TeeCore::TeeCore(const SharedSeed& seed, TeeOptions options)
    : stream_(seed.value), options_(std::move(options)) {
  delta_ = options_.forced_delta ? *options_.forced_delta
                                 : stream_.block(StreamDomain::kGlobalKey, 0, 0);
}

BitVec TeeCore::choice_bits(std::size_t k) const {
  BitVec u(k);
  std::vector<Block128> blocks((k + 127) / 128);
  stream_.fill(StreamDomain::kChoiceBits, 0, blocks);
  auto words = u.words();
  for (std::size_t i = 0; i < words.size(); ++i) {
    words[i] = (i % 2 == 0) ? blocks[i / 2].lo : blocks[i / 2].hi;
  }
  if (k % 64 != 0) words[words.size() - 1] &= (std::uint64_t{1} << (k % 64)) - 1;
  return u;
}

std::vector<Block128> TeeCore::sender_base(std::size_t k) const {
  std::vector<Block128> v(k);
  stream_.fill(StreamDomain::kSenderBase, 0, v);
  return v;
}

Block128 TeeCore::tree_root(std::uint64_t tree_id) const {
  return stream_.block(StreamDomain::kTreeRoot, tree_id, 0);
}

Block128 TeeCore::matrix_seed() const { return stream_.block(StreamDomain::kMatrixSeed, 0, 0); }

PathWord TeeCore::path_word(std::uint64_t tree_id, std::uint32_t h) const {
  if (h == 0 || h > kMaxTreeHeight) throw std::invalid_argument("path_word: height out of range");
  const std::uint64_t mask = (std::uint64_t{1} << h) - 1;
  std::uint64_t alpha = stream_.block(StreamDomain::kPathWord, tree_id, 0).lo & mask;
  if (options_.forced_alpha) {
    if (*options_.forced_alpha > mask) throw std::invalid_argument("forced alpha exceeds 2^h - 1");
    alpha = *options_.forced_alpha;
  }
  PathWord pw{BitVec(h), alpha};
  for (std::uint32_t level = 1; level <= h; ++level) {
    pw.b.set(level - 1, (alpha >> (h - level)) & 1U);
  }
  return pw;
}

SenderBase SenderTee::release_base(std::size_t k, ReleaseLedger& ledger) const {
  if (k == 0) throw std::invalid_argument("setup_base_correlation: k must be at least 1");
  SenderBase out{core_.sender_base(k), core_.delta()};
  ledger.record({Party::kSender, PayloadKind::kSenderBaseV, -1, 0, k * 16});
  ledger.record({Party::kSender, PayloadKind::kGlobalKey, -1, 0, 16});
  return out;
}

Block128 SenderTee::release_tree_root(std::uint64_t tree_id, ReleaseLedger& ledger) const {
  ledger.record({Party::kSender, PayloadKind::kTreeRoot, static_cast<std::int64_t>(tree_id), 0, 16});
  return core_.tree_root(tree_id);
}

Block128 SenderTee::release_matrix_seed(ReleaseLedger& ledger) const {
  ledger.record({Party::kSender, PayloadKind::kMatrixSeed, -1, 0, 16});
  return core_.matrix_seed();
}

Block128 ReceiverTee::release_matrix_seed(ReleaseLedger& ledger) const {
  ledger.record({Party::kReceiver, PayloadKind::kMatrixSeed, -1, 0, 16});
  return core_.matrix_seed();
}

ReceiverBase ReceiverTee::release_base(std::size_t k, ReleaseLedger& ledger) const {
  if (k == 0) throw std::invalid_argument("setup_base_correlation: k must be at least 1");
  ReceiverBase out{core_.choice_bits(k), core_.sender_base(k)};
  const Block128 delta = core_.delta();
  for (std::size_t i = 0; i < k; ++i) {
    out.w[i] ^= delta & select_mask(out.u.test_unchecked(i));
  }
  ledger.record({Party::kReceiver, PayloadKind::kChoiceBits, -1, 0, (k + 7) / 8});
  ledger.record({Party::kReceiver, PayloadKind::kReceiverBaseW, -1, 0, k * 16});
  return out;
}

PuncturedRelease ReceiverTee::release_punctured_path(std::uint64_t tree_id, std::uint32_t h,
                                                     ReleaseLedger& ledger) const {
  if (h == 0) throw std::invalid_argument("release_punctured_path: h must be at least 1");
  const PathWord path = core_.path_word(tree_id, h);
  const auto tid = static_cast<std::int64_t>(tree_id);

  PuncturedRelease rel;
  rel.tree_id = tree_id;
  rel.h = h;
  rel.siblings.reserve(h);

  Block128 green = core_.tree_root(tree_id);
  std::uint64_t green_index = 0;
  for (std::uint32_t level = 1; level <= h; ++level) {
    const ChildPair children = prg_expand(green);
    ++rel.tee_expansions;
    const bool keep_right = path.b.get(level - 1);
    const Block128 red = keep_right ? children.left : children.right;
    green = keep_right ? children.right : children.left;
    green_index = 2 * green_index + (keep_right ? 1 : 0);
    rel.siblings.push_back({level, green_index ^ 1U, red});
    ledger.record({Party::kReceiver, PayloadKind::kOffPathSeed, tid, level, 16});
  }
  rel.masked_leaf = green ^ core_.delta();
  ledger.record({Party::kReceiver, PayloadKind::kMaskedLeaf, tid, h, 16});
  return rel;
}

BaseCorrelation setup_base_correlation(const SharedSeed& seed, std::size_t k,
                                       const TeeOptions& options, ReleaseLedger* ledger) {
  ReleaseLedger local;
  ReleaseLedger& log = ledger != nullptr ? *ledger : local;
  const SenderTee sender(seed, options);
  const ReceiverTee receiver(seed, options);
  SenderBase s = sender.release_base(k, log);
  ReceiverBase r = receiver.release_base(k, log);
  return {k, std::move(r.u), std::move(s.v), std::move(r.w), s.delta};
}

PuncturedRelease punctured_path_release(const SharedSeed& seed, std::uint64_t tree_id,
                                        std::uint32_t h, ReleaseLedger* ledger,
                                        const TeeOptions& options) {
  ReleaseLedger local;
  return ReceiverTee(seed, options).release_punctured_path(tree_id, h, ledger != nullptr ? *ledger : local);
}

}  // namespace silentflow
