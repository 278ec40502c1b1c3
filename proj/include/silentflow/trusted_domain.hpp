#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "silentflow/aes.hpp"
#include "silentflow/bitvec.hpp"
#include "silentflow/block.hpp"

namespace silentflow {

enum class Party : std::uint8_t { kSender = 0, kReceiver = 1 };

const char* to_string(Party p);

struct SharedSeed {
  Block128 value;
  Block128 share_sender;
  Block128 share_receiver;
};

// Both parties contribute a share; the seed is their XOR.
SharedSeed seed_agreement(const Block128& share_sender, const Block128& share_receiver);

// Consumers of the in-enclave CSPRNG. Each gets a disjoint counter space.
enum class StreamDomain : std::uint8_t {
  kChoiceBits = 1,
  kSenderBase = 2,
  kGlobalKey = 3,
  kTreeRoot = 4,
  kPathWord = 5,
  kMatrixSeed = 6,
};

// AES-CTR keyed by the shared seed. Block (domain, sub_id, counter) is
// E_seed(counter || domain << 56 | sub_id); random access, no state.
class TeeStream {
 public:
  explicit TeeStream(const Block128& key) : aes_(key) {}

  Block128 block(StreamDomain domain, std::uint64_t sub_id, std::uint64_t counter) const;
  void fill(StreamDomain domain, std::uint64_t sub_id, std::span<Block128> out) const;

 private:
  Aes128 aes_;
};

struct BaseCorrelation {
  std::size_t k = 0;
  BitVec u;
  std::vector<Block128> v;
  std::vector<Block128> w;
  Block128 delta;
};

// What each side's TEE hands to its own untrusted domain.
struct SenderBase {
  std::vector<Block128> v;
  Block128 delta;
};

struct ReceiverBase {
  BitVec u;
  std::vector<Block128> w;
};

enum class PayloadKind : std::uint8_t {
  kSenderBaseV,
  kGlobalKey,
  kChoiceBits,
  kReceiverBaseW,
  kTreeRoot,
  kOffPathSeed,
  kMaskedLeaf,
  kMatrixSeed,
  // Never releasable from the receiver enclave.
  kPathWord,
  kPuncturedIndex,
  kOnPathSeed,
};

const char* to_string(PayloadKind k);

struct ReleaseEvent {
  Party origin = Party::kSender;
  PayloadKind kind = PayloadKind::kSenderBaseV;
  std::int64_t tree_id = -1;  // -1 for base-correlation releases
  std::uint32_t level = 0;
  std::uint64_t bytes = 0;
};

class TrustViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// Audit log of every TEE -> untrusted release. Forbidden payloads are
// rejected at record time, so the log can never contain them.
class ReleaseLedger {
 public:
  void record(const ReleaseEvent& event);

  // Appends another ledger's events; callers merge shards in tree_id order.
  void append(const ReleaseLedger& shard);

  std::span<const ReleaseEvent> events() const { return events_; }
  std::uint64_t crossings() const { return events_.size(); }
  std::uint64_t total_bytes() const;
  std::uint64_t crossings_for_tree(std::int64_t tree_id) const;

  // Re-checks the hygiene invariants over the whole log; empty when clean.
  std::vector<std::string> audit() const;

  static bool forbidden(Party origin, PayloadKind kind);

 private:
  std::vector<ReleaseEvent> events_;
};

struct PathWord {
  BitVec b;                // b[i-1] picks the kept child at level i (0 = left)
  std::uint64_t alpha = 0;  // leaf index of the kept path, MSB = level 1
};

struct OffPathSeed {
  std::uint32_t level = 0;       // 1..h
  std::uint64_t node_index = 0;  // position among the 2^level nodes of that level
  Block128 seed;
};

struct PuncturedRelease {
  std::uint64_t tree_id = 0;
  std::uint32_t h = 0;
  std::vector<OffPathSeed> siblings;  // ordered by level
  Block128 masked_leaf;               // green leaf ^ Δ
  std::uint32_t tee_expansions = 0;   // PRG calls spent inside the enclave
};

// Per-tree work split for a punctured release of height h.
struct PuncturedWorkCounts {
  std::uint64_t tee_prg_calls;        // h
  std::uint64_t untrusted_prg_calls;  // 2^h - 1 - h
  std::uint64_t untrusted_nodes;      // 2^{h+1} - 2 - h non-root nodes off the green chain
  std::uint64_t crossings;            // h sibling releases + 1 masked leaf
};

PuncturedWorkCounts punctured_work_counts(std::uint32_t h);

// Test hooks. Production runs leave both empty.
struct TeeOptions {
  std::optional<Block128> forced_delta;
  std::optional<std::uint64_t> forced_alpha;
};

// State shared by both enclaves: the seed-keyed stream and the global key.
class TeeCore {
 public:
  TeeCore(const SharedSeed& seed, TeeOptions options);

  Block128 delta() const { return delta_; }
  BitVec choice_bits(std::size_t k) const;
  std::vector<Block128> sender_base(std::size_t k) const;
  Block128 tree_root(std::uint64_t tree_id) const;
  PathWord path_word(std::uint64_t tree_id, std::uint32_t h) const;
  Block128 matrix_seed() const;

 private:
  TeeStream stream_;
  TeeOptions options_;
  Block128 delta_;
};

class SenderTee {
 public:
  explicit SenderTee(const SharedSeed& seed, TeeOptions options = {})
      : core_(seed, std::move(options)) {}

  // Releases (v, Δ). Throws std::invalid_argument when k == 0.
  SenderBase release_base(std::size_t k, ReleaseLedger& ledger) const;
  Block128 release_tree_root(std::uint64_t tree_id, ReleaseLedger& ledger) const;
  // Seed of the public LPN matrix; both enclaves release the same value.
  Block128 release_matrix_seed(ReleaseLedger& ledger) const;

 private:
  TeeCore core_;
};

class ReceiverTee {
 public:
  explicit ReceiverTee(const SharedSeed& seed, TeeOptions options = {})
      : core_(seed, std::move(options)) {}

  // Computes w = v ^ uΔ inside the enclave and releases (u, w).
  ReceiverBase release_base(std::size_t k, ReleaseLedger& ledger) const;

  // Walks the hidden path with exactly h PRG calls, releasing the off-path
  // sibling at each level and the masked final leaf. Throws on h == 0.
  PuncturedRelease release_punctured_path(std::uint64_t tree_id, std::uint32_t h,
                                          ReleaseLedger& ledger) const;
  Block128 release_matrix_seed(ReleaseLedger& ledger) const;

  // Enclave-internal view for tests and the verification oracle only.
  PathWord path_word_for_testing(std::uint64_t tree_id, std::uint32_t h) const {
    return core_.path_word(tree_id, h);
  }

 private:
  TeeCore core_;
};

// Runs both enclaves from the same seed and assembles the full correlation.
BaseCorrelation setup_base_correlation(const SharedSeed& seed, std::size_t k,
                                       const TeeOptions& options = {},
                                       ReleaseLedger* ledger = nullptr);

// Receiver-enclave release for one tree, as a free function over the seed.
PuncturedRelease punctured_path_release(const SharedSeed& seed, std::uint64_t tree_id,
                                        std::uint32_t h, ReleaseLedger* ledger = nullptr,
                                        const TeeOptions& options = {});

inline constexpr std::uint32_t kMaxTreeHeight = 40;

}  // namespace silentflow
