#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "silentflow/bitvec.hpp"
#include "silentflow/block.hpp"
#include "silentflow/extension.hpp"
#include "silentflow/ggm.hpp"
#include "silentflow/lpn.hpp"
#include "silentflow/trusted_domain.hpp"

namespace silentflow {

struct CotParams {
  std::uint64_t k = 1024;
  std::uint64_t n = 1 << 14;
  std::uint32_t h = 10;
  std::uint64_t t = 16;
  std::uint32_t d = 10;
  std::uint32_t s_block = 4;
  std::size_t batch_size = 256;
  std::uint32_t lambda = 128;

  // Throws std::invalid_argument with the first violated constraint.
  void validate() const;

  static CotParams desk();         // k=1024, n=2^14, t=16, h=10, d=10
  static CotParams full();         // k=32771, n=2^20, t=16, h=16, d=10
  static CotParams constrained();  // k=8192, n=2^17, t=16, h=13, d=10
  static CotParams small();        // k=64, n=2^10, t=16, h=6, d=4

  friend bool operator==(const CotParams&, const CotParams&) = default;
};

// Upper bounds accepted by CotParams::validate.
inline constexpr std::uint32_t kMaxCotHeight = 30;
inline constexpr std::uint64_t kMaxCotN = std::uint64_t{1} << 28;

// Both parties' entropy contributions.
struct Entropy {
  Block128 share_sender;
  Block128 share_receiver;

  // Derives both shares from one master value by domain separation.
  static Entropy from_master(const Block128& master);
};

struct SenderView {
  CotParams params;
  Block128 delta;
  std::vector<Block128> K;
};

struct ReceiverView {
  CotParams params;
  BitVec y;
  std::vector<Block128> M;
};

// Inter-party link. Generation never touches it; the transfer phase does.
class PartyChannel {
 public:
  void send(Party from, std::uint64_t bits);
  void complete_round() { ++rounds_; }

  std::uint64_t bits() const { return bits_[0] + bits_[1]; }
  std::uint64_t bits_from(Party p) const { return bits_[static_cast<int>(p)]; }
  std::uint64_t bytes() const { return (bits() + 7) / 8; }
  std::uint64_t rounds() const { return rounds_; }

 private:
  std::uint64_t bits_[2] = {0, 0};
  std::uint64_t rounds_ = 0;
};

struct CostLedger {
  AccessCounters memory;
  TransactionCounters vm;
  std::uint64_t bytes_between_parties = 0;
  std::uint64_t rounds = 0;
  std::uint64_t trust_crossings = 0;
  std::uint64_t tee_release_bytes = 0;

  friend bool operator==(const CostLedger&, const CostLedger&) = default;
};

struct GenerateOptions {
  ExecPolicy exec;
  XorVariant variant = XorVariant::kPipelined;
  ExtendSchedule schedule = ExtendSchedule::kFused;
  TeeOptions tee;
};

struct GenerateResult {
  SenderView sender;
  ReceiverView receiver;
  CostLedger cost;
  ReleaseLedger releases;
  PartyChannel channel;
  StageTimings sender_timings;
  StageTimings receiver_timings;
  std::vector<std::uint64_t> alphas;  // receiver-side holes, for tests
};

// seed agreement -> base correlation -> per-tree releases -> extension for
// both roles. Deterministic in (params, entropy). Throws on invalid params
// before doing any work.
GenerateResult generate(const CotParams& params, const Entropy& entropy,
                        const GenerateOptions& options = {});

struct VerifyReport {
  std::uint64_t total = 0;
  std::uint64_t failures = 0;
  std::optional<std::uint64_t> first_failure;
  std::vector<std::uint64_t> failing;  // at most kMaxListedFailures entries

  static constexpr std::size_t kMaxListedFailures = 64;
  bool ok() const { return failures == 0; }
};

// Exact check of M[j] = K[j] ^ y[j]·Δ for every j. Throws on length mismatch.
VerifyReport verify(const SenderView& sender, const ReceiverView& receiver);

// --- chosen-message OT from one COT --------------------------------------

struct SenderCot {
  std::uint64_t index = 0;
  Block128 k;  // r_0; r_1 = k ^ Δ
  Block128 delta;
};

struct ReceiverCot {
  std::uint64_t index = 0;
  bool u = false;
  Block128 m;  // r_u
};

SenderCot sender_cot(const SenderView& view, std::uint64_t j);
ReceiverCot receiver_cot(const ReceiverView& view, std::uint64_t j);

struct OtMessages {
  bool c = false;
  Block128 masked0;
  Block128 masked1;
};

// Receiver's first message: c = b ^ u.
bool ot_mask_choice(const ReceiverCot& cot, bool b);
// Sender's reply (m0 ^ H(r_c), m1 ^ H(r_{c^1})), H tweaked by the COT index.
OtMessages ot_respond(const SenderCot& cot, bool c, const Block128& m0, const Block128& m1);
// Receiver recovers m_b with H(r_u).
Block128 ot_recover(const ReceiverCot& cot, bool b, const OtMessages& msg);

// Full round trip over `channel`. Throws std::invalid_argument when the two
// halves do not form a valid COT.
Block128 ot_transfer(const SenderCot& sender, const ReceiverCot& receiver, bool b,
                     const Block128& m0, const Block128& m1, PartyChannel* channel = nullptr);

// Bits per OT on the wire: 1 choice bit + 2·λ masked-message bits.
inline constexpr std::uint64_t kOtTransferBits = 1 + 2 * 128;

}  // namespace silentflow
