#include "silentflow/cot.hpp"

#include <omp.h>

#include <bit>
#include <stdexcept>
#include <string>

#include "silentflow/prims.hpp"

namespace silentflow {
namespace {

[[noreturn]] void bad_params(const std::string& what) {
  throw std::invalid_argument("invalid CotParams: " + what);
}

}  // namespace

void CotParams::validate() const {
  if (lambda != 128) bad_params("lambda must be 128");
  if (k == 0 || k >= (std::uint64_t{1} << 31)) bad_params("k must be in [1, 2^31)");
  if (h == 0 || h > kMaxCotHeight) bad_params("h must be in [1, " + std::to_string(kMaxCotHeight) + "]");
  if (t == 0) bad_params("t must be at least 1");
  if (t > (kMaxCotN >> h) || n != (t << h)) bad_params("n must equal t·2^h and be at most 2^28");
  if (d == 0 || d > k) bad_params("d must satisfy 1 <= d <= k");
  if (d > 255) bad_params("d must fit in one byte");
  if (s_block == 0 || s_block > h) bad_params("s_block must satisfy 1 <= s_block <= h");
  if (batch_size == 0) bad_params("batch_size must be at least 1");
}

CotParams CotParams::desk() { return {1024, 1 << 14, 10, 16, 10, 4, 256, 128}; }
CotParams CotParams::full() { return {32771, 1 << 20, 16, 16, 10, 4, 256, 128}; }
CotParams CotParams::constrained() { return {8192, 1 << 17, 13, 16, 10, 4, 256, 128}; }
CotParams CotParams::small() { return {64, 1 << 10, 6, 16, 4, 4, 256, 128}; }

Entropy Entropy::from_master(const Block128& master) {
  const Aes128 aes(master);
  return {aes.encrypt(Block128{0x73656e646572ULL, 1}), aes.encrypt(Block128{0x7265636569766572ULL, 2})};
}

void PartyChannel::send(Party from, std::uint64_t bits) { bits_[static_cast<int>(from)] += bits; }

GenerateResult generate(const CotParams& params, const Entropy& entropy,
                        const GenerateOptions& options) {
  params.validate();
  GenerateResult result;
  const SharedSeed seed = seed_agreement(entropy.share_sender, entropy.share_receiver);
  const SenderTee sender_tee(seed, options.tee);
  const ReceiverTee receiver_tee(seed, options.tee);
  ReleaseLedger& ledger = result.releases;

  SenderBase sender_base = sender_tee.release_base(params.k, ledger);
  ReceiverBase receiver_base = receiver_tee.release_base(params.k, ledger);

  std::vector<Block128> roots(params.t);
  for (std::uint64_t tree = 0; tree < params.t; ++tree) {
    roots[tree] = sender_tee.release_tree_root(tree, ledger);
  }

  // One ledger shard per tree, merged in tree order.
  std::vector<PuncturedRelease> releases(params.t);
  std::vector<ReleaseLedger> shards(params.t);
  const auto trees = static_cast<std::int64_t>(params.t);
#pragma omp parallel for schedule(static) num_threads(options.exec.threads())
  for (std::int64_t tree = 0; tree < trees; ++tree) {
    const auto idx = static_cast<std::size_t>(tree);
    releases[idx] = receiver_tee.release_punctured_path(idx, params.h, shards[idx]);
  }
  for (const auto& shard : shards) ledger.append(shard);

  const Block128 sender_matrix_seed = sender_tee.release_matrix_seed(ledger);
  const Block128 receiver_matrix_seed = receiver_tee.release_matrix_seed(ledger);
  const SparseMatrixSpec sender_spec{params.k, params.n, params.d, sender_matrix_seed};
  const SparseMatrixSpec receiver_spec{params.k, params.n, params.d, receiver_matrix_seed};
  ExtendOptions extend;
  extend.s_block = params.s_block;
  extend.batch_size = params.batch_size;
  extend.variant = options.variant;
  extend.schedule = options.schedule;
  extend.exec = options.exec;

  SenderHalf sender = extend_sender(sender_base, roots, params.h, sender_spec, extend);
  ReceiverHalf receiver = extend_receiver(receiver_base, releases, params.h, receiver_spec, extend);

  result.sender = {params, sender.delta, std::move(sender.K)};
  result.receiver = {params, std::move(receiver.y), std::move(receiver.M)};
  result.sender_timings = sender.timings;
  result.receiver_timings = receiver.timings;
  result.alphas = std::move(receiver.alphas);

  CostLedger& cost = result.cost;
  cost.memory = sender.ggm_counters;
  cost.memory += receiver.ggm_counters;
  cost.vm = sender.vm_counters;
  cost.vm += receiver.vm_counters;
  cost.bytes_between_parties = result.channel.bytes();
  cost.rounds = result.channel.rounds();
  cost.trust_crossings = ledger.crossings();
  cost.tee_release_bytes = ledger.total_bytes();
  return result;
}

VerifyReport verify(const SenderView& sender, const ReceiverView& receiver) {
  const std::size_t n = sender.K.size();
  if (receiver.M.size() != n || receiver.y.size() != n) {
    throw std::invalid_argument("verify: sender and receiver batches differ in length");
  }
  VerifyReport report;
  report.total = n;
  for (std::size_t j = 0; j < n; ++j) {
    const Block128 expect = sender.K[j] ^ (sender.delta & select_mask(receiver.y.test_unchecked(j)));
    if (receiver.M[j] != expect) {
      ++report.failures;
      if (!report.first_failure) report.first_failure = j;
      if (report.failing.size() < VerifyReport::kMaxListedFailures) report.failing.push_back(j);
    }
  }
  return report;
}

SenderCot sender_cot(const SenderView& view, std::uint64_t j) {
  if (j >= view.K.size()) throw std::out_of_range("sender_cot: index out of range");
  return {j, view.K[j], view.delta};
}

ReceiverCot receiver_cot(const ReceiverView& view, std::uint64_t j) {
  if (j >= view.M.size()) throw std::out_of_range("receiver_cot: index out of range");
  return {j, view.y.get(j), view.M[j]};
}

bool ot_mask_choice(const ReceiverCot& cot, bool b) { return b != cot.u; }

OtMessages ot_respond(const SenderCot& cot, bool c, const Block128& m0, const Block128& m1) {
  const Block128 r[2] = {cot.k, cot.k ^ cot.delta};
  const int ci = c ? 1 : 0;
  return {c, m0 ^ cr_hash(r[ci], cot.index), m1 ^ cr_hash(r[ci ^ 1], cot.index)};
}

Block128 ot_recover(const ReceiverCot& cot, bool b, const OtMessages& msg) {
  const Block128 pad = cr_hash(cot.m, cot.index);
  return (b ? msg.masked1 : msg.masked0) ^ pad;
}

Block128 ot_transfer(const SenderCot& sender, const ReceiverCot& receiver, bool b,
                     const Block128& m0, const Block128& m1, PartyChannel* channel) {
  if (sender.index != receiver.index ||
      receiver.m != (sender.k ^ (sender.delta & select_mask(receiver.u)))) {
    throw std::invalid_argument("ot_transfer: COT halves do not satisfy M = K ^ uΔ");
  }
  const bool c = ot_mask_choice(receiver, b);
  const OtMessages msg = ot_respond(sender, c, m0, m1);
  if (channel != nullptr) {
    channel->send(Party::kReceiver, 1);
    channel->send(Party::kSender, 256);
    channel->complete_round();
  }
  return ot_recover(receiver, b, msg);
}

}  // namespace silentflow
