#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "silentflow/cot.hpp"

namespace silentflow {

struct NetProfile {
  std::string name;
  double bandwidth_bps = 0;  // bits per second
  double rtt_ms = 0;

  // Throws std::invalid_argument unless bandwidth > 0 and rtt >= 0.
  void validate() const;

  static NetProfile lan();     // 3 Gbps, 0.3 ms
  static NetProfile wan();     // 200 Mbps, 50 ms
  static NetProfile mobile();  // 100 Mbps, 80 ms
  static std::vector<NetProfile> standard();
  // "lan", "wan" or "mobile"; throws std::invalid_argument otherwise.
  static NetProfile by_name(const std::string& name);
};

// Linear protocol cost. Traffic and rounds are charged once for setup and
// then per extension batch of `batch_cots` outputs; compute scales with the
// number of COTs.
struct ProtocolCost {
  std::string protocol;
  std::uint64_t batch_cots = 1;
  std::uint64_t rounds_per_batch = 0;
  std::uint64_t bytes_per_batch = 0;
  std::uint64_t setup_rounds = 0;
  std::uint64_t setup_bytes = 0;
  double compute_seconds_per_cot = 0;

  std::uint64_t batches(std::uint64_t n_cots) const;
  std::uint64_t rounds(std::uint64_t n_cots) const;
  std::uint64_t bytes(std::uint64_t n_cots) const;
  double compute_seconds(std::uint64_t n_cots) const;
};

// rounds·rtt + bytes·8/bandwidth + compute, in seconds. Throws
// std::invalid_argument when n_cots == 0 or the profile is invalid.
double estimate_latency(const ProtocolCost& cost, const NetProfile& profile, std::uint64_t n_cots);

struct LatencyBreakdown {
  double rounds_s = 0;
  double transfer_s = 0;
  double compute_s = 0;
  double total() const { return rounds_s + transfer_s + compute_s; }
};

LatencyBreakdown latency_breakdown(const ProtocolCost& cost, const NetProfile& profile,
                                   std::uint64_t n_cots);

// Generation is local to each party: no rounds, no traffic.
ProtocolCost silentflow_cost(const CotParams& params, double compute_seconds_per_cot);

// Simplified interactive baseline: one 1-out-of-2 OT of two λ-bit strings
// per tree level (t·h·2λ/8 bytes per batch, 2 rounds per batch), plus a
// one-time bootstrap of k base COTs (k·λ/8 bytes, 1 round). Does not
// validate t, so t = 0 leaves only the setup term.
ProtocolCost baseline_ferret_cost(const CotParams& params, double compute_seconds_per_cot = 0);

inline constexpr std::uint64_t kFerretRoundsPerBatch = 2;
inline constexpr std::uint64_t kFerretSetupRounds = 1;

// Sets compute so that estimate_latency(cost, profile, n_cots) equals
// `observed_seconds`. Throws std::invalid_argument when the communication
// term alone already exceeds the observation.
ProtocolCost calibrate_compute(ProtocolCost cost, const NetProfile& profile, std::uint64_t n_cots,
                               double observed_seconds);

// Published end-to-end seconds for 10^7 COTs, used only as annotations.
struct ReferenceRow {
  std::string protocol;
  double lan_s;
  double wan_s;
  double mobile_s;
};

const std::vector<ReferenceRow>& reference_rows();

inline constexpr std::uint64_t kBenchmarkCots = 10'000'000;

}  // namespace silentflow
