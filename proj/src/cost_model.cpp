#include "silentflow/cost_model.hpp"

#include <stdexcept>

namespace silentflow {

void NetProfile::validate() const {
  if (!(bandwidth_bps > 0)) throw std::invalid_argument("profile " + name + ": bandwidth must be > 0");
  if (!(rtt_ms >= 0)) throw std::invalid_argument("profile " + name + ": rtt must be >= 0");
}

NetProfile NetProfile::lan() { return {"lan", 3e9, 0.3}; }
NetProfile NetProfile::wan() { return {"wan", 200e6, 50}; }
NetProfile NetProfile::mobile() { return {"mobile", 100e6, 80}; }

std::vector<NetProfile> NetProfile::standard() { return {lan(), wan(), mobile()}; }

NetProfile NetProfile::by_name(const std::string& name) {
  for (auto& p : standard()) {
    if (p.name == name) return p;
  }
  throw std::invalid_argument("unknown network profile '" + name + "' (expected lan, wan or mobile)");
}

std::uint64_t ProtocolCost::batches(std::uint64_t n_cots) const {
  if (batch_cots == 0) throw std::invalid_argument("ProtocolCost: batch_cots must be at least 1");
  return (n_cots + batch_cots - 1) / batch_cots;
}

std::uint64_t ProtocolCost::rounds(std::uint64_t n_cots) const {
  return setup_rounds + batches(n_cots) * rounds_per_batch;
}

std::uint64_t ProtocolCost::bytes(std::uint64_t n_cots) const {
  return setup_bytes + batches(n_cots) * bytes_per_batch;
}

double ProtocolCost::compute_seconds(std::uint64_t n_cots) const {
  return compute_seconds_per_cot * static_cast<double>(n_cots);
}

LatencyBreakdown latency_breakdown(const ProtocolCost& cost, const NetProfile& profile,
                                   std::uint64_t n_cots) {
  if (n_cots == 0) throw std::invalid_argument("estimate_latency: n_cots must be at least 1");
  profile.validate();
  LatencyBreakdown b;
  b.rounds_s = static_cast<double>(cost.rounds(n_cots)) * profile.rtt_ms / 1e3;
  b.transfer_s = static_cast<double>(cost.bytes(n_cots)) * 8.0 / profile.bandwidth_bps;
  b.compute_s = cost.compute_seconds(n_cots);
  return b;
}

double estimate_latency(const ProtocolCost& cost, const NetProfile& profile, std::uint64_t n_cots) {
  return latency_breakdown(cost, profile, n_cots).total();
}

ProtocolCost silentflow_cost(const CotParams& params, double compute_seconds_per_cot) {
  params.validate();
  ProtocolCost c;
  c.protocol = "silentflow";
  c.batch_cots = params.n;
  c.compute_seconds_per_cot = compute_seconds_per_cot;
  return c;
}

ProtocolCost baseline_ferret_cost(const CotParams& params, double compute_seconds_per_cot) {
  if (params.n == 0) throw std::invalid_argument("baseline_ferret_cost: n must be at least 1");
  const std::uint64_t ot_bytes = 2 * params.lambda / 8;
  ProtocolCost c;
  c.protocol = "ferret_model";
  c.batch_cots = params.n;
  c.rounds_per_batch = params.t == 0 ? 0 : kFerretRoundsPerBatch;
  c.bytes_per_batch = params.t * params.h * ot_bytes;
  c.setup_rounds = kFerretSetupRounds;
  c.setup_bytes = params.k * (params.lambda / 8);
  c.compute_seconds_per_cot = compute_seconds_per_cot;
  return c;
}

ProtocolCost calibrate_compute(ProtocolCost cost, const NetProfile& profile, std::uint64_t n_cots,
                               double observed_seconds) {
  cost.compute_seconds_per_cot = 0;
  const double comm = estimate_latency(cost, profile, n_cots);
  if (comm > observed_seconds) {
    throw std::invalid_argument("calibrate_compute: communication alone exceeds the observed latency");
  }
  cost.compute_seconds_per_cot = (observed_seconds - comm) / static_cast<double>(n_cots);
  return cost;
}

const std::vector<ReferenceRow>& reference_rows() {
  static const std::vector<ReferenceRow> rows = {
      {"QuietOT", 36.24, 43.89, 48.48},   {"SilentOT", 17.32, 24.97, 29.56},
      {"Ferret", 9.703, 17.02, 21.64},    {"SSOT", 6.33, 13.98, 18.57},
      {"SilentFlow", 1.230, 1.231, 1.227},
  };
  return rows;
}

}  // namespace silentflow
