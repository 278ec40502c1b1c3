#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include <nlohmann/json.hpp>

#include "silentflow/cost_model.hpp"
#include "silentflow/cot.hpp"
#include "silentflow/dse.hpp"

namespace silentflow {

// Everything needed to reproduce a generation run.
struct RunConfig {
  CotParams params = CotParams::desk();
  std::string profile = "lan";
  std::string out_dir = ".";
  std::optional<Block128> entropy;  // master value; empty means OS entropy
  int workers = 0;                  // 0 = all available
};

// `entropy` is the master value actually used, which is what gets persisted.
nlohmann::json run_config_json(const RunConfig& config, const Block128& entropy);
// Throws std::invalid_argument on missing or malformed fields.
RunConfig run_config_from_json(const nlohmann::json& j);

nlohmann::json params_json(const CotParams& p);
nlohmann::json access_counters_json(const AccessCounters& c);

// Trust crossings, release events, inter-party traffic and kernel counters
// of one generation run. Contains no timings, so it is deterministic.
nlohmann::json ledger_json(const GenerateResult& result);

nlohmann::json timings_json(const GenerateResult& result);

nlohmann::json verify_json(const VerifyReport& report);

// Latency of every modeled protocol under each standard profile, with the
// model terms spelled out and published figures as annotations.
struct CostReportInputs {
  CotParams params = CotParams::constrained();
  std::uint64_t n_cots = kBenchmarkCots;
  double silentflow_seconds_per_cot = 0;
  std::string compute_source = "measured";  // or "flag" when supplied by the caller
  double ferret_lan_anchor_s = 9.703;     // LAN figure the baseline compute is fitted to
};
nlohmann::json cost_report_json(const CostReportInputs& in);

nlohmann::json dse_json(const DseGrid& grid, const DseResult& result, std::size_t repetitions);

}  // namespace silentflow
