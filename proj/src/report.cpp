#include "silentflow/report.hpp"

#include <algorithm>
#include <stdexcept>

namespace silentflow {

using nlohmann::json;

json params_json(const CotParams& p) {
  return {{"k", p.k},       {"n", p.n},         {"h", p.h},
          {"t", p.t},       {"d", p.d},         {"s_block", p.s_block},
          {"batch_size", p.batch_size},         {"lambda", p.lambda}};
}

json run_config_json(const RunConfig& config, const Block128& entropy) {
  return {{"params", params_json(config.params)},
          {"profile", config.profile},
          {"out_dir", config.out_dir},
          {"entropy", entropy.to_hex()},
          {"workers", config.workers}};
}

RunConfig run_config_from_json(const json& j) {
  try {
    RunConfig c;
    const json& p = j.at("params");
    c.params.k = p.at("k").get<std::uint64_t>();
    c.params.n = p.at("n").get<std::uint64_t>();
    c.params.h = p.at("h").get<std::uint32_t>();
    c.params.t = p.at("t").get<std::uint64_t>();
    c.params.d = p.at("d").get<std::uint32_t>();
    c.params.s_block = p.at("s_block").get<std::uint32_t>();
    c.params.batch_size = p.at("batch_size").get<std::size_t>();
    c.params.lambda = p.at("lambda").get<std::uint32_t>();
    c.profile = j.at("profile").get<std::string>();
    c.out_dir = j.at("out_dir").get<std::string>();
    c.entropy = Block128::from_hex(j.at("entropy").get<std::string>());
    c.workers = j.at("workers").get<int>();
    return c;
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("malformed run config: ") + e.what());
  }
}

json access_counters_json(const AccessCounters& c) {
  return {{"global_reads", c.global_reads}, {"global_writes", c.global_writes},
          {"local_reads", c.local_reads},   {"local_writes", c.local_writes},
          {"global", c.global()},           {"local", c.local()}};
}

json ledger_json(const GenerateResult& result) {
  const CotParams& p = result.sender.params;
  const ReleaseLedger& ledger = result.releases;

  json events = json::array();
  for (const auto& e : ledger.events()) {
    events.push_back({{"origin", to_string(e.origin)},
                      {"kind", to_string(e.kind)},
                      {"tree_id", e.tree_id},
                      {"level", e.level},
                      {"bytes", e.bytes}});
  }
  json per_tree = json::array();
  for (std::uint64_t tree = 0; tree < p.t; ++tree) {
    per_tree.push_back(ledger.crossings_for_tree(static_cast<std::int64_t>(tree)));
  }
  const PuncturedWorkCounts work = punctured_work_counts(p.h);
  const RoundedAccessForm naive = rounded_naive_form(p.h);
  const RoundedAccessForm box = rounded_box_form(p.h);

  return {
      {"params", params_json(p)},
      {"generation",
       {{"bytes_between_parties", result.cost.bytes_between_parties},
        {"rounds", result.cost.rounds}}},
      {"trust_crossings",
       {{"total", ledger.crossings()},
        {"tee_release_bytes", ledger.total_bytes()},
        {"per_tree", per_tree},
        // Receiver-side releases per tree: h siblings and the masked leaf.
        // Each tree also has one sender-side root release.
        {"receiver_per_tree", work.crossings},
        {"receiver_per_tree_reference", p.h >= 1 ? p.h - 1 : 0}}},
      {"tree_work_split",
       {{"tee_prg_calls", work.tee_prg_calls},
        {"untrusted_prg_calls", work.untrusted_prg_calls},
        {"untrusted_nodes", work.untrusted_nodes}}},
      {"memory",
       {{"exact", access_counters_json(result.cost.memory)},
        {"rounded_per_tree",
         {{"naive", {{"global", naive.global}, {"local", naive.local}}},
          {"box", {{"global", box.global}, {"local", box.local}}}}}}},
      {"vm",
       {{"element_fetches", result.cost.vm.element_fetches},
        {"grouped_transactions", result.cost.vm.grouped_transactions}}},
      {"audit", ledger.audit()},
      {"events", events},
  };
}

json timings_json(const GenerateResult& result) {
  auto one = [](const StageTimings& t) {
    return json{{"ggm_ms", t.ggm_ms},
                {"vm_ms", t.vm_ms},
                {"xor_ms", t.xor_ms},
                {"total_ms", t.total_ms},
                {"serial_model_ms", t.serial_model_ms()},
                {"fused_model_ms", t.fused_model_ms()}};
  };
  return {{"sender", one(result.sender_timings)}, {"receiver", one(result.receiver_timings)}};
}

json verify_json(const VerifyReport& report) {
  json j = {{"total", report.total},
            {"failures", report.failures},
            {"failing", report.failing},
            {"ok", report.ok()}};
  j["first_failure"] = report.first_failure ? json(*report.first_failure) : json(nullptr);
  return j;
}

json cost_report_json(const CostReportInputs& in) {
  const auto profiles = NetProfile::standard();
  const ProtocolCost silent = silentflow_cost(in.params, in.silentflow_seconds_per_cot);
  const ProtocolCost ferret_equal = baseline_ferret_cost(in.params, in.silentflow_seconds_per_cot);
  const ProtocolCost ferret_fit =
      calibrate_compute(baseline_ferret_cost(in.params), NetProfile::lan(), in.n_cots, in.ferret_lan_anchor_s);

  auto row = [&](const ProtocolCost& c, const std::string& label, const std::string& compute_source) {
    json lat = json::object();
    json terms = json::object();
    for (const auto& pr : profiles) {
      const LatencyBreakdown b = latency_breakdown(c, pr, in.n_cots);
      lat[pr.name] = b.total();
      terms[pr.name] = {{"rounds_s", b.rounds_s}, {"transfer_s", b.transfer_s}, {"compute_s", b.compute_s}};
    }
    double lo = lat[profiles.front().name].get<double>();
    double hi = lo;
    for (const auto& pr : profiles) {
      lo = std::min(lo, lat[pr.name].get<double>());
      hi = std::max(hi, lat[pr.name].get<double>());
    }
    return json{{"protocol", label},
                {"compute_source", compute_source},
                {"batches", c.batches(in.n_cots)},
                {"rounds", c.rounds(in.n_cots)},
                {"bytes", c.bytes(in.n_cots)},
                {"bytes_per_batch", c.bytes_per_batch},
                {"rounds_per_batch", c.rounds_per_batch},
                {"setup_bytes", c.setup_bytes},
                {"setup_rounds", c.setup_rounds},
                {"compute_seconds_per_cot", c.compute_seconds_per_cot},
                {"latency_s", lat},
                {"terms", terms},
                {"profile_variation", lo > 0 ? (hi - lo) / lo : 0.0}};
  };

  json prof = json::array();
  for (const auto& pr : profiles) {
    prof.push_back({{"name", pr.name}, {"bandwidth_bps", pr.bandwidth_bps}, {"rtt_ms", pr.rtt_ms}});
  }
  json refs = json::array();
  for (const auto& r : reference_rows()) {
    refs.push_back({{"protocol", r.protocol}, {"latency_s", {{"lan", r.lan_s}, {"wan", r.wan_s}, {"mobile", r.mobile_s}}}});
  }

  return {
      {"n_cots", in.n_cots},
      {"params", params_json(in.params)},
      {"profiles", prof},
      {"model",
       {{"latency", "rounds * rtt + bytes * 8 / bandwidth + compute"},
        {"baseline_bytes_per_batch", "t * h * 2 * lambda / 8 (one 1-out-of-2 OT of two lambda-bit strings per tree level)"},
        {"baseline_rounds_per_batch", kFerretRoundsPerBatch},
        {"baseline_setup", "k * lambda / 8 bytes and 1 round, charged once for the k base COTs"},
        {"batch_cots", "n COTs per extension batch"},
        {"note", "simplified analytical model; not a packet-level simulation"}}},
      {"rows",
       json::array({row(silent, "silentflow", in.compute_source),
                    row(ferret_equal, "ferret_model", "equal_to_silentflow"),
                    row(ferret_fit, "ferret_model_fitted", "lan_anchor")})},
      {"reference_annotations", refs},
  };
}

json dse_json(const DseGrid& grid, const DseResult& result, std::size_t repetitions) {
  auto point = [](const DsePoint& p) {
    return json{{"s_block", p.s_block},
                {"batch_size", p.batch_size},
                {"L_GGM_ms", p.ggm_ms},
                {"L_VM_ms", p.vm_ms},
                {"L_XOR_ms", p.xor_ms},
                {"gap_ms", p.gap_ms()},
                {"fused_ms", p.fused_ms()}};
  };
  return {{"grid",
           {{"s_blocks", grid.s_blocks},
            {"batch_sizes", grid.batch_sizes},
            {"k", grid.k},
            {"h", grid.h},
            {"t", grid.t},
            {"d", grid.d},
            {"n", grid.n()}}},
          {"repetitions", repetitions},
          {"rows", result.points.size()},
          {"min_fused", point(result.points.at(result.min_fused))},
          {"min_gap", point(result.points.at(result.min_gap))},
          {"L_GGM_by_s_block_ms", result.ggm_by_s},
          {"L_VM_by_batch_ms", result.vm_by_batch},
          {"L_GGM_iqr_by_s_block_ms", result.ggm_iqr_by_s},
          {"L_VM_iqr_by_batch_ms", result.vm_iqr_by_batch},
          {"ggm_decreasing_in_s_block", result.ggm_trend_in_s},
          {"vm_decreasing_in_batch", result.vm_trend_in_batch},
          {"trend_tolerance", kTrendTolerance}};
}

}  // namespace silentflow
