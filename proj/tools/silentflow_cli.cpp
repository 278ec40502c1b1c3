#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <bit>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include "silentflow/batch_io.hpp"
#include "silentflow/cost_model.hpp"
#include "silentflow/cot.hpp"
#include "silentflow/dse.hpp"
#include "silentflow/report.hpp"

namespace sf = silentflow;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitVerifyFailed = 1;
constexpr int kExitUsage = 2;
constexpr int kExitIo = 3;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Raw flag values; zero means "not given".
struct ParamFlags {
  std::string preset = "desk";
  std::optional<std::uint64_t> k;
  std::optional<std::uint64_t> n;
  std::optional<std::uint64_t> trees;
  std::optional<std::uint32_t> height;
  std::optional<std::uint32_t> d;
  std::optional<std::uint32_t> sblock;
  std::optional<std::size_t> batch;
  std::string entropy;
  int workers = 0;
  std::string profile = "lan";
  std::string out = ".";
};

void add_param_flags(CLI::App* cmd, ParamFlags& f) {
  cmd->add_option("--preset", f.preset, "Parameter preset")
      ->check(CLI::IsMember({"desk", "full", "constrained", "small"}))
      ->capture_default_str();
  cmd->add_option("--k", f.k, "Base correlation size");
  cmd->add_option("--n", f.n, "Number of COTs (trees * 2^height)");
  cmd->add_option("--trees", f.trees, "Number of GGM trees t");
  cmd->add_option("--height", f.height, "GGM tree height h");
  cmd->add_option("--d", f.d, "Nonzeros per matrix column");
  cmd->add_option("--sblock", f.sblock, "Subtree block depth");
  cmd->add_option("--batch", f.batch, "VM batch size");
  cmd->add_option("--entropy", f.entropy, "32 hex digits; OS entropy when absent");
  cmd->add_option("--workers", f.workers, "Worker threads (0 = all)")->check(CLI::NonNegativeNumber);
  cmd->add_option("--profile", f.profile, "Network profile")
      ->check(CLI::IsMember({"lan", "wan", "mobile"}))
      ->capture_default_str();
  cmd->add_option("--out", f.out, "Output directory")->capture_default_str();
}

sf::CotParams preset(const std::string& name) {
  if (name == "full") return sf::CotParams::full();
  if (name == "constrained") return sf::CotParams::constrained();
  if (name == "small") return sf::CotParams::small();
  return sf::CotParams::desk();
}

sf::CotParams resolve_params(const ParamFlags& f) {
  sf::CotParams p = preset(f.preset);
  if (f.k) p.k = *f.k;
  if (f.d) p.d = *f.d;
  if (f.batch) p.batch_size = *f.batch;
  if (f.trees) p.t = *f.trees;
  if (f.height) p.h = *f.height;
  if (f.n) {
    p.n = *f.n;
    if (f.height && !f.trees) {
      p.t = p.h < 64 ? p.n >> p.h : 0;
    } else if (!f.height) {
      if (p.t == 0 || p.n % p.t != 0 || !std::has_single_bit(p.n / p.t)) {
        throw UsageError("--n must be trees times a power of two");
      }
      p.h = static_cast<std::uint32_t>(std::countr_zero(p.n / p.t));
    }
  } else if (p.h < 64) {
    p.n = p.t << p.h;
  }
  p.s_block = f.sblock ? *f.sblock : std::min(p.s_block, std::max<std::uint32_t>(p.h, 1));
  try {
    p.validate();
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  return p;
}

sf::Block128 os_entropy() {
  std::random_device rd;
  std::uint64_t w[2];
  for (auto& x : w) x = (static_cast<std::uint64_t>(rd()) << 32) | rd();
  return {w[0], w[1]};
}

sf::RunConfig resolve_config(const ParamFlags& f) {
  sf::RunConfig c;
  c.params = resolve_params(f);
  c.profile = f.profile;
  c.out_dir = f.out;
  c.workers = f.workers;
  if (!f.entropy.empty()) {
    try {
      c.entropy = sf::Block128::from_hex(f.entropy);
    } catch (const std::invalid_argument&) {
      throw UsageError("--entropy must be 32 hex digits");
    }
  }
  return c;
}

void write_json(const fs::path& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw sf::IoError("cannot create " + path.string());
  out << j.dump(2) << '\n';
  if (!out) throw sf::IoError("write failed: " + path.string());
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw sf::IoError("cannot create " + path.string());
  out << text;
  if (!out) throw sf::IoError("write failed: " + path.string());
}

fs::path ensure_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw sf::IoError("cannot create directory " + dir + ": " + ec.message());
  return fs::path(dir);
}

sf::GenerateOptions generate_options(const sf::RunConfig& c) {
  sf::GenerateOptions o;
  o.exec = sf::ExecPolicy{c.workers};
  return o;
}

// --- gen -------------------------------------------------------------------

int cmd_gen(const ParamFlags& flags) {
  const sf::RunConfig config = resolve_config(flags);
  const sf::Block128 master = config.entropy.value_or(os_entropy());
  const fs::path dir = ensure_dir(config.out_dir);

  const sf::GenerateResult g =
      sf::generate(config.params, sf::Entropy::from_master(master), generate_options(config));
  sf::write_file(dir / "sender.scot", sf::serialize(g.sender));
  sf::write_file(dir / "receiver.scot", sf::serialize(g.receiver));
  write_json(dir / "ledger.json", sf::ledger_json(g));
  write_json(dir / "run_config.json", sf::run_config_json(config, master));
  write_json(dir / "timings.json", sf::timings_json(g));

  std::cout << json{{"out_dir", config.out_dir},
                    {"n", config.params.n},
                    {"bytes_between_parties", g.cost.bytes_between_parties},
                    {"trust_crossings", g.cost.trust_crossings},
                    {"sender_ms", g.sender_timings.total_ms},
                    {"receiver_ms", g.receiver_timings.total_ms}}
                   .dump()
            << '\n';
  return kExitOk;
}

// --- verify ----------------------------------------------------------------

int cmd_verify(const std::string& sender_path, const std::string& receiver_path,
               const std::string& report_path) {
  const sf::SenderView sender = sf::parse_sender(sf::read_file(sender_path));
  const sf::ReceiverView receiver = sf::parse_receiver(sf::read_file(receiver_path));
  if (!(sender.params == receiver.params)) throw sf::ParseError("sender and receiver headers differ");
  const sf::VerifyReport report = sf::verify(sender, receiver);
  const json j = sf::verify_json(report);
  if (!report_path.empty()) write_json(report_path, j);
  std::cout << j.dump() << '\n';
  return report.ok() ? kExitOk : kExitVerifyFailed;
}

// --- bench -----------------------------------------------------------------

struct BenchFlags {
  std::size_t reps = 5;
  std::uint64_t cots = 0;
  std::string json_path;
};

json bench_point(const sf::CotParams& p, const sf::GenerateOptions& base, const sf::Block128& master,
                 std::size_t reps) {
  std::vector<double> fused_ms, serial_ms, ggm_ms, vm_ms, xor_ms;
  bool ok = true;
  for (std::size_t r = 0; r < reps; ++r) {
    for (auto schedule : {sf::ExtendSchedule::kFused, sf::ExtendSchedule::kSerial}) {
      sf::GenerateOptions o = base;
      o.schedule = schedule;
      const sf::Stopwatch sw;
      const auto g = sf::generate(p, sf::Entropy::from_master(master), o);
      const double ms = sw.elapsed_ms();
      ok = ok && sf::verify(g.sender, g.receiver).ok();
      if (schedule == sf::ExtendSchedule::kFused) {
        fused_ms.push_back(ms);
      } else {
        serial_ms.push_back(ms);
        ggm_ms.push_back(g.sender_timings.ggm_ms + g.receiver_timings.ggm_ms);
        vm_ms.push_back(g.sender_timings.vm_ms + g.receiver_timings.vm_ms);
        xor_ms.push_back(g.sender_timings.xor_ms + g.receiver_timings.xor_ms);
      }
    }
  }
  const double fused = sf::median(fused_ms);
  return {{"n", p.n},
          {"params", sf::params_json(p)},
          {"repetitions", reps},
          {"verified", ok},
          {"fused_ms", fused},
          {"serial_ms", sf::median(serial_ms)},
          {"fused_iqr_ms", sf::iqr(fused_ms)},
          {"serial_iqr_ms", sf::iqr(serial_ms)},
          {"stage_ms", {{"ggm", sf::median(ggm_ms)}, {"vm", sf::median(vm_ms)}, {"xor", sf::median(xor_ms)}}},
          {"cots_per_second", static_cast<double>(p.n) / (fused / 1e3)}};
}

int cmd_bench(const ParamFlags& flags, const BenchFlags& bf) {
  if (bf.reps == 0) throw UsageError("--reps must be at least 1");
  const sf::RunConfig config = resolve_config(flags);
  const sf::Block128 master = config.entropy.value_or(os_entropy());
  const sf::GenerateOptions opts = generate_options(config);

  json out;
  out["workers"] = opts.exec.threads();
  out["desk"] = bench_point(sf::CotParams::desk(), opts, master, bf.reps);
  if (!(config.params == sf::CotParams::desk())) out["configured"] = bench_point(config.params, opts, master, bf.reps);

  if (bf.cots > 0) {
    // Many independent batches of the configured size, fused schedule.
    const sf::CotParams& p = config.params;
    const std::uint64_t batches = (bf.cots + p.n - 1) / p.n;
    const sf::Aes128 derive(master);
    bool ok = true;
    const sf::Stopwatch sw;
    for (std::uint64_t b = 0; b < batches; ++b) {
      const auto g = sf::generate(p, sf::Entropy::from_master(derive.encrypt(sf::Block128{b, 0x62656e6368})), opts);
      ok = ok && (b + 1 < batches || sf::verify(g.sender, g.receiver).ok());
    }
    const double seconds = sw.elapsed_ms() / 1e3;
    out["large_run"] = {{"target_cots", bf.cots},
                        {"batch_n", p.n},
                        {"batches", batches},
                        {"generated_cots", batches * p.n},
                        {"seconds", seconds},
                        {"cots_per_second", static_cast<double>(batches * p.n) / seconds},
                        {"last_batch_verified", ok}};
  }
  if (!bf.json_path.empty()) write_json(fs::path(bf.json_path), out);
  std::cout << out.dump(2) << '\n';
  return kExitOk;
}

// --- dse -------------------------------------------------------------------

struct DseFlags {
  std::string s_blocks = "3,4,6,12";
  std::string batches = "16,32,64,128,256";
  std::size_t reps = 31;
  std::uint32_t height = 12;
  std::uint64_t trees = 4;
  std::string csv_path;
  std::string json_path;
};

template <class T>
std::vector<T> parse_list(const std::string& text, const char* flag) {
  std::vector<T> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    try {
      std::size_t used = 0;
      const unsigned long long v = std::stoull(item, &used);
      if (used != item.size()) throw std::invalid_argument(item);
      out.push_back(static_cast<T>(v));
    } catch (const std::exception&) {
      throw UsageError(std::string(flag) + ": not a list of integers: " + text);
    }
  }
  if (out.empty()) throw UsageError(std::string(flag) + " must name at least one value");
  return out;
}

int cmd_dse(const DseFlags& df, int workers) {
  sf::DseGrid grid;
  grid.s_blocks = parse_list<std::uint32_t>(df.s_blocks, "--s-blocks");
  grid.batch_sizes = parse_list<std::size_t>(df.batches, "--batches");
  grid.h = df.height;
  grid.t = df.trees;
  if (df.reps == 0) throw UsageError("--reps must be at least 1");
  try {
    grid.validate();
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  const sf::DseResult r = sf::dse_sweep(grid, df.reps, sf::ExecPolicy{workers});
  std::ostringstream csv;
  sf::write_dse_csv(csv, r);
  if (df.csv_path.empty()) {
    std::cout << csv.str();
  } else {
    write_text(df.csv_path, csv.str());
  }
  const json summary = sf::dse_json(grid, r, df.reps);
  if (!df.json_path.empty()) write_json(df.json_path, summary);
  (df.csv_path.empty() ? std::cerr : std::cout) << summary.dump(2) << '\n';
  return kExitOk;
}

// --- cost ------------------------------------------------------------------

struct CostFlags {
  double compute_per_cot = -1;  // negative: measure
  std::uint64_t n_cots = sf::kBenchmarkCots;
  std::size_t reps = 3;
  std::string json_path;
};

int cmd_cost(const ParamFlags& flags, const CostFlags& cf) {
  if (cf.n_cots == 0) throw UsageError("--cots must be at least 1");
  if (cf.reps == 0) throw UsageError("--reps must be at least 1");
  ParamFlags f = flags;
  if (f.preset == "desk" && !f.k && !f.n && !f.trees && !f.height) f.preset = "constrained";
  const sf::RunConfig config = resolve_config(f);

  sf::CostReportInputs in;
  in.params = config.params;
  in.n_cots = cf.n_cots;
  if (cf.compute_per_cot >= 0) {
    in.silentflow_seconds_per_cot = cf.compute_per_cot;
    in.compute_source = "flag";
  } else {
    const sf::Block128 master = config.entropy.value_or(os_entropy());
    std::vector<double> ms;
    for (std::size_t r = 0; r < cf.reps; ++r) {
      const sf::Stopwatch sw;
      sf::generate(config.params, sf::Entropy::from_master(master), generate_options(config));
      ms.push_back(sw.elapsed_ms());
    }
    in.silentflow_seconds_per_cot = sf::median(ms) / 1e3 / static_cast<double>(config.params.n);
  }
  json j = sf::cost_report_json(in);
  j["compute_source"] = in.compute_source;
  j["selected_profile"] = config.profile;
  for (auto& row : j["rows"]) {
    row["latency_selected_s"] = row["latency_s"][config.profile];
  }
  if (!cf.json_path.empty()) write_json(cf.json_path, j);
  std::cout << j.dump(2) << '\n';
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Local correlated-OT generation with simulated trusted execution"};
  app.set_config("--config", "", "TOML/INI file with flag values", false);
  app.require_subcommand(1);

  ParamFlags gen_flags, bench_flags, cost_flags;
  auto* gen = app.add_subcommand("gen", "Generate a sender/receiver COT batch");
  add_param_flags(gen, gen_flags);

  std::string sender_path, receiver_path, report_path;
  auto* ver = app.add_subcommand("verify", "Check M = K ^ yΔ for a pair of batch files");
  ver->add_option("--sender", sender_path, "Sender batch file")->required();
  ver->add_option("--receiver", receiver_path, "Receiver batch file")->required();
  ver->add_option("--report", report_path, "Also write the JSON report here");

  BenchFlags bf;
  auto* bench = app.add_subcommand("bench", "Time generation, fused and serial");
  add_param_flags(bench, bench_flags);
  bench->add_option("--reps", bf.reps, "Repetitions per point")->capture_default_str();
  bench->add_option("--cots", bf.cots, "Also generate this many COTs in batches (e.g. 10000000)");
  bench->add_option("--json", bf.json_path, "Write the report here");

  DseFlags df;
  int dse_workers = 0;
  auto* dse = app.add_subcommand("dse", "Sweep subtree depth and VM batch size");
  dse->add_option("--s-blocks", df.s_blocks, "Comma-separated subtree depths")->capture_default_str();
  dse->add_option("--batches", df.batches, "Comma-separated VM batch sizes")->capture_default_str();
  dse->add_option("--reps", df.reps, "Timed repetitions per configuration")->capture_default_str();
  dse->add_option("--height", df.height, "Tree height")->capture_default_str();
  dse->add_option("--trees", df.trees, "Number of trees")->capture_default_str();
  dse->add_option("--workers", dse_workers, "Worker threads (0 = all)")->check(CLI::NonNegativeNumber);
  dse->add_option("--csv", df.csv_path, "CSV output file (stdout when absent)");
  dse->add_option("--json", df.json_path, "Summary with trend and optimum flags");

  CostFlags cf;
  auto* cost = app.add_subcommand("cost", "Latency model under LAN/WAN/mobile profiles");
  add_param_flags(cost, cost_flags);
  cost->add_option("--compute-per-cot", cf.compute_per_cot, "Seconds per COT; measured when absent");
  cost->add_option("--cots", cf.n_cots, "Workload size")->capture_default_str();
  cost->add_option("--reps", cf.reps, "Timed runs when measuring")->capture_default_str();
  cost->add_option("--json", cf.json_path, "Write the report here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*gen) return cmd_gen(gen_flags);
    if (*ver) return cmd_verify(sender_path, receiver_path, report_path);
    if (*bench) return cmd_bench(bench_flags, bf);
    if (*dse) return cmd_dse(df, dse_workers);
    if (*cost) return cmd_cost(cost_flags, cf);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const sf::ParseError& e) {
    std::cerr << "parse error: " << e.what() << '\n';
    return kExitIo;
  } catch (const sf::IoError& e) {
    std::cerr << "i/o error: " << e.what() << '\n';
    return kExitIo;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitUsage;
}
