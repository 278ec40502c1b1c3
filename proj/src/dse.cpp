#include "silentflow/dse.hpp"

#include <algorithm>
#include <iomanip>
#include <stdexcept>

#include "silentflow/ggm.hpp"
#include "silentflow/lpn.hpp"
#include "silentflow/trusted_domain.hpp"

namespace silentflow {
namespace {

template <class F>
double elapsed_ms(F&& body) {
  const Stopwatch sw;
  body();
  return sw.elapsed_ms();
}

}  // namespace

void DseGrid::validate() const {
  if (s_blocks.empty() || batch_sizes.empty()) throw std::invalid_argument("DSE grid axes must be non-empty");
  if (h == 0 || h > kMaxTreeHeight) throw std::invalid_argument("DSE grid: h out of range");
  if (t == 0) throw std::invalid_argument("DSE grid: t must be at least 1");
  if (d == 0 || d > k) throw std::invalid_argument("DSE grid: d must satisfy 1 <= d <= k");
  for (auto s : s_blocks) {
    if (s == 0 || s > h) throw std::invalid_argument("DSE grid: s_block must satisfy 1 <= s <= h");
  }
  for (auto b : batch_sizes) {
    if (b == 0) throw std::invalid_argument("DSE grid: batch size must be at least 1");
  }
}

double median(std::vector<double> values) {
  if (values.empty()) throw std::invalid_argument("median of an empty sample");
  const std::size_t mid = values.size() / 2;
  std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid), values.end());
  const double upper = values[mid];
  if (values.size() % 2 == 1) return upper;
  const double lower = *std::max_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid));
  return (lower + upper) / 2;
}

double quantile(std::vector<double> values, double q) {
  if (values.empty()) throw std::invalid_argument("quantile of an empty sample");
  if (!(q >= 0 && q <= 1)) throw std::invalid_argument("quantile: q must be in [0, 1]");
  std::sort(values.begin(), values.end());
  const double pos = q * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(pos);
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  return values[lo] + (pos - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

double iqr(const std::vector<double>& values) { return quantile(values, 0.75) - quantile(values, 0.25); }

bool nonincreasing(const std::vector<double>& values) {
  for (std::size_t i = 1; i < values.size(); ++i) {
    if (values[i] > values[i - 1]) return false;
  }
  return true;
}

bool decreasing_trend(const std::vector<double>& values, double rel_tol) {
  if (values.size() < 2) return false;
  for (std::size_t i = 1; i < values.size(); ++i) {
    if (values[i] > values[i - 1] * (1.0 + rel_tol)) return false;
  }
  return values.back() <= values.front() * (1.0 - rel_tol);
}

DseResult dse_sweep(const DseGrid& grid, std::size_t repetitions, const ExecPolicy& exec) {
  grid.validate();
  if (repetitions == 0) throw std::invalid_argument("dse_sweep: repetitions must be at least 1");

  // Fixed inputs; their values do not affect timing.
  const SharedSeed seed = seed_agreement(Block128{0x64736531, 0}, Block128{0, 0x64736532});
  const TeeStream stream(seed.value);
  std::vector<Block128> roots(grid.t);
  for (std::uint64_t i = 0; i < grid.t; ++i) roots[i] = stream.block(StreamDomain::kTreeRoot, i, 0);
  std::vector<Block128> base(grid.k);
  stream.fill(StreamDomain::kSenderBase, 0, base);
  const SparseMatrixSpec spec{grid.k, grid.n(), grid.d, stream.block(StreamDomain::kMatrixSeed, 0, 0)};

  std::vector<Block128> leaves(grid.n());
  std::vector<Block128> acc(grid.n());
  const std::size_t ns = grid.s_blocks.size(), nb = grid.batch_sizes.size();
  auto ggm = [&](std::size_t i) { expand_trees_box(roots, grid.h, grid.s_blocks[i], leaves, exec); };
  auto vm = [&](std::size_t i) { (void)vm_blocks(base, spec, grid.variant, grid.batch_sizes[i], exec); };
  auto xor_stage = [&] {
    for (std::size_t j = 0; j < acc.size(); ++j) acc[j] ^= leaves[j];
  };

  // Round-robin over the grid so slow drift in machine load hits every
  // point alike; one untimed warm-up round first.
  std::vector<std::vector<double>> ggm_samples(ns), vm_samples(nb);
  std::vector<double> xor_samples;
  for (std::size_t r = 0; r <= repetitions; ++r) {
    for (std::size_t i = 0; i < ns; ++i) {
      const double ms = elapsed_ms([&] { ggm(i); });
      if (r > 0) ggm_samples[i].push_back(ms);
    }
    for (std::size_t i = 0; i < nb; ++i) {
      const double ms = elapsed_ms([&] { vm(i); });
      if (r > 0) vm_samples[i].push_back(ms);
    }
    const double ms = elapsed_ms(xor_stage);
    if (r > 0) xor_samples.push_back(ms);
  }

  DseResult result;
  for (const auto& s : ggm_samples) {
    result.ggm_by_s.push_back(median(s));
    result.ggm_iqr_by_s.push_back(iqr(s));
  }
  for (const auto& s : vm_samples) {
    result.vm_by_batch.push_back(median(s));
    result.vm_iqr_by_batch.push_back(iqr(s));
  }
  const double xor_ms = median(std::move(xor_samples));

  for (std::size_t si = 0; si < grid.s_blocks.size(); ++si) {
    for (std::size_t bi = 0; bi < grid.batch_sizes.size(); ++bi) {
      result.points.push_back(
          {grid.s_blocks[si], grid.batch_sizes[bi], result.ggm_by_s[si], result.vm_by_batch[bi], xor_ms});
    }
  }
  for (std::size_t i = 1; i < result.points.size(); ++i) {
    if (result.points[i].fused_ms() < result.points[result.min_fused].fused_ms()) result.min_fused = i;
    if (result.points[i].gap_ms() < result.points[result.min_gap].gap_ms()) result.min_gap = i;
  }
  result.ggm_trend_in_s = decreasing_trend(result.ggm_by_s);
  result.vm_trend_in_batch = decreasing_trend(result.vm_by_batch);
  return result;
}

void write_dse_csv(std::ostream& out, const DseResult& result) {
  out << kDseCsvHeader << '\n';
  out << std::fixed << std::setprecision(6);
  for (const auto& p : result.points) {
    out << p.s_block << ',' << p.batch_size << ',' << p.ggm_ms << ',' << p.vm_ms << ',' << p.xor_ms
        << ',' << p.gap_ms() << ',' << p.fused_ms() << '\n';
  }
}

}  // namespace silentflow
