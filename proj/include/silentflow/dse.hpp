#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "silentflow/parallel.hpp"
#include "silentflow/prims.hpp"

namespace silentflow {

// Sweep over subtree depth and VM batch size at one problem size.
// Defaults: n = 2^14 as t = 4 trees of height 12, so every s in
// {3, 4, 6, 12} tiles the tree exactly.
struct DseGrid {
  std::vector<std::uint32_t> s_blocks = {3, 4, 6, 12};
  std::vector<std::size_t> batch_sizes = {16, 32, 64, 128, 256};
  std::uint64_t k = 1024;
  std::uint32_t h = 12;
  std::uint64_t t = 4;
  std::uint32_t d = 10;
  XorVariant variant = XorVariant::kPipelined;

  std::uint64_t n() const { return t << h; }
  // Throws std::invalid_argument on an empty axis or out-of-range values.
  void validate() const;
};

struct DsePoint {
  std::uint32_t s_block = 0;
  std::size_t batch_size = 0;
  double ggm_ms = 0;
  double vm_ms = 0;
  double xor_ms = 0;

  double gap_ms() const { return ggm_ms > vm_ms ? ggm_ms - vm_ms : vm_ms - ggm_ms; }
  double fused_ms() const { return (ggm_ms > vm_ms ? ggm_ms : vm_ms) + xor_ms; }
  double serial_ms() const { return ggm_ms + vm_ms + xor_ms; }
};

struct DseResult {
  std::vector<DsePoint> points;  // s_block-major, in grid order
  std::size_t min_fused = 0;     // index into points
  std::size_t min_gap = 0;
  // Median stage times per axis value, in grid order.
  std::vector<double> ggm_by_s;
  std::vector<double> vm_by_batch;
  // Interquartile range of the same samples.
  std::vector<double> ggm_iqr_by_s;
  std::vector<double> vm_iqr_by_batch;
  // decreasing_trend over each axis.
  bool ggm_trend_in_s = false;
  bool vm_trend_in_batch = false;
};

// Times each GGM configuration once per s_block and each VM configuration
// once per batch size, then crosses them. Repetitions run round-robin over
// the grid after one warm-up round; each axis value keeps the median. The worker count is pinned by `exec`.
DseResult dse_sweep(const DseGrid& grid, std::size_t repetitions, const ExecPolicy& exec = {});

// Header: s_block,batch_size,L_GGM_ms,L_VM_ms,L_XOR_ms,gap_ms,fused_ms
void write_dse_csv(std::ostream& out, const DseResult& result);

inline constexpr const char* kDseCsvHeader = "s_block,batch_size,L_GGM_ms,L_VM_ms,L_XOR_ms,gap_ms,fused_ms";

// Relative timing resolution for trend checks. Repeated sweeps on a quiet
// machine scatter by 2 to 3% per grid point.
inline constexpr double kTrendTolerance = 0.03;

// True when each value is no larger than its predecessor.
bool nonincreasing(const std::vector<double>& values);

// Non-increasing up to rel_tol per step, and the last value is at least
// rel_tol below the first. A flat curve is not a trend.
bool decreasing_trend(const std::vector<double>& values, double rel_tol = kTrendTolerance);

double median(std::vector<double> values);

// Linear-interpolated quantile, q in [0, 1].
double quantile(std::vector<double> values, double q);
double iqr(const std::vector<double>& values);

}  // namespace silentflow
