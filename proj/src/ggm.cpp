#include "silentflow/ggm.hpp"

#include <omp.h>

#include <algorithm>
#include <array>
#include <stdexcept>
#include <string>

#include "silentflow/prims.hpp"

namespace silentflow {
namespace {

void check_height(std::uint32_t h) {
  if (h == 0 || h > kMaxTreeHeight) {
    throw std::invalid_argument("GGM height must be in [1, " + std::to_string(kMaxTreeHeight) + "]");
  }
}

void check_block_depth(std::uint32_t h, std::uint32_t s_block) {
  if (s_block == 0 || s_block > h) {
    throw std::invalid_argument("s_block must satisfy 1 <= s_block <= h");
  }
}

// Children of buf[0, width) overwrite buf[0, 2·width). Chunks run from the
// back so no parent is clobbered before it is read.
void expand_inplace(std::span<Block128> buf, std::size_t width) {
  constexpr std::size_t kChunk = 8;
  std::array<Block128, kChunk> parents{};
  std::array<Block128, 2 * kChunk> kids{};
  std::size_t end = width;
  while (end > 0) {
    const std::size_t m = std::min(kChunk, end);
    const std::size_t a = end - m;
    std::copy_n(buf.begin() + static_cast<std::ptrdiff_t>(a), m, parents.begin());
    prg_expand_level(std::span(parents.data(), m), std::span(kids.data(), 2 * m));
    std::copy_n(kids.begin(), 2 * m, buf.begin() + static_cast<std::ptrdiff_t>(2 * a));
    end = a;
  }
}

// One subtree block: root read from global, intermediates in scratch
// (>= 2^{depth-1} blocks), the 2^depth block leaves written to `out`.
void expand_block(const Block128& root, std::uint32_t depth, std::span<Block128> scratch,
                  std::span<Block128> out, AccessCounters& c) {
  c.global_reads += 1;
  if (depth == 1) {
    prg_expand_level(std::span(&root, 1), out.first(2));
    c.global_writes += 2;
    return;
  }
  prg_expand_level(std::span(&root, 1), scratch.first(2));
  c.local_writes += 2;
  std::size_t width = 2;
  for (std::uint32_t level = 2; level < depth; ++level) {
    expand_inplace(scratch, width);
    c.local_reads += width;
    c.local_writes += 2 * width;
    width *= 2;
  }
  prg_expand_level(scratch.first(width), out.first(2 * width));
  c.local_reads += width;
  c.global_writes += 2 * width;
}

std::size_t scratch_blocks(std::uint32_t depth) {
  return depth <= 1 ? 0 : std::size_t{1} << (depth - 1);
}

// Serial blocked expansion of a single subtree into `out` (2^h blocks).
void box_subtree_serial(const Block128& root, std::uint32_t h, std::uint32_t s_block,
                        std::span<Block128> out, std::vector<Block128>& scratch,
                        AccessCounters& c) {
  std::vector<Block128> cur{root};
  std::vector<Block128> next;
  std::uint32_t offset = 0;
  while (offset < h) {
    const std::uint32_t depth = std::min(s_block, h - offset);
    const std::size_t blocks = std::size_t{1} << offset;
    const bool last = offset + depth == h;
    if (!last) next.assign(blocks << depth, Block128{});
    std::span<Block128> dst = last ? out : std::span<Block128>(next);
    scratch.resize(std::max(scratch.size(), scratch_blocks(depth)));
    for (std::size_t b = 0; b < blocks; ++b) {
      expand_block(cur[b], depth, scratch, dst.subspan(b << depth, std::size_t{1} << depth), c);
    }
    if (!last) cur.swap(next);
    offset += depth;
  }
}

void validate_release(const PuncturedRelease& rel, std::uint32_t h) {
  if (rel.h != h || rel.siblings.size() != h) {
    throw std::invalid_argument("malformed punctured release: expected " + std::to_string(h) +
                                " sibling levels");
  }
  std::uint64_t on_path_parent = 0;
  for (std::uint32_t level = 1; level <= h; ++level) {
    const OffPathSeed& sib = rel.siblings[level - 1];
    if (sib.level != level || sib.node_index >= (std::uint64_t{1} << level) ||
        (sib.node_index >> 1) != on_path_parent) {
      throw std::invalid_argument("malformed punctured release: inconsistent sibling at level " +
                                  std::to_string(level));
    }
    on_path_parent = sib.node_index ^ 1U;
  }
}

}  // namespace

void GgmConfig::validate() const {
  check_height(h);
  check_block_depth(h, s_block);
  if (num_trees == 0) throw std::invalid_argument("GgmConfig: num_trees must be at least 1");
}

double access_cost(const AccessCounters& counters, double c_global, double c_local) {
  return static_cast<double>(counters.global()) * c_global +
         static_cast<double>(counters.local()) * c_local;
}

RoundedAccessForm rounded_naive_form(std::uint32_t h) {
  check_height(h);
  return {6 * (std::uint64_t{1} << (h - 1)), 0};
}

RoundedAccessForm rounded_box_form(std::uint32_t h) {
  check_height(h);
  const std::uint64_t half = std::uint64_t{1} << (h - 1);
  return {2 * half, 4 * half};
}

AccessCounters expand_trees_naive(std::span<const Block128> roots, std::uint32_t h,
                                  std::span<Block128> leaves, const ExecPolicy& exec) {
  check_height(h);
  if (leaves.size() != (roots.size() << h)) {
    throw std::invalid_argument("expand_trees_naive: leaf buffer has the wrong size");
  }
  AccessCounters total;
  std::vector<Block128> cur(roots.begin(), roots.end());
  std::vector<Block128> next;
  constexpr std::size_t kChunk = 64;
  for (std::uint32_t level = 0; level < h; ++level) {
    const std::size_t width = cur.size();
    const bool last = level + 1 == h;
    if (!last) next.assign(2 * width, Block128{});
    std::span<Block128> dst = last ? leaves : std::span<Block128>(next);
    const auto chunks = static_cast<std::int64_t>((width + kChunk - 1) / kChunk);
#pragma omp parallel for schedule(static) num_threads(exec.threads())
    for (std::int64_t ci = 0; ci < chunks; ++ci) {
      const std::size_t a = static_cast<std::size_t>(ci) * kChunk;
      const std::size_t m = std::min(kChunk, width - a);
      prg_expand_level(std::span<const Block128>(cur).subspan(a, m), dst.subspan(2 * a, 2 * m));
    }
    total.global_reads += width;
    total.global_writes += 2 * width;
    if (!last) cur.swap(next);
  }
  return total;
}

AccessCounters expand_trees_box(std::span<const Block128> roots, std::uint32_t h,
                                std::uint32_t s_block, std::span<Block128> leaves,
                                const ExecPolicy& exec, std::size_t* scratch_high_water) {
  check_height(h);
  check_block_depth(h, s_block);
  if (leaves.size() != (roots.size() << h)) {
    throw std::invalid_argument("expand_trees_box: leaf buffer has the wrong size");
  }
  AccessCounters total;
  std::size_t high_water = 0;
  std::vector<Block128> cur(roots.begin(), roots.end());
  std::vector<Block128> next;
  std::uint32_t offset = 0;
  while (offset < h) {
    const std::uint32_t depth = std::min(s_block, h - offset);
    const std::size_t blocks = cur.size();
    const bool last = offset + depth == h;
    if (!last) next.assign(blocks << depth, Block128{});
    std::span<Block128> dst = last ? leaves : std::span<Block128>(next);
    const std::size_t scratch_size = scratch_blocks(depth);
    high_water = std::max(high_water, scratch_size);

#pragma omp parallel num_threads(exec.threads())
    {
      std::vector<Block128> scratch(scratch_size);
      AccessCounters mine;
#pragma omp for schedule(static)
      for (std::int64_t b = 0; b < static_cast<std::int64_t>(blocks); ++b) {
        const auto ub = static_cast<std::size_t>(b);
        expand_block(cur[ub], depth, scratch, dst.subspan(ub << depth, std::size_t{1} << depth),
                     mine);
      }
#pragma omp critical(silentflow_box_counters)
      total += mine;
    }
    if (!last) cur.swap(next);
    offset += depth;
  }
  if (scratch_high_water != nullptr) *scratch_high_water = high_water;
  return total;
}

ExpansionResult expand_full_naive(const Block128& root, std::uint32_t h) {
  check_height(h);
  ExpansionResult r;
  r.leaves.resize(std::size_t{1} << h);
  r.counters = expand_trees_naive(std::span(&root, 1), h, r.leaves, ExecPolicy::serial());
  return r;
}

ExpansionResult expand_full_box(const Block128& root, std::uint32_t h, std::uint32_t s_block) {
  check_height(h);
  check_block_depth(h, s_block);
  ExpansionResult r;
  r.leaves.resize(std::size_t{1} << h);
  r.counters = expand_trees_box(std::span(&root, 1), h, s_block, r.leaves, ExecPolicy::serial(),
                                &r.scratch_high_water);
  return r;
}

std::uint64_t punctured_index(const PuncturedRelease& release, std::uint32_t h) {
  validate_release(release, h);
  return release.siblings.back().node_index ^ 1U;
}

AccessCounters expand_punctured_trees(std::span<const PuncturedRelease> releases,
                                      std::uint32_t h, std::uint32_t s_block,
                                      std::span<Block128> leaves,
                                      std::span<std::uint64_t> holes, const ExecPolicy& exec) {
  check_height(h);
  if (s_block == 0) throw std::invalid_argument("s_block must be at least 1");
  const std::size_t t = releases.size();
  if (leaves.size() != (t << h) || holes.size() != t) {
    throw std::invalid_argument("expand_punctured_trees: output buffers have the wrong size");
  }
  for (std::size_t i = 0; i < t; ++i) holes[i] = punctured_index(releases[i], h);

  // Level-major item order puts the largest subtrees first.
  const auto items = static_cast<std::int64_t>(t * h);
  AccessCounters total;
#pragma omp parallel num_threads(exec.threads())
  {
    std::vector<Block128> scratch;
    AccessCounters mine;
#pragma omp for schedule(dynamic, 1)
    for (std::int64_t item = 0; item < items; ++item) {
      const std::size_t tree = static_cast<std::size_t>(item) % t;
      const auto level = static_cast<std::uint32_t>(static_cast<std::size_t>(item) / t) + 1;
      const PuncturedRelease& rel = releases[tree];
      const OffPathSeed& sib = rel.siblings[level - 1];
      const std::uint32_t height = h - level;
      std::span<Block128> tree_leaves = leaves.subspan(tree << h, std::size_t{1} << h);
      if (height == 0) {
        tree_leaves[sib.node_index] = sib.seed;
        // Masked leaf goes out with the same write-back as its leaf sibling.
        tree_leaves[holes[tree]] = rel.masked_leaf;
        mine.global_reads += 2;
        mine.global_writes += 2;
      } else {
        box_subtree_serial(sib.seed, height, std::min(s_block, height),
                           tree_leaves.subspan(sib.node_index << height, std::size_t{1} << height),
                           scratch, mine);
      }
    }
#pragma omp critical(silentflow_punctured_counters)
    total += mine;
  }
  return total;
}

PuncturedExpansion expand_punctured(const PuncturedRelease& release, std::uint32_t h,
                                    std::uint32_t s_block) {
  PuncturedExpansion out;
  out.leaves.resize(std::size_t{1} << h);
  out.counters = expand_punctured_trees(std::span(&release, 1), h, s_block, out.leaves,
                                        std::span(&out.hole, 1), ExecPolicy::serial());
  return out;
}

}  // namespace silentflow
