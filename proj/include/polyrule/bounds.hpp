// Copyright 2026 The Polyrule Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <atomic>
#include <cstdint>
#include <mutex>
#include <optional>
#include <thread>
#include <vector>

#include "polyrule/cache.hpp"
#include "polyrule/enumerate.hpp"
#include "polyrule/grow.hpp"

namespace polyrule {

// Disjoint contiguous index ranges covering a path's cell sequence. Indices
// refer to the endpoint-to-endpoint order whose letter word is the smaller
// one (the orientation encode_path picks).
struct PartitionSpec {
  std::vector<std::pair<int, int>> ranges;  // [begin, end)

  void validate(int path_cells) const {
    if (ranges.empty()) raise(Errc::InvalidSpec, "empty partition");
    int expect = 0;
    for (const auto& [b, e] : ranges) {
      if (b != expect || e <= b)
        raise(Errc::InvalidSpec, "partition ranges must be contiguous and cover the path");
      expect = e;
    }
    if (expect != path_cells)
      raise(Errc::InvalidSpec, "partition does not cover the path");
  }

  static PartitionSpec whole(int path_cells) {
    return PartitionSpec{{{0, path_cells}}};
  }
};

struct FBoundOptions {
  int steps = 5;
  std::uint64_t budget = 0;
};

struct FBound {
  int added = 0;
  std::uint64_t nodes = 0;
  bool exhausted = true;
};

namespace detail {

// Staged growth seeded at one subset of a path: step-1 cells must touch the
// subset, step-j cells a step-(j-1) cell; every single-cell addition must
// keep the polyomino admissible and its diameter unchanged. States are the
// added cells with their step labels plus the current step, memoized so that
// addition orders within a step collapse.
class StagedGrowth {
 public:
  StagedGrowth(const CellSet& path, std::span<const Cell> subset,
               const FBoundOptions& opt)
      : opt_(opt), idx_(frame_centre(path)),
        region_(AdmissibilityIndex::kSize * AdmissibilityIndex::kSize, 0),
        level_(region_.size(), 0), cand_id_(region_.size(), 0) {
    for (Cell c : path.cells()) idx_.insert(c);
    for (Cell c : subset) level_[idx_.window_pos(c)] = 1;  // step-0 anchors
    d_ = static_cast<int>(path.size()) - 1;

    // Candidate region: cells reachable from the subset in <= steps moves
    // through empty cells. Everything deeper can never earn a step label.
    std::vector<std::pair<Cell, int>> fifo;
    for (Cell c : subset) fifo.push_back({c, 0});
    std::vector<std::uint8_t> seen(region_.size(), 0);
    for (std::size_t head = 0; head < fifo.size(); ++head) {
      const auto [u, depth] = fifo[head];
      if (depth == opt_.steps) continue;
      for (int d = 0; d < 4; ++d) {
        const Cell v = step(u, static_cast<Dir>(d));
        if (!idx_.in_window(v) || idx_.contains(v)) continue;
        const std::size_t pos = idx_.window_pos(v);
        if (seen[pos]) continue;
        seen[pos] = 1;
        region_[pos] = 1;
        fifo.push_back({v, depth + 1});
      }
    }
    for (std::size_t pos = 0; pos < region_.size(); ++pos) {
      if (region_[pos]) {
        cand_cells_.push_back(idx_.cell_at(pos));
        cand_id_[pos] = static_cast<std::uint16_t>(cand_cells_.size());
      }
    }
  }

  FBound run(Cell wit_a, Cell wit_b) {
    std::vector<std::uint32_t> added;
    std::vector<std::uint16_t> cands;
    collect_initial_candidates(cands);
    const int best = dfs(added, cands, 1, wit_a, wit_b);
    return FBound{best, nodes_, exhausted_};
  }

 private:
  static Cell frame_centre(const CellSet& s) {
    const BBox b = s.bbox();
    return make_cell((b.min_x + b.max_x) / 2, (b.min_y + b.max_y) / 2);
  }

  void collect_initial_candidates(std::vector<std::uint16_t>& cands) const {
    for (std::size_t pos = 0; pos < region_.size(); ++pos) {
      if (cand_id_[pos]) cands.push_back(cand_id_[pos] - 1);
    }
  }

  // A cell is addable in the current step when a neighbour carries the
  // previous step's label.
  bool eligible(Cell c, int phase) const {
    for (int d = 0; d < 4; ++d) {
      const Cell v = step(c, static_cast<Dir>(d));
      if (idx_.in_window(v) && level_[idx_.window_pos(v)] == phase) return true;
    }
    return false;
  }

  static std::string state_key(const std::vector<std::uint32_t>& added, int phase) {
    std::string key(reinterpret_cast<const char*>(added.data()),
                    added.size() * sizeof(std::uint32_t));
    key.push_back(static_cast<char>(phase));
    return key;
  }

  int dfs(std::vector<std::uint32_t>& added, const std::vector<std::uint16_t>& cands,
          int phase, Cell wa, Cell wb) {
    ++nodes_;
    if (opt_.budget && nodes_ >= opt_.budget) {
      stopping_ = true;
      exhausted_ = false;
    }
    int best_here = static_cast<int>(added.size());
    if (stopping_) return best_here;

    for (const std::uint16_t cid : cands) {
      if (stopping_) break;
      const Cell cell = cand_cells_[cid];
      if (idx_.contains(cell) || !eligible(cell, phase)) continue;
      if (!idx_.can_insert(cell)) continue;
      idx_.insert(cell);
      Cell nwa = wa, nwb = wb;
      if (!diameter_preserved_after_insert(idx_, bfs_, d_, cell, nwa, nwb)) {
        idx_.erase(cell);
        continue;
      }
      const std::size_t pos = idx_.window_pos(cell);
      level_[pos] = static_cast<std::uint8_t>(phase + 1);
      const std::uint32_t tag =
          (static_cast<std::uint32_t>(cid) << 4) | static_cast<std::uint32_t>(phase);
      const auto at = std::lower_bound(added.begin(), added.end(), tag);
      added.insert(at, tag);

      const std::string key = state_key(added, phase);
      const auto hit = memo_.find(key);
      int val;
      if (hit != memo_.end()) {
        val = hit->second;
      } else {
        val = dfs(added, cands, phase, nwa, nwb);
        memo_.emplace(key, val);
      }
      added.erase(std::lower_bound(added.begin(), added.end(), tag));
      level_[pos] = 0;
      idx_.erase(cell);
      best_here = std::max(best_here, val);
    }

    // Advance to the next step; only useful while this step added anything
    // for the next step to attach to.
    if (!stopping_ && phase < opt_.steps) {
      bool frontier = false;
      for (const std::uint32_t tag : added) {
        if (static_cast<int>(tag & 15) == phase) {
          frontier = true;
          break;
        }
      }
      if (frontier) {
        const std::string key = state_key(added, phase + 1);
        const auto hit = memo_.find(key);
        int val;
        if (hit != memo_.end()) {
          val = hit->second;
        } else {
          val = dfs(added, cands, phase + 1, wa, wb);
          memo_.emplace(key, val);
        }
        best_here = std::max(best_here, val);
      }
    }
    return best_here;
  }

  FBoundOptions opt_;
  AdmissibilityIndex idx_;
  WindowBfs bfs_;
  std::vector<std::uint8_t> region_;
  std::vector<std::uint8_t> level_;  // 0 free, 1 anchor subset, k+1 = step k
  std::vector<std::uint16_t> cand_id_;
  std::vector<Cell> cand_cells_;
  std::unordered_map<std::string, int> memo_;
  int d_ = 0;
  std::uint64_t nodes_ = 0;
  bool stopping_ = false;
  bool exhausted_ = true;
};

}  // namespace detail

// f(i): the exact maximum number of cells addable to the admissible path by
// staged growth seeded at its i-th partition subset (1-based), preserving
// admissibility and the path's graph diameter at every single-cell step.
inline FBound f_bound(const CellSet& path, const PartitionSpec& part,
                      int subset_index, const FBoundOptions& opt = {}) {
  if (!is_admissible(path)) raise(Errc::InvalidSpec, "path is not admissible");
  const std::vector<Cell> order = [&] {
    auto o = path_order(path);
    if (detail::reversed_word(letters_of(o)) < letters_of(o))
      std::reverse(o.begin(), o.end());
    return o;
  }();
  part.validate(static_cast<int>(order.size()));
  if (subset_index < 1 || subset_index > static_cast<int>(part.ranges.size()))
    raise(Errc::InvalidSpec, "subset index out of range");
  if (opt.steps < 1 || opt.steps > 15)
    raise(Errc::InvalidSpec, "steps must be in [1, 15]");

  const auto [b, e] = part.ranges[subset_index - 1];
  const std::span<const Cell> subset(order.data() + b, static_cast<std::size_t>(e - b));
  detail::StagedGrowth search(path, subset, opt);
  return search.run(order.front(), order.back());
}

// Aggregated f-values for a whole partition; the composed bound is their sum.
struct BoundReport {
  std::vector<int> per_subset;
  int composed = 0;
  int seed_size = 0;
  int size_bound = 0;
  std::uint64_t nodes = 0;
  bool exact = true;
};

inline BoundReport partition_bound(const CellSet& path, const PartitionSpec& part,
                                   const FBoundOptions& opt = {}) {
  BoundReport report;
  report.seed_size = static_cast<int>(path.size());
  for (int i = 1; i <= static_cast<int>(part.ranges.size()); ++i) {
    const FBound f = f_bound(path, part, i, opt);
    report.per_subset.push_back(f.added);
    report.composed += f.added;
    report.nodes += f.nodes;
    report.exact = report.exact && f.exhausted;
  }
  report.size_bound = report.seed_size + report.composed;
  return report;
}

// ---------------------------------------------------------------------------
// Transferable segment bounds

struct SegmentBounds {
  std::optional<int> end_bound;
  std::optional<int> interior_bound;
  std::uint64_t nodes = 0;
  bool exhausted = true;
};

// Maximizes f over every admissible path made of a `segment_len`-cell
// segment plus `context_len` continuation cells on each applicable side (one
// side for an end segment, both for an interior one). Any contiguous window
// of a longer admissible path is itself an admissible path, so these maxima
// transfer to end/interior segments of arbitrary longer paths.
inline SegmentBounds segment_bound_table(int segment_len = 16, int context_len = 16,
                                         const FBoundOptions& opt = {},
                                         std::uint64_t enum_budget = 0, int jobs = 1) {
  if (segment_len < 1) raise(Errc::InvalidSpec, "segment length must be positive");
  SegmentBounds out;

  const auto family = [&](int total_cells) {
    EnumSpec spec;
    spec.kind = EnumKind::Path;
    spec.min_cells = total_cells;
    spec.max_cells = total_cells;
    spec.budget = enum_budget;
    spec.jobs = jobs;
    return enumerate_paths(spec);
  };

  {  // End segments: the subset sits at one end of the window.
    const int total = segment_len + context_len;
    const EnumResult fam = family(total);
    out.exhausted = out.exhausted && fam.exhausted;
    out.nodes += fam.nodes;
    std::optional<int> best;
    for (const auto& w : fam.words) {
      const CellSet path = CellSet::from_cells(decode_word(w));
      PartitionSpec part;
      part.ranges = {{0, segment_len}};
      if (context_len > 0) part.ranges.push_back({segment_len, total});
      // A canonical word stands for both traversal directions; measure the
      // segment at each end.
      for (int flip = 0; flip < (context_len > 0 ? 2 : 1); ++flip) {
        PartitionSpec p = part;
        if (flip) {
          p.ranges = {{0, context_len}, {context_len, total}};
        }
        const FBound f = f_bound(path, p, flip ? 2 : 1, opt);
        out.nodes += f.nodes;
        out.exhausted = out.exhausted && f.exhausted;
        best = std::max(best.value_or(0), f.added);
      }
    }
    out.end_bound = best;
  }

  {  // Interior segments: context on both sides.
    const int total = segment_len + 2 * context_len;
    const EnumResult fam = family(total);
    out.exhausted = out.exhausted && fam.exhausted;
    out.nodes += fam.nodes;
    std::optional<int> best;
    for (const auto& w : fam.words) {
      const CellSet path = CellSet::from_cells(decode_word(w));
      PartitionSpec part;
      part.ranges = {{0, context_len},
                     {context_len, context_len + segment_len},
                     {context_len + segment_len, total}};
      if (context_len == 0) part.ranges = {{0, segment_len}};
      const FBound f = f_bound(path, part, context_len == 0 ? 1 : 2, opt);
      out.nodes += f.nodes;
      out.exhausted = out.exhausted && f.exhausted;
      best = std::max(best.value_or(0), f.added);
    }
    out.interior_bound = best;
  }

  return out;
}

// Covers a (d+1)-cell path with two end segments and as many interior
// segments as needed; the segment bounds transfer to the shorter trailing
// segment because a sub-window's growth states are a subset of the full
// window's.
inline int diameter_upper_bound(int d, std::pair<int, int> bounds,
                                int segment_len = 16) {
  const auto [end_bound, interior_bound] = bounds;
  const int cells = d + 1;
  if (segment_len < 1 || cells < 2 * segment_len)
    raise(Errc::DomainTooSmall, "need room for two end segments");
  const int interior_cells = cells - 2 * segment_len;
  const int interior_count = (interior_cells + segment_len - 1) / segment_len;
  return cells + 2 * end_bound + interior_count * interior_bound;
}

// ---------------------------------------------------------------------------
// The per-diameter census: number of admissible paths and the exact maximal
// size of an admissible polyomino they grow into without changing diameter.

struct DiameterRow {
  int diameter = 0;
  std::int64_t path_count = 0;
  int max_size = 0;
  bool exact = true;
};

struct ResultsTableOptions {
  std::uint64_t enum_budget = 0;
  std::uint64_t grow_budget = 0;  // per seed
  int jobs = 1;
  int steps = 5;
  const ResultCache* cache = nullptr;
  std::uint64_t* nodes_out = nullptr;          // accumulated search nodes
  std::uint64_t* cache_hits_out = nullptr;
};

inline std::vector<DiameterRow> results_table(int d_lo, int d_hi,
                                              const ResultsTableOptions& opt = {}) {
  if (d_lo < 1 || d_hi < d_lo) {
    if (d_hi < d_lo) return {};
    raise(Errc::InvalidSpec, "diameter range starts at 1");
  }

  EnumSpec spec;
  spec.kind = EnumKind::Path;
  spec.min_cells = d_lo + 1;
  spec.max_cells = d_hi + 1;
  spec.budget = opt.enum_budget;
  spec.jobs = opt.jobs;
  const EnumResult paths = enumerate_paths(spec);

  std::map<int, DiameterRow> rows;
  for (int d = d_lo; d <= d_hi; ++d)
    rows[d] = DiameterRow{d, 0, 0, paths.exhausted};
  for (const auto& [size, count] : paths.counts_by_size)
    rows[size - 1].path_count = count;

  std::mutex mu;
  std::atomic<std::size_t> next{0};
  std::atomic<std::uint64_t> nodes{0}, hits{0};
  auto work = [&]() {
    while (true) {
      const std::size_t i = next.fetch_add(1);
      if (i >= paths.words.size()) return;
      const DirectionWord& w = paths.words[i];
      const CellSet seed = CellSet::from_cells(decode_word(w));
      const CanonicalKey key = canonical_key(seed);
      const int d = static_cast<int>(seed.size()) - 1;

      int total = 0;
      bool exhausted = true;
      bool cached = false;
      if (opt.cache) {
        if (const auto doc = opt.cache->get("grow-diameter", key)) {
          total = (*doc)["total"].get<int>();
          exhausted = (*doc)["exhausted"].get<bool>();
          cached = true;
          ++hits;
        }
      }
      if (!cached) {
        GrowthConstraint c;
        c.mode = GrowthMode::DiameterPreserving;
        c.steps = opt.steps;
        c.budget = opt.grow_budget;
        c.collect_witnesses = false;
        const ExtensionResult r = grow_max_diameter_preserving(seed, c);
        total = r.total;
        exhausted = r.exhausted;
        nodes += r.nodes;
        if (opt.cache && exhausted) {
          nlohmann::json doc;
          doc["total"] = r.total;
          doc["added"] = r.added;
          doc["nodes"] = r.nodes;
          doc["exhausted"] = r.exhausted;
          opt.cache->put("grow-diameter", key, doc);
        }
      }
      std::lock_guard<std::mutex> lock(mu);
      DiameterRow& row = rows[d];
      row.max_size = std::max(row.max_size, total);
      row.exact = row.exact && exhausted;
    }
  };
  if (opt.jobs <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < opt.jobs; ++t) pool.emplace_back(work);
    for (auto& th : pool) th.join();
  }

  if (opt.nodes_out) *opt.nodes_out = paths.nodes + nodes.load();
  if (opt.cache_hits_out) *opt.cache_hits_out = hits.load();

  std::vector<DiameterRow> out;
  out.reserve(rows.size());
  for (auto& [d, row] : rows) out.push_back(row);
  return out;
}

}  // namespace polyrule
