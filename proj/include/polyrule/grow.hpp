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

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "polyrule/admissibility.hpp"
#include "polyrule/geometry.hpp"
#include "polyrule/graph.hpp"

namespace polyrule {

enum class GrowthMode { AdmissibleOnly, DiameterPreserving };

struct GrowthConstraint {
  GrowthMode mode = GrowthMode::AdmissibleOnly;
  // DiameterPreserving mode: must equal the seed's own diameter (or be left
  // at -1 to take it from the seed).
  int target_diameter = -1;
  // DiameterPreserving mode: candidates stay within this Chebyshev distance
  // of the seed. Growth deeper than 5 is only possible through long loops,
  // which cap the total at 66 cells; the drivers re-verify that any larger
  // output is loop-free instead of assuming it.
  int steps = 5;
  std::uint64_t budget = 0;  // search-node budget, 0 = unlimited
  int witness_cap = 1000;
  bool collect_witnesses = true;
};

struct ExtensionResult {
  int added = 0;
  int total = 0;
  std::vector<CellSet> witnesses;  // canonical placements of maximum-size sets
  std::uint64_t nodes = 0;
  bool exhausted = true;
};

namespace detail {

// Reusable BFS scratch over the 256x256 occupancy window. Stamp-based, so
// consecutive runs cost O(cells reached) with no clearing.
class WindowBfs {
 public:
  static constexpr int kSize = AdmissibilityIndex::kSize;

  WindowBfs()
      : stamp_(kSize * kSize, 0), dist_(kSize * kSize, 0) {
    fifo_.reserve(1024);
  }

  // BFS from src over the occupied cells. Returns {eccentricity, reached}.
  std::pair<int, int> run(const AdmissibilityIndex& idx, Cell src) {
    return run_multi(idx, std::span<const Cell>(&src, 1));
  }

  std::pair<int, int> run_multi(const AdmissibilityIndex& idx,
                                std::span<const Cell> sources) {
    ++epoch_;
    fifo_.clear();
    for (Cell s : sources) {
      const std::uint32_t pos = static_cast<std::uint32_t>(idx.window_pos(s));
      if (stamp_[pos] != epoch_) {
        stamp_[pos] = epoch_;
        dist_[pos] = 0;
        fifo_.push_back(pos);
      }
    }
    int ecc = 0;
    far_pos_ = fifo_.empty() ? 0 : fifo_[0];
    static constexpr int kStep[4] = {1, kSize, -1, -kSize};
    for (std::size_t head = 0; head < fifo_.size(); ++head) {
      const std::uint32_t u = fifo_[head];
      const std::int16_t du = dist_[u];
      if (du > ecc) {
        ecc = du;
        far_pos_ = u;
      }
      for (int s : kStep) {
        const std::uint32_t v = u + s;
        if (stamp_[v] == epoch_) continue;
        const Cell c = idx.cell_at(v);
        if (!idx.contains(c)) continue;
        stamp_[v] = epoch_;
        dist_[v] = du + 1;
        fifo_.push_back(v);
      }
    }
    return {ecc, static_cast<int>(fifo_.size())};
  }

  // Distance from the last run's sources; -1 if unreached.
  int dist_of(const AdmissibilityIndex& idx, Cell c) const {
    const std::uint32_t pos = static_cast<std::uint32_t>(idx.window_pos(c));
    return stamp_[pos] == epoch_ ? dist_[pos] : -1;
  }

  Cell farthest(const AdmissibilityIndex& idx) const { return idx.cell_at(far_pos_); }

 private:
  std::vector<std::uint32_t> stamp_;
  std::vector<std::int16_t> dist_;
  std::vector<std::uint32_t> fifo_;
  std::uint32_t epoch_ = 0;
  std::uint32_t far_pos_ = 0;
};

// Decides whether the diameter of idx's cells is still exactly d after c was
// inserted, updating the witness pair (wa, wb) for the new state. One BFS
// from c settles the common case: old eccentricities cannot grow, and any
// connection shorter than the witness distance must route through the new
// cell, so dist(wa, wb) = min(d, dist(c, wa) + dist(c, wb)).
inline bool diameter_preserved_after_insert(const AdmissibilityIndex& idx,
                                            WindowBfs& bfs, int d, Cell c,
                                            Cell& wa, Cell& wb) {
  const auto [ecc, reached] = bfs.run(idx, c);
  if (reached != static_cast<int>(idx.size()))
    raise(Errc::Disconnected, "growth state disconnected");
  if (ecc > d) return false;
  if (ecc == d) {
    wa = c;
    wb = bfs.farthest(idx);
    return true;
  }
  if (bfs.dist_of(idx, wa) + bfs.dist_of(idx, wb) >= d) return true;
  // The old witness collapsed; look for any pair still at distance d (rare).
  for (Cell u : idx.cells()) {
    const auto [e2, r2] = bfs.run(idx, u);
    if (e2 == d) {
      wa = u;
      wb = bfs.farthest(idx);
      return true;
    }
  }
  return false;
}

// Witness bookkeeping shared by the growth searches.
struct WitnessSet {
  int cap = 1000;
  bool enabled = true;
  int best = -1;
  std::set<CanonicalKey> keys;

  void offer(int total, std::span<const Cell> cells) {
    if (total < best) return;
    if (total > best) {
      best = total;
      keys.clear();
    }
    if (!enabled || static_cast<int>(keys.size()) >= cap) return;
    keys.insert(canonical_key(cells));
  }

  std::vector<CellSet> placements() const {
    std::vector<CellSet> out;
    out.reserve(keys.size());
    for (const auto& k : keys) out.push_back(cells_from_key(k));
    return out;
  }
};

// Exhaustive search over the admissible connected supersets of a seed.
// Candidate cells enter a single discovery list once and each superset is
// reached through exactly one include/skip decision sequence, so distinct
// addition orders of the same set are never explored twice. An optional
// reachability bound prunes subtrees that cannot beat the incumbent.
class AdmissibleGrowth {
 public:
  AdmissibleGrowth(const CellSet& seed, const GrowthConstraint& opt)
      : opt_(opt),
        idx_(frame_centre(seed)),
        touched_(AdmissibilityIndex::kSize * AdmissibilityIndex::kSize, 0),
        excluded_(touched_.size(), 0),
        flood_stamp_(touched_.size(), 0) {
    for (Cell c : seed.cells()) idx_.insert(c);
    seed_size_ = static_cast<int>(seed.size());
    for (Cell c : seed.cells()) {
      for (int d = 0; d < 4; ++d) discover(step(c, static_cast<Dir>(d)));
    }
  }

  ExtensionResult run() {
    wits_.cap = opt_.witness_cap;
    wits_.enabled = opt_.collect_witnesses;
    extend(0);
    ExtensionResult out;
    out.total = wits_.best;
    out.added = wits_.best - seed_size_;
    out.nodes = nodes_;
    out.exhausted = exhausted_;
    out.witnesses = wits_.placements();
    return out;
  }

 private:
  static Cell frame_centre(const CellSet& seed) {
    const BBox b = seed.bbox();
    return make_cell((b.min_x + b.max_x) / 2, (b.min_y + b.max_y) / 2);
  }

  void discover(Cell c) {
    if (!idx_.in_window(c) || idx_.contains(c)) return;
    const std::size_t pos = idx_.window_pos(c);
    if (touched_[pos]) return;
    touched_[pos] = 1;
    list_.push_back(c);
  }

  // Cells addable some day from the current state: not excluded, currently
  // admissible, and 4-connected to the occupied set through such cells.
  int reachable_pool() {
    ++flood_epoch_;
    int count = 0;
    flood_fifo_.clear();
    for (Cell c : idx_.cells()) flood_fifo_.push_back(c);
    std::size_t seeded = flood_fifo_.size();
    for (std::size_t head = 0; head < flood_fifo_.size(); ++head) {
      const Cell u = flood_fifo_[head];
      for (int d = 0; d < 4; ++d) {
        const Cell v = step(u, static_cast<Dir>(d));
        if (!idx_.in_window(v) || idx_.contains(v)) continue;
        const std::size_t pos = idx_.window_pos(v);
        if (flood_stamp_[pos] == flood_epoch_ || excluded_[pos]) continue;
        flood_stamp_[pos] = flood_epoch_;
        if (!idx_.can_insert(v)) continue;
        ++count;
        flood_fifo_.push_back(v);
      }
    }
    flood_fifo_.erase(flood_fifo_.begin(), flood_fifo_.begin() + seeded);
    return count;
  }

  void extend(std::size_t start) {
    if (stopping_) return;
    ++nodes_;
    if (opt_.budget && nodes_ >= opt_.budget) {
      stopping_ = true;
      exhausted_ = false;
      return;
    }
    const int size = static_cast<int>(idx_.size());
    wits_.offer(size, idx_.cells());

    // No subtree can outgrow the current reachable pool; once witnesses are
    // not wanted, subtrees that merely tie the incumbent go as well.
    const int bound = size + reachable_pool();
    if (bound < wits_.best || (!opt_.collect_witnesses && bound == wits_.best))
      return;

    const std::size_t end = list_.size();
    for (std::size_t i = start; i < end && !stopping_; ++i) {
      const Cell u = list_[i];
      if (idx_.can_insert(u)) {
        idx_.insert(u);
        const std::size_t old = list_.size();
        for (int d = 0; d < 4; ++d) discover(step(u, static_cast<Dir>(d)));
        extend(i + 1);
        while (list_.size() > old) {
          touched_[idx_.window_pos(list_.back())] = 0;
          list_.pop_back();
        }
        idx_.erase(u);
      }
      excluded_[idx_.window_pos(u)] = 1;
    }
    for (std::size_t i = start; i < end; ++i)
      excluded_[idx_.window_pos(list_[i])] = 0;
  }

  GrowthConstraint opt_;
  AdmissibilityIndex idx_;
  std::vector<Cell> list_;
  std::vector<std::uint8_t> touched_, excluded_;
  std::vector<std::uint32_t> flood_stamp_;
  std::vector<Cell> flood_fifo_;
  std::uint32_t flood_epoch_ = 0;
  int seed_size_ = 0;
  std::uint64_t nodes_ = 0;
  bool stopping_ = false;
  bool exhausted_ = true;
  WitnessSet wits_;
};

}  // namespace detail

// Exact maximum number of cells addable to an admissible connected seed, one
// cell at a time, keeping the set an admissible polyomino throughout. Since
// admissibility survives taking subsets, a connected admissible superset can
// always be built cell by cell, so the search ranges over every admissible
// connected superset of the seed.
inline ExtensionResult grow_max(const CellSet& seed,
                                const GrowthConstraint& constraint = {}) {
  if (constraint.mode != GrowthMode::AdmissibleOnly)
    raise(Errc::InvalidSpec, "grow_max runs in admissible-only mode");
  if (seed.empty() || !seed.is_connected())
    raise(Errc::Disconnected, "seed must be a polyomino");
  if (!is_admissible(seed))
    raise(Errc::InvalidSpec, "seed is not admissible");
  detail::AdmissibleGrowth search(seed, constraint);
  return search.run();
}

namespace detail {

// Depth-first maximization over diameter-preserving growth states with
// value memoization on the set of added cells: every reachable set is
// evaluated once no matter how many addition orders lead to it.
class DiameterGrowth {
 public:
  DiameterGrowth(const CellSet& seed, const GrowthConstraint& opt,
                 std::vector<Cell> seed_order)
      : opt_(opt), idx_(frame_centre(seed)), region_(
            AdmissibilityIndex::kSize * AdmissibilityIndex::kSize, 0),
        cand_id_(region_.size(), 0) {
    for (Cell c : seed.cells()) idx_.insert(c);
    seed_size_ = static_cast<int>(seed.size());
    d_ = seed_size_ - 1;
    wit_a_ = seed_order.front();
    wit_b_ = seed_order.back();

    // Candidate region: within Chebyshev `steps` of some seed cell. Cells
    // are indexed in lexicographic order for deterministic iteration.
    const int r = opt_.steps;
    for (Cell c : seed.cells()) {
      for (int dx = -r; dx <= r; ++dx) {
        for (int dy = -r; dy <= r; ++dy) {
          const Cell v = make_cell(c.x + dx, c.y + dy);
          if (idx_.in_window(v) && !idx_.contains(v))
            region_[idx_.window_pos(v)] = 1;
        }
      }
    }
    for (std::size_t pos = 0; pos < region_.size(); ++pos) {
      if (region_[pos]) {
        cand_cells_.push_back(idx_.cell_at(pos));
        cand_id_[pos] = static_cast<std::uint16_t>(cand_cells_.size());
      }
    }
  }

  ExtensionResult run() {
    wits_.cap = opt_.witness_cap;
    wits_.enabled = opt_.collect_witnesses;

    std::vector<std::uint16_t> cands;
    for (Cell c : idx_.cells()) {
      for (int d = 0; d < 4; ++d) {
        const Cell v = step(c, static_cast<Dir>(d));
        if (!idx_.in_window(v) || idx_.contains(v)) continue;
        const std::uint16_t id = cand_id_[idx_.window_pos(v)];
        if (id) cands.push_back(static_cast<std::uint16_t>(id - 1));
      }
    }
    std::sort(cands.begin(), cands.end());
    cands.erase(std::unique(cands.begin(), cands.end()), cands.end());

    std::vector<std::uint16_t> added;
    dfs(added, cands, wit_a_, wit_b_);

    ExtensionResult out;
    out.total = wits_.best;
    out.added = wits_.best - seed_size_;
    out.nodes = nodes_;
    out.exhausted = exhausted_;
    out.witnesses = wits_.placements();
    return out;
  }

 private:
  static Cell frame_centre(const CellSet& seed) {
    const BBox b = seed.bbox();
    return make_cell((b.min_x + b.max_x) / 2, (b.min_y + b.max_y) / 2);
  }

  static std::string state_key(const std::vector<std::uint16_t>& added) {
    return std::string(reinterpret_cast<const char*>(added.data()),
                       added.size() * sizeof(std::uint16_t));
  }

  int dfs(std::vector<std::uint16_t>& added, const std::vector<std::uint16_t>& cands,
          Cell wa, Cell wb) {
    ++nodes_;
    if (opt_.budget && nodes_ >= opt_.budget) {
      stopping_ = true;
      exhausted_ = false;
    }
    const int total = seed_size_ + static_cast<int>(added.size());
    wits_.offer(total, idx_.cells());
    int best_here = total;
    if (stopping_) return best_here;

    for (const std::uint16_t cid : cands) {
      if (stopping_) break;
      const Cell cell = cand_cells_[cid];
      if (!idx_.can_insert(cell)) continue;
      idx_.insert(cell);
      Cell nwa = wa, nwb = wb;
      if (!diameter_preserved_after_insert(idx_, bfs_, d_, cell, nwa, nwb)) {
        idx_.erase(cell);
        continue;
      }
      const auto at = std::lower_bound(added.begin(), added.end(), cid);
      added.insert(at, cid);
      const std::string key = state_key(added);
      const auto hit = memo_.find(key);
      int val;
      if (hit != memo_.end()) {
        val = hit->second;
      } else {
        std::vector<std::uint16_t> child = cands;
        child.erase(std::find(child.begin(), child.end(), cid));
        for (int d = 0; d < 4; ++d) {
          const Cell v = step(cell, static_cast<Dir>(d));
          if (!idx_.in_window(v) || idx_.contains(v)) continue;
          const std::uint16_t id = cand_id_[idx_.window_pos(v)];
          if (!id) continue;
          const std::uint16_t vid = static_cast<std::uint16_t>(id - 1);
          const auto it = std::lower_bound(child.begin(), child.end(), vid);
          if (it == child.end() || *it != vid) child.insert(it, vid);
        }
        val = dfs(added, child, nwa, nwb);
        memo_.emplace(key, val);
      }
      added.erase(std::lower_bound(added.begin(), added.end(), cid));
      idx_.erase(cell);
      best_here = std::max(best_here, val);
    }
    return best_here;
  }

  GrowthConstraint opt_;
  AdmissibilityIndex idx_;
  WindowBfs bfs_;
  std::vector<std::uint8_t> region_;
  std::vector<std::uint16_t> cand_id_;  // grid pos -> candidate index + 1
  std::vector<Cell> cand_cells_;
  std::unordered_map<std::string, int> memo_;
  int seed_size_ = 0;
  int d_ = 0;
  Cell wit_a_, wit_b_;
  std::uint64_t nodes_ = 0;
  bool stopping_ = false;
  bool exhausted_ = true;
  WitnessSet wits_;
};

}  // namespace detail

// Exact maximum size over admissible polyominoes grown from a maximal path
// by single-cell additions that never change the graph diameter.
inline ExtensionResult grow_max_diameter_preserving(
    const CellSet& path, const GrowthConstraint& constraint = {}) {
  if (constraint.mode == GrowthMode::AdmissibleOnly &&
      constraint.target_diameter >= 0)
    raise(Errc::InvalidSpec, "admissible-only growth takes no target diameter");
  if (!is_admissible(path)) raise(Errc::InvalidSpec, "seed path is not admissible");
  const std::vector<Cell> order = path_order(path);  // raises NotAPath
  const int d = static_cast<int>(path.size()) - 1;
  if (constraint.target_diameter >= 0 && constraint.target_diameter != d)
    raise(Errc::InvalidSpec,
          "target diameter must equal the seed path's diameter");
  detail::DiameterGrowth search(path, constraint, order);
  return search.run();
}

}  // namespace polyrule
