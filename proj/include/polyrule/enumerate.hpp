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
#include <bit>
#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include "polyrule/admissibility.hpp"
#include "polyrule/geometry.hpp"

namespace polyrule {

enum class EnumKind { Path, Loop, Tripod };

struct EnumSpec {
  EnumKind kind = EnumKind::Path;
  int min_cells = 1;
  int max_cells = 0;         // 0 = no cap (the admissibility constraint makes
                             // every walk tree finite)
  int arm_diameter = 0;      // tripods only
  std::uint64_t budget = 0;  // node budget, 0 = unlimited
  int jobs = 1;
  int split_depth = 8;       // subtree hand-off depth for jobs > 1
};

struct EnumResult {
  EnumKind kind = EnumKind::Path;
  // Canonical direction words, sorted by (size, word). Loops carry closed
  // words; paths open ones. Tripods are reported as shapes instead.
  std::vector<DirectionWord> words;
  std::vector<CellSet> shapes;
  std::map<int, std::int64_t> counts_by_size;
  std::uint64_t nodes = 0;
  bool exhausted = true;
};

namespace detail {

// Deduplicating collector; one per worker, merged after the run.
struct WordSink {
  int min_cells;
  int max_cells;  // inclusive; <=0 means unbounded
  std::map<int, std::set<std::string>> by_size;

  bool in_range(int size) const {
    return size >= min_cells && (max_cells <= 0 || size <= max_cells);
  }

  void add(int size, std::string word) {
    if (in_range(size)) by_size[size].insert(std::move(word));
  }

  void merge_from(WordSink& other) {
    for (auto& [size, words] : other.by_size)
      by_size[size].insert(words.begin(), words.end());
  }
};

// Depth-first walk over every self-avoiding, induced, admissible open walk.
// Translation is fixed by starting at the origin; of the 8 isometric images
// of a directed walk exactly one starts East and makes its first turn North,
// so each undirected path class is visited once per traversal direction and
// the word sink collapses the remainder.
template <class Visit>
class PathWalker {
 public:
  PathWalker(std::uint64_t budget, int max_cells, Visit& visit)
      : budget_(budget), max_cells_(max_cells <= 0 ? 1 << 20 : max_cells),
        visit_(visit) {}

  // Full run from the root. Returns false if the node budget fired.
  bool run() {
    idx_.insert(Cell{0, 0});
    stack_.push_back(Cell{0, 0});
    count_node();
    visit_(stack_);
    if (static_cast<int>(stack_.size()) < max_cells_ && !stopping_) {
      const Cell c{1, 0};
      idx_.insert(c);
      stack_.push_back(c);
      dfs(c, Dir::East, false);
      stack_.pop_back();
      idx_.erase(c);
    }
    return exhausted_;
  }

  // Continues a walk whose prefix was produced by a shallower run.
  bool run_prefix(std::span<const Cell> prefix, bool turned) {
    for (Cell c : prefix) {
      idx_.insert(c);
      stack_.push_back(c);
    }
    const Dir last = dir_between(prefix[prefix.size() - 2], prefix.back());
    dfs(prefix.back(), last, turned);
    return exhausted_;
  }

  std::uint64_t nodes() const { return nodes_; }

 private:
  void count_node() {
    ++nodes_;
    if (budget_ && nodes_ >= budget_) {
      stopping_ = true;
      exhausted_ = false;
    }
  }

  void dfs(Cell end, Dir last, bool turned) {
    count_node();
    visit_(stack_);
    if (static_cast<int>(stack_.size()) >= max_cells_) return;
    for (int di = 0; di < 4; ++di) {
      if (stopping_) return;
      const Dir dir = static_cast<Dir>(di);
      if (dir == opposite(last)) continue;
      if (!turned && dir != Dir::East && dir != Dir::North) continue;
      const Cell c = step(end, dir);
      // Induced walk: the new cell may touch nothing but the current end.
      bool blocked = false;
      for (int dj = 0; dj < 4; ++dj) {
        const Dir back = static_cast<Dir>(dj);
        if (back == opposite(dir)) continue;  // that neighbour is `end`
        if (idx_.contains(step(c, back))) {
          blocked = true;
          break;
        }
      }
      if (blocked || !idx_.can_insert(c)) continue;
      idx_.insert(c);
      stack_.push_back(c);
      dfs(c, dir, turned || dir != Dir::East);
      stack_.pop_back();
      idx_.erase(c);
    }
  }

  AdmissibilityIndex idx_;
  std::vector<Cell> stack_;
  std::uint64_t nodes_ = 0;
  std::uint64_t budget_;
  int max_cells_;
  bool stopping_ = false;
  bool exhausted_ = true;
  Visit& visit_;
};

// Closed-walk search. The origin is pinned to the lexicographically smallest
// cell of the loop, whose two loop neighbours are always its East and North
// neighbours; the walk leaves East and closes onto (0, 1). Cells smaller
// than the origin are pruned, so each loop appears exactly once per isometry
// image and the word sink reduces those to one canonical word.
template <class Emit>
class LoopWalker {
 public:
  LoopWalker(std::uint64_t budget, int max_cells, Emit& emit)
      : budget_(budget), max_cells_(max_cells <= 0 ? 1 << 20 : max_cells),
        emit_(emit) {}

  bool run() {
    idx_.insert(Cell{0, 0});
    stack_.push_back(Cell{0, 0});
    const Cell first{1, 0};
    idx_.insert(first);
    stack_.push_back(first);
    dfs(first, Dir::East);
    return exhausted_;
  }

  bool run_prefix(std::span<const Cell> prefix) {
    for (Cell c : prefix) {
      idx_.insert(c);
      stack_.push_back(c);
    }
    dfs(prefix.back(), dir_between(prefix[prefix.size() - 2], prefix.back()));
    return exhausted_;
  }

  std::uint64_t nodes() const { return nodes_; }

 private:
  static bool below_origin(Cell c) { return c.x < 0 || (c.x == 0 && c.y < 0); }

  void dfs(Cell end, Dir last) {
    ++nodes_;
    if (budget_ && nodes_ >= budget_) {
      stopping_ = true;
      exhausted_ = false;
      return;
    }
    if (static_cast<int>(stack_.size()) >= max_cells_) return;
    for (int di = 0; di < 4; ++di) {
      if (stopping_) return;
      const Dir dir = static_cast<Dir>(di);
      if (dir == opposite(last)) continue;
      const Cell c = step(end, dir);
      if (below_origin(c)) continue;
      if (c == Cell{0, 1}) {
        // Closing cell: may touch only the walk end and the origin.
        const std::size_t len = stack_.size() + 1;
        if (len < 4) continue;
        if (idx_.contains(Cell{1, 1}) + idx_.contains(Cell{0, 2}) +
                idx_.contains(Cell{-1, 1}) !=
            1)
          continue;  // exactly `end` among the non-origin neighbours
        if (!idx_.can_insert(c)) continue;
        stack_.push_back(c);
        emit_(stack_);
        stack_.pop_back();
        continue;
      }
      bool blocked = false;
      for (int dj = 0; dj < 4; ++dj) {
        const Dir back = static_cast<Dir>(dj);
        if (back == opposite(dir)) continue;
        if (idx_.contains(step(c, back))) {
          blocked = true;
          break;
        }
      }
      if (blocked || !idx_.can_insert(c)) continue;
      idx_.insert(c);
      stack_.push_back(c);
      dfs(c, dir);
      stack_.pop_back();
      idx_.erase(c);
    }
  }

  AdmissibilityIndex idx_;
  std::vector<Cell> stack_;
  std::uint64_t nodes_ = 0;
  std::uint64_t budget_;
  int max_cells_;
  bool stopping_ = false;
  bool exhausted_ = true;
  Emit& emit_;
};

struct WalkPrefix {
  std::vector<Cell> cells;
  bool turned = false;
};

inline std::uint64_t prefix_quota(std::uint64_t budget, std::size_t count,
                                  std::size_t i) {
  if (budget == 0) return 0;
  return budget / count + (i < budget % count ? 1 : 0);
}

}  // namespace detail

// Exhaustive, isometry-deduplicated census of admissible path polyominoes,
// grouped by cell count (graph diameter + 1).
inline EnumResult enumerate_paths(const EnumSpec& spec) {
  if (spec.kind != EnumKind::Path)
    raise(Errc::InvalidSpec, "enumerate_paths needs kind = Path");
  if (spec.min_cells < 1 || (spec.max_cells && spec.max_cells < spec.min_cells))
    raise(Errc::InvalidSpec, "bad size bounds");

  EnumResult out;
  out.kind = EnumKind::Path;

  detail::WordSink sink{spec.min_cells, spec.max_cells, {}};
  const auto emit = [&sink](std::span<const Cell> cells) {
    const int size = static_cast<int>(cells.size());
    if (!sink.in_range(size)) return;
    sink.add(size, canonical_path_word(letters_of(cells)));
  };
  using Visit = const decltype(emit);

  if (spec.jobs <= 1) {
    detail::PathWalker<Visit> walker(spec.budget, spec.max_cells, emit);
    out.exhausted = walker.run();
    out.nodes = walker.nodes();
  } else {
    // Collect subtree roots at the split depth, then fan the subtrees out to
    // worker threads. All reductions are set unions and sums, so the merged
    // result does not depend on scheduling.
    std::vector<detail::WalkPrefix> prefixes;
    const int split = std::max(2, spec.split_depth);
    const auto gather = [&](std::span<const Cell> cells, bool turned) {
      prefixes.push_back({{cells.begin(), cells.end()}, turned});
    };
    // A bounded walker that also records `turned` needs its own tiny DFS:
    struct Collector {
      int split;
      decltype(gather)& out_fn;
      Visit& emit_fn;
      std::uint64_t nodes = 0;
      AdmissibilityIndex idx;
      std::vector<Cell> stack;

      void dfs(Cell end, Dir last, bool turned) {
        if (static_cast<int>(stack.size()) == split) {
          out_fn(stack, turned);
          return;
        }
        ++nodes;
        emit_fn(stack);
        for (int di = 0; di < 4; ++di) {
          const Dir dir = static_cast<Dir>(di);
          if (dir == opposite(last)) continue;
          if (!turned && dir != Dir::East && dir != Dir::North) continue;
          const Cell c = step(end, dir);
          bool blocked = false;
          for (int dj = 0; dj < 4; ++dj) {
            const Dir back = static_cast<Dir>(dj);
            if (back == opposite(dir)) continue;
            if (idx.contains(step(c, back))) {
              blocked = true;
              break;
            }
          }
          if (blocked || !idx.can_insert(c)) continue;
          idx.insert(c);
          stack.push_back(c);
          dfs(c, dir, turned || dir != Dir::East);
          stack.pop_back();
          idx.erase(c);
        }
      }
    } collector{split, gather, emit, 0, AdmissibilityIndex{}, {}};

    collector.idx.insert(Cell{0, 0});
    collector.stack.push_back(Cell{0, 0});
    ++collector.nodes;
    emit(collector.stack);
    if (spec.max_cells == 0 || spec.max_cells >= 2) {
      collector.idx.insert(Cell{1, 0});
      collector.stack.push_back(Cell{1, 0});
      collector.dfs(Cell{1, 0}, Dir::East, false);
    }
    out.nodes = collector.nodes;

    const std::uint64_t worker_budget =
        spec.budget > collector.nodes ? spec.budget - collector.nodes : spec.budget ? 1 : 0;
    std::vector<detail::WordSink> sinks(prefixes.size(),
                                        {spec.min_cells, spec.max_cells, {}});
    std::vector<std::uint64_t> node_counts(prefixes.size(), 0);
    std::vector<std::uint8_t> complete(prefixes.size(), 1);
    std::atomic<std::size_t> next{0};
    auto work = [&]() {
      while (true) {
        const std::size_t i = next.fetch_add(1);
        if (i >= prefixes.size()) return;
        auto local_emit = [&sinks, i](std::span<const Cell> cells) {
          const int size = static_cast<int>(cells.size());
          if (!sinks[i].in_range(size)) return;
          sinks[i].add(size, canonical_path_word(letters_of(cells)));
        };
        detail::PathWalker<decltype(local_emit)> walker(
            detail::prefix_quota(worker_budget, prefixes.size(), i),
            spec.max_cells, local_emit);
        complete[i] = walker.run_prefix(prefixes[i].cells, prefixes[i].turned);
        node_counts[i] = walker.nodes();
      }
    };
    std::vector<std::thread> pool;
    for (int t = 0; t < spec.jobs; ++t) pool.emplace_back(work);
    for (auto& th : pool) th.join();
    out.exhausted = true;
    for (std::size_t i = 0; i < prefixes.size(); ++i) {
      sink.merge_from(sinks[i]);
      out.nodes += node_counts[i];
      if (!complete[i]) out.exhausted = false;
    }
  }

  for (auto& [size, words] : sink.by_size) {
    out.counts_by_size[size] = static_cast<std::int64_t>(words.size());
    for (const auto& w : words) out.words.push_back(DirectionWord{w, false});
  }
  return out;
}

// Census of admissible loops: closed walks whose decoded set has every cell
// of degree exactly 2, canonicalized over word rotation, reversal and the 8
// isometries.
inline EnumResult enumerate_loops(const EnumSpec& spec) {
  if (spec.kind != EnumKind::Loop)
    raise(Errc::InvalidSpec, "enumerate_loops needs kind = Loop");
  if (spec.min_cells < 4)
    raise(Errc::InvalidSpec, "loops have at least 4 cells");

  EnumResult out;
  out.kind = EnumKind::Loop;
  detail::WordSink sink{spec.min_cells, spec.max_cells, {}};
  const auto emit = [&sink](std::span<const Cell> cells) {
    const int size = static_cast<int>(cells.size());
    if (!sink.in_range(size)) return;
    sink.add(size, canonical_loop_word(letters_of(cells, /*closed=*/true)));
  };
  using Emit = const decltype(emit);

  if (spec.jobs <= 1) {
    detail::LoopWalker<Emit> walker(spec.budget, spec.max_cells, emit);
    out.exhausted = walker.run();
    out.nodes = walker.nodes();
  } else {
    std::vector<detail::WalkPrefix> prefixes;
    const int split = std::max(2, spec.split_depth);
    struct Collector {
      int split;
      std::vector<detail::WalkPrefix>& out_prefixes;
      Emit& emit_fn;
      std::uint64_t nodes = 0;
      AdmissibilityIndex idx;
      std::vector<Cell> stack;

      void dfs(Cell end, Dir last) {
        if (static_cast<int>(stack.size()) == split) {
          out_prefixes.push_back({stack, false});
          return;
        }
        ++nodes;
        for (int di = 0; di < 4; ++di) {
          const Dir dir = static_cast<Dir>(di);
          if (dir == opposite(last)) continue;
          const Cell c = step(end, dir);
          if (c.x < 0 || (c.x == 0 && c.y < 0)) continue;
          if (c == Cell{0, 1}) {
            const std::size_t len = stack.size() + 1;
            if (len < 4) continue;
            if (idx.contains(Cell{1, 1}) + idx.contains(Cell{0, 2}) +
                    idx.contains(Cell{-1, 1}) !=
                1)
              continue;
            if (!idx.can_insert(c)) continue;
            stack.push_back(c);
            emit_fn(stack);
            stack.pop_back();
            continue;
          }
          bool blocked = false;
          for (int dj = 0; dj < 4; ++dj) {
            const Dir back = static_cast<Dir>(dj);
            if (back == opposite(dir)) continue;
            if (idx.contains(step(c, back))) {
              blocked = true;
              break;
            }
          }
          if (blocked || !idx.can_insert(c)) continue;
          idx.insert(c);
          stack.push_back(c);
          dfs(c, dir);
          stack.pop_back();
          idx.erase(c);
        }
      }
    } collector{split, prefixes, emit, 0, AdmissibilityIndex{}, {}};

    collector.idx.insert(Cell{0, 0});
    collector.stack.push_back(Cell{0, 0});
    collector.idx.insert(Cell{1, 0});
    collector.stack.push_back(Cell{1, 0});
    collector.dfs(Cell{1, 0}, Dir::East);
    out.nodes = collector.nodes;

    const std::uint64_t worker_budget =
        spec.budget > collector.nodes ? spec.budget - collector.nodes : spec.budget ? 1 : 0;
    std::vector<detail::WordSink> sinks(prefixes.size(),
                                        {spec.min_cells, spec.max_cells, {}});
    std::vector<std::uint64_t> node_counts(prefixes.size(), 0);
    std::vector<std::uint8_t> complete(prefixes.size(), 1);
    std::atomic<std::size_t> next{0};
    auto work = [&]() {
      while (true) {
        const std::size_t i = next.fetch_add(1);
        if (i >= prefixes.size()) return;
        auto local_emit = [&sinks, i](std::span<const Cell> cells) {
          const int size = static_cast<int>(cells.size());
          if (!sinks[i].in_range(size)) return;
          sinks[i].add(size, canonical_loop_word(letters_of(cells, true)));
        };
        detail::LoopWalker<decltype(local_emit)> walker(
            detail::prefix_quota(worker_budget, prefixes.size(), i),
            spec.max_cells, local_emit);
        complete[i] = walker.run_prefix(prefixes[i].cells);
        node_counts[i] = walker.nodes();
      }
    };
    std::vector<std::thread> pool;
    for (int t = 0; t < spec.jobs; ++t) pool.emplace_back(work);
    for (auto& th : pool) th.join();
    out.exhausted = true;
    for (std::size_t i = 0; i < prefixes.size(); ++i) {
      sink.merge_from(sinks[i]);
      out.nodes += node_counts[i];
      if (!complete[i]) out.exhausted = false;
    }
  }

  for (auto& [size, words] : sink.by_size) {
    out.counts_by_size[size] = static_cast<std::int64_t>(words.size());
    for (const auto& w : words) out.words.push_back(DirectionWord{w, true});
  }
  return out;
}

// Tripods: unions of three equal-diameter path polyominoes that pairwise
// share exactly their one common endpoint and have no other adjacency
// between different arms. Up to isometry the three arm directions can be
// fixed to East, North and West; the canonical-key dedup absorbs the
// leftover mirror symmetry.
inline EnumResult enumerate_tripods(int arm_diameter, bool admissible_only = true) {
  if (arm_diameter < 1)
    raise(Errc::InvalidArm, "tripod arms need diameter >= 1");

  EnumResult out;
  out.kind = EnumKind::Tripod;
  const int arm_cells = arm_diameter + 1;

  // All directed arms from the origin with a fixed first step, as ordered
  // cell sequences (origin excluded).
  std::uint64_t nodes = 0;
  const auto arms_toward = [&](Dir first) {
    std::vector<std::vector<Cell>> arms;
    AdmissibilityIndex idx;
    idx.insert(Cell{0, 0});
    std::vector<Cell> walk;
    const Cell start = step(Cell{0, 0}, first);
    idx.insert(start);
    walk.push_back(start);
    auto dfs = [&](auto&& self, Cell end, Dir last) -> void {
      ++nodes;
      if (static_cast<int>(walk.size()) == arm_cells - 1) {
        arms.push_back(walk);
        return;
      }
      for (int di = 0; di < 4; ++di) {
        const Dir dir = static_cast<Dir>(di);
        if (dir == opposite(last)) continue;
        const Cell c = step(end, dir);
        bool blocked = false;
        for (int dj = 0; dj < 4; ++dj) {
          const Dir back = static_cast<Dir>(dj);
          if (back == opposite(dir)) continue;
          if (idx.contains(step(c, back))) {
            blocked = true;
            break;
          }
        }
        if (blocked) continue;
        if (admissible_only && !idx.can_insert(c)) continue;
        idx.insert(c);
        walk.push_back(c);
        self(self, c, dir);
        walk.pop_back();
        idx.erase(c);
      }
    };
    if (arm_cells == 2) {
      arms.push_back(walk);
    } else {
      dfs(dfs, start, first);
    }
    return arms;
  };

  const auto arms_e = arms_toward(Dir::East);
  const auto arms_n = arms_toward(Dir::North);
  const auto arms_w = arms_toward(Dir::West);

  // Two arms are compatible when their non-origin cells are disjoint and
  // never side-adjacent.
  const auto compatible = [](const std::vector<Cell>& a, const std::vector<Cell>& b) {
    for (Cell u : a) {
      for (Cell v : b) {
        if (u == v || adjacent(u, v)) return false;
      }
    }
    return true;
  };

  const std::size_t nw = arms_w.size();
  const std::size_t words_per_row = (nw + 63) / 64;
  const auto compat_row = [&](const std::vector<Cell>& arm) {
    std::vector<std::uint64_t> row(words_per_row, 0);
    for (std::size_t k = 0; k < nw; ++k) {
      if (compatible(arm, arms_w[k])) row[k / 64] |= std::uint64_t{1} << (k % 64);
    }
    return row;
  };
  std::vector<std::vector<std::uint64_t>> e_vs_w, n_vs_w;
  e_vs_w.reserve(arms_e.size());
  for (const auto& a : arms_e) e_vs_w.push_back(compat_row(a));
  n_vs_w.reserve(arms_n.size());
  for (const auto& a : arms_n) n_vs_w.push_back(compat_row(a));

  std::map<CanonicalKey, CellSet> found;
  std::vector<Cell> union_cells;
  for (std::size_t i = 0; i < arms_e.size(); ++i) {
    for (std::size_t j = 0; j < arms_n.size(); ++j) {
      if (!compatible(arms_e[i], arms_n[j])) continue;
      for (std::size_t wword = 0; wword < words_per_row; ++wword) {
        std::uint64_t bits = e_vs_w[i][wword] & n_vs_w[j][wword];
        while (bits) {
          const int bit = std::countr_zero(bits);
          bits &= bits - 1;
          const std::size_t k = wword * 64 + bit;
          ++nodes;
          union_cells.clear();
          union_cells.push_back(Cell{0, 0});
          union_cells.insert(union_cells.end(), arms_e[i].begin(), arms_e[i].end());
          union_cells.insert(union_cells.end(), arms_n[j].begin(), arms_n[j].end());
          union_cells.insert(union_cells.end(), arms_w[k].begin(), arms_w[k].end());
          CellSet tripod = CellSet::from_cells(union_cells);
          if (admissible_only && !is_admissible(tripod)) continue;
          CanonicalKey key = canonical_key(tripod);
          if (!found.count(key)) {
            CellSet placement = cells_from_key(key);
            found.emplace(std::move(key), std::move(placement));
          }
        }
      }
    }
  }

  for (auto& [key, shape] : found) out.shapes.push_back(shape);
  out.counts_by_size[3 * arm_diameter + 1] =
      static_cast<std::int64_t>(out.shapes.size());
  out.nodes = nodes;
  return out;
}

}  // namespace polyrule
