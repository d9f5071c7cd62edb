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

#include <array>
#include <cstdint>
#include <optional>
#include <set>
#include <utility>
#include <vector>

#include "polyrule/geometry.hpp"

namespace polyrule {

// Per-cell graph distances from a source set, in the cell order of the
// underlying CellSet. -1 marks unreached cells.
struct DistanceField {
  std::vector<int> dist;

  static constexpr int kUnreached = -1;

  int max() const {
    int m = 0;
    for (int d : dist) m = std::max(m, d);
    return m;
  }
  bool all_reached() const {
    for (int d : dist) if (d == kUnreached) return false;
    return true;
  }
};

namespace detail {

// Adjacency-indexed view of a CellSet for repeated BFS queries.
struct CellGraph {
  std::vector<Cell> cells;                       // sorted
  std::vector<std::array<int, 4>> adj;           // neighbour index or -1

  explicit CellGraph(const CellSet& s)
      : cells(s.cells().begin(), s.cells().end()), adj(cells.size()) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      for (int d = 0; d < 4; ++d) {
        const Cell n = step(cells[i], static_cast<Dir>(d));
        const auto it = std::lower_bound(cells.begin(), cells.end(), n);
        adj[i][d] = (it != cells.end() && *it == n)
                        ? static_cast<int>(it - cells.begin())
                        : -1;
      }
    }
  }

  int index_of(Cell c) const {
    const auto it = std::lower_bound(cells.begin(), cells.end(), c);
    return (it != cells.end() && *it == c) ? static_cast<int>(it - cells.begin())
                                           : -1;
  }

  DistanceField bfs(std::span<const int> sources) const {
    DistanceField f;
    f.dist.assign(cells.size(), DistanceField::kUnreached);
    std::vector<int> fifo;
    fifo.reserve(cells.size());
    for (int s : sources) {
      if (f.dist[s] == DistanceField::kUnreached) {
        f.dist[s] = 0;
        fifo.push_back(s);
      }
    }
    for (std::size_t head = 0; head < fifo.size(); ++head) {
      const int u = fifo[head];
      for (int d = 0; d < 4; ++d) {
        const int v = adj[u][d];
        if (v >= 0 && f.dist[v] == DistanceField::kUnreached) {
          f.dist[v] = f.dist[u] + 1;
          fifo.push_back(v);
        }
      }
    }
    return f;
  }
};

}  // namespace detail

// Multi-source BFS distances inside p.
inline DistanceField distance_field(const CellSet& p, std::span<const Cell> sources) {
  const detail::CellGraph g(p);
  std::vector<int> src;
  for (Cell c : sources) {
    const int i = g.index_of(c);
    if (i < 0) raise(Errc::PathNotContained, "source cell not in the set");
    src.push_back(i);
  }
  return g.bfs(src);
}

// Exact graph diameter by BFS from every cell; O(n^2) and deliberately so.
// The optional witness receives one maximizing pair.
inline int diameter(const CellSet& p, std::pair<Cell, Cell>* witness = nullptr) {
  if (p.empty()) raise(Errc::Disconnected, "diameter of an empty set");
  const detail::CellGraph g(p);
  int best = -1;
  for (std::size_t i = 0; i < g.cells.size(); ++i) {
    const int src = static_cast<int>(i);
    const DistanceField f = g.bfs(std::span<const int>(&src, 1));
    if (i == 0 && !f.all_reached())
      raise(Errc::Disconnected, "set is not a polyomino");
    for (std::size_t j = 0; j < g.cells.size(); ++j) {
      if (f.dist[j] > best) {
        best = f.dist[j];
        if (witness) *witness = {g.cells[i], g.cells[j]};
      }
    }
  }
  return best;
}

// All maximal paths of p: the cell sets of geodesics between every pair of
// cells realizing the diameter. Geodesics are chordless, so each is a path
// polyomino with diameter+1 cells.
inline std::vector<CellSet> maximal_paths(const CellSet& p) {
  const detail::CellGraph g(p);
  const int n = static_cast<int>(g.cells.size());
  if (n == 0) raise(Errc::Disconnected, "empty set");

  std::vector<DistanceField> fields;
  fields.reserve(n);
  for (int i = 0; i < n; ++i)
    fields.push_back(g.bfs(std::span<const int>(&i, 1)));
  if (!fields[0].all_reached())
    raise(Errc::Disconnected, "set is not a polyomino");

  int d = 0;
  for (int i = 0; i < n; ++i) d = std::max(d, fields[i].max());

  std::set<std::vector<Cell>> found;
  std::vector<int> walk;
  for (int a = 0; a < n; ++a) {
    for (int b = a + 1; b < n; ++b) {
      if (fields[a].dist[b] != d) continue;
      // Every geodesic from a to b: step along cells where the distance to a
      // grows and the distance to b shrinks.
      walk.assign(1, a);
      auto extend = [&](auto&& self) -> void {
        const int u = walk.back();
        if (u == b) {
          std::vector<Cell> cells;
          cells.reserve(walk.size());
          for (int i : walk) cells.push_back(g.cells[i]);
          std::sort(cells.begin(), cells.end());
          found.insert(std::move(cells));
          return;
        }
        for (int dd = 0; dd < 4; ++dd) {
          const int v = g.adj[u][dd];
          if (v >= 0 && fields[a].dist[v] == fields[a].dist[u] + 1 &&
              fields[b].dist[v] + fields[a].dist[v] == d) {
            walk.push_back(v);
            self(self);
            walk.pop_back();
          }
        }
      };
      extend(extend);
    }
  }

  std::vector<CellSet> out;
  out.reserve(found.size());
  for (const auto& cells : found)
    out.push_back(CellSet::from_sorted_unique(cells));
  return out;
}

// Radius of p with respect to a maximal path q: the largest multi-source BFS
// distance from q's cells inside p.
inline int radius_wrt(const CellSet& p, const CellSet& q) {
  for (Cell c : q.cells()) {
    if (!p.contains(c))
      raise(Errc::PathNotContained, "path cell missing from the polyomino");
  }
  std::vector<Cell> order;
  try {
    order = path_order(q);
  } catch (const Error&) {
    raise(Errc::NotMaximal, "subset is not a path polyomino");
  }
  const detail::CellGraph g(p);
  const int a = g.index_of(order.front());
  const int b = g.index_of(order.back());
  const DistanceField from_a = g.bfs(std::span<const int>(&a, 1));
  if (!from_a.all_reached()) raise(Errc::Disconnected, "set is not a polyomino");
  const int d = diameter(p);
  if (from_a.dist[b] != d || static_cast<int>(q.size()) != d + 1)
    raise(Errc::NotMaximal, "path does not realize the diameter");

  std::vector<int> sources;
  for (Cell c : q.cells()) sources.push_back(g.index_of(c));
  const DistanceField f = g.bfs(sources);
  return f.max();
}

// A chordless cycle: every cell is adjacent to exactly its two cycle
// neighbours within the witness set.
struct LoopWitness {
  std::vector<Cell> cycle;  // in traversal order

  int length() const { return static_cast<int>(cycle.size()); }
};

// Finds a loop of length > 4 inside p, if any: a depth-first search over
// induced paths anchored at the lexicographically smallest cell of the
// candidate cycle (whose cycle neighbours are forced to be its East and
// North neighbours). On the square lattice chordless cycles have length 4
// or >= 8, so any witness found has at least 8 cells. Deterministic: cells
// are tried in lexicographic order, directions in E, N, W, S order.
inline std::optional<LoopWitness> find_long_loop(const CellSet& p) {
  const detail::CellGraph g(p);
  const int n = static_cast<int>(g.cells.size());
  if (n == 0) raise(Errc::Disconnected, "empty set");
  if (!g.bfs(std::vector<int>{0}).all_reached())
    raise(Errc::Disconnected, "set is not a polyomino");

  std::vector<std::uint8_t> in_walk(n, 0);
  std::vector<int> walk;

  for (int s = 0; s < n; ++s) {
    const int east = g.adj[s][static_cast<int>(Dir::East)];
    const int north = g.adj[s][static_cast<int>(Dir::North)];
    if (east <= s || north <= s) continue;  // s must be the cycle minimum

    walk.assign({s, east});
    in_walk[s] = in_walk[east] = 1;
    std::optional<LoopWitness> hit;
    auto dfs = [&](auto&& self, int end) -> bool {
      for (int dd = 0; dd < 4 && !hit; ++dd) {
        const int v = g.adj[end][dd];
        if (v <= s || in_walk[v]) continue;
        int touching = 0;
        for (int b = 0; b < 4; ++b) {
          const int w = g.adj[v][b];
          if (w >= 0 && in_walk[w]) ++touching;
        }
        if (v == north) {
          // Closing cell: may touch only the walk end and the anchor.
          if (touching != 2) continue;
          if (walk.size() + 1 > 4) {
            LoopWitness lw;
            for (int i : walk) lw.cycle.push_back(g.cells[i]);
            lw.cycle.push_back(g.cells[v]);
            hit = std::move(lw);
            return true;
          }
          continue;
        }
        if (touching != 1) continue;  // would create a chord
        in_walk[v] = 1;
        walk.push_back(v);
        if (self(self, v)) {
          // keep the stack as found
          return true;
        }
        walk.pop_back();
        in_walk[v] = 0;
      }
      return hit.has_value();
    };
    dfs(dfs, east);
    if (hit) return hit;
    in_walk[s] = in_walk[east] = 0;
  }
  return std::nullopt;
}

}  // namespace polyrule
