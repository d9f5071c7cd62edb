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

#include <algorithm>
#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "polyrule/geometry.hpp"

namespace polyrule {

// Four equally spaced collinear cells: start, start+step, start+2*step,
// start+3*step. The witness a set is *not* admissible.
struct Progression {
  Cell start;
  Cell stride;

  std::array<Cell, 4> cells() const {
    std::array<Cell, 4> out;
    for (int k = 0; k < 4; ++k)
      out[k] = make_cell(start.x + k * stride.x, start.y + k * stride.y);
    return out;
  }
};

// Occupancy window over a 256x256 patch of the lattice with an incremental
// admissibility test. Inserting one cell costs O(n) membership probes; the
// search engines call can_insert/insert/erase millions of times, so the
// window is a flat byte grid and every probe is bounds-checked arithmetic.
//
// Single writer; copy the index to branch a parallel search.
class AdmissibilityIndex {
 public:
  static constexpr int kBits = 8;
  static constexpr int kSize = 1 << kBits;  // window side length

  // The window is centred on `centre`: all inserted cells must stay within
  // roughly +/-127 of it.
  explicit AdmissibilityIndex(Cell centre = {})
      : grid_(kSize * kSize, 0),
        off_x_(kSize / 2 - centre.x),
        off_y_(kSize / 2 - centre.y) {}

  // Index over an existing set (which is not itself admissibility-checked;
  // use is_admissible for that).
  static AdmissibilityIndex over(const CellSet& s) {
    Cell centre{};
    if (!s.empty()) {
      centre = make_cell((s.bbox().min_x + s.bbox().max_x) / 2,
                         (s.bbox().min_y + s.bbox().max_y) / 2);
    }
    AdmissibilityIndex idx(centre);
    for (Cell c : s.cells()) idx.insert(c);
    return idx;
  }

  std::size_t size() const noexcept { return cells_.size(); }
  std::span<const Cell> cells() const noexcept { return cells_; }

  bool contains(Cell c) const noexcept { return occupied(c.x, c.y); }

  // Insertions keep one ring of the window free so that neighbour probes by
  // raw grid position (+/-1, +/-kSize) can never wrap onto an occupied slot.
  bool in_window(Cell c) const noexcept {
    return static_cast<unsigned>(c.x + off_x_ - 1) < kSize - 2 &&
           static_cast<unsigned>(c.y + off_y_ - 1) < kSize - 2;
  }

  // Window plumbing for the search engines' scratch BFS buffers.
  std::size_t window_pos(Cell c) const noexcept { return index_of(c); }
  Cell cell_at(std::size_t pos) const noexcept {
    return make_cell(static_cast<int>(pos & (kSize - 1)) - off_x_,
                     static_cast<int>(pos >> kBits) - off_y_);
  }

  // True iff the set stays admissible when c joins it. Probes, for every
  // member d with v = d - c, the two progression patterns that could involve
  // c: {c, c+v, c+2v, c+3v} and {c-v, c, c+v, c+2v}. Together with v ranging
  // over all members these cover every four-term progression through c.
  bool can_insert(Cell c) const noexcept {
    const int cx = c.x, cy = c.y;
    for (const Cell d : cells_) {
      const int vx = d.x - cx, vy = d.y - cy;
      const int x2 = cx + 2 * vx, y2 = cy + 2 * vy;
      if (!occupied(x2, y2)) continue;
      if (occupied(x2 + vx, y2 + vy)) return false;
      if (occupied(cx - vx, cy - vy)) return false;
    }
    return true;
  }

  // As can_insert, but reports one violating progression.
  std::optional<Progression> insertion_violation(Cell c) const {
    const int cx = c.x, cy = c.y;
    for (const Cell d : cells_) {
      const int vx = d.x - cx, vy = d.y - cy;
      const int x2 = cx + 2 * vx, y2 = cy + 2 * vy;
      if (!occupied(x2, y2)) continue;
      if (occupied(x2 + vx, y2 + vy))
        return Progression{c, make_cell(vx, vy)};
      if (occupied(cx - vx, cy - vy))
        return Progression{make_cell(cx - vx, cy - vy), make_cell(vx, vy)};
    }
    return std::nullopt;
  }

  // Unconditional insert (no admissibility check).
  void insert(Cell c) {
    if (!in_window(c))
      raise(Errc::FrameOverflow, "cell outside the working window");
    std::uint8_t& slot = grid_[index_of(c)];
    if (slot) raise(Errc::DuplicateCell, "cell already present");
    slot = 1;
    cells_.push_back(c);
  }

  // Inserts c if the set stays admissible; returns false (and leaves the
  // index unchanged) otherwise.
  bool try_insert(Cell c) {
    if (!in_window(c))
      raise(Errc::FrameOverflow, "cell outside the working window");
    if (grid_[index_of(c)]) raise(Errc::DuplicateCell, "cell already present");
    if (!can_insert(c)) return false;
    grid_[index_of(c)] = 1;
    cells_.push_back(c);
    return true;
  }

  // Removes c. O(1) when c was the most recent insertion (the common case in
  // depth-first searches), O(n) otherwise.
  void erase(Cell c) {
    if (!contains(c)) raise(Errc::InvalidSpec, "erasing a cell not in the set");
    grid_[index_of(c)] = 0;
    if (cells_.back() == c) {
      cells_.pop_back();
    } else {
      cells_.erase(std::find(cells_.begin(), cells_.end(), c));
    }
  }

 private:
  std::size_t index_of(Cell c) const noexcept {
    return (static_cast<std::size_t>(c.y + off_y_) << kBits) |
           static_cast<std::size_t>(c.x + off_x_);
  }

  bool occupied(int wx, int wy) const noexcept {
    const unsigned gx = static_cast<unsigned>(wx + off_x_);
    const unsigned gy = static_cast<unsigned>(wy + off_y_);
    return gx < kSize && gy < kSize && grid_[(gy << kBits) | gx];
  }

  std::vector<std::uint8_t> grid_;
  std::vector<Cell> cells_;
  int off_x_, off_y_;
};

// Batch predicate: no four cells of s are equally spaced on a straight line.
// Connectivity is not required. O(n^2): for every ordered pair (a, b) the
// pair fixes the candidate stride, and the remaining two cells are probed.
inline std::optional<Progression> admissibility_witness(const CellSet& s) {
  if (s.size() < 4) return std::nullopt;
  const AdmissibilityIndex idx = AdmissibilityIndex::over(s);
  for (const Cell a : s.cells()) {
    for (const Cell b : s.cells()) {
      if (a == b) continue;
      const int vx = b.x - a.x, vy = b.y - a.y;
      const Cell c2 = make_cell(a.x + 2 * vx, a.y + 2 * vy);
      const Cell c3 = make_cell(a.x + 3 * vx, a.y + 3 * vy);
      if (idx.contains(c2) && idx.contains(c3))
        return Progression{a, make_cell(vx, vy)};
    }
  }
  return std::nullopt;
}

inline bool is_admissible(const CellSet& s) {
  return !admissibility_witness(s).has_value();
}

// Word-level form of the same condition for monotone E/N walks: false iff
// the word contains three consecutive blocks that are permutations of each
// other. For a two-letter alphabet, blocks are abelian-equal exactly when
// their E-counts agree.
inline bool abelian_cube_free(std::string_view word) {
  const std::size_t n = word.size();
  std::vector<int> prefix_e(n + 1, 0);
  for (std::size_t i = 0; i < n; ++i) {
    if (word[i] != 'E' && word[i] != 'N')
      raise(Errc::AlphabetViolation, "word must be over the letters E and N");
    prefix_e[i + 1] = prefix_e[i] + (word[i] == 'E' ? 1 : 0);
  }
  for (std::size_t block = 1; 3 * block <= n; ++block) {
    for (std::size_t i = 0; i + 3 * block <= n; ++i) {
      const int e1 = prefix_e[i + block] - prefix_e[i];
      const int e2 = prefix_e[i + 2 * block] - prefix_e[i + block];
      const int e3 = prefix_e[i + 3 * block] - prefix_e[i + 2 * block];
      if (e1 == e2 && e2 == e3) return false;
    }
  }
  return true;
}

}  // namespace polyrule
