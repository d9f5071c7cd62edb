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
#include <compare>
#include <cstdint>
#include <cstdlib>
#include <functional>
#include <limits>
#include <span>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "polyrule/errors.hpp"

namespace polyrule {

// Centre of a unit cell on the square lattice. Ordering is lexicographic
// on (x, y); every deterministic tie-break in the library uses it.
struct Cell {
  std::int16_t x = 0;
  std::int16_t y = 0;

  friend constexpr auto operator<=>(const Cell&, const Cell&) = default;
};

inline constexpr Cell make_cell(int x, int y) {
  return Cell{static_cast<std::int16_t>(x), static_cast<std::int16_t>(y)};
}

inline constexpr bool adjacent(Cell a, Cell b) {
  const int dx = std::abs(a.x - b.x), dy = std::abs(a.y - b.y);
  return dx + dy == 1;
}

struct CellHash {
  std::size_t operator()(Cell c) const noexcept {
    return std::hash<std::uint32_t>{}(
        (static_cast<std::uint32_t>(static_cast<std::uint16_t>(c.x)) << 16) |
        static_cast<std::uint16_t>(c.y));
  }
};

// ---------------------------------------------------------------------------
// Directions and walks

enum class Dir : std::uint8_t { East = 0, North = 1, West = 2, South = 3 };

inline constexpr std::array<Cell, 4> kDirOffset = {
    Cell{1, 0}, Cell{0, 1}, Cell{-1, 0}, Cell{0, -1}};

inline constexpr char dir_letter(Dir d) { return "ENWS"[static_cast<int>(d)]; }

inline constexpr Dir opposite(Dir d) {
  return static_cast<Dir>((static_cast<int>(d) + 2) & 3);
}

inline constexpr Cell step(Cell c, Dir d) {
  const Cell o = kDirOffset[static_cast<int>(d)];
  return make_cell(c.x + o.x, c.y + o.y);
}

inline Dir parse_dir(char ch) {
  switch (ch) {
    case 'E': return Dir::East;
    case 'N': return Dir::North;
    case 'W': return Dir::West;
    case 'S': return Dir::South;
    default:
      raise(Errc::ParseError, std::string("invalid direction letter '") + ch + "'");
  }
}

// Direction of the unit step from a to b; cells must be adjacent.
inline Dir dir_between(Cell a, Cell b) {
  for (int d = 0; d < 4; ++d) {
    if (step(a, static_cast<Dir>(d)) == b) return static_cast<Dir>(d);
  }
  raise(Errc::InvalidSpec, "cells are not adjacent");
}

// A walk over the lattice encoded as letters E/N/W/S. An open word with k
// letters decodes to k+1 cells; a closed word with k letters decodes to k
// cells, the final letter stepping back onto the origin.
struct DirectionWord {
  std::string letters;
  bool closed = false;

  friend auto operator<=>(const DirectionWord&, const DirectionWord&) = default;
};

// ---------------------------------------------------------------------------
// Bounding boxes

struct BBox {
  std::int16_t min_x = std::numeric_limits<std::int16_t>::max();
  std::int16_t min_y = std::numeric_limits<std::int16_t>::max();
  std::int16_t max_x = std::numeric_limits<std::int16_t>::min();
  std::int16_t max_y = std::numeric_limits<std::int16_t>::min();

  bool empty() const { return min_x > max_x; }
  int width() const { return empty() ? 0 : max_x - min_x + 1; }
  int height() const { return empty() ? 0 : max_y - min_y + 1; }

  void expand(Cell c) {
    min_x = std::min(min_x, c.x);
    min_y = std::min(min_y, c.y);
    max_x = std::max(max_x, c.x);
    max_y = std::max(max_y, c.y);
  }

  friend constexpr auto operator<=>(const BBox&, const BBox&) = default;
};

inline BBox bounding_box(std::span<const Cell> cells) {
  BBox b;
  for (Cell c : cells) b.expand(c);
  return b;
}

// ---------------------------------------------------------------------------
// CellSet: a finite set of cells kept sorted, with O(log n) membership and a
// cached bounding box. This is the value type the module-level APIs trade in;
// the search engines use their own grid-backed indexes internally.

class CellSet {
 public:
  CellSet() = default;

  // Builds from an arbitrary cell list; duplicates are an error.
  static CellSet from_cells(std::vector<Cell> cells) {
    std::sort(cells.begin(), cells.end());
    if (std::adjacent_find(cells.begin(), cells.end()) != cells.end())
      raise(Errc::DuplicateCell, "cell list contains duplicates");
    return CellSet(std::move(cells));
  }

  static CellSet from_sorted_unique(std::vector<Cell> cells) {
    return CellSet(std::move(cells));
  }

  std::size_t size() const { return cells_.size(); }
  bool empty() const { return cells_.empty(); }
  std::span<const Cell> cells() const { return cells_; }
  const BBox& bbox() const { return bbox_; }

  bool contains(Cell c) const {
    return std::binary_search(cells_.begin(), cells_.end(), c);
  }

  // Number of 4-neighbours of c inside the set (c itself need not belong).
  int degree(Cell c) const {
    int deg = 0;
    for (int d = 0; d < 4; ++d)
      deg += contains(step(c, static_cast<Dir>(d))) ? 1 : 0;
    return deg;
  }

  bool is_connected() const {
    if (cells_.empty()) return true;
    std::vector<Cell> stack{cells_.front()};
    std::unordered_set<Cell, CellHash> seen{cells_.front()};
    while (!stack.empty()) {
      const Cell c = stack.back();
      stack.pop_back();
      for (int d = 0; d < 4; ++d) {
        const Cell n = step(c, static_cast<Dir>(d));
        if (contains(n) && seen.insert(n).second) stack.push_back(n);
      }
    }
    return seen.size() == cells_.size();
  }

  CellSet translated(int dx, int dy) const {
    std::vector<Cell> out;
    out.reserve(cells_.size());
    for (Cell c : cells_) out.push_back(make_cell(c.x + dx, c.y + dy));
    return CellSet(std::move(out));  // translation preserves order
  }

  // Translation that puts the bounding box corner at the origin.
  CellSet normalized() const {
    if (cells_.empty()) return {};
    return translated(-bbox_.min_x, -bbox_.min_y);
  }

  friend auto operator<=>(const CellSet& a, const CellSet& b) {
    return a.cells_ <=> b.cells_;
  }
  friend bool operator==(const CellSet& a, const CellSet& b) {
    return a.cells_ == b.cells_;
  }

 private:
  explicit CellSet(std::vector<Cell> sorted) : cells_(std::move(sorted)) {
    bbox_ = bounding_box(cells_);
  }

  std::vector<Cell> cells_;
  BBox bbox_;
};

// ---------------------------------------------------------------------------
// The 8 lattice isometries fixing the origin (the dihedral group of the
// square), as integer 2x2 matrices.

struct Isometry {
  std::int8_t a, b, c, d;  // (x, y) -> (a x + b y, c x + d y)

  constexpr Cell apply(Cell p) const {
    return make_cell(a * p.x + b * p.y, c * p.x + d * p.y);
  }
};

inline constexpr std::array<Isometry, 8> kIsometries = {{
    {1, 0, 0, 1},    // identity
    {0, -1, 1, 0},   // rotate 90
    {-1, 0, 0, -1},  // rotate 180
    {0, 1, -1, 0},   // rotate 270
    {-1, 0, 0, 1},   // mirror x
    {1, 0, 0, -1},   // mirror y
    {0, 1, 1, 0},    // transpose
    {0, -1, -1, 0},  // anti-transpose
}};

// How each isometry permutes the four step directions.
inline constexpr std::array<std::array<Dir, 4>, 8> dir_permutations() {
  std::array<std::array<Dir, 4>, 8> out{};
  for (int g = 0; g < 8; ++g) {
    for (int d = 0; d < 4; ++d) {
      const Cell image = kIsometries[g].apply(kDirOffset[d]);
      for (int e = 0; e < 4; ++e) {
        if (kDirOffset[e] == image) out[g][d] = static_cast<Dir>(e);
      }
    }
  }
  return out;
}

inline constexpr std::array<std::array<Dir, 4>, 8> kDirPerm = dir_permutations();

inline std::vector<Cell> transformed(std::span<const Cell> cells, const Isometry& g) {
  std::vector<Cell> out;
  out.reserve(cells.size());
  for (Cell c : cells) out.push_back(g.apply(c));
  return out;
}

inline CellSet transformed(const CellSet& s, const Isometry& g) {
  auto cells = transformed(s.cells(), g);
  std::sort(cells.begin(), cells.end());
  return CellSet::from_sorted_unique(std::move(cells));
}

// ---------------------------------------------------------------------------
// Canonical keys: a fingerprint invariant under translation and the 8
// isometries, and distinct for non-isometric sets. The canonical placement is
// the lexicographically smallest of the 8 translation-normalized images.

struct CanonicalKey {
  std::string bytes;

  friend auto operator<=>(const CanonicalKey&, const CanonicalKey&) = default;
};

struct CanonicalKeyHash {
  std::size_t operator()(const CanonicalKey& k) const noexcept {
    return std::hash<std::string>{}(k.bytes);
  }
};

namespace detail {

inline void normalize_in_place(std::vector<Cell>& cells) {
  std::int16_t mx = std::numeric_limits<std::int16_t>::max();
  std::int16_t my = std::numeric_limits<std::int16_t>::max();
  for (Cell c : cells) {
    mx = std::min(mx, c.x);
    my = std::min(my, c.y);
  }
  for (Cell& c : cells) {
    c.x = static_cast<std::int16_t>(c.x - mx);
    c.y = static_cast<std::int16_t>(c.y - my);
  }
  std::sort(cells.begin(), cells.end());
}

}  // namespace detail

inline CanonicalKey canonical_key(std::span<const Cell> cells) {
  if (cells.empty()) raise(Errc::InvalidSpec, "canonical_key of empty set");
  std::vector<Cell> best;
  std::vector<Cell> image;
  for (int g = 0; g < 8; ++g) {
    image = transformed(cells, kIsometries[g]);
    detail::normalize_in_place(image);
    if (g == 0 || image < best) best = image;
  }
  if (bounding_box(best).width() > 256 || bounding_box(best).height() > 256)
    raise(Errc::FrameOverflow, "cell set exceeds the 256x256 envelope");
  CanonicalKey key;
  key.bytes.reserve(best.size() * 2);
  for (Cell c : best) {
    key.bytes.push_back(static_cast<char>(static_cast<unsigned char>(c.x)));
    key.bytes.push_back(static_cast<char>(static_cast<unsigned char>(c.y)));
  }
  return key;
}

inline CanonicalKey canonical_key(const CellSet& s) { return canonical_key(s.cells()); }

// Reconstructs the canonical placement from a key.
inline CellSet cells_from_key(const CanonicalKey& key) {
  std::vector<Cell> cells;
  cells.reserve(key.bytes.size() / 2);
  for (std::size_t i = 0; i + 1 < key.bytes.size(); i += 2) {
    cells.push_back(make_cell(static_cast<unsigned char>(key.bytes[i]),
                              static_cast<unsigned char>(key.bytes[i + 1])));
  }
  return CellSet::from_sorted_unique(std::move(cells));
}

// ---------------------------------------------------------------------------
// Word codec

namespace detail {

// Letters of the same walk traversed end-to-start.
inline std::string reversed_word(std::string_view letters) {
  std::string out;
  out.reserve(letters.size());
  for (auto it = letters.rbegin(); it != letters.rend(); ++it)
    out.push_back(dir_letter(opposite(parse_dir(*it))));
  return out;
}

inline std::string relabeled_word(std::string_view letters, int g) {
  std::string out;
  out.reserve(letters.size());
  for (char ch : letters)
    out.push_back(dir_letter(kDirPerm[g][static_cast<int>(parse_dir(ch))]));
  return out;
}

}  // namespace detail

// Decodes a direction word into its ordered cell sequence, validating the
// walk invariants: self-avoidance, closure for closed words, and the induced
// degree profile (endpoints 1 / interior 2 for open walks, all 2 for loops).
inline std::vector<Cell> decode_word(const DirectionWord& word, Cell origin = {}) {
  const std::size_t n = word.letters.size();
  if (word.closed && n < 4)
    raise(Errc::NotClosed, "closed walk shorter than 4 steps");

  std::vector<Cell> cells;
  cells.reserve(n + 1);
  cells.push_back(origin);
  std::unordered_set<Cell, CellHash> seen;
  seen.reserve(2 * n + 2);
  seen.insert(origin);

  const std::size_t steps = word.closed ? n - 1 : n;
  for (std::size_t i = 0; i < steps; ++i) {
    const Cell next = step(cells.back(), parse_dir(word.letters[i]));
    if (seen.count(next))
      raise(Errc::RevisitedCell,
            "walk revisits a cell at step " + std::to_string(i + 1));
    const bool closing = word.closed && i + 1 == steps;
    if (closing && !adjacent(next, origin))
      raise(Errc::NotClosed, "closed walk does not return to its origin");
    int deg = 0;
    for (int d = 0; d < 4; ++d) deg += seen.count(step(next, static_cast<Dir>(d)));
    const int want = closing ? 2 : 1;  // closing cell also touches the origin
    if (deg != want)
      raise(Errc::ChordViolation,
            "walk cell has an extra adjacency at step " + std::to_string(i + 1));
    cells.push_back(next);
    seen.insert(next);
  }
  if (word.closed) {
    const Cell back = step(cells.back(), parse_dir(word.letters[n - 1]));
    if (back != origin)
      raise(Errc::NotClosed, "closed walk does not return to its origin");
  }
  return cells;
}

// Ordered endpoint-to-endpoint traversal of a path polyomino.
inline std::vector<Cell> path_order(const CellSet& s) {
  if (s.empty()) raise(Errc::NotAPath, "empty set");
  if (s.size() == 1) return {s.cells()[0]};
  std::vector<Cell> ends;
  for (Cell c : s.cells()) {
    const int deg = s.degree(c);
    if (deg == 1) ends.push_back(c);
    else if (deg != 2) raise(Errc::NotAPath, "degree profile is not a path");
  }
  if (ends.size() != 2) raise(Errc::NotAPath, "path needs exactly two endpoints");

  std::vector<Cell> order{ends.front()};
  Cell prev = ends.front(), cur = ends.front();
  while (true) {
    bool advanced = false;
    for (int d = 0; d < 4; ++d) {
      const Cell n = step(cur, static_cast<Dir>(d));
      if (n != prev && s.contains(n)) {
        order.push_back(n);
        prev = cur;
        cur = n;
        advanced = true;
        break;
      }
    }
    if (!advanced) break;
  }
  if (order.size() != s.size())
    raise(Errc::NotAPath, "path cells are not connected");
  return order;
}

// Letters of an ordered walk.
inline std::string letters_of(std::span<const Cell> walk, bool closed = false) {
  std::string out;
  if (walk.size() < 2) return out;
  out.reserve(walk.size());
  for (std::size_t i = 0; i + 1 < walk.size(); ++i)
    out.push_back(dir_letter(dir_between(walk[i], walk[i + 1])));
  if (closed) out.push_back(dir_letter(dir_between(walk.back(), walk.front())));
  return out;
}

// Encodes a path polyomino as the lexicographically smaller of its two
// endpoint-to-endpoint words. decode_word(encode_path(p)) reproduces p up to
// translation.
inline DirectionWord encode_path(const CellSet& s) {
  const auto order = path_order(s);
  std::string w = letters_of(order);
  std::string r = detail::reversed_word(w);
  return DirectionWord{std::min(w, r), false};
}

// Smallest word over both traversal directions and all 8 relabelings;
// identical for isometric paths, distinct otherwise.
inline std::string canonical_path_word(std::string_view letters) {
  std::string best;
  bool first = true;
  const std::string rev = detail::reversed_word(letters);
  for (int g = 0; g < 8; ++g) {
    for (const std::string_view w : {std::string_view(letters), std::string_view(rev)}) {
      std::string cand = detail::relabeled_word(w, g);
      if (first || cand < best) {
        best = std::move(cand);
        first = false;
      }
    }
  }
  return best;
}

// Same for loop words: also minimized over the starting cell (rotation of
// the letter cycle) and traversal direction.
inline std::string canonical_loop_word(std::string_view letters) {
  const std::size_t n = letters.size();
  std::string best;
  bool first = true;
  std::string fwd(letters);
  std::string rev = detail::reversed_word(letters);
  for (std::string* base : {&fwd, &rev}) {
    for (std::size_t r = 0; r < n; ++r) {
      std::string rot = base->substr(r) + base->substr(0, r);
      for (int g = 0; g < 8; ++g) {
        std::string cand = detail::relabeled_word(rot, g);
        if (first || cand < best) {
          best = std::move(cand);
          first = false;
        }
      }
    }
  }
  return best;
}

}  // namespace polyrule
