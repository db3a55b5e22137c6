#pragma once

// Dyadic cubes of the normalized root Q0 = [0,1)^n and their forward-in-time
// translates.  The last coordinate is time; the ambient domain is extended in
// time to [0,3) so that Q^{+,2} exists for every dyadic Q inside Q0.

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pjn/scalar.hpp"

namespace pjn {

inline constexpr int kMaxDim = 4;

// Resolution of a grid: n dimensions, (2^L)^{n-1} spatial cells times 3*2^L
// time cells.  Linear cell indices are row-major with time fastest.
struct GridShape {
  int n = 1;
  int level = 0;

  std::int64_t side() const { return std::int64_t{1} << level; }
  std::int64_t extent(int axis) const { return axis == n - 1 ? 3 * side() : side(); }
  std::int64_t stride(int axis) const;
  std::int64_t cell_count() const;
  // Cells inside Q0 itself.
  std::int64_t root_cell_count() const;

  // Volume of one cell, 2^{-L n}.
  template <Scalar S>
  S cell_volume() const {
    return pow2<S>(-level * n);
  }

  // Throws InvalidSpec when n or L is out of the supported range.
  void validate() const;

  bool operator==(const GridShape&) const = default;
};

// Axis-aligned box of grid cells, [lo, lo + size) per axis.
struct CellBox {
  int n = 1;
  std::array<std::int64_t, kMaxDim> lo{};
  std::array<std::int64_t, kMaxDim> size{};

  std::int64_t count() const;
  bool contains(const CellBox& other) const;
  bool operator==(const CellBox&) const = default;
};

// Every cell of the grid.
CellBox full_box(const GridShape& shape);

class DyadicCube {
 public:
  DyadicCube() = default;
  DyadicCube(int n, int level, std::span<const std::int64_t> spatial, std::int64_t time);

  static DyadicCube root(int n);

  int dim() const { return n_; }
  int level() const { return level_; }
  std::int64_t spatial(int axis) const { return spatial_[static_cast<std::size_t>(axis)]; }
  std::int64_t time() const { return time_; }

  // Index along `axis`, where axis n-1 is time.
  std::int64_t coord(int axis) const { return axis == n_ - 1 ? time_ : spatial(axis); }

  // Time index below 2^level.
  bool inside_root() const { return time_ < (std::int64_t{1} << level_); }

  template <Scalar S>
  S volume() const {
    return pow2<S>(-level_ * n_);
  }

  // Cells covered by this cube on a grid of resolution `grid_level`.
  CellBox box(int grid_level) const;

  // "(k; s0,...; t)" for messages and reports.
  std::string str() const;

  bool operator==(const DyadicCube&) const = default;

 private:
  std::int8_t n_ = 1;
  std::int8_t level_ = 0;
  std::array<std::int64_t, kMaxDim - 1> spatial_{};
  std::int64_t time_ = 0;
};

struct DyadicCubeHash {
  std::size_t operator()(const DyadicCube& c) const noexcept;
};

// Q+ : same level and spatial indices, time index + 1.
DyadicCube forward(const DyadicCube& c);
// Q^{+,2} = (Q+)+.
DyadicCube forward2(const DyadicCube& c);

// The 2^n dyadic children, in row-major order (time fastest).  Requires
// c inside Q0 and c.level() < grid_level.
std::vector<DyadicCube> children(const DyadicCube& c, int grid_level);

std::optional<DyadicCube> parent(const DyadicCube& c);

// The aligned box at `level` <= c.level() containing c.  Defined for any
// cube of the extended domain, including forward translates.
DyadicCube aligned_ancestor(const DyadicCube& c, int level);

enum class Relation { disjoint, a_contains_b, b_contains_a, equal, partial_overlap };

std::string to_string(Relation r);

// Set relation of two half-open boxes, decided per axis.
Relation relation(const DyadicCube& a, const DyadicCube& b);
Relation relation(const CellBox& a, const CellBox& b);

// Box covering Q followed by Q+ (contiguous in time).
CellBox union_with_forward(const DyadicCube& c, int grid_level);

// Throws OutOfDomain unless c and its first `translates` forward translates
// lie in the extended domain at resolution `shape`.
void require_in_domain(const DyadicCube& c, const GridShape& shape, int translates = 0);

// Calls fn(linear_index) for every cell of `box`, in increasing index order.
template <class Fn>
void for_each_cell(const GridShape& shape, const CellBox& box, Fn&& fn) {
  const int n = shape.n;
  const std::int64_t t_lo = box.lo[static_cast<std::size_t>(n - 1)];
  const std::int64_t t_len = box.size[static_cast<std::size_t>(n - 1)];
  std::array<std::int64_t, kMaxDim> idx{};
  std::array<std::int64_t, kMaxDim> stride{};
  for (int a = 0; a < n - 1; ++a) {
    idx[static_cast<std::size_t>(a)] = box.lo[static_cast<std::size_t>(a)];
    stride[static_cast<std::size_t>(a)] = shape.stride(a);
  }
  while (true) {
    std::int64_t base = 0;
    for (int a = 0; a < n - 1; ++a) base += idx[static_cast<std::size_t>(a)] * stride[static_cast<std::size_t>(a)];
    base += t_lo;
    for (std::int64_t t = 0; t < t_len; ++t) fn(base + t);
    int a = n - 2;
    for (; a >= 0; --a) {
      const auto ua = static_cast<std::size_t>(a);
      if (++idx[ua] < box.lo[ua] + box.size[ua]) break;
      idx[ua] = box.lo[ua];
    }
    if (a < 0) break;
  }
}

// Preorder traversal of the dyadic subtree below `root`, down to grid_level.
// fn(cube) returns false to skip the cube's descendants.
template <class Fn>
void visit_subtree(const DyadicCube& root, int grid_level, Fn&& fn) {
  if (!fn(root) || root.level() >= grid_level) return;
  for (const DyadicCube& child : children(root, grid_level)) visit_subtree(child, grid_level, fn);
}

// Number of cubes in the dyadic subtree of `root` down to grid_level.
std::int64_t subtree_size(const DyadicCube& root, int grid_level);

}  // namespace pjn
