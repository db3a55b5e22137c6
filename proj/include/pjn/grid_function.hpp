#pragma once

// Piecewise-constant functions on the time-extended grid, exact averaging
// over dyadic cubes via n-dimensional prefix sums, and cell sets.

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "pjn/dyadic_cube.hpp"
#include "pjn/scalar.hpp"

namespace pjn {

// Inclusive n-dimensional prefix sums over a full grid.  A box sum is the
// 2^n-term inclusion-exclusion of table entries.
template <Scalar S>
class PrefixTable {
 public:
  PrefixTable() = default;
  PrefixTable(const GridShape& shape, std::span<const S> values);

  S box_sum(const CellBox& box) const;

 private:
  GridShape shape_;
  std::array<std::int64_t, kMaxDim> padded_stride_{};
  std::vector<S> table_;
};

template <Scalar S>
class GridFunction {
 public:
  GridFunction() = default;
  // `values` has shape.cell_count() entries in time-fastest order.
  // `denominator` is the declared fixed-mode denominator (exact mode only);
  // every value times the denominator must then be an integer.
  GridFunction(GridShape shape, std::vector<S> values, std::int64_t denominator = 0);

  const GridShape& shape() const { return shape_; }
  int dim() const { return shape_.n; }
  int level() const { return shape_.level; }
  std::span<const S> values() const { return values_; }
  const S& at(std::int64_t cell) const { return values_[static_cast<std::size_t>(cell)]; }
  const PrefixTable<S>& prefix() const { return prefix_; }

  // Declared fixed-mode denominator, 0 when none was declared.
  std::int64_t denominator() const { return denominator_; }

  S box_sum(const CellBox& box) const { return prefix_.box_sum(box); }

  // New function with every value mapped through fn.
  GridFunction map(const std::function<S(const S&)>& fn) const;

 private:
  GridShape shape_;
  std::vector<S> values_;
  PrefixTable<S> prefix_;
  std::int64_t denominator_ = 0;
};

// Mean of f over the cube, via the prefix table.
template <Scalar S>
S average(const GridFunction<S>& f, const DyadicCube& c);

// Mean of f over an arbitrary cell box, via the prefix table.
template <Scalar S>
S box_average(const GridFunction<S>& f, const CellBox& box);

enum class Region { cube, cube_and_forward };

// Mean over `region` of base (Q, or Q followed by Q+) of
// max(f(x) - average(f, ref), 0).  Scans cells; no prefix shortcut exists
// for the positive part.
template <Scalar S>
S pos_part_average(const GridFunction<S>& f, Region region, const DyadicCube& base, const DyadicCube& ref);

// Mean over the box of max(f(x) - c, 0).
template <Scalar S>
S pos_part_box_average(const GridFunction<S>& f, const CellBox& box, const S& c);

// |{x in root : (f(x) - f_{root^{+,2}})^+ > lambda}|.
template <Scalar S>
S distribution_measure(const GridFunction<S>& f, const DyadicCube& root, const S& lambda);

// Smallest and largest cell value over a box.
template <Scalar S>
std::pair<S, S> value_range(const GridFunction<S>& f, const CellBox& box);

// Sorted set of linear cell indices.
class CellSet {
 public:
  CellSet() = default;
  explicit CellSet(std::vector<std::int64_t> sorted_cells);

  std::size_t size() const { return cells_.size(); }
  bool empty() const { return cells_.empty(); }
  std::span<const std::int64_t> cells() const { return cells_; }
  bool contains(std::int64_t cell) const;
  bool includes(const CellSet& other) const;

  template <Scalar S>
  S measure(const GridShape& shape) const {
    return S(static_cast<long>(cells_.size())) * shape.cell_volume<S>();
  }

  CellSet united(const CellSet& other) const;
  CellSet intersected(const CellSet& other) const;

  bool operator==(const CellSet&) const = default;

 private:
  std::vector<std::int64_t> cells_;
};

CellSet cells_of(const GridShape& shape, const CellBox& box);

}  // namespace pjn
