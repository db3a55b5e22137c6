#pragma once

// The forward-in-time dyadic maximal operator
//
//   M f(x) = max over dyadic Q in D(root), x in Q, of  mean_{Q+} f.
//
// The grid variant ranges over dyadic cubes down to the grid resolution.
// The augmented variant also takes the cell's own value into account,
// standing in for forward averages shrinking to f(x).

#include <cstdint>
#include <optional>
#include <vector>

#include "pjn/dyadic_cube.hpp"
#include "pjn/errors.hpp"
#include "pjn/grid_function.hpp"
#include "pjn/scalar.hpp"

namespace pjn {

enum class MaximalVariant { grid, augmented };

std::string to_string(MaximalVariant v);
MaximalVariant parse_variant(std::string_view text);

// One value per leaf cell of `root`.  `cells` holds the global linear
// indices of those cells in increasing order; `values` is parallel to it.
template <Scalar S>
struct MaximalField {
  DyadicCube root;
  MaximalVariant variant = MaximalVariant::grid;
  GridShape shape;
  std::vector<std::int64_t> cells;
  std::vector<S> values;

  // {x in root : M f(x) > lambda}.
  CellSet superlevel(const S& lambda) const {
    std::vector<std::int64_t> out;
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (values[i] > lambda) out.push_back(cells[i]);
    }
    return CellSet(std::move(out));
  }

  const S& at_cell(std::int64_t cell) const;
};

// Top-down pass carrying the running maximum of forward means along each
// root-to-leaf path.  forward_mean(Q) must return the mean over Q+ of the
// function in question.  Cost: one forward_mean call per dyadic subcube.
template <Scalar S, class ForwardMean>
MaximalField<S> maximal_field_from(const GridShape& shape, const DyadicCube& root, ForwardMean&& forward_mean) {
  require_in_domain(root, shape, 1);
  if (!root.inside_root()) throw OutOfDomain("maximal function root " + root.str() + " is not inside Q0");

  MaximalField<S> field;
  field.root = root;
  field.shape = shape;
  const CellBox box = root.box(shape.level);
  field.cells.reserve(static_cast<std::size_t>(box.count()));
  for_each_cell(shape, box, [&](std::int64_t idx) { field.cells.push_back(idx); });
  field.values.assign(field.cells.size(), S(0));

  const int n = shape.n;
  std::array<std::int64_t, kMaxDim> local_stride{};
  {
    std::int64_t s = 1;
    for (int a = n - 1; a >= 0; --a) {
      local_stride[static_cast<std::size_t>(a)] = s;
      s *= box.size[static_cast<std::size_t>(a)];
    }
  }

  auto descend = [&](auto&& self, const DyadicCube& q, const S* running) -> void {
    S m = forward_mean(q);
    if (running != nullptr && m < *running) m = *running;
    if (q.level() == shape.level) {
      std::int64_t local = 0;
      for (int a = 0; a < n; ++a) {
        const auto u = static_cast<std::size_t>(a);
        local += (q.coord(a) - box.lo[u]) * local_stride[u];
      }
      field.values[static_cast<std::size_t>(local)] = std::move(m);
      return;
    }
    for (const DyadicCube& child : children(q, shape.level)) self(self, child, &m);
  };
  descend(descend, root, nullptr);
  return field;
}

// M f on the leaves of root.  Requires root inside Q0.
template <Scalar S>
MaximalField<S> maximal_function(const GridFunction<S>& f, const DyadicCube& root, MaximalVariant variant);

}  // namespace pjn
