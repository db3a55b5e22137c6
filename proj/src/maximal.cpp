#include "pjn/maximal.hpp"

#include <algorithm>

#include "pjn/errors.hpp"

namespace pjn {

std::string to_string(MaximalVariant v) { return v == MaximalVariant::grid ? "grid" : "augmented"; }

MaximalVariant parse_variant(std::string_view text) {
  if (text == "grid") return MaximalVariant::grid;
  if (text == "augmented") return MaximalVariant::augmented;
  throw InvalidParams("variant must be 'grid' or 'augmented', got '" + std::string(text) + "'");
}

template <Scalar S>
const S& MaximalField<S>::at_cell(std::int64_t cell) const {
  const auto it = std::lower_bound(cells.begin(), cells.end(), cell);
  if (it == cells.end() || *it != cell) throw OutOfDomain("cell " + std::to_string(cell) + " is not in the field's root");
  return values[static_cast<std::size_t>(it - cells.begin())];
}

template <Scalar S>
MaximalField<S> maximal_function(const GridFunction<S>& f, const DyadicCube& root, MaximalVariant variant) {
  const int grid_level = f.level();
  MaximalField<S> field = maximal_field_from<S>(f.shape(), root, [&](const DyadicCube& q) {
    return box_average(f, forward(q).box(grid_level));
  });
  field.variant = variant;
  if (variant == MaximalVariant::augmented) {
    for (std::size_t i = 0; i < field.cells.size(); ++i) {
      const S& own = f.at(field.cells[i]);
      if (own > field.values[i]) field.values[i] = own;
    }
  }
  return field;
}

template struct MaximalField<double>;
template struct MaximalField<Rational>;
template MaximalField<double> maximal_function(const GridFunction<double>&, const DyadicCube&, MaximalVariant);
template MaximalField<Rational> maximal_function(const GridFunction<Rational>&, const DyadicCube&, MaximalVariant);

}  // namespace pjn
