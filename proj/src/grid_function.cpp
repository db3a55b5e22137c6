#include "pjn/grid_function.hpp"

#include <algorithm>
#include <bit>
#include <iterator>

#include "pjn/errors.hpp"

namespace pjn {

template <Scalar S>
PrefixTable<S>::PrefixTable(const GridShape& shape, std::span<const S> values) : shape_(shape) {
  const int n = shape.n;
  std::int64_t total = 1;
  for (int a = n - 1; a >= 0; --a) {
    padded_stride_[static_cast<std::size_t>(a)] = total;
    total *= shape.extent(a) + 1;
  }
  table_.assign(static_cast<std::size_t>(total), S(0));

  for_each_cell(shape, full_box(shape), [&](std::int64_t idx) {
    // Recover coordinates from the linear index; padded index shifts each by one.
    std::int64_t rem = idx;
    std::int64_t padded = 0;
    for (int a = 0; a < n; ++a) {
      const std::int64_t st = shape.stride(a);
      const std::int64_t x = rem / st;
      rem -= x * st;
      padded += (x + 1) * padded_stride_[static_cast<std::size_t>(a)];
    }
    table_[static_cast<std::size_t>(padded)] = values[static_cast<std::size_t>(idx)];
  });

  // Running sums along each axis in turn.
  for (int a = 0; a < n; ++a) {
    const std::int64_t st = padded_stride_[static_cast<std::size_t>(a)];
    const std::int64_t len = shape.extent(a) + 1;
    for (std::int64_t i = 0; i < total; ++i) {
      const std::int64_t x = (i / st) % len;
      if (x == 0) continue;
      table_[static_cast<std::size_t>(i)] += table_[static_cast<std::size_t>(i - st)];
    }
  }
}

template <Scalar S>
S PrefixTable<S>::box_sum(const CellBox& box) const {
  const int n = shape_.n;
  S sum = S(0);
  for (unsigned mask = 0; mask < (1U << n); ++mask) {
    std::int64_t idx = 0;
    for (int a = 0; a < n; ++a) {
      const auto u = static_cast<std::size_t>(a);
      const std::int64_t x = ((mask >> a) & 1U) ? box.lo[u] + box.size[u] : box.lo[u];
      idx += x * padded_stride_[u];
    }
    const bool positive = ((n - std::popcount(mask)) % 2) == 0;
    if (positive) {
      sum += table_[static_cast<std::size_t>(idx)];
    } else {
      sum -= table_[static_cast<std::size_t>(idx)];
    }
  }
  return sum;
}

template <Scalar S>
GridFunction<S>::GridFunction(GridShape shape, std::vector<S> values, std::int64_t denom)
    : shape_(shape), values_(std::move(values)) {
  shape_.validate();
  if (static_cast<std::int64_t>(values_.size()) != shape_.cell_count()) {
    throw FormatError("values: expected " + std::to_string(shape_.cell_count()) + " cells, got " +
                      std::to_string(values_.size()));
  }
  if constexpr (is_exact_v<S>) {
    if (denom < 0) throw FormatError("denom: must be positive");
    if (denom > 0) {
      for (const S& v : values_) {
        const Rational scaled = v * denom;
        if (boost::multiprecision::denominator(scaled) != 1) {
          throw FormatError("values: " + exact_string(v) + " is not a multiple of 1/" + std::to_string(denom));
        }
      }
    }
    denominator_ = denom;
  }
  prefix_ = PrefixTable<S>(shape_, values_);
}

template <Scalar S>
GridFunction<S> GridFunction<S>::map(const std::function<S(const S&)>& fn) const {
  std::vector<S> out;
  out.reserve(values_.size());
  for (const S& v : values_) out.push_back(fn(v));
  return GridFunction(shape_, std::move(out));
}

template <Scalar S>
S box_average(const GridFunction<S>& f, const CellBox& box) {
  return f.box_sum(box) / S(static_cast<long>(box.count()));
}

template <Scalar S>
S average(const GridFunction<S>& f, const DyadicCube& c) {
  require_in_domain(c, f.shape());
  return box_average(f, c.box(f.level()));
}

template <Scalar S>
S pos_part_box_average(const GridFunction<S>& f, const CellBox& box, const S& c) {
  const auto values = f.values();
  if constexpr (is_exact_v<S>) {
    // sum_{v > c} v - c * #{v > c}: comparisons and additions only.
    S above_sum = 0;
    long above = 0;
    for_each_cell(f.shape(), box, [&](std::int64_t idx) {
      const S& v = values[static_cast<std::size_t>(idx)];
      if (v > c) {
        above_sum += v;
        ++above;
      }
    });
    above_sum -= c * above;
    return above_sum / S(static_cast<long>(box.count()));
  } else {
    double sum = 0.0;
    for_each_cell(f.shape(), box, [&](std::int64_t idx) {
      const double d = values[static_cast<std::size_t>(idx)] - c;
      if (d > 0) sum += d;
    });
    return sum / static_cast<double>(box.count());
  }
}

template <Scalar S>
S pos_part_average(const GridFunction<S>& f, Region region, const DyadicCube& base, const DyadicCube& ref) {
  require_in_domain(base, f.shape(), region == Region::cube_and_forward ? 1 : 0);
  const S c = average(f, ref);
  const CellBox box = region == Region::cube ? base.box(f.level()) : union_with_forward(base, f.level());
  return pos_part_box_average(f, box, c);
}

template <Scalar S>
S distribution_measure(const GridFunction<S>& f, const DyadicCube& root, const S& lambda) {
  if (lambda < 0) throw InvalidParams("distribution_measure requires lambda >= 0");
  require_in_domain(root, f.shape(), 2);
  const S threshold = average(f, forward2(root)) + lambda;
  long count = 0;
  const auto values = f.values();
  for_each_cell(f.shape(), root.box(f.level()), [&](std::int64_t idx) {
    if (values[static_cast<std::size_t>(idx)] > threshold) ++count;
  });
  return S(count) * f.shape().template cell_volume<S>();
}

template <Scalar S>
std::pair<S, S> value_range(const GridFunction<S>& f, const CellBox& box) {
  const auto values = f.values();
  bool first = true;
  S lo = 0;
  S hi = 0;
  for_each_cell(f.shape(), box, [&](std::int64_t idx) {
    const S& v = values[static_cast<std::size_t>(idx)];
    if (first || v < lo) lo = v;
    if (first || v > hi) hi = v;
    first = false;
  });
  return {lo, hi};
}

CellSet::CellSet(std::vector<std::int64_t> sorted_cells) : cells_(std::move(sorted_cells)) {}

bool CellSet::contains(std::int64_t cell) const { return std::binary_search(cells_.begin(), cells_.end(), cell); }

bool CellSet::includes(const CellSet& other) const {
  return std::includes(cells_.begin(), cells_.end(), other.cells_.begin(), other.cells_.end());
}

CellSet CellSet::united(const CellSet& other) const {
  std::vector<std::int64_t> out;
  out.reserve(cells_.size() + other.cells_.size());
  std::set_union(cells_.begin(), cells_.end(), other.cells_.begin(), other.cells_.end(), std::back_inserter(out));
  return CellSet(std::move(out));
}

CellSet CellSet::intersected(const CellSet& other) const {
  std::vector<std::int64_t> out;
  std::set_intersection(cells_.begin(), cells_.end(), other.cells_.begin(), other.cells_.end(),
                        std::back_inserter(out));
  return CellSet(std::move(out));
}

CellSet cells_of(const GridShape& shape, const CellBox& box) {
  std::vector<std::int64_t> out;
  out.reserve(static_cast<std::size_t>(box.count()));
  for_each_cell(shape, box, [&](std::int64_t idx) { out.push_back(idx); });
  return CellSet(std::move(out));
}

#define PJN_INSTANTIATE(S)                                                                                  \
  template class PrefixTable<S>;                                                                            \
  template class GridFunction<S>;                                                                           \
  template S average(const GridFunction<S>&, const DyadicCube&);                                            \
  template S box_average(const GridFunction<S>&, const CellBox&);                                           \
  template S pos_part_average(const GridFunction<S>&, Region, const DyadicCube&, const DyadicCube&);        \
  template S pos_part_box_average(const GridFunction<S>&, const CellBox&, const S&);                        \
  template S distribution_measure(const GridFunction<S>&, const DyadicCube&, const S&);                     \
  template std::pair<S, S> value_range(const GridFunction<S>&, const CellBox&);

PJN_INSTANTIATE(double)
PJN_INSTANTIATE(Rational)

#undef PJN_INSTANTIATE

}  // namespace pjn
