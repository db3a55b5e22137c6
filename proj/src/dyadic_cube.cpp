#include "pjn/dyadic_cube.hpp"

#include <sstream>

#include "pjn/errors.hpp"

namespace pjn {

namespace {

constexpr std::int64_t kMaxCells = std::int64_t{1} << 30;

enum class AxisRelation { disjoint, equal, a_contains_b, b_contains_a, partial };

AxisRelation compare_intervals(std::int64_t a_lo, std::int64_t a_hi, std::int64_t b_lo, std::int64_t b_hi) {
  if (a_hi <= b_lo || b_hi <= a_lo) return AxisRelation::disjoint;
  if (a_lo == b_lo && a_hi == b_hi) return AxisRelation::equal;
  if (a_lo <= b_lo && b_hi <= a_hi) return AxisRelation::a_contains_b;
  if (b_lo <= a_lo && a_hi <= b_hi) return AxisRelation::b_contains_a;
  return AxisRelation::partial;
}

Relation combine(std::span<const AxisRelation> axes) {
  bool all_equal = true;
  bool a_covers = true;
  bool b_covers = true;
  for (AxisRelation r : axes) {
    if (r == AxisRelation::disjoint) return Relation::disjoint;
    all_equal = all_equal && r == AxisRelation::equal;
    a_covers = a_covers && (r == AxisRelation::equal || r == AxisRelation::a_contains_b);
    b_covers = b_covers && (r == AxisRelation::equal || r == AxisRelation::b_contains_a);
  }
  if (all_equal) return Relation::equal;
  if (a_covers) return Relation::a_contains_b;
  if (b_covers) return Relation::b_contains_a;
  return Relation::partial_overlap;
}

}  // namespace

std::int64_t GridShape::stride(int axis) const {
  std::int64_t s = 1;
  for (int a = n - 1; a > axis; --a) s *= extent(a);
  return s;
}

std::int64_t GridShape::cell_count() const { return stride(-1); }

std::int64_t GridShape::root_cell_count() const { return cell_count() / 3; }

void GridShape::validate() const {
  if (n < 1 || n > kMaxDim) {
    throw InvalidSpec("dimension n must be in [1, " + std::to_string(kMaxDim) + "], got " + std::to_string(n));
  }
  if (level < 0 || level * n > 30 || cell_count() > kMaxCells) {
    throw InvalidSpec("resolution L=" + std::to_string(level) + " is too large for n=" + std::to_string(n));
  }
}

std::int64_t CellBox::count() const {
  std::int64_t c = 1;
  for (int a = 0; a < n; ++a) c *= size[static_cast<std::size_t>(a)];
  return c;
}

CellBox full_box(const GridShape& shape) {
  CellBox b;
  b.n = shape.n;
  for (int a = 0; a < shape.n; ++a) b.size[static_cast<std::size_t>(a)] = shape.extent(a);
  return b;
}

bool CellBox::contains(const CellBox& other) const {
  return relation(*this, other) == Relation::a_contains_b || *this == other;
}

DyadicCube::DyadicCube(int n, int level, std::span<const std::int64_t> spatial, std::int64_t time)
    : n_(static_cast<std::int8_t>(n)), level_(static_cast<std::int8_t>(level)), time_(time) {
  if (n < 1 || n > kMaxDim) throw InvalidSpec("cube dimension out of range: " + std::to_string(n));
  if (level < 0 || level > 30) throw InvalidSpec("cube level out of range: " + std::to_string(level));
  if (static_cast<int>(spatial.size()) != n - 1) {
    throw InvalidSpec("cube needs " + std::to_string(n - 1) + " spatial indices");
  }
  const std::int64_t side = std::int64_t{1} << level;
  for (std::size_t i = 0; i < spatial.size(); ++i) {
    if (spatial[i] < 0 || spatial[i] >= side) throw OutOfDomain("spatial index out of range in cube");
    spatial_[i] = spatial[i];
  }
  if (time < 0 || time >= 3 * side) throw OutOfDomain("time index out of range in cube");
}

DyadicCube DyadicCube::root(int n) {
  const std::array<std::int64_t, kMaxDim - 1> zeros{};
  return DyadicCube(n, 0, std::span(zeros.data(), static_cast<std::size_t>(n - 1)), 0);
}

CellBox DyadicCube::box(int grid_level) const {
  if (grid_level < level_) throw RefinementBelowGrid("cube " + str() + " is finer than the grid");
  const int shift = grid_level - level_;
  CellBox b;
  b.n = n_;
  for (int a = 0; a < n_; ++a) {
    b.lo[static_cast<std::size_t>(a)] = coord(a) << shift;
    b.size[static_cast<std::size_t>(a)] = std::int64_t{1} << shift;
  }
  return b;
}

std::string DyadicCube::str() const {
  std::ostringstream os;
  os << "(" << static_cast<int>(level_) << ";";
  for (int a = 0; a + 1 < n_; ++a) os << (a ? "," : "") << spatial(a);
  os << ";" << time_ << ")";
  return os.str();
}

std::size_t DyadicCubeHash::operator()(const DyadicCube& c) const noexcept {
  std::size_t h = static_cast<std::size_t>(c.level()) * 0x9e3779b97f4a7c15ULL;
  for (int a = 0; a < c.dim(); ++a) {
    h ^= static_cast<std::size_t>(c.coord(a)) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
  }
  return h;
}

DyadicCube forward(const DyadicCube& c) {
  const std::int64_t limit = 3 * (std::int64_t{1} << c.level());
  if (c.time() + 1 >= limit) throw OutOfDomain("forward translate of " + c.str() + " leaves the extended domain");
  std::array<std::int64_t, kMaxDim - 1> s{};
  for (int a = 0; a + 1 < c.dim(); ++a) s[static_cast<std::size_t>(a)] = c.spatial(a);
  return DyadicCube(c.dim(), c.level(), std::span(s.data(), static_cast<std::size_t>(c.dim() - 1)), c.time() + 1);
}

DyadicCube forward2(const DyadicCube& c) { return forward(forward(c)); }

std::vector<DyadicCube> children(const DyadicCube& c, int grid_level) {
  if (!c.inside_root()) throw OutOfDomain("cube " + c.str() + " does not lie inside Q0");
  if (c.level() >= grid_level) throw RefinementBelowGrid("cannot bisect " + c.str() + " below grid level " + std::to_string(grid_level));
  const int n = c.dim();
  std::vector<DyadicCube> out;
  out.reserve(std::size_t{1} << n);
  std::array<std::int64_t, kMaxDim - 1> s{};
  for (unsigned mask = 0; mask < (1U << n); ++mask) {
    // Bit (n-1-a) selects the upper half along axis a, giving time fastest.
    for (int a = 0; a + 1 < n; ++a) {
      s[static_cast<std::size_t>(a)] = 2 * c.spatial(a) + ((mask >> (n - 1 - a)) & 1U);
    }
    const std::int64_t t = 2 * c.time() + (mask & 1U);
    out.emplace_back(n, c.level() + 1, std::span(s.data(), static_cast<std::size_t>(n - 1)), t);
  }
  return out;
}

std::optional<DyadicCube> parent(const DyadicCube& c) {
  if (c.level() == 0) return std::nullopt;
  return aligned_ancestor(c, c.level() - 1);
}

DyadicCube aligned_ancestor(const DyadicCube& c, int level) {
  if (level < 0 || level > c.level()) throw InvalidSpec("ancestor level out of range");
  const int shift = c.level() - level;
  std::array<std::int64_t, kMaxDim - 1> s{};
  for (int a = 0; a + 1 < c.dim(); ++a) s[static_cast<std::size_t>(a)] = c.spatial(a) >> shift;
  return DyadicCube(c.dim(), level, std::span(s.data(), static_cast<std::size_t>(c.dim() - 1)), c.time() >> shift);
}

std::string to_string(Relation r) {
  switch (r) {
    case Relation::disjoint: return "disjoint";
    case Relation::a_contains_b: return "a-contains-b";
    case Relation::b_contains_a: return "b-contains-a";
    case Relation::equal: return "equal";
    case Relation::partial_overlap: return "partial-overlap";
  }
  return "?";
}

Relation relation(const CellBox& a, const CellBox& b) {
  std::array<AxisRelation, kMaxDim> axes{};
  for (int i = 0; i < a.n; ++i) {
    const auto u = static_cast<std::size_t>(i);
    axes[u] = compare_intervals(a.lo[u], a.lo[u] + a.size[u], b.lo[u], b.lo[u] + b.size[u]);
  }
  return combine(std::span(axes.data(), static_cast<std::size_t>(a.n)));
}

Relation relation(const DyadicCube& a, const DyadicCube& b) {
  if (a.dim() != b.dim()) throw InvalidSpec("relation of cubes with different dimensions");
  const int finest = std::max(a.level(), b.level());
  return relation(a.box(finest), b.box(finest));
}

CellBox union_with_forward(const DyadicCube& c, int grid_level) {
  CellBox b = c.box(grid_level);
  b.size[static_cast<std::size_t>(c.dim() - 1)] *= 2;
  return b;
}

void require_in_domain(const DyadicCube& c, const GridShape& shape, int translates) {
  if (c.dim() != shape.n) throw OutOfDomain("cube " + c.str() + " has the wrong dimension for the grid");
  if (c.level() > shape.level) throw RefinementBelowGrid("cube " + c.str() + " is finer than the grid");
  const std::int64_t limit = 3 * (std::int64_t{1} << c.level());
  if (c.time() + translates >= limit) {
    throw OutOfDomain("translate " + std::to_string(translates) + " of " + c.str() + " leaves the extended domain");
  }
}

std::int64_t subtree_size(const DyadicCube& root, int grid_level) {
  std::int64_t total = 0;
  std::int64_t at_level = 1;
  for (int k = root.level(); k <= grid_level; ++k) {
    total += at_level;
    at_level <<= root.dim();
  }
  return total;
}

}  // namespace pjn
