#include "pjn/decomposition.hpp"

#include <algorithm>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

#include "pjn/errors.hpp"

namespace pjn {

template <Scalar S>
S Decomposition<S>::stopping_volume() const {
  S total = S(0);
  for (const DyadicCube& q : stopping) total += q.template volume<S>();
  return total;
}

template <Scalar S>
CellSet Decomposition<S>::stopping_cells(const GridShape& shape) const {
  std::vector<std::int64_t> out;
  for (const DyadicCube& q : stopping) {
    for_each_cell(shape, q.box(shape.level), [&](std::int64_t idx) { out.push_back(idx); });
  }
  std::sort(out.begin(), out.end());
  return CellSet(std::move(out));
}

Subfamily select_subfamily(std::span<const DyadicCube> stopping) {
  std::unordered_map<DyadicCube, std::size_t, DyadicCubeHash> by_forward;
  std::vector<DyadicCube> fwd;
  fwd.reserve(stopping.size());
  for (std::size_t i = 0; i < stopping.size(); ++i) {
    fwd.push_back(forward(stopping[i]));
    if (!by_forward.emplace(fwd.back(), i).second) {
      throw std::logic_error("two stopping cubes share the forward translate " + fwd.back().str());
    }
  }

  // Coarsest forward translate containing Q_i+ (possibly Q_i+ itself).
  std::vector<std::size_t> top(stopping.size());
  for (std::size_t i = 0; i < stopping.size(); ++i) {
    top[i] = i;
    for (int level = 0; level < fwd[i].level(); ++level) {
      const auto it = by_forward.find(aligned_ancestor(fwd[i], level));
      if (it != by_forward.end()) {
        top[i] = it->second;
        break;
      }
    }
  }

  Subfamily out;
  std::vector<std::size_t> slot(stopping.size(), 0);
  for (std::size_t i = 0; i < stopping.size(); ++i) {
    if (top[i] == i) {
      slot[i] = out.members.size();
      out.members.push_back(i);
    }
  }
  out.groups.resize(out.members.size());
  for (std::size_t i = 0; i < stopping.size(); ++i) out.groups[slot[top[i]]].push_back(i);
  return out;
}

template <Scalar S>
void require_nonnegative(const GridFunction<S>& f, const CellBox& box, const char* operation) {
  const auto values = f.values();
  for_each_cell(f.shape(), box, [&](std::int64_t idx) {
    if (values[static_cast<std::size_t>(idx)] < 0) {
      throw NegativeInput(std::string(operation) + " requires f >= 0; cell " + std::to_string(idx) + " has value " +
                          decimal_string(values[static_cast<std::size_t>(idx)]));
    }
  });
}

template <Scalar S>
Decomposition<S> cz_decompose(const GridFunction<S>& f, const DyadicCube& root, const S& lambda) {
  require_in_domain(root, f.shape(), 2);
  if (!root.inside_root()) throw OutOfDomain("decomposition root " + root.str() + " is not inside Q0");
  const int grid_level = f.level();
  require_nonnegative(f, union_with_forward(root, grid_level), "cz_decompose");

  Decomposition<S> d;
  d.lambda = lambda;
  d.root = root;
  visit_subtree(root, grid_level, [&](const DyadicCube& q) {
    if (box_average(f, forward(q).box(grid_level)) > lambda) {
      d.stopping.push_back(q);
      return false;
    }
    return true;
  });
  Subfamily sub = select_subfamily(d.stopping);
  d.subfamily = std::move(sub.members);
  d.groups = std::move(sub.groups);
  return d;
}

template <Scalar S>
VerificationReport check_stopping(const GridFunction<S>& f, const Decomposition<S>& d,
                                  const MaximalField<S>& grid_field) {
  const int grid_level = f.level();
  VerificationReport report;

  InequalityRecord p1{.id = "p1", .relation = "<", .exact = is_exact_v<S>};
  InequalityRecord parent_rec{.id = "p1-parent", .relation = "<=", .exact = is_exact_v<S>};
  bool have_min = false;
  bool have_parent = false;
  S min_forward = d.lambda;
  S max_parent = S(0);
  for (const DyadicCube& q : d.stopping) {
    const S m = box_average(f, forward(q).box(grid_level));
    if (m <= d.lambda) p1.pass = false;
    if (!have_min || m < min_forward) min_forward = m;
    have_min = true;
    if (q == d.root) continue;
    const S pm = box_average(f, forward(*parent(q)).box(grid_level));
    if (pm > d.lambda) parent_rec.pass = false;
    if (!have_parent || pm > max_parent) max_parent = pm;
    have_parent = true;
  }
  p1.lhs = Quantity::of(d.lambda);
  p1.rhs = Quantity::of(min_forward);
  p1.note = "lambda < min_j mean_{Q_j+} f";
  parent_rec.lhs = Quantity::of(have_parent ? max_parent : S(0));
  parent_rec.rhs = Quantity::of(d.lambda);
  parent_rec.note = "max_j mean_{parent(Q_j)+} f <= lambda";
  report.add(std::move(p1));
  report.add(std::move(parent_rec));

  const CellSet union_cells = d.stopping_cells(f.shape());
  const CellSet level_set = grid_field.superlevel(d.lambda);
  InequalityRecord sup{.id = "superlevel", .relation = "==", .exact = true};
  sup.lhs = Quantity::of(union_cells.template measure<S>(f.shape()));
  sup.rhs = Quantity::of(level_set.template measure<S>(f.shape()));
  sup.pass = union_cells == level_set;
  sup.note = "union of stopping cubes equals {M f > lambda} as cell sets";
  report.add(std::move(sup));
  return report;
}

template <Scalar S>
VerificationReport check_subfamily(const GridShape& shape, const Decomposition<S>& d) {
  const int grid_level = shape.level;
  std::unordered_set<DyadicCube, DyadicCubeHash> member_forward;
  bool ok = true;
  for (std::size_t j : d.subfamily) {
    if (!member_forward.insert(forward(d.stopping[j])).second) ok = false;
  }
  // Aligned boxes overlap only by nesting, so pairwise non-overlap means no
  // member translate has a proper ancestor among the member translates.
  for (const DyadicCube& fc : member_forward) {
    for (int level = 0; level < fc.level(); ++level) {
      if (member_forward.contains(aligned_ancestor(fc, level))) ok = false;
    }
  }
  std::vector<int> seen(d.stopping.size(), 0);
  for (std::size_t g = 0; g < d.subfamily.size() && g < d.groups.size(); ++g) {
    const DyadicCube& head = d.stopping[d.subfamily[g]];
    const CellBox head_fwd = forward(head).box(grid_level);
    const CellBox head_span = union_with_forward(head, grid_level);
    for (std::size_t i : d.groups[g]) {
      ++seen[i];
      const DyadicCube& qi = d.stopping[i];
      if (!head_fwd.contains(forward(qi).box(grid_level))) ok = false;
      if (!head_span.contains(qi.box(grid_level))) ok = false;
    }
  }
  if (d.groups.size() != d.subfamily.size()) ok = false;
  // Exactly one member translate contains each Q_i+.
  for (std::size_t i = 0; i < d.stopping.size(); ++i) {
    const DyadicCube fi = forward(d.stopping[i]);
    int holders = 0;
    for (int level = 0; level <= fi.level(); ++level) {
      if (member_forward.contains(aligned_ancestor(fi, level))) ++holders;
    }
    if (holders != 1 || seen[i] != 1) ok = false;
  }

  VerificationReport report;
  InequalityRecord rec{.id = "subfamily", .relation = "==", .exact = true};
  rec.lhs = Quantity::of(static_cast<double>(d.subfamily.size()));
  rec.rhs = Quantity::of(static_cast<double>(d.stopping.size()));
  rec.pass = ok;
  rec.note = "members vs stopping cubes; members disjoint, groups partition, Q_i within Q~_j u Q~_j+";
  report.add(std::move(rec));
  return report;
}

template <Scalar S>
VerificationReport check_p2(const GridFunction<S>& f, const Decomposition<S>& d) {
  const int grid_level = f.level();
  const int n = f.dim();
  const S root_forward = box_average(f, forward(d.root).box(grid_level));
  InequalityRecord rec{.id = "p2", .relation = "<=", .exact = is_exact_v<S>};
  rec.admissible = d.lambda >= root_forward;
  const S bound = d.lambda * pow2<S>(n);
  S worst = S(0);
  if (rec.admissible) {
    for (const DyadicCube& q : d.stopping) {
      if (q == d.root) {
        rec.admissible = false;
        break;
      }
      const S m = box_average(f, forward2(q).box(grid_level));
      if (m > worst) worst = m;
      if (m > bound) rec.pass = false;
    }
  }
  if (!rec.admissible) {
    rec.pass = true;
    rec.note = "inadmissible: lambda < mean_{root+} f";
  } else {
    rec.note = "max_j mean_{Q_j^{+,2}} f <= 2^n lambda";
  }
  rec.lhs = Quantity::of(worst);
  rec.rhs = Quantity::of(bound);
  VerificationReport report;
  report.add(std::move(rec));
  return report;
}

template <Scalar S>
VerificationReport weak_type_check(const GridFunction<S>& f, const Decomposition<S>& d,
                                   const MaximalField<S>* augmented) {
  if (d.lambda <= 0) throw InvalidParams("weak_type_check requires lambda > 0");
  const int grid_level = f.level();
  const CellBox span = union_with_forward(d.root, grid_level);
  require_nonnegative(f, span, "weak_type_check");

  const S total = d.stopping_volume();
  S grouped = S(0);
  S selected_forward = S(0);
  std::vector<int> seen(d.stopping.size(), 0);
  bool partition = d.groups.size() == d.subfamily.size();
  for (std::size_t g = 0; g < d.subfamily.size() && g < d.groups.size(); ++g) {
    selected_forward += d.stopping[d.subfamily[g]].template volume<S>();
    for (std::size_t i : d.groups[g]) {
      grouped += d.stopping[i].template volume<S>();
      ++seen[i];
    }
  }
  partition = partition && std::all_of(seen.begin(), seen.end(), [](int s) { return s == 1; });
  const S mass = f.box_sum(span) * f.shape().template cell_volume<S>();
  const S cover = S(2) * selected_forward;
  const S rhs = S(2) * mass / d.lambda;

  VerificationReport report;
  constexpr bool exact = is_exact_v<S>;
  InequalityRecord rec_partition{.id = "p3-partition", .relation = "==", .exact = exact};
  rec_partition.lhs = Quantity::of(total);
  rec_partition.rhs = Quantity::of(grouped);
  rec_partition.pass = partition && total == grouped;
  rec_partition.note = "sum_j |Q_j| = sum_j sum_{i in I_j} |Q_i|";
  report.add(std::move(rec_partition));

  InequalityRecord rec_cover{.id = "p3-cover", .relation = "<=", .exact = exact};
  rec_cover.lhs = Quantity::of(total);
  rec_cover.rhs = Quantity::of(cover);
  rec_cover.pass = total <= cover;
  rec_cover.note = "sum_j |Q_j| <= 2 sum_j |Q~_j+|";
  report.add(std::move(rec_cover));

  InequalityRecord rec_mass{.id = "p3-mass", .relation = "<=", .exact = exact};
  rec_mass.lhs = Quantity::of(cover);
  rec_mass.rhs = Quantity::of(rhs);
  rec_mass.pass = cover <= rhs;
  rec_mass.note = "2 sum_j |Q~_j+| <= (2/lambda) int_{root u root+} f";
  report.add(std::move(rec_mass));

  InequalityRecord rec{.id = "p3", .relation = "<=", .exact = exact};
  rec.lhs = Quantity::of(total);
  rec.rhs = Quantity::of(rhs);
  rec.pass = total <= rhs;
  rec.note = "|{M f > lambda}| <= (2/lambda) int_{root u root+} f";
  report.add(std::move(rec));

  if (augmented != nullptr) {
    const S measure = augmented->superlevel(d.lambda).template measure<S>(f.shape());
    InequalityRecord info{.id = "p3-augmented", .relation = "<=", .exact = exact, .informational = true};
    info.lhs = Quantity::of(measure);
    info.rhs = Quantity::of(rhs);
    info.pass = measure <= rhs;
    const double observed = mass > 0 ? to_double(d.lambda * measure / mass) : 0.0;
    info.note = "observed constant lambda |E_aug| / int f = " + decimal_string(observed);
    report.add(std::move(info));
  }
  return report;
}

template <Scalar S>
VerificationReport weak_type_check(const GridFunction<S>& f, const DyadicCube& root, const S& lambda) {
  if (lambda <= 0) throw InvalidParams("weak_type_check requires lambda > 0");
  const Decomposition<S> d = cz_decompose(f, root, lambda);
  const MaximalField<S> aug = maximal_function(f, root, MaximalVariant::augmented);
  VerificationReport report = weak_type_check(f, d, &aug);
  report.append(check_subfamily(f.shape(), d));
  return report;
}

#define PJN_INSTANTIATE(S)                                                                                      \
  template struct Decomposition<S>;                                                                             \
  template Decomposition<S> cz_decompose(const GridFunction<S>&, const DyadicCube&, const S&);                  \
  template VerificationReport check_stopping(const GridFunction<S>&, const Decomposition<S>&,                   \
                                             const MaximalField<S>&);                                           \
  template VerificationReport check_subfamily(const GridShape&, const Decomposition<S>&);                       \
  template VerificationReport check_p2(const GridFunction<S>&, const Decomposition<S>&);                        \
  template VerificationReport weak_type_check(const GridFunction<S>&, const Decomposition<S>&,                  \
                                              const MaximalField<S>*);                                          \
  template VerificationReport weak_type_check(const GridFunction<S>&, const DyadicCube&, const S&);             \
  template void require_nonnegative(const GridFunction<S>&, const CellBox&, const char*);

PJN_INSTANTIATE(double)
PJN_INSTANTIATE(Rational)

#undef PJN_INSTANTIATE

}  // namespace pjn
