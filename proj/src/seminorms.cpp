#include "pjn/seminorms.hpp"

#include <array>
#include <cmath>
#include <limits>

#include "pjn/errors.hpp"

namespace pjn {

namespace {

// Dyadic subtree in preorder; node i has either no children or 2^n
// children listed at child_idx[child_begin[i] ...].
struct Tree {
  int fanout = 2;
  std::vector<DyadicCube> cubes;
  std::vector<std::int64_t> child_begin;
  std::vector<std::size_t> child_idx;

  bool leaf(std::size_t i) const { return child_begin[i] < 0; }
};

std::size_t build_tree(Tree& t, const DyadicCube& q, int grid_level) {
  const std::size_t idx = t.cubes.size();
  t.cubes.push_back(q);
  t.child_begin.push_back(-1);
  if (q.level() < grid_level) {
    std::array<std::size_t, std::size_t{1} << kMaxDim> kids{};
    std::size_t count = 0;
    for (const DyadicCube& child : children(q, grid_level)) kids[count++] = build_tree(t, child, grid_level);
    t.child_begin[idx] = static_cast<std::int64_t>(t.child_idx.size());
    t.child_idx.insert(t.child_idx.end(), kids.begin(), kids.begin() + static_cast<std::ptrdiff_t>(count));
  }
  return idx;
}

Tree make_tree(const DyadicCube& root, int grid_level) {
  Tree t;
  t.fanout = 1 << root.dim();
  t.cubes.reserve(static_cast<std::size_t>(subtree_size(root, grid_level)));
  build_tree(t, root, grid_level);
  return t;
}

template <Scalar S>
S functional_mean(const GridFunction<S>& f, const DyadicCube& q, Functional functional) {
  return functional == Functional::jnp_plus ? forward_oscillation(f, q) : mean_oscillation(f, q);
}

template <class W>
struct Fold {
  std::vector<W> best;
  std::vector<char> take;
};

// Bottom-up max-weight antichain fold.  Children win ties.
template <class W>
Fold<W> fold_tree(const Tree& t, const std::vector<W>& phi, Functional functional) {
  Fold<W> out;
  out.best.assign(t.cubes.size(), W(0));
  out.take.assign(t.cubes.size(), 0);
  for (std::size_t k = t.cubes.size(); k-- > 0;) {
    if (t.leaf(k)) {
      out.best[k] = phi[k];
      out.take[k] = functional == Functional::jnp_classical || phi[k] > 0;
      continue;
    }
    W sum = W(0);
    const auto begin = static_cast<std::size_t>(t.child_begin[k]);
    for (std::size_t c = 0; c < static_cast<std::size_t>(t.fanout); ++c) sum += out.best[t.child_idx[begin + c]];
    if (phi[k] > sum) {
      out.best[k] = phi[k];
      out.take[k] = 1;
    } else {
      out.best[k] = std::move(sum);
    }
  }
  return out;
}

std::vector<DyadicCube> collect_witness(const Tree& t, const std::vector<char>& take) {
  std::vector<DyadicCube> out;
  std::vector<std::size_t> stack{0};
  while (!stack.empty()) {
    const std::size_t k = stack.back();
    stack.pop_back();
    if (take[k]) {
      out.push_back(t.cubes[k]);
      continue;
    }
    if (t.leaf(k)) continue;
    const auto begin = static_cast<std::size_t>(t.child_begin[k]);
    for (std::size_t c = static_cast<std::size_t>(t.fanout); c-- > 0;) stack.push_back(t.child_idx[begin + c]);
  }
  return out;
}

template <Scalar S>
SeminormResult fold_seminorm(const GridFunction<S>& f, const DyadicCube& root, const Exponent& p,
                             Functional functional) {
  require_valid_exponent(p);
  require_in_domain(root, f.shape(), 2);
  if (!root.inside_root()) throw OutOfDomain("seminorm root " + root.str() + " is not inside Q0");

  const Tree tree = make_tree(root, f.level());
  std::vector<S> means;
  means.reserve(tree.cubes.size());
  for (const DyadicCube& q : tree.cubes) means.push_back(functional_mean(f, q, functional));

  SeminormResult result;
  result.functional = functional;
  result.p = p;

  if constexpr (is_exact_v<S>) {
    if (p.integral()) {
      std::vector<Rational> phi;
      phi.reserve(means.size());
      for (std::size_t k = 0; k < means.size(); ++k) {
        phi.push_back(tree.cubes[k].template volume<Rational>() * ipow<Rational>(means[k], p.as_integer()));
      }
      Fold<Rational> fold = fold_tree(tree, phi, functional);
      result.witness.cubes = collect_witness(tree, fold.take);
      result.witness.weight = Weight{to_double(fold.best[0]), fold.best[0]};
      result.value = root_of(fold.best[0], p);
      result.exact = true;
      return result;
    }
  }

  // Floating fold on means scaled by their maximum, so large p neither
  // overflows nor flushes every term to zero.
  double scale = 0.0;
  for (const S& m : means) scale = std::max(scale, to_double(m));
  std::vector<double> phi(means.size(), 0.0);
  if (scale > 0) {
    for (std::size_t k = 0; k < means.size(); ++k) {
      phi[k] = tree.cubes[k].template volume<double>() * power_approx(to_double(means[k]) / scale, p);
    }
  }
  Fold<double> fold = fold_tree(tree, phi, functional);
  result.witness.cubes = collect_witness(tree, fold.take);
  const double scaled = fold.best[0];
  if (scaled > 0) {
    result.witness.weight.approx = std::exp(std::log(scaled) + p.approx() * std::log(scale));
    result.value = scale * root_of(scaled, p);
  }
  return result;
}

template <Scalar S>
S naive_mean(const GridFunction<S>& f, const CellBox& box) {
  S sum = S(0);
  for_each_cell(f.shape(), box, [&](std::int64_t idx) { sum += f.at(idx); });
  return sum / S(static_cast<long>(box.count()));
}

// Per-cube oracle term from direct cell loops; shares no code with the fold.
template <Scalar S>
S naive_functional_mean(const GridFunction<S>& f, const DyadicCube& q, Functional functional) {
  const int grid_level = f.level();
  if (functional == Functional::jnp_plus) {
    const S ref = naive_mean(f, forward2(q).box(grid_level));
    const CellBox span = union_with_forward(q, grid_level);
    S sum = S(0);
    for_each_cell(f.shape(), span, [&](std::int64_t idx) { sum += positive_part<S>(f.at(idx) - ref); });
    return sum / S(static_cast<long>(span.count()));
  }
  const CellBox box = q.box(grid_level);
  const S ref = naive_mean(f, box);
  S sum = S(0);
  for_each_cell(f.shape(), box, [&](std::int64_t idx) {
    const S d = f.at(idx) - ref;
    sum += d < 0 ? S(-d) : d;
  });
  return sum / S(static_cast<long>(box.count()));
}

template <class W>
struct Enumeration {
  std::vector<CellBox> boxes;
  std::vector<W> phi;
  std::vector<std::size_t> chosen;
  std::vector<std::size_t> best_set;
  W best = W(0);
  bool have_best = false;

  void run(std::size_t i, const W& sum) {
    if (i == boxes.size()) {
      if (!have_best || sum > best) {
        best = sum;
        best_set = chosen;
        have_best = true;
      }
      return;
    }
    run(i + 1, sum);
    for (std::size_t c : chosen) {
      if (relation(boxes[c], boxes[i]) != Relation::disjoint) return;
    }
    chosen.push_back(i);
    run(i + 1, sum + phi[i]);
    chosen.pop_back();
  }
};

template <class W, Scalar S>
SeminormResult enumerate_antichains(const GridFunction<S>& f, const std::vector<DyadicCube>& cubes,
                                    const std::vector<S>& means, const Exponent& p, Functional functional) {
  Enumeration<W> e;
  for (std::size_t k = 0; k < cubes.size(); ++k) {
    e.boxes.push_back(cubes[k].box(f.level()));
    if constexpr (std::is_same_v<W, Rational>) {
      e.phi.push_back(cubes[k].template volume<Rational>() * power_exact(Rational(means[k]), p));
    } else {
      e.phi.push_back(cubes[k].template volume<double>() * power_approx(to_double(means[k]), p));
    }
  }
  e.run(0, W(0));

  SeminormResult result;
  result.functional = functional;
  result.p = p;
  for (std::size_t k : e.best_set) result.witness.cubes.push_back(cubes[k]);
  if constexpr (std::is_same_v<W, Rational>) {
    result.witness.weight = Weight{to_double(e.best), e.best};
    result.exact = true;
  } else {
    result.witness.weight.approx = e.best;
  }
  result.value = root_of(e.best, p);
  return result;
}

}  // namespace

std::string to_string(Functional functional) {
  return functional == Functional::jnp_plus ? "jnp-plus" : "jnp-classical";
}

Functional parse_functional(std::string_view text) {
  if (text == "jnp-plus" || text == "plus") return Functional::jnp_plus;
  if (text == "jnp-classical" || text == "classical") return Functional::jnp_classical;
  throw InvalidParams("functional must be 'jnp-plus' or 'jnp-classical', got '" + std::string(text) + "'");
}

double Weight::log() const {
  if (exact) return *exact > 0 ? log_of(*exact) : -std::numeric_limits<double>::infinity();
  return approx > 0 ? std::log(approx) : -std::numeric_limits<double>::infinity();
}

void require_valid_exponent(const Exponent& p) {
  if (p.value() <= 1) throw InvalidExponent("exponent p must exceed 1, got " + p.str());
}

template <Scalar S>
S forward_oscillation(const GridFunction<S>& f, const DyadicCube& q) {
  require_in_domain(q, f.shape(), 2);
  const int grid_level = f.level();
  const S ref = box_average(f, forward2(q).box(grid_level));
  return pos_part_box_average(f, union_with_forward(q, grid_level), ref);
}

template <Scalar S>
S mean_oscillation(const GridFunction<S>& f, const DyadicCube& q) {
  require_in_domain(q, f.shape());
  const CellBox box = q.box(f.level());
  // Deviations from the mean sum to zero, so mean |f - c| = 2 mean (f - c)^+.
  return S(2) * pos_part_box_average(f, box, box_average(f, box));
}

template <Scalar S>
Weight phi_plus(const GridFunction<S>& f, const DyadicCube& q, const Exponent& p) {
  require_valid_exponent(p);
  const S m = forward_oscillation(f, q);
  if constexpr (is_exact_v<S>) {
    if (p.integral()) {
      const Rational w = q.template volume<Rational>() * power_exact(m, p);
      return Weight{to_double(w), w};
    }
  }
  return Weight{q.template volume<double>() * power_approx(to_double(m), p), std::nullopt};
}

template <Scalar S>
Weight phi_classical(const GridFunction<S>& f, const DyadicCube& q, const Exponent& p) {
  require_valid_exponent(p);
  const S m = mean_oscillation(f, q);
  if constexpr (is_exact_v<S>) {
    if (p.integral()) {
      const Rational w = q.template volume<Rational>() * power_exact(m, p);
      return Weight{to_double(w), w};
    }
  }
  return Weight{q.template volume<double>() * power_approx(to_double(m), p), std::nullopt};
}

template <Scalar S>
SeminormResult jnp_plus_dyadic(const GridFunction<S>& f, const DyadicCube& root, const Exponent& p) {
  return fold_seminorm(f, root, p, Functional::jnp_plus);
}

template <Scalar S>
SeminormResult jnp_classical_dyadic(const GridFunction<S>& f, const DyadicCube& root, const Exponent& p) {
  return fold_seminorm(f, root, p, Functional::jnp_classical);
}

template <Scalar S>
SeminormResult jnp_dyadic(const GridFunction<S>& f, const DyadicCube& root, const Exponent& p, Functional functional) {
  return fold_seminorm(f, root, p, functional);
}

template <Scalar S>
CubeMax<S> bmo_plus_dyadic(const GridFunction<S>& f, const DyadicCube& root) {
  require_in_domain(root, f.shape(), 2);
  CubeMax<S> best{S(0), root};
  bool first = true;
  visit_subtree(root, f.level(), [&](const DyadicCube& q) {
    const S v = pos_part_average(f, Region::cube, q, forward(q));
    if (first || v > best.value) best = CubeMax<S>{v, q};
    first = false;
    return true;
  });
  return best;
}

template <Scalar S>
CubeMax<S> bmo_plus_limit_form(const GridFunction<S>& f, const DyadicCube& root) {
  require_in_domain(root, f.shape(), 2);
  CubeMax<S> best{S(0), root};
  bool first = true;
  visit_subtree(root, f.level(), [&](const DyadicCube& q) {
    const S v = forward_oscillation(f, q);
    if (first || v > best.value) best = CubeMax<S>{v, q};
    first = false;
    return true;
  });
  return best;
}

double antichain_count(const DyadicCube& root, int grid_level) {
  // Same count for every cube of a level: 1 (the cube) + product over children.
  double count = 2.0;
  for (int k = grid_level - 1; k >= root.level(); --k) count = 1.0 + std::pow(count, 1 << root.dim());
  return count;
}

template <Scalar S>
SeminormResult antichain_oracle(const GridFunction<S>& f, const DyadicCube& root, const Exponent& p,
                                Functional functional) {
  require_valid_exponent(p);
  require_in_domain(root, f.shape(), 2);
  const std::int64_t cubes_in_tree = subtree_size(root, f.level());
  if (cubes_in_tree > kOracleMaxCubes) {
    throw InstanceTooLarge("oracle bound is " + std::to_string(kOracleMaxCubes) + " cubes; instance has " +
                           std::to_string(cubes_in_tree));
  }
  const double antichains = antichain_count(root, f.level());
  if (antichains > kOracleMaxAntichains) {
    throw InstanceTooLarge("instance has " + decimal_string(antichains) + " antichains; enumeration bound is " +
                           decimal_string(kOracleMaxAntichains));
  }

  std::vector<DyadicCube> cubes;
  visit_subtree(root, f.level(), [&](const DyadicCube& q) {
    cubes.push_back(q);
    return true;
  });
  std::vector<S> means;
  for (const DyadicCube& q : cubes) means.push_back(naive_functional_mean(f, q, functional));

  if constexpr (is_exact_v<S>) {
    if (p.integral()) return enumerate_antichains<Rational>(f, cubes, means, p, functional);
  }
  return enumerate_antichains<double>(f, cubes, means, p, functional);
}

#define PJN_INSTANTIATE(S)                                                                                       \
  template S forward_oscillation(const GridFunction<S>&, const DyadicCube&);                                     \
  template S mean_oscillation(const GridFunction<S>&, const DyadicCube&);                                        \
  template Weight phi_plus(const GridFunction<S>&, const DyadicCube&, const Exponent&);                          \
  template Weight phi_classical(const GridFunction<S>&, const DyadicCube&, const Exponent&);                     \
  template SeminormResult jnp_plus_dyadic(const GridFunction<S>&, const DyadicCube&, const Exponent&);           \
  template SeminormResult jnp_classical_dyadic(const GridFunction<S>&, const DyadicCube&, const Exponent&);      \
  template SeminormResult jnp_dyadic(const GridFunction<S>&, const DyadicCube&, const Exponent&, Functional);    \
  template CubeMax<S> bmo_plus_dyadic(const GridFunction<S>&, const DyadicCube&);                                \
  template CubeMax<S> bmo_plus_limit_form(const GridFunction<S>&, const DyadicCube&);                            \
  template SeminormResult antichain_oracle(const GridFunction<S>&, const DyadicCube&, const Exponent&, Functional);

PJN_INSTANTIATE(double)
PJN_INSTANTIATE(Rational)

#undef PJN_INSTANTIATE

}  // namespace pjn
