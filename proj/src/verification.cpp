#include "pjn/verification.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "pjn/errors.hpp"

namespace pjn {

namespace {

constexpr int kMaxIterationTerms = 1000000;
constexpr double kTermTolerance = 1e-12;
constexpr int kLogSpacedCount = 64;
constexpr int kLadderSteps = 8;

const double kLogSlack = std::log1p(kRootTolerance);

template <Scalar S>
double log_measure(const S& m) {
  if (m <= 0) return -std::numeric_limits<double>::infinity();
  if constexpr (is_exact_v<S>) {
    return log_of(m);
  } else {
    return std::log(m);
  }
}

}  // namespace

LemmaParams LemmaParams::make(int n, const Exponent& p, const Rational& b) {
  if (p.value() <= 1) throw InvalidParams("p must exceed 1, got " + p.str());
  if (n < 1 || n > kMaxDim) throw InvalidParams("dimension n out of range: " + std::to_string(n));
  if (b <= 0 || b * pow2<Rational>(n) >= 1) {
    throw InvalidParams("b must lie in (0, 2^-" + std::to_string(n) + "), got " + exact_string(b));
  }
  LemmaParams params;
  params.n = n;
  params.p = p;
  params.q = p.conjugate();
  params.b = b;
  params.a = Rational(4) / params.shrink();
  return params;
}

Rational LemmaParams::shrink() const { return Rational(1) - pow2<Rational>(n) * b; }

double lambda0(double k_plus, const DyadicCube& root, const LemmaParams& params) {
  const double root_volume = root.volume<double>();
  return 2.0 * k_plus / (to_double(params.b) * std::pow(root_volume, 1.0 / params.p.approx()));
}

template <Scalar S>
double lambda0(const GridFunction<S>& f, const DyadicCube& root, const LemmaParams& params) {
  return lambda0(jnp_plus_dyadic(f, root, params.p).value, root, params);
}

double log_iteration_term(const LemmaParams& params, int big_n) {
  const double p = params.p.approx();
  const double q_inv = 1.0 / params.q.approx();
  const double log_a = std::log(to_double(params.a));
  const double log_b = std::log(to_double(params.b));
  double s_n = 0.0;
  double q_pow = 1.0;  // q^{-(k-1)}
  for (int k = 1; k <= big_n; ++k) {
    s_n += k * q_pow;
    q_pow *= q_inv;
  }
  const double q_neg_n = q_pow;  // q^{-N}
  return (p - p * q_neg_n) * log_a + (-s_n + q_neg_n - (big_n + 2) * p * q_neg_n) * log_b +
         (1.0 + p) * q_neg_n * std::log(2.0);
}

ProofConstant proof_constant_terms(int n, const Exponent& p, const Rational& b) {
  const LemmaParams params = LemmaParams::make(n, p, b);
  const double pd = p.approx();
  const double q_inv = 1.0 / params.q.approx();
  const double log_a = std::log(to_double(params.a));
  const double log_b = std::log(to_double(params.b));
  const double log2 = std::log(2.0);

  ProofConstant out;
  out.small_lambda = std::exp(pd * (log2 - log_b));
  out.limit = std::exp(pd * log_a - pd * pd * log_b);

  // Incremental evaluation of the N-th term; N = 0 covers lambda0 < lambda < lambda0 / b.
  double s_n = 0.0;
  double q_neg_n = 1.0;
  double best = -std::numeric_limits<double>::infinity();
  double previous = 0.0;
  int big_n = 0;
  for (; big_n < kMaxIterationTerms; ++big_n) {
    if (big_n > 0) {
      s_n += big_n * q_neg_n;
      q_neg_n *= q_inv;
    }
    const double term = (pd - pd * q_neg_n) * log_a + (-s_n + q_neg_n - (big_n + 2) * pd * q_neg_n) * log_b +
                        (1.0 + pd) * q_neg_n * log2;
    if (term > best) {
      best = term;
      out.argmax_n = big_n;
    }
    if (big_n > 0 && std::abs(term - previous) < kTermTolerance * std::max(1.0, std::abs(term))) break;
    previous = term;
  }
  out.terms = big_n + 1;
  out.iteration = std::exp(best);
  return out;
}

double proof_constant(int n, const Exponent& p, const Rational& b) { return proof_constant_terms(n, p, b).value(); }

template <Scalar S>
GoodLambda<S>::GoodLambda(const GridFunction<S>& f, const DyadicCube& root, const LemmaParams& params)
    : GoodLambda(f, root, params, jnp_plus_dyadic(f, root, params.p)) {}

template <Scalar S>
GoodLambda<S>::GoodLambda(const GridFunction<S>& f, const DyadicCube& root, const LemmaParams& params,
                          SeminormResult seminorm)
    : f_(&f), root_(root), params_(params), seminorm_(std::move(seminorm)) {
  if (params.n != f.dim()) throw InvalidParams("lemma parameters were made for a different dimension");
  require_in_domain(root, f.shape(), 2);
  const S c0 = average(f, forward2(root));
  g_ = f.map([&](const S& v) { return positive_part<S>(v - c0); });
  field_ = maximal_function(g_, root, MaximalVariant::grid);
  root_forward_mean_g_ = average(g_, forward(root));
  build_pyramid();
}

template <Scalar S>
std::size_t GoodLambda<S>::pyramid_index(const DyadicCube& q) const {
  const int depth = q.level() - root_.level();
  const std::int64_t side = std::int64_t{1} << depth;
  std::int64_t local = 0;
  for (int a = 0; a < q.dim(); ++a) local = local * side + (q.coord(a) - (root_.coord(a) << depth));
  return level_offset_[static_cast<std::size_t>(depth)] + static_cast<std::size_t>(local);
}

template <Scalar S>
void GoodLambda<S>::build_pyramid() {
  const int grid_level = f_->level();
  std::vector<DyadicCube> cubes;
  visit_subtree(root_, grid_level, [&](const DyadicCube& q) {
    cubes.push_back(q);
    return true;
  });
  const int depth = grid_level - root_.level();
  level_offset_.assign(static_cast<std::size_t>(depth) + 1, 0);
  std::size_t offset = 0;
  for (int d = 0; d <= depth; ++d) {
    level_offset_[static_cast<std::size_t>(d)] = offset;
    offset += std::size_t{1} << (d * root_.dim());
  }
  forward_mean_.assign(offset, S(0));
  subtree_max_.assign(offset, S(0));
  for (const DyadicCube& q : cubes) {
    forward_mean_[pyramid_index(q)] = box_average(g_, forward(q).box(grid_level));
  }
  // Preorder reversed visits children before parents.
  for (auto it = cubes.rbegin(); it != cubes.rend(); ++it) {
    const std::size_t k = pyramid_index(*it);
    S m = forward_mean_[k];
    if (it->level() < grid_level) {
      for (const DyadicCube& child : children(*it, grid_level)) {
        const S& cm = subtree_max_[pyramid_index(child)];
        if (cm > m) m = cm;
      }
    }
    subtree_max_[k] = std::move(m);
  }
}

template <Scalar S>
bool GoodLambda<S>::admissible(const S& lambda) const {
  return from_rational<S>(params_.b) * lambda >= root_forward_mean_g_;
}

template <Scalar S>
VerificationReport GoodLambda<S>::check(const S& lambda) const {
  if (lambda <= 0) throw InvalidParams("good-lambda check requires lambda > 0");
  const GridShape& shape = f_->shape();
  const int grid_level = shape.level;
  const S b = from_rational<S>(params_.b);
  const S a = from_rational<S>(params_.a);
  const S b_lambda = b * lambda;

  const CellSet e_lambda = field_.superlevel(lambda);
  const CellSet e_b_lambda = field_.superlevel(b_lambda);
  const S m_lambda = e_lambda.template measure<S>(shape);
  const S m_b_lambda = e_b_lambda.template measure<S>(shape);
  const bool adm = b_lambda >= root_forward_mean_g_;

  VerificationReport report;
  InequalityRecord lemma{.id = "lemma", .relation = "<="};
  lemma.admissible = adm;
  lemma.lhs = Quantity::of(m_lambda);
  const double k_plus = seminorm_.value;
  const double rhs = to_double(a) * k_plus / to_double(lambda) *
                     std::pow(to_double(m_b_lambda), 1.0 / params_.q.approx());
  lemma.rhs = Quantity::of(rhs);
  if constexpr (is_exact_v<S>) {
    if (params_.p.integral() && seminorm_.witness.weight.exact) {
      // Both sides raised to p: (|E(l)| l / a)^p <= K^p |E(b l)|^{p-1}.
      const unsigned long p = params_.p.as_integer();
      const Rational lhs_p = ipow<Rational>(m_lambda * lambda / a, p);
      const Rational rhs_p = *seminorm_.witness.weight.exact * ipow<Rational>(m_b_lambda, p - 1);
      lemma.exact = true;
      lemma.pass = lhs_p <= rhs_p;
    } else {
      lemma.pass = leq_relative(to_double(m_lambda), rhs);
    }
  } else {
    lemma.pass = leq_relative(m_lambda, rhs);
  }
  lemma.note = adm ? "|E(l)| <= (a K / l) |E(b l)|^{1/q}" : "inadmissible: b lambda < mean_{root+} g";
  if (!adm) lemma.pass = true;
  report.add(std::move(lemma));
  if (!adm) return report;

  const Decomposition<S> d = cz_decompose(g_, root_, b_lambda);
  report.append(check_p2(g_, d));

  const S threshold = from_rational<S>(params_.shrink()) * lambda;
  std::vector<std::int64_t> union_cells;
  std::int64_t e_cells_total = 0;
  std::int64_t violations = 0;
  S p7_lhs = S(0);
  S p7_rhs = S(0);
  bool p7_pass = true;
  const S cell_volume = shape.template cell_volume<S>();

  for (const DyadicCube& qj : d.stopping) {
    const S cj = average(*f_, forward2(qj));
    std::int64_t ej_cells = 0;
    // in_e: some ancestor within Q_j has forward mean of g above lambda, so the
    // whole subtree lies in E_{Q_j}(lambda).  sat: M_{Q_j} g_j exceeds the
    // threshold along the path so far.
    auto visit = [&](auto&& self, const DyadicCube& q, bool in_e, bool sat) -> void {
      const std::size_t k = pyramid_index(q);
      const bool in_now = in_e || forward_mean_[k] > lambda;
      if (!in_now && subtree_max_[k] <= lambda) return;
      if (!sat) sat = pos_part_box_average(*f_, forward(q).box(grid_level), cj) > threshold;
      if (in_now && !in_e) {
        const CellBox box = q.box(grid_level);
        for_each_cell(shape, box, [&](std::int64_t idx) { union_cells.push_back(idx); });
        ej_cells += box.count();
      }
      if (in_now && sat) return;
      if (q.level() == grid_level) {
        if (!sat) ++violations;
        return;
      }
      for (const DyadicCube& child : children(q, grid_level)) self(self, child, in_now, sat);
    };
    visit(visit, qj, false, false);
    e_cells_total += ej_cells;

    if (ej_cells > 0) {
      const S ej = S(static_cast<long>(ej_cells)) * cell_volume;
      const CellBox span = union_with_forward(qj, grid_level);
      const S integral = pos_part_box_average(*f_, span, cj) * S(static_cast<long>(span.count())) * cell_volume;
      const S bound = S(2) * integral / threshold;
      p7_lhs += ej;
      p7_rhs += bound;
      if (ej > bound) p7_pass = false;
    }
  }
  std::sort(union_cells.begin(), union_cells.end());
  const CellSet union_set(std::move(union_cells));

  InequalityRecord p6{.id = "p6", .relation = "==", .exact = true};
  p6.lhs = Quantity::of(m_lambda);
  p6.rhs = Quantity::of(union_set.template measure<S>(shape));
  p6.pass = union_set == e_lambda;
  p6.note = "E(lambda) = union_j E_{Q_j}(lambda) as cell sets";
  report.add(std::move(p6));

  InequalityRecord p7{.id = "p7", .relation = "<=", .exact = is_exact_v<S>};
  p7.lhs = Quantity::of(p7_lhs);
  p7.rhs = Quantity::of(p7_rhs);
  p7.pass = p7_pass;
  p7.note = "|E_{Q_j}(l)| <= 2/((1-2^n b) l) int_{Q_j u Q_j+} g_j for every j (sums shown)";
  report.add(std::move(p7));

  InequalityRecord p8{.id = "p8", .relation = "subset", .exact = is_exact_v<S>};
  p8.lhs = Quantity::of(S(static_cast<long>(e_cells_total)) * cell_volume);
  p8.rhs = Quantity::of(S(static_cast<long>(e_cells_total - violations)) * cell_volume);
  p8.pass = violations == 0;
  p8.note = "E_{Q_j}(l) within {M_{Q_j} g_j > (1-2^n b) l}; rhs is the covered part";
  report.add(std::move(p8));
  return report;
}

template <Scalar S>
VerificationReport good_lambda_check(const GridFunction<S>& f, const DyadicCube& root, const LemmaParams& params,
                                     const S& lambda) {
  return GoodLambda<S>(f, root, params).check(lambda);
}

template <Scalar S>
std::vector<double> default_lambda_grid(const GridFunction<S>& f, const DyadicCube& root, const LemmaParams& params,
                                        double k_plus) {
  const int grid_level = f.level();
  CellBox three = root.box(grid_level);
  three.size[static_cast<std::size_t>(f.dim() - 1)] *= 3;
  const auto [lo, hi] = value_range(f, three);
  const S c0 = average(f, forward2(root));
  const auto [lo_near, hi_near] = value_range(f, union_with_forward(root, grid_level));
  const double g_max = std::max(0.0, to_double(S(hi_near - c0)));
  const double spread = to_double(S(hi - lo));
  const double start = spread > 0 ? std::ldexp(spread, -10) : std::ldexp(1.0, -10);
  const double stop = g_max + 1.0;

  std::vector<double> grid;
  const double ratio = std::log(stop / start);
  for (int i = 0; i < kLogSpacedCount; ++i) {
    grid.push_back(start * std::exp(ratio * i / (kLogSpacedCount - 1)));
  }
  const double l0 = lambda0(k_plus, root, params);
  if (l0 > 0 && std::isfinite(l0)) {
    grid.push_back(l0);
    const double inv_b = 1.0 / to_double(params.b);
    double rung = l0;
    for (int k = 1; k <= kLadderSteps; ++k) {
      rung *= inv_b;
      grid.push_back(rung);
    }
  }
  std::erase_if(grid, [](double x) { return !(x > 0) || !std::isfinite(x); });
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  return grid;
}

template <Scalar S>
TheoremRun<S> theorem_check(const GridFunction<S>& f, const DyadicCube& root, const LemmaParams& params,
                            std::span<const S> lambdas) {
  return theorem_check(f, root, params, lambdas, jnp_plus_dyadic(f, root, params.p));
}

template <Scalar S>
TheoremRun<S> theorem_check(const GridFunction<S>& f, const DyadicCube& root, const LemmaParams& params,
                            std::span<const S> lambdas, SeminormResult seminorm) {
  if (params.n != f.dim()) throw InvalidParams("theorem parameters were made for a different dimension");
  require_in_domain(root, f.shape(), 2);
  const GridShape& shape = f.shape();
  const int grid_level = shape.level;
  const double p = params.p.approx();

  TheoremRun<S> run;
  run.seminorm = std::move(seminorm);
  const Weight& weight = run.seminorm.witness.weight;
  const double k_plus = run.seminorm.value;
  run.lambda0 = lambda0(k_plus, root, params);
  run.c_proof = proof_constant(params.n, params.p, params.b);

  const S c0 = average(f, forward2(root));
  const GridFunction<S> g = f.map([&](const S& v) { return positive_part<S>(v - c0); });
  const MaximalField<S> grid_field = maximal_function(g, root, MaximalVariant::grid);
  const MaximalField<S> aug_field = maximal_function(g, root, MaximalVariant::augmented);

  const double log_c = std::log(run.c_proof);
  const double log_w = weight.log();
  const double log_root = std::log(root.volume<double>());
  const double log_b = std::log(to_double(params.b));

  // (1/|root|) int_{root u root+} g <= 2 K / |root|^{1/p}.
  {
    const S mean = box_average(g, union_with_forward(root, grid_level));
    InequalityRecord rec{.id = "p11", .relation = "<="};
    rec.lhs = Quantity::of(S(S(2) * mean));
    rec.rhs = Quantity::of(2.0 * k_plus / std::pow(root.volume<double>(), 1.0 / p));
    bool decided = false;
    if constexpr (is_exact_v<S>) {
      if (params.p.integral() && weight.exact) {
        rec.pass = root.volume<Rational>() * ipow<Rational>(mean, params.p.as_integer()) <= *weight.exact;
        rec.exact = true;
        decided = true;
      }
    }
    if (!decided) rec.pass = leq_relative(rec.lhs.decimal, rec.rhs.decimal);
    rec.note = "mean of g over root u root+ against the seminorm";
    run.report.add(std::move(rec));
  }

  bool grid_pass = true;
  bool dist_pass = true;
  bool trivial_pass = true;
  bool trivial_seen = false;
  double worst_dist_gap = -std::numeric_limits<double>::infinity();
  S worst_dist = S(0);
  S worst_aug = S(0);
  double trivial_rhs = std::numeric_limits<double>::infinity();

  for (const S& lambda : lambdas) {
    if (lambda <= 0) throw InvalidParams("theorem check requires lambda > 0");
    TheoremRecord<S> rec;
    rec.lambda = lambda;
    rec.e_grid = grid_field.superlevel(lambda).template measure<S>(shape);
    rec.e_aug = aug_field.superlevel(lambda).template measure<S>(shape);
    rec.dist = distribution_measure(f, root, lambda);
    const double log_lambda = log_measure(lambda);
    rec.bound = std::exp(log_c + log_w - p * log_lambda);

    bool ok_grid = true;
    if (rec.e_grid > 0) {
      const double lhs = p * log_lambda + log_measure(rec.e_grid) - log_w;
      ok_grid = std::isfinite(log_w) && lhs <= log_c + kLogSlack;
      if (std::isfinite(log_w)) run.c_empirical_grid = std::max(run.c_empirical_grid, std::exp(lhs));
    }
    if (rec.e_aug > 0 && std::isfinite(log_w)) {
      run.c_empirical_aug =
          std::max(run.c_empirical_aug, std::exp(p * log_lambda + log_measure(rec.e_aug) - log_w));
    }
    const bool ok_dist = rec.dist <= rec.e_aug;
    const double gap = to_double(S(rec.dist - rec.e_aug));
    if (gap > worst_dist_gap) {
      worst_dist_gap = gap;
      worst_dist = rec.dist;
      worst_aug = rec.e_aug;
    }

    bool ok_trivial = true;
    if (to_double(lambda) <= run.lambda0) {
      rec.branch = "trivial";
      trivial_seen = true;
      // |root| <= (2/b)^p (K/lambda)^p.
      const double log_rhs = p * (std::log(2.0) - log_b - log_lambda) + log_w;
      ok_trivial = log_root <= log_rhs + kLogSlack;
      trivial_rhs = std::min(trivial_rhs, std::exp(log_rhs));
    } else {
      rec.branch = "iteration";
      rec.ladder_n = run.lambda0 > 0
                         ? static_cast<int>(std::floor(std::log(to_double(lambda) / run.lambda0) / -log_b + 1e-12))
                         : -1;
    }
    rec.pass = ok_grid && ok_dist && ok_trivial;
    grid_pass = grid_pass && ok_grid;
    dist_pass = dist_pass && ok_dist;
    trivial_pass = trivial_pass && ok_trivial;
    run.records.push_back(std::move(rec));
  }

  InequalityRecord grid_rec{.id = "theorem-grid", .relation = "<="};
  grid_rec.lhs = Quantity::of(run.c_empirical_grid);
  grid_rec.rhs = Quantity::of(run.c_proof);
  grid_rec.pass = grid_pass;
  grid_rec.note = "max_lambda lambda^p |E_grid(lambda)| / K^p <= C_proof";
  run.report.add(std::move(grid_rec));

  InequalityRecord trivial_rec{.id = "trivial", .relation = "<="};
  trivial_rec.admissible = trivial_seen;
  trivial_rec.lhs = Quantity::of(root.volume<double>());
  trivial_rec.rhs = Quantity::of(trivial_seen ? trivial_rhs : 0.0);
  trivial_rec.pass = trivial_pass;
  trivial_rec.note = trivial_seen ? "|root| <= (2/b)^p (K/lambda)^p for lambda <= lambda0"
                                  : "inadmissible: no lambda <= lambda0 in the grid";
  run.report.add(std::move(trivial_rec));

  InequalityRecord dist_rec{.id = "theorem-dist", .relation = "<=", .exact = is_exact_v<S>};
  dist_rec.lhs = Quantity::of(worst_dist);
  dist_rec.rhs = Quantity::of(worst_aug);
  dist_rec.pass = dist_pass;
  dist_rec.note = "|{(f - f_{root^{+,2}})^+ > lambda}| <= |E_aug(lambda)|; worst lambda shown";
  run.report.add(std::move(dist_rec));

  InequalityRecord aug_rec{.id = "theorem-augmented", .relation = "<=", .informational = true};
  aug_rec.lhs = Quantity::of(run.c_empirical_aug);
  aug_rec.rhs = Quantity::of(run.c_proof);
  aug_rec.pass = run.c_empirical_aug <= run.c_proof;
  aug_rec.note = "observed constant for the augmented maximal function";
  run.report.add(std::move(aug_rec));
  return run;
}

#define PJN_INSTANTIATE(S)                                                                                         \
  template double lambda0(const GridFunction<S>&, const DyadicCube&, const LemmaParams&);                          \
  template class GoodLambda<S>;                                                                                    \
  template VerificationReport good_lambda_check(const GridFunction<S>&, const DyadicCube&, const LemmaParams&,     \
                                                const S&);                                                         \
  template std::vector<double> default_lambda_grid(const GridFunction<S>&, const DyadicCube&, const LemmaParams&,  \
                                                   double);                                                        \
  template struct TheoremRecord<S>;                                                                                \
  template struct TheoremRun<S>;                                                                                   \
  template TheoremRun<S> theorem_check(const GridFunction<S>&, const DyadicCube&, const LemmaParams&,              \
                                       std::span<const S>);                                                        \
  template TheoremRun<S> theorem_check(const GridFunction<S>&, const DyadicCube&, const LemmaParams&,              \
                                       std::span<const S>, SeminormResult);

PJN_INSTANTIATE(double)
PJN_INSTANTIATE(Rational)

#undef PJN_INSTANTIATE

}  // namespace pjn
