#pragma once

// End-to-end checks of the good-lambda inequality for the forward dyadic
// maximal operator and of the weak-L^p distribution bound obtained by
// iterating it.
//
// Notation: g = (f - f_{root^{+,2}})^+, E(lambda) = {x in root : M g(x) > lambda}
// with M the grid-variant maximal operator of the root, K = the dyadic
// forward seminorm of f.

#include <algorithm>
#include <span>
#include <string>
#include <vector>

#include "pjn/decomposition.hpp"
#include "pjn/grid_function.hpp"
#include "pjn/maximal.hpp"
#include "pjn/report.hpp"
#include "pjn/scalar.hpp"
#include "pjn/seminorms.hpp"

namespace pjn {

// Exponent p > 1, its conjugate q, 0 < b < 2^{-n}, and a = 4 / (1 - 2^n b).
struct LemmaParams {
  int n = 1;
  Exponent p;
  Exponent q;
  Rational b;
  Rational a;

  // Throws InvalidParams (or InvalidExponent for p <= 1).
  static LemmaParams make(int n, const Exponent& p, const Rational& b);

  // 1 - 2^n b.
  Rational shrink() const;
};

// 2 K / (b |root|^{1/p}).
double lambda0(double k_plus, const DyadicCube& root, const LemmaParams& params);

template <Scalar S>
double lambda0(const GridFunction<S>& f, const DyadicCube& root, const LemmaParams& params);

struct ProofConstant {
  // (2/b)^p, the small-lambda estimate.
  double small_lambda = 0.0;
  // sup over N >= 0 of the iteration bound.
  double iteration = 0.0;
  // a^p b^{-p^2}, the N -> infinity limit of the iteration term.
  double limit = 0.0;
  int argmax_n = 0;
  int terms = 0;

  double value() const { return std::max(small_lambda, std::max(iteration, limit)); }
};

// Constant C(n, p, b) with |E(lambda)| <= C (K / lambda)^p for every lambda > 0.
ProofConstant proof_constant_terms(int n, const Exponent& p, const Rational& b);
double proof_constant(int n, const Exponent& p, const Rational& b);

// Iteration-bound term for a fixed N (natural log).
double log_iteration_term(const LemmaParams& params, int big_n);

// Good-lambda checker with the lambda-independent parts precomputed: g, the
// maximal function of g, forward means of g on every dyadic subcube, and K.
template <Scalar S>
class GoodLambda {
 public:
  GoodLambda(const GridFunction<S>& f, const DyadicCube& root, const LemmaParams& params);
  GoodLambda(const GridFunction<S>& f, const DyadicCube& root, const LemmaParams& params, SeminormResult seminorm);

  // Records: "lemma" |E(lambda)| <= (a K / lambda) |E(b lambda)|^{1/q}, and
  // when admissible also "p2" for g at b lambda, "p6" E(lambda) = union_j
  // E_{Q_j}(lambda), "p7" per-cube weak-type bounds for g_j, and "p8" the
  // cellwise inclusion E_{Q_j}(lambda) within {M_{Q_j} g_j > (1 - 2^n b) lambda}.
  VerificationReport check(const S& lambda) const;

  // b lambda >= mean_{root+} g.
  bool admissible(const S& lambda) const;

  const SeminormResult& seminorm() const { return seminorm_; }
  const GridFunction<S>& g() const { return g_; }
  const MaximalField<S>& field() const { return field_; }

 private:
  void build_pyramid();
  std::size_t pyramid_index(const DyadicCube& q) const;

  const GridFunction<S>* f_;
  DyadicCube root_;
  LemmaParams params_;
  SeminormResult seminorm_;
  GridFunction<S> g_;
  MaximalField<S> field_;
  S root_forward_mean_g_;
  // Forward means of g and their subtree maxima, one block per level.
  std::vector<std::size_t> level_offset_;
  std::vector<S> forward_mean_;
  std::vector<S> subtree_max_;
};

template <Scalar S>
VerificationReport good_lambda_check(const GridFunction<S>& f, const DyadicCube& root, const LemmaParams& params,
                                     const S& lambda);

// 64 log-spaced values from (max f - min f) 2^{-10} to max g + 1, plus
// lambda0 and the ladder b^{-k} lambda0, k = 1..8; sorted, deduplicated.
template <Scalar S>
std::vector<double> default_lambda_grid(const GridFunction<S>& f, const DyadicCube& root, const LemmaParams& params,
                                        double k_plus);

template <Scalar S>
struct TheoremRecord {
  S lambda = S(0);
  S e_grid = S(0);
  S e_aug = S(0);
  S dist = S(0);
  // C_proof (K / lambda)^p.
  double bound = 0.0;
  bool pass = true;
  // "trivial" for lambda <= lambda0, else "iteration" with ladder index N
  // such that b^{-N} lambda0 <= lambda < b^{-(N+1)} lambda0.
  std::string branch;
  int ladder_n = -1;
};

template <Scalar S>
struct TheoremRun {
  SeminormResult seminorm;
  double lambda0 = 0.0;
  double c_proof = 0.0;
  // max over the grid of lambda^p |E| / K^p.
  double c_empirical_grid = 0.0;
  double c_empirical_aug = 0.0;
  std::vector<TheoremRecord<S>> records;
  VerificationReport report;
};

template <Scalar S>
TheoremRun<S> theorem_check(const GridFunction<S>& f, const DyadicCube& root, const LemmaParams& params,
                            std::span<const S> lambdas);

template <Scalar S>
TheoremRun<S> theorem_check(const GridFunction<S>& f, const DyadicCube& root, const LemmaParams& params,
                            std::span<const S> lambdas, SeminormResult seminorm);

}  // namespace pjn
