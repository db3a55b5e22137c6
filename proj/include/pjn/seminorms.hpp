#pragma once

// Dyadic John-Nirenberg seminorms.
//
// For a family {Q_j} of pairwise non-overlapping dyadic subcubes of the
// root, the forward functional sums
//
//   phi+(Q) = |Q| * ( mean_{Q u Q+} (f - f_{Q^{+,2}})^+ )^p
//
// and the classical one sums |Q| * (mean_Q |f - f_Q|)^p.  The supremum over
// all such families is a max-weight antichain problem on the dyadic tree,
// solved exactly by a bottom-up fold
//
//   best(Q) = max( phi(Q), sum_{children} best(child) ).
//
// Only dyadic families are considered, so the result is a lower bound for
// the supremum over arbitrary cube families.

#include <optional>
#include <string>
#include <vector>

#include "pjn/dyadic_cube.hpp"
#include "pjn/grid_function.hpp"
#include "pjn/scalar.hpp"

namespace pjn {

enum class Functional { jnp_plus, jnp_classical };

std::string to_string(Functional functional);
Functional parse_functional(std::string_view text);

// A family weight.  `exact` is set when every term was computed in exact
// arithmetic (exact cell values and an integral exponent).
struct Weight {
  double approx = 0.0;
  std::optional<Rational> exact;

  // Natural log of the weight; -inf for zero.
  double log() const;
};

struct CubeFamily {
  std::vector<DyadicCube> cubes;
  Weight weight;
};

struct SeminormResult {
  Functional functional = Functional::jnp_plus;
  Exponent p;
  // weight^{1/p}.
  double value = 0.0;
  CubeFamily witness;
  bool exact = false;
};

template <Scalar S>
struct CubeMax {
  S value = S(0);
  DyadicCube cube;
};

// mean_{Q u Q+} (f - f_{Q^{+,2}})^+.
template <Scalar S>
S forward_oscillation(const GridFunction<S>& f, const DyadicCube& q);

// mean_Q |f - f_Q|.
template <Scalar S>
S mean_oscillation(const GridFunction<S>& f, const DyadicCube& q);

template <Scalar S>
Weight phi_plus(const GridFunction<S>& f, const DyadicCube& q, const Exponent& p);

template <Scalar S>
Weight phi_classical(const GridFunction<S>& f, const DyadicCube& q, const Exponent& p);

// Exact dyadic supremum by the tree fold.  Ties between a cube and its
// children resolve to the children; a leaf joins the forward witness only
// when its term is positive, and always joins the classical witness, which
// therefore tiles the root.  Throws InvalidExponent for p <= 1.
template <Scalar S>
SeminormResult jnp_plus_dyadic(const GridFunction<S>& f, const DyadicCube& root, const Exponent& p);

template <Scalar S>
SeminormResult jnp_classical_dyadic(const GridFunction<S>& f, const DyadicCube& root, const Exponent& p);

template <Scalar S>
SeminormResult jnp_dyadic(const GridFunction<S>& f, const DyadicCube& root, const Exponent& p, Functional functional);

// max over dyadic Q in root of mean_Q (f - f_{Q+})^+.
template <Scalar S>
CubeMax<S> bmo_plus_dyadic(const GridFunction<S>& f, const DyadicCube& root);

// max over dyadic Q in root of mean_{Q u Q+} (f - f_{Q^{+,2}})^+, the large-p
// limit of the forward seminorm.
template <Scalar S>
CubeMax<S> bmo_plus_limit_form(const GridFunction<S>& f, const DyadicCube& root);

// Largest tree the brute-force oracle accepts.
inline constexpr std::int64_t kOracleMaxCubes = 64;
inline constexpr double kOracleMaxAntichains = 5.0e6;

// Number of antichains (including the empty one) of the dyadic subtree.
double antichain_count(const DyadicCube& root, int grid_level);

// Brute force: enumerates every antichain of the dyadic subtree with
// per-cube terms computed by direct cell loops.  Throws InstanceTooLarge
// beyond kOracleMaxCubes cubes or kOracleMaxAntichains antichains.
template <Scalar S>
SeminormResult antichain_oracle(const GridFunction<S>& f, const DyadicCube& root, const Exponent& p,
                                Functional functional);

// Throws InvalidExponent unless p > 1.
void require_valid_exponent(const Exponent& p);

}  // namespace pjn
