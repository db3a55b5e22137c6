#pragma once

// Calderon-Zygmund stopping-time decomposition for forward averages:
// the maximal dyadic subcubes Q_j of the root with mean_{Q_j+} f > lambda,
// the maximal non-overlapping subfamily of their forward translates, and
// checks of the covering bound and the weak-type estimate.

#include <cstddef>
#include <span>
#include <vector>

#include "pjn/dyadic_cube.hpp"
#include "pjn/grid_function.hpp"
#include "pjn/maximal.hpp"
#include "pjn/report.hpp"
#include "pjn/scalar.hpp"

namespace pjn {

// Forward translates not properly contained in another one, and the index
// groups I_j = { i : Q_i+ within the j-th selected translate }.
struct Subfamily {
  std::vector<std::size_t> members;
  // groups[g] lists the stopping indices absorbed by members[g].
  std::vector<std::vector<std::size_t>> groups;
};

template <Scalar S>
struct Decomposition {
  S lambda = S(0);
  DyadicCube root;
  // In preorder of the dyadic tree.
  std::vector<DyadicCube> stopping;
  std::vector<std::size_t> subfamily;
  std::vector<std::vector<std::size_t>> groups;

  // Sum of |Q_j|.
  S stopping_volume() const;
  // Union of the stopping cubes as a cell set.
  CellSet stopping_cells(const GridShape& shape) const;
};

// Requires pairwise non-overlapping cubes.  Distinct cubes have distinct
// forward translates; a repeated translate raises std::logic_error.
Subfamily select_subfamily(std::span<const DyadicCube> stopping);

// Top-down recursion: a cube stops when mean_{Q+} f > lambda, otherwise its
// children are examined, down to the grid level.  Requires f >= 0 on
// root and root+ (throws NegativeInput).
template <Scalar S>
Decomposition<S> cz_decompose(const GridFunction<S>& f, const DyadicCube& root, const S& lambda);

// Strict stopping condition at every Q_j ("p1"), failure at every parent
// ("p1-parent"), and {M f > lambda} = union of Q_j as cell sets
// ("superlevel").  `grid_field` is the grid-variant maximal function of f.
template <Scalar S>
VerificationReport check_stopping(const GridFunction<S>& f, const Decomposition<S>& d,
                                  const MaximalField<S>& grid_field);

// Forward translates of the subfamily are pairwise non-overlapping, every
// Q_i+ lies in exactly one of them, and i in I_j implies Q_i within
// Q~_j followed by Q~_j+ ("subfamily").
template <Scalar S>
VerificationReport check_subfamily(const GridShape& shape, const Decomposition<S>& d);

// mean_{Q_j^{+,2}} f <= 2^n lambda for every stopping cube ("p2").  Flagged
// inadmissible, not asserted, when lambda < mean_{root+} f.
template <Scalar S>
VerificationReport check_p2(const GridFunction<S>& f, const Decomposition<S>& d);

// sum |Q_j| <= (2/lambda) int_{root u root+} f ("p3"), with each link of the
// counting chain asserted separately ("p3-partition", "p3-cover",
// "p3-mass").  When `augmented` is given, the analogous ratio for the
// augmented maximal function is reported as informational ("p3-augmented").
template <Scalar S>
VerificationReport weak_type_check(const GridFunction<S>& f, const Decomposition<S>& d,
                                   const MaximalField<S>* augmented = nullptr);

template <Scalar S>
VerificationReport weak_type_check(const GridFunction<S>& f, const DyadicCube& root, const S& lambda);

// Throws NegativeInput when f < 0 somewhere in the box.
template <Scalar S>
void require_nonnegative(const GridFunction<S>& f, const CellBox& box, const char* operation);

}  // namespace pjn
