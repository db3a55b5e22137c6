#pragma once

// JSON and CSV projections of results.  Numbers that were computed exactly
// are written as {"decimal": "...", "exact": "a/b"}; others carry only the
// decimal string.  Output depends only on the values, so identical inputs
// give byte-identical documents.

#include <string>

#include "json.hpp"
#include "pjn/decomposition.hpp"
#include "pjn/maximal.hpp"
#include "pjn/report.hpp"
#include "pjn/seminorms.hpp"
#include "pjn/verification.hpp"

namespace pjn {

nlohmann::json quantity_json(const Quantity& q);
nlohmann::json scalar_json(double x);
nlohmann::json scalar_json(const Rational& x);

// [level, spatial..., time].
nlohmann::json cube_json(const DyadicCube& c);

nlohmann::json to_json(const SeminormResult& r);
nlohmann::json to_json(const VerificationReport& r);

template <Scalar S>
nlohmann::json to_json(const Decomposition<S>& d);

template <Scalar S>
nlohmann::json to_json(const MaximalField<S>& field);

template <Scalar S>
nlohmann::json to_json(const TheoremRun<S>& run);

// Columns lambda,E_grid,E_aug,dist,bound,pass.
template <Scalar S>
std::string theorem_csv(const TheoremRun<S>& run);

}  // namespace pjn
