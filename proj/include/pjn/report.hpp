#pragma once

// Verification records: one per checked inequality, with both sides, an
// admissibility flag (inadmissible records are reported, never asserted),
// and whether the comparison was decided in exact arithmetic.

#include <span>
#include <string>
#include <vector>

#include "pjn/scalar.hpp"

namespace pjn {

// A reported number: decimal approximation, plus the exact rational when
// the value was computed exactly.
struct Quantity {
  double decimal = 0.0;
  std::string exact;

  static Quantity of(double x) { return Quantity{x, {}}; }
  static Quantity of(const Rational& x) { return Quantity{to_double(x), exact_string(x)}; }
};

struct InequalityRecord {
  std::string id;
  Quantity lhs;
  Quantity rhs;
  // How lhs and rhs are compared: "<", "<=", "==", or "subset" for cell sets.
  std::string relation = "<=";
  bool admissible = true;
  bool pass = true;
  bool exact = false;
  // Measured and reported only; never fails a run.
  bool informational = false;
  std::string note;
};

class VerificationReport {
 public:
  void add(InequalityRecord record) { records_.push_back(std::move(record)); }
  void append(const VerificationReport& other) {
    records_.insert(records_.end(), other.records_.begin(), other.records_.end());
  }

  std::span<const InequalityRecord> records() const { return records_; }
  bool empty() const { return records_.empty(); }

  // True when every asserted record passes.
  bool passed() const;
  // Distinct ids of asserted records that failed, in first-seen order.
  std::vector<std::string> failed_ids() const;

 private:
  std::vector<InequalityRecord> records_;
};

// Relative tolerance for comparisons that involve p-th roots or other
// floating-point evaluations.
inline constexpr double kRootTolerance = 1e-9;

// lhs <= rhs up to a relative slack of tol * |rhs|.
bool leq_relative(double lhs, double rhs, double tol = kRootTolerance);

}  // namespace pjn
