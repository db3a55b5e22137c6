#include "pjn/report.hpp"

#include <algorithm>
#include <cmath>

namespace pjn {

bool VerificationReport::passed() const {
  return std::all_of(records_.begin(), records_.end(), [](const InequalityRecord& r) {
    return r.informational || !r.admissible || r.pass;
  });
}

std::vector<std::string> VerificationReport::failed_ids() const {
  std::vector<std::string> ids;
  for (const InequalityRecord& r : records_) {
    if (r.informational || !r.admissible || r.pass) continue;
    if (std::find(ids.begin(), ids.end(), r.id) == ids.end()) ids.push_back(r.id);
  }
  return ids;
}

bool leq_relative(double lhs, double rhs, double tol) {
  if (std::isnan(lhs) || std::isnan(rhs)) return false;
  return lhs <= rhs + tol * std::abs(rhs);
}

}  // namespace pjn
