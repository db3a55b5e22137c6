#include "pjn/serialize.hpp"

#include <sstream>

namespace pjn {

using nlohmann::json;

json quantity_json(const Quantity& q) {
  json out = {{"decimal", decimal_string(q.decimal)}};
  if (!q.exact.empty()) out["exact"] = q.exact;
  return out;
}

json scalar_json(double x) { return quantity_json(Quantity::of(x)); }
json scalar_json(const Rational& x) { return quantity_json(Quantity::of(x)); }

json cube_json(const DyadicCube& c) {
  json out = json::array({c.level()});
  for (int a = 0; a < c.dim(); ++a) out.push_back(c.coord(a));
  return out;
}

json to_json(const SeminormResult& r) {
  json witness = json::array();
  for (const DyadicCube& c : r.witness.cubes) witness.push_back(cube_json(c));
  json weight = {{"decimal", decimal_string(r.witness.weight.approx)}};
  if (r.witness.weight.exact) weight["exact"] = exact_string(*r.witness.weight.exact);
  return json{{"functional", to_string(r.functional)},
              {"p", r.p.str()},
              {"value", decimal_string(r.value)},
              {"witness", std::move(witness)},
              {"weight", std::move(weight)},
              {"exact", r.exact}};
}

json to_json(const VerificationReport& r) {
  json records = json::array();
  for (const InequalityRecord& rec : r.records()) {
    json item = {{"inequality-id", rec.id},       {"lhs", quantity_json(rec.lhs)}, {"rhs", quantity_json(rec.rhs)},
                 {"relation", rec.relation},      {"admissible", rec.admissible}, {"pass", rec.pass},
                 {"exact", rec.exact}};
    if (rec.informational) item["informational"] = true;
    if (!rec.note.empty()) item["note"] = rec.note;
    records.push_back(std::move(item));
  }
  json failed = json::array();
  for (const std::string& id : r.failed_ids()) failed.push_back(id);
  return json{{"pass", r.passed()}, {"failed", std::move(failed)}, {"records", std::move(records)}};
}

template <Scalar S>
json to_json(const Decomposition<S>& d) {
  json stopping = json::array();
  for (const DyadicCube& c : d.stopping) stopping.push_back(cube_json(c));
  return json{{"lambda", scalar_json(d.lambda)},
              {"root", cube_json(d.root)},
              {"stopping", std::move(stopping)},
              {"subfamily", d.subfamily},
              {"groups", d.groups},
              {"stopping_volume", scalar_json(d.stopping_volume())}};
}

template <Scalar S>
json to_json(const MaximalField<S>& field) {
  json values = json::array();
  for (const S& v : field.values) values.push_back(scalar_json(v));
  return json{{"root", cube_json(field.root)},
              {"variant", to_string(field.variant)},
              {"n", field.shape.n},
              {"L", field.shape.level},
              {"cells", field.cells},
              {"values", std::move(values)}};
}

template <Scalar S>
json to_json(const TheoremRun<S>& run) {
  json records = json::array();
  for (const TheoremRecord<S>& r : run.records) {
    json item = {{"lambda", scalar_json(r.lambda)}, {"E_grid", scalar_json(r.e_grid)}, {"E_aug", scalar_json(r.e_aug)},
                 {"dist", scalar_json(r.dist)},     {"bound", decimal_string(r.bound)}, {"branch", r.branch},
                 {"pass", r.pass}};
    if (r.ladder_n >= 0) item["ladder_N"] = r.ladder_n;
    records.push_back(std::move(item));
  }
  return json{{"seminorm", to_json(run.seminorm)},
              {"lambda0", decimal_string(run.lambda0)},
              {"C_proof", decimal_string(run.c_proof)},
              {"C_empirical_grid", decimal_string(run.c_empirical_grid)},
              {"C_empirical_augmented", decimal_string(run.c_empirical_aug)},
              {"records", std::move(records)},
              {"report", to_json(run.report)}};
}

template <Scalar S>
std::string theorem_csv(const TheoremRun<S>& run) {
  std::ostringstream out;
  out << "lambda,E_grid,E_aug,dist,bound,pass\n";
  for (const TheoremRecord<S>& r : run.records) {
    out << decimal_string(r.lambda) << ',' << decimal_string(r.e_grid) << ',' << decimal_string(r.e_aug) << ','
        << decimal_string(r.dist) << ',' << decimal_string(r.bound) << ',' << (r.pass ? "true" : "false") << '\n';
  }
  return out.str();
}

#define PJN_INSTANTIATE(S)                                 \
  template json to_json(const Decomposition<S>&);          \
  template json to_json(const MaximalField<S>&);           \
  template json to_json(const TheoremRun<S>&);             \
  template std::string theorem_csv(const TheoremRun<S>&);

PJN_INSTANTIATE(double)
PJN_INSTANTIATE(Rational)

#undef PJN_INSTANTIATE

}  // namespace pjn
