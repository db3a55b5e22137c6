#include "pjn/runner.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>

#include "pjn/decomposition.hpp"
#include "pjn/maximal.hpp"
#include "pjn/seminorms.hpp"
#include "pjn/verification.hpp"

namespace pjn {

using nlohmann::json;

namespace {

constexpr std::size_t kMaxFailureNotes = 8;

void tally_report(SweepOutcome& out, const VerificationReport& report, const std::string& context) {
  for (const InequalityRecord& rec : report.records()) {
    IdTally& t = out.tally[rec.id];
    if (rec.informational) {
      ++t.informational;
    } else if (!rec.admissible) {
      ++t.inadmissible;
    } else {
      ++t.asserted;
      if (!rec.pass) {
        ++t.failed;
        if (out.failures.size() < kMaxFailureNotes) {
          out.failures.push_back(rec.id + " at " + context + ": lhs " + decimal_string(rec.lhs.decimal) + " rhs " +
                                 decimal_string(rec.rhs.decimal));
        }
      }
    }
  }
}

template <Scalar S>
std::vector<S> to_scalars(const std::vector<double>& xs) {
  std::vector<S> out;
  out.reserve(xs.size());
  for (double x : xs) out.push_back(from_double<S>(x));
  return out;
}

template <Scalar S>
SweepOutcome sweep_typed(const GridFunction<S>& f, const SweepOptions& options) {
  SweepOutcome out;
  const int n = f.dim();
  const DyadicCube root = DyadicCube::root(n);
  auto b_values = [&]() {
    std::vector<Rational> bs;
    if (options.b) {
      bs.push_back(*options.b);
    } else {
      for (int k : options.b_shifts) bs.push_back(pow2<Rational>(-n - k));
    }
    return bs;
  }();

  if (options.decomposition) {
    const LemmaParams params = LemmaParams::make(n, Exponent::parse("2"), pow2<Rational>(-n - 1));
    const SeminormResult k2 = jnp_plus_dyadic(f, root, params.p);
    const std::vector<S> lambdas = to_scalars<S>(default_lambda_grid(f, root, params, k2.value));
    const MaximalField<S> grid_field = maximal_function(f, root, MaximalVariant::grid);
    const MaximalField<S> aug_field = maximal_function(f, root, MaximalVariant::augmented);
    for (const S& lambda : lambdas) {
      const Decomposition<S> d = cz_decompose(f, root, lambda);
      const std::string ctx = "lambda=" + decimal_string(lambda);
      tally_report(out, check_stopping(f, d, grid_field), ctx);
      tally_report(out, check_subfamily(f.shape(), d), ctx);
      tally_report(out, check_p2(f, d), ctx);
      tally_report(out, weak_type_check(f, d, &aug_field), ctx);
    }
  }

  if (options.good_lambda || options.theorem) {
    for (const Exponent& p : options.ps) {
      const SeminormResult k = jnp_plus_dyadic(f, root, p);
      for (const Rational& b : b_values) {
        const LemmaParams params = LemmaParams::make(n, p, b);
        const std::vector<S> lambdas = to_scalars<S>(default_lambda_grid(f, root, params, k.value));
        const std::string pb = "p=" + p.str() + " b=" + exact_string(b);
        if (options.good_lambda) {
          const GoodLambda<S> gl(f, root, params, k);
          for (const S& lambda : lambdas) tally_report(out, gl.check(lambda), pb + " lambda=" + decimal_string(lambda));
        }
        if (options.theorem) {
          const TheoremRun<S> run = theorem_check(f, root, params, std::span<const S>(lambdas), k);
          tally_report(out, run.report, pb);
          out.constants.push_back(
              ConstantRow{p.str(), exact_string(b), run.c_proof, run.c_empirical_grid, run.c_empirical_aug, lambdas.size()});
        }
      }
    }
  }
  return out;
}

}  // namespace

bool SweepOutcome::passed() const {
  return std::all_of(tally.begin(), tally.end(), [](const auto& kv) { return kv.second.failed == 0; });
}

std::vector<std::string> SweepOutcome::failed_ids() const {
  std::vector<std::string> ids;
  for (const auto& [id, t] : tally) {
    if (t.failed > 0) ids.push_back(id);
  }
  return ids;
}

void SweepOutcome::merge(const SweepOutcome& other) {
  for (const auto& [id, t] : other.tally) {
    IdTally& mine = tally[id];
    mine.asserted += t.asserted;
    mine.failed += t.failed;
    mine.inadmissible += t.inadmissible;
    mine.informational += t.informational;
  }
  constants.insert(constants.end(), other.constants.begin(), other.constants.end());
  for (const std::string& s : other.failures) {
    if (failures.size() < kMaxFailureNotes) failures.push_back(s);
  }
}

json SweepOutcome::to_json() const {
  json checks = json::object();
  for (const auto& [id, t] : tally) {
    checks[id] = {{"asserted", t.asserted},
                  {"failed", t.failed},
                  {"inadmissible", t.inadmissible},
                  {"informational", t.informational}};
  }
  json consts = json::array();
  for (const ConstantRow& r : constants) {
    consts.push_back({{"p", r.p},
                      {"b", r.b},
                      {"lambdas", r.lambdas},
                      {"C_proof", decimal_string(r.c_proof)},
                      {"C_empirical_grid", decimal_string(r.c_empirical_grid)},
                      {"C_empirical_augmented", decimal_string(r.c_empirical_aug)}});
  }
  return json{{"pass", passed()}, {"failed", failed_ids()}, {"checks", std::move(checks)},
              {"constants", std::move(consts)}, {"failures", failures}};
}

SweepOutcome sweep(const AnyGrid& f, const SweepOptions& options) {
  return std::visit([&](const auto& g) { return sweep_typed(g, options); }, f);
}

std::vector<EntryOutcome> sweep_corpus(const std::vector<CorpusEntry>& entries, const SweepOptions& options,
                                       unsigned jobs) {
  std::vector<EntryOutcome> results(entries.size());
  std::vector<std::exception_ptr> errors(entries.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (std::size_t i = next++; i < entries.size(); i = next++) {
      try {
        results[i] = EntryOutcome{entries[i], sweep(generate(entries[i].spec), options)};
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const unsigned threads = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(entries.size())));
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
  }
  for (const std::exception_ptr& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  std::sort(results.begin(), results.end(),
            [](const EntryOutcome& a, const EntryOutcome& b) { return a.entry.index < b.entry.index; });
  return results;
}

json corpus_json(const std::vector<EntryOutcome>& outcomes) {
  json entries = json::array();
  SweepOutcome total;
  for (const EntryOutcome& o : outcomes) {
    json item = o.outcome.to_json();
    item["index"] = o.entry.index;
    item["kind"] = to_string(o.entry.spec.kind);
    item["n"] = o.entry.spec.n;
    item["L"] = o.entry.spec.level;
    item["seed"] = o.entry.spec.seed;
    entries.push_back(std::move(item));
    total.merge(o.outcome);
  }
  json summary = total.to_json();
  summary.erase("constants");
  return json{{"summary", std::move(summary)}, {"entries", std::move(entries)}};
}

}  // namespace pjn
