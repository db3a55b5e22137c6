#pragma once

// Whole-instance verification sweeps: every decomposition check over a
// lambda grid, and the good-lambda and distribution checks for each (p, b)
// pair.  Used by `pjn verify corpus` and the acceptance suite.

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "pjn/corpus.hpp"
#include "pjn/grid_io.hpp"
#include "pjn/scalar.hpp"

namespace pjn {

struct SweepOptions {
  std::vector<Exponent> ps{Exponent::parse("2")};
  // b = 2^{-n-k} for every k listed, unless `b` is set.
  std::vector<int> b_shifts{1};
  std::optional<Rational> b;
  bool decomposition = true;
  bool good_lambda = true;
  bool theorem = true;
};

struct IdTally {
  std::size_t asserted = 0;
  std::size_t failed = 0;
  std::size_t inadmissible = 0;
  std::size_t informational = 0;
};

struct ConstantRow {
  std::string p;
  std::string b;
  double c_proof = 0.0;
  double c_empirical_grid = 0.0;
  double c_empirical_aug = 0.0;
  std::size_t lambdas = 0;
};

struct SweepOutcome {
  std::map<std::string, IdTally> tally;
  std::vector<ConstantRow> constants;
  // Up to a few failing records, for diagnostics.
  std::vector<std::string> failures;

  bool passed() const;
  std::vector<std::string> failed_ids() const;
  void merge(const SweepOutcome& other);
  nlohmann::json to_json() const;
};

SweepOutcome sweep(const AnyGrid& f, const SweepOptions& options);

struct EntryOutcome {
  CorpusEntry entry;
  SweepOutcome outcome;
};

// Entries are processed on up to `jobs` threads; results are returned in
// manifest-index order regardless of scheduling.
std::vector<EntryOutcome> sweep_corpus(const std::vector<CorpusEntry>& entries, const SweepOptions& options,
                                       unsigned jobs);

nlohmann::json corpus_json(const std::vector<EntryOutcome>& outcomes);

}  // namespace pjn
