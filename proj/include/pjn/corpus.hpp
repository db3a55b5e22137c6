#pragma once

// Deterministic test-function generators and the pinned corpus manifest.
// Every generator draws integer numerators over a denominator D (the declared
// one in fixed mode, 64 in f64 mode, where the result is then divided by D),
// so (kind, parameters, seed) determine the grid bit for bit.  Except for
// `constant`, outputs are shifted to be nonnegative with minimum 0.

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "pjn/grid_io.hpp"
#include "pjn/scalar.hpp"

namespace pjn {

enum class GeneratorKind { constant, uniform_random, dyadic_martingale, time_step, one_sided_power };

std::string to_string(GeneratorKind kind);
GeneratorKind parse_kind(std::string_view text);

struct GeneratorSpec {
  GeneratorKind kind = GeneratorKind::uniform_random;
  int n = 1;
  int level = 3;
  std::uint64_t seed = 0;
  Mode mode{true, 64};
  // constant: the value.
  Rational value = 0;
  // one-sided-power: f = D t^{-alpha} floored to a multiple of 1/D, t the
  // cell's time center; alpha in (0, 1).
  Rational alpha = Rational(1, 2);

  // Throws InvalidSpec.
  void validate() const;
};

AnyGrid generate(const GeneratorSpec& spec);

struct CorpusEntry {
  std::size_t index = 0;
  GeneratorSpec spec;
};

// 50 entries, seeds 0..49: kind cycles through uniform-random,
// dyadic-martingale, time-step, one-sided-power; n = 1 + (seed / 4) % 2;
// L = 3 + (seed / 8) % 3; alpha cycles through 2/3, 1/2, 1/3; mode fixed:64.
std::vector<CorpusEntry> default_corpus();

nlohmann::json manifest_json(const std::vector<CorpusEntry>& entries);
std::vector<CorpusEntry> parse_manifest(const nlohmann::json& doc);
std::vector<CorpusEntry> load_manifest(const std::filesystem::path& path);

}  // namespace pjn
