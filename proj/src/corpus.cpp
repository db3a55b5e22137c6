#include "pjn/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>

#include <boost/random/uniform_int_distribution.hpp>

#include "pjn/errors.hpp"

namespace pjn {

using nlohmann::json;

namespace {

constexpr std::int64_t kF64Denominator = 64;
constexpr std::size_t kCorpusSize = 50;

using Engine = std::mt19937_64;

std::int64_t uniform(Engine& rng, std::int64_t lo, std::int64_t hi) {
  return boost::random::uniform_int_distribution<std::int64_t>(lo, hi)(rng);
}

// Numerators in time-fastest order.
using Numerators = std::vector<std::int64_t>;

Numerators uniform_random(const GridShape& shape, std::int64_t d, Engine& rng) {
  Numerators out(static_cast<std::size_t>(shape.cell_count()));
  for (auto& v : out) v = uniform(rng, 0, 4 * d);
  return out;
}

// Each level-0 block starts from a random constant; every bisection adds
// +-step_k or 0 to all children but the last, which takes minus their sum,
// so every dyadic cube's mean equals its parent's value.
Numerators dyadic_martingale(const GridShape& shape, std::int64_t d, Engine& rng) {
  Numerators out(static_cast<std::size_t>(shape.cell_count()));
  const int grid_level = shape.level;
  std::vector<std::int64_t> spatial(static_cast<std::size_t>(shape.n - 1), 0);
  for (std::int64_t t = 0; t < 3; ++t) {
    const DyadicCube block(shape.n, 0, spatial, t);
    auto descend = [&](auto&& self, const DyadicCube& q, std::int64_t value) -> void {
      if (q.level() == grid_level) {
        for_each_cell(shape, q.box(grid_level), [&](std::int64_t idx) { out[static_cast<std::size_t>(idx)] = value; });
        return;
      }
      const std::int64_t step = std::max<std::int64_t>(1, d >> q.level());
      const int k = q.level() + 1;
      // Children enumerated directly so blocks outside Q0 are refined too.
      const std::int64_t count = std::int64_t{1} << shape.n;
      std::int64_t sum = 0;
      for (std::int64_t c = 0; c < count; ++c) {
        std::vector<std::int64_t> sp(static_cast<std::size_t>(shape.n - 1));
        for (int a = 0; a < shape.n - 1; ++a) {
          const int bit = shape.n - 1 - a;
          sp[static_cast<std::size_t>(a)] = 2 * q.coord(a) + ((c >> bit) & 1);
        }
        const DyadicCube child(shape.n, k, sp, 2 * q.time() + (c & 1));
        std::int64_t delta = 0;
        if (c + 1 < count) {
          delta = uniform(rng, -1, 1) * step;
          sum += delta;
        } else {
          delta = -sum;
        }
        self(self, child, value + delta);
      }
    };
    descend(descend, block, uniform(rng, 0, 2 * d));
  }
  return out;
}

// Constant A before a random time tau, constant B < A from tau on.
Numerators time_step(const GridShape& shape, std::int64_t d, Engine& rng) {
  const std::int64_t a = uniform(rng, d, 4 * d);
  const std::int64_t b = uniform(rng, 0, a - 1);
  const std::int64_t extent = shape.extent(shape.n - 1);
  const std::int64_t tau = uniform(rng, 1, extent - 1);
  Numerators out(static_cast<std::size_t>(shape.cell_count()));
  for (std::size_t i = 0; i < out.size(); ++i) {
    const auto t = static_cast<std::int64_t>(i) % extent;
    out[i] = t < tau ? a : b;
  }
  return out;
}

Numerators one_sided_power(const GridShape& shape, std::int64_t d, const Rational& alpha) {
  const std::int64_t extent = shape.extent(shape.n - 1);
  const double a = to_double(alpha);
  Numerators out(static_cast<std::size_t>(shape.cell_count()));
  for (std::size_t i = 0; i < out.size(); ++i) {
    const auto t = static_cast<std::int64_t>(i) % extent;
    const double center = std::ldexp(static_cast<double>(t) + 0.5, -shape.level);
    out[i] = static_cast<std::int64_t>(std::floor(static_cast<double>(d) * std::pow(center, -a)));
  }
  return out;
}

void shift_to_zero(Numerators& values) {
  const std::int64_t lo = *std::min_element(values.begin(), values.end());
  for (auto& v : values) v -= lo;
}

}  // namespace

std::string to_string(GeneratorKind kind) {
  switch (kind) {
    case GeneratorKind::constant:
      return "constant";
    case GeneratorKind::uniform_random:
      return "uniform-random";
    case GeneratorKind::dyadic_martingale:
      return "dyadic-martingale";
    case GeneratorKind::time_step:
      return "time-step";
    case GeneratorKind::one_sided_power:
      return "one-sided-power";
  }
  return "?";
}

GeneratorKind parse_kind(std::string_view text) {
  for (auto k : {GeneratorKind::constant, GeneratorKind::uniform_random, GeneratorKind::dyadic_martingale,
                 GeneratorKind::time_step, GeneratorKind::one_sided_power}) {
    if (text == to_string(k)) return k;
  }
  throw InvalidSpec("unknown generator kind '" + std::string(text) + "'");
}

void GeneratorSpec::validate() const {
  try {
    GridShape{n, level}.validate();
  } catch (const Error& e) {
    throw InvalidSpec(e.what());
  }
  if (mode.fixed && mode.denom <= 0) throw InvalidSpec("fixed-mode denominator must be positive");
  if (kind == GeneratorKind::one_sided_power && (alpha <= 0 || alpha >= 1)) {
    throw InvalidSpec("alpha must lie in (0, 1), got " + exact_string(alpha));
  }
  if (kind == GeneratorKind::constant && mode.fixed &&
      boost::multiprecision::denominator(Rational(value * mode.denom)) != 1) {
    throw InvalidSpec("constant " + exact_string(value) + " is not a multiple of 1/" + std::to_string(mode.denom));
  }
}

AnyGrid generate(const GeneratorSpec& spec) {
  spec.validate();
  const GridShape shape{spec.n, spec.level};
  const std::int64_t d = spec.mode.fixed ? spec.mode.denom : kF64Denominator;
  if (spec.kind == GeneratorKind::constant) {
    const auto count = static_cast<std::size_t>(shape.cell_count());
    if (spec.mode.fixed) return GridFunction<Rational>(shape, std::vector<Rational>(count, spec.value), d);
    return GridFunction<double>(shape, std::vector<double>(count, to_double(spec.value)));
  }

  Engine rng(spec.seed);
  Numerators nums;
  switch (spec.kind) {
    case GeneratorKind::uniform_random:
      nums = uniform_random(shape, d, rng);
      break;
    case GeneratorKind::dyadic_martingale:
      nums = dyadic_martingale(shape, d, rng);
      break;
    case GeneratorKind::time_step:
      nums = time_step(shape, d, rng);
      break;
    case GeneratorKind::one_sided_power:
      nums = one_sided_power(shape, d, spec.alpha);
      break;
    case GeneratorKind::constant:
      break;
  }
  shift_to_zero(nums);

  if (spec.mode.fixed) {
    std::vector<Rational> values;
    values.reserve(nums.size());
    for (std::int64_t v : nums) values.emplace_back(v, d);
    return GridFunction<Rational>(shape, std::move(values), d);
  }
  std::vector<double> values;
  values.reserve(nums.size());
  for (std::int64_t v : nums) values.push_back(static_cast<double>(v) / static_cast<double>(d));
  return GridFunction<double>(shape, std::move(values));
}

std::vector<CorpusEntry> default_corpus() {
  constexpr GeneratorKind kinds[] = {GeneratorKind::uniform_random, GeneratorKind::dyadic_martingale,
                                     GeneratorKind::time_step, GeneratorKind::one_sided_power};
  const Rational alphas[] = {Rational(2, 3), Rational(1, 2), Rational(1, 3)};
  std::vector<CorpusEntry> out;
  for (std::size_t seed = 0; seed < kCorpusSize; ++seed) {
    CorpusEntry e;
    e.index = seed;
    e.spec.kind = kinds[seed % 4];
    e.spec.n = 1 + static_cast<int>((seed / 4) % 2);
    e.spec.level = 3 + static_cast<int>((seed / 8) % 3);
    e.spec.seed = seed;
    e.spec.mode = Mode{true, 64};
    e.spec.alpha = alphas[(seed / 4) % 3];
    out.push_back(std::move(e));
  }
  return out;
}

json manifest_json(const std::vector<CorpusEntry>& entries) {
  json list = json::array();
  for (const CorpusEntry& e : entries) {
    json item = {{"index", e.index},   {"kind", to_string(e.spec.kind)}, {"n", e.spec.n},
                 {"L", e.spec.level}, {"seed", e.spec.seed},             {"mode", e.spec.mode.str()}};
    if (e.spec.kind == GeneratorKind::one_sided_power) item["alpha"] = exact_string(e.spec.alpha);
    if (e.spec.kind == GeneratorKind::constant) item["value"] = exact_string(e.spec.value);
    list.push_back(std::move(item));
  }
  return json{{"version", 1}, {"entries", std::move(list)}};
}

std::vector<CorpusEntry> parse_manifest(const json& doc) {
  if (!doc.is_object() || !doc.contains("entries") || !doc["entries"].is_array()) {
    throw InvalidSpec("manifest needs an 'entries' array");
  }
  std::vector<CorpusEntry> out;
  for (const json& item : doc["entries"]) {
    try {
      CorpusEntry e;
      e.index = item.at("index").get<std::size_t>();
      e.spec.kind = parse_kind(item.at("kind").get<std::string>());
      e.spec.n = item.at("n").get<int>();
      e.spec.level = item.at("L").get<int>();
      e.spec.seed = item.at("seed").get<std::uint64_t>();
      e.spec.mode = Mode::parse(item.value("mode", std::string("fixed:64")));
      if (item.contains("alpha")) e.spec.alpha = parse_rational(item["alpha"].get<std::string>());
      if (item.contains("value")) e.spec.value = parse_rational(item["value"].get<std::string>());
      e.spec.validate();
      out.push_back(std::move(e));
    } catch (const json::exception& ex) {
      throw InvalidSpec(std::string("manifest entry malformed: ") + ex.what());
    }
  }
  std::sort(out.begin(), out.end(), [](const CorpusEntry& a, const CorpusEntry& b) { return a.index < b.index; });
  return out;
}

std::vector<CorpusEntry> load_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidSpec("cannot open manifest " + path.string());
  try {
    return parse_manifest(json::parse(in));
  } catch (const json::parse_error& e) {
    throw InvalidSpec(path.string() + ": " + e.what());
  }
}

}  // namespace pjn
