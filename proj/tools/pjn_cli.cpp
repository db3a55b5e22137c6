// pjn: command-line front end.
//
// Exit status: 0 when every asserted inequality holds, 1 when one fails (the
// failing ids go to stderr), 2 for usage or input errors.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "pjn/corpus.hpp"
#include "pjn/decomposition.hpp"
#include "pjn/errors.hpp"
#include "pjn/grid_io.hpp"
#include "pjn/maximal.hpp"
#include "pjn/runner.hpp"
#include "pjn/seminorms.hpp"
#include "pjn/serialize.hpp"
#include "pjn/verification.hpp"

namespace {

using nlohmann::json;
using namespace pjn;

constexpr int kExitFail = 1;
constexpr int kExitUsage = 2;

struct Options {
  std::string input;
  std::string mode;
  std::string p = "2";
  std::string b;
  std::string lambda = "auto";
  std::string variant = "grid";
  std::string functional = "jnp-plus";
  std::string out;
  std::string csv;
  std::string manifest = "data/corpus_manifest.json";
  std::string kind = "uniform-random";
  std::string value = "0";
  std::string alpha = "1/2";
  int n = 1;
  int level = 3;
  std::uint64_t seed = 0;
  unsigned jobs = 1;
};

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

AnyGrid load_input(const Options& o) {
  if (o.input.empty()) throw UsageError("--input is required");
  AnyGrid g = load_grid(o.input);
  if (!o.mode.empty()) g = convert(g, Mode::parse(o.mode));
  return g;
}

Exponent parse_p(const Options& o) {
  try {
    return Exponent::parse(o.p);
  } catch (const std::exception& e) {
    throw UsageError("--p: " + std::string(e.what()));
  }
}

Rational parse_b(const Options& o, int n) {
  if (o.b.empty()) return pow2<Rational>(-n - 1);
  try {
    return parse_rational(o.b);
  } catch (const std::exception& e) {
    throw UsageError("--b: " + std::string(e.what()));
  }
}

// nullopt for "auto".
std::optional<std::vector<Rational>> parse_lambdas(const std::string& text) {
  if (text == "auto") return std::nullopt;
  std::vector<Rational> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      out.push_back(parse_rational(item));
    } catch (const std::exception&) {
      throw UsageError("--lambda: '" + item + "' is not a number");
    }
    if (out.back() <= 0) throw UsageError("--lambda: values must be positive");
  }
  if (out.empty()) throw UsageError("--lambda: empty list");
  return out;
}

template <Scalar S>
std::vector<S> lambda_values(const Options& o, const GridFunction<S>& f, const LemmaParams& params, double k_plus) {
  std::vector<S> out;
  if (auto list = parse_lambdas(o.lambda)) {
    for (const Rational& r : *list) out.push_back(from_rational<S>(r));
  } else {
    for (double x : default_lambda_grid(f, DyadicCube::root(f.dim()), params, k_plus)) out.push_back(from_double<S>(x));
  }
  return out;
}

void emit(const Options& o, const json& doc) {
  const std::string text = doc.dump(2) + "\n";
  if (o.out.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(o.out);
  if (!out) throw UsageError("--out: cannot write " + o.out);
  out << text;
}

int finish(const std::vector<std::string>& failed) {
  if (failed.empty()) return 0;
  std::cerr << "assertion failed:";
  for (const std::string& id : failed) std::cerr << ' ' << id;
  std::cerr << '\n';
  return kExitFail;
}

int cmd_gen(const Options& o) {
  if (o.out.empty()) throw UsageError("--out is required for gen");
  GeneratorSpec spec;
  spec.kind = parse_kind(o.kind);
  spec.n = o.n;
  spec.level = o.level;
  spec.seed = o.seed;
  spec.mode = Mode::parse(o.mode.empty() ? "fixed:64" : o.mode);
  spec.value = parse_rational(o.value);
  spec.alpha = parse_rational(o.alpha);
  save_grid(generate(spec), o.out);
  return 0;
}

int cmd_seminorm(const Options& o) {
  const AnyGrid g = load_input(o);
  const Exponent p = parse_p(o);
  const Functional functional = parse_functional(o.functional);
  return std::visit(
      [&](const auto& f) {
        const DyadicCube root = DyadicCube::root(f.dim());
        json doc = to_json(jnp_dyadic(f, root, p, functional));
        const auto bmo = bmo_plus_dyadic(f, root);
        const auto limit = bmo_plus_limit_form(f, root);
        doc["bmo_plus"] = {{"value", scalar_json(bmo.value)}, {"cube", cube_json(bmo.cube)}};
        doc["limit_form"] = {{"value", scalar_json(limit.value)}, {"cube", cube_json(limit.cube)}};
        emit(o, doc);
        return 0;
      },
      g);
}

int cmd_oracle(const Options& o) {
  const AnyGrid g = load_input(o);
  const Exponent p = parse_p(o);
  const Functional functional = parse_functional(o.functional);
  return std::visit(
      [&](const auto& f) {
        const DyadicCube root = DyadicCube::root(f.dim());
        const SeminormResult oracle = antichain_oracle(f, root, p, functional);
        const SeminormResult dp = jnp_dyadic(f, root, p, functional);
        bool agree = false;
        if (oracle.witness.weight.exact && dp.witness.weight.exact) {
          agree = *oracle.witness.weight.exact == *dp.witness.weight.exact;
        } else {
          agree = std::abs(oracle.witness.weight.approx - dp.witness.weight.approx) <=
                  1e-12 * std::max(1.0, std::abs(dp.witness.weight.approx));
        }
        emit(o, json{{"oracle", to_json(oracle)}, {"dp", to_json(dp)}, {"agree", agree}});
        return finish(agree ? std::vector<std::string>{} : std::vector<std::string>{"oracle-agreement"});
      },
      g);
}

int cmd_maximal(const Options& o) {
  const AnyGrid g = load_input(o);
  const MaximalVariant variant = parse_variant(o.variant);
  return std::visit(
      [&](const auto& f) {
        emit(o, to_json(maximal_function(f, DyadicCube::root(f.dim()), variant)));
        return 0;
      },
      g);
}

int cmd_decompose(const Options& o) {
  const AnyGrid g = load_input(o);
  return std::visit(
      [&](const auto& f) {
        using S = std::decay_t<decltype(f.values()[0])>;
        const DyadicCube root = DyadicCube::root(f.dim());
        const LemmaParams params = LemmaParams::make(f.dim(), parse_p(o), parse_b(o, f.dim()));
        const double k_plus = o.lambda == "auto" ? jnp_plus_dyadic(f, root, params.p).value : 0.0;
        const MaximalField<S> grid_field = maximal_function(f, root, MaximalVariant::grid);
        const MaximalField<S> aug_field = maximal_function(f, root, MaximalVariant::augmented);
        json runs = json::array();
        VerificationReport all;
        for (const S& lambda : lambda_values(o, f, params, k_plus)) {
          const Decomposition<S> d = cz_decompose(f, root, lambda);
          VerificationReport report = check_stopping(f, d, grid_field);
          report.append(check_subfamily(f.shape(), d));
          report.append(check_p2(f, d));
          report.append(weak_type_check(f, d, &aug_field));
          all.append(report);
          runs.push_back({{"decomposition", to_json(d)}, {"report", to_json(report)}});
        }
        emit(o, json{{"pass", all.passed()}, {"runs", std::move(runs)}});
        return finish(all.failed_ids());
      },
      g);
}

int cmd_good_lambda(const Options& o) {
  const AnyGrid g = load_input(o);
  return std::visit(
      [&](const auto& f) {
        using S = std::decay_t<decltype(f.values()[0])>;
        const DyadicCube root = DyadicCube::root(f.dim());
        const LemmaParams params = LemmaParams::make(f.dim(), parse_p(o), parse_b(o, f.dim()));
        const GoodLambda<S> gl(f, root, params);
        json runs = json::array();
        VerificationReport all;
        for (const S& lambda : lambda_values(o, f, params, gl.seminorm().value)) {
          const VerificationReport report = gl.check(lambda);
          all.append(report);
          runs.push_back({{"lambda", scalar_json(lambda)}, {"report", to_json(report)}});
        }
        emit(o, json{{"p", params.p.str()},
                     {"b", exact_string(params.b)},
                     {"a", exact_string(params.a)},
                     {"seminorm", to_json(gl.seminorm())},
                     {"pass", all.passed()},
                     {"runs", std::move(runs)}});
        return finish(all.failed_ids());
      },
      g);
}

int cmd_theorem(const Options& o) {
  const AnyGrid g = load_input(o);
  return std::visit(
      [&](const auto& f) {
        using S = std::decay_t<decltype(f.values()[0])>;
        const DyadicCube root = DyadicCube::root(f.dim());
        const LemmaParams params = LemmaParams::make(f.dim(), parse_p(o), parse_b(o, f.dim()));
        const SeminormResult k = jnp_plus_dyadic(f, root, params.p);
        const std::vector<S> lambdas = lambda_values(o, f, params, k.value);
        const TheoremRun<S> run = theorem_check(f, root, params, std::span<const S>(lambdas), k);
        emit(o, to_json(run));
        if (!o.csv.empty()) {
          std::ofstream csv(o.csv);
          if (!csv) throw UsageError("--csv: cannot write " + o.csv);
          csv << theorem_csv(run);
        }
        return finish(run.report.failed_ids());
      },
      g);
}

int cmd_corpus(const Options& o) {
  const std::vector<CorpusEntry> entries = load_manifest(o.manifest);
  SweepOptions options;
  options.ps = {parse_p(o)};
  if (!o.b.empty()) options.b = parse_rational(o.b);
  const unsigned jobs = o.jobs == 0 ? std::max(1u, std::thread::hardware_concurrency()) : o.jobs;
  const auto outcomes = sweep_corpus(entries, options, jobs);
  const json doc = corpus_json(outcomes);
  emit(o, doc);
  std::vector<std::string> failed;
  for (const auto& id : doc["summary"]["failed"]) failed.push_back(id.get<std::string>());
  return finish(failed);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Forward-in-time dyadic John-Nirenberg toolkit"};
  app.require_subcommand(1);
  Options o;

  auto input_flags = [&](CLI::App* cmd) {
    cmd->add_option("--input", o.input, "grid header (.json), payload (.bin), or n=1 JSON array");
    cmd->add_option("--mode", o.mode, "convert to f64 or fixed:D before running");
    cmd->add_option("--out", o.out, "write the JSON report here instead of stdout");
  };
  auto lemma_flags = [&](CLI::App* cmd) {
    cmd->add_option("--p", o.p, "exponent p > 1 (rational)");
    cmd->add_option("--b", o.b, "0 < b < 2^-n (rational); default 2^-(n+1)");
    cmd->add_option("--lambda", o.lambda, "comma-separated list or auto");
  };

  CLI::App* gen = app.add_subcommand("gen", "generate a grid function");
  gen->add_option("--kind", o.kind, "constant|uniform-random|dyadic-martingale|time-step|one-sided-power");
  gen->add_option("--n", o.n, "dimension");
  gen->add_option("--L", o.level, "level");
  gen->add_option("--seed", o.seed, "RNG seed");
  gen->add_option("--mode", o.mode, "f64 or fixed:D (default fixed:64)");
  gen->add_option("--value", o.value, "value for constant");
  gen->add_option("--alpha", o.alpha, "exponent for one-sided-power");
  gen->add_option("--out", o.out, "output stem")->required();

  CLI::App* seminorm = app.add_subcommand("seminorm", "dyadic John-Nirenberg seminorm with witness");
  input_flags(seminorm);
  seminorm->add_option("--p", o.p, "exponent p > 1");
  seminorm->add_option("--functional", o.functional, "jnp-plus or jnp-classical");

  CLI::App* oracle = app.add_subcommand("oracle", "brute-force antichain enumeration against the tree fold");
  input_flags(oracle);
  oracle->add_option("--p", o.p, "exponent p > 1");
  oracle->add_option("--functional", o.functional, "jnp-plus or jnp-classical");

  CLI::App* maximal = app.add_subcommand("maximal", "forward dyadic maximal function on the root");
  input_flags(maximal);
  maximal->add_option("--variant", o.variant, "grid or augmented");

  CLI::App* decompose = app.add_subcommand("decompose", "stopping-time decomposition and its checks");
  input_flags(decompose);
  lemma_flags(decompose);

  CLI::App* verify = app.add_subcommand("verify", "verification sweeps");
  verify->require_subcommand(1);
  CLI::App* good = verify->add_subcommand("good-lambda", "good-lambda inequality");
  input_flags(good);
  lemma_flags(good);
  CLI::App* theorem = verify->add_subcommand("theorem", "weak-L^p bound over a lambda grid");
  input_flags(theorem);
  lemma_flags(theorem);
  theorem->add_option("--csv", o.csv, "also write lambda,E_grid,E_aug,dist,bound,pass rows");
  CLI::App* corpus = verify->add_subcommand("corpus", "every check over a manifest");
  corpus->add_option("--manifest", o.manifest, "corpus manifest JSON");
  corpus->add_option("--p", o.p, "exponent p > 1");
  corpus->add_option("--b", o.b, "fixed b; default 2^-(n+1) per entry");
  corpus->add_option("--jobs", o.jobs, "worker threads (0 = all cores)");
  corpus->add_option("--out", o.out, "write the JSON report here instead of stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (*gen) return cmd_gen(o);
    if (*seminorm) return cmd_seminorm(o);
    if (*oracle) return cmd_oracle(o);
    if (*maximal) return cmd_maximal(o);
    if (*decompose) return cmd_decompose(o);
    if (*good) return cmd_good_lambda(o);
    if (*theorem) return cmd_theorem(o);
    if (*corpus) return cmd_corpus(o);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitUsage;
}
