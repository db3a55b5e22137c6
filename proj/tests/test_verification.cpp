#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "pjn/errors.hpp"
#include "pjn/verification.hpp"
#include "support.hpp"

namespace pjn {
namespace {

using testing::NCube;

const InequalityRecord& record(const VerificationReport& r, const std::string& id) {
  for (const auto& rec : r.records()) {
    if (rec.id == id) return rec;
  }
  throw std::logic_error("no record " + id);
}

TEST(LemmaParams, Constants) {
  const auto params = LemmaParams::make(1, Exponent::parse("2"), Rational(1, 4));
  EXPECT_EQ(params.a, Rational(8));
  EXPECT_EQ(params.q.value(), Rational(2));
  EXPECT_EQ(LemmaParams::make(2, Exponent::parse("3"), Rational(1, 8)).a, Rational(8));
  EXPECT_THROW(LemmaParams::make(1, Exponent::parse("2"), Rational(1, 2)), InvalidParams);
  EXPECT_THROW(LemmaParams::make(2, Exponent::parse("2"), Rational(1, 4)), InvalidParams);
  EXPECT_THROW(LemmaParams::make(1, Exponent::parse("2"), Rational(0)), InvalidParams);
  EXPECT_THROW(LemmaParams::make(1, Exponent::parse("1"), Rational(1, 4)), InvalidParams);
}

TEST(Lambda0, Formula) {
  const DyadicCube root = DyadicCube::root(1);
  EXPECT_DOUBLE_EQ(lambda0(1.0, root, LemmaParams::make(1, Exponent::parse("2"), Rational(1, 4))), 8.0);
  EXPECT_DOUBLE_EQ(lambda0(1.0, root, LemmaParams::make(1, Exponent::parse("2"), Rational(1, 8))), 16.0);
  const auto params = LemmaParams::make(1, Exponent::parse("2"), Rational(1, 4));
  EXPECT_EQ(lambda0(testing::constant_grid(1, 2, Rational(3)), root, params), 0.0);
  EXPECT_NEAR(lambda0(testing::example_1d(), root, params), 8.0 * std::sqrt(2.5), 1e-12);
  // A subcube root of volume 1/4 with p = 2: 2K / (b (1/4)^{1/2}).
  EXPECT_DOUBLE_EQ(lambda0(1.0, DyadicCube(1, 2, {}, 0), params), 16.0);
}

// Term N of the iteration bound, evaluated directly in the linear domain.
double direct_term(double a, double b, double p, int big_n) {
  const double q = p / (p - 1);
  double s = 0;
  for (int k = 1; k <= big_n; ++k) s += k * std::pow(q, -(k - 1));
  const double qn = std::pow(q, -big_n);
  return std::pow(a, p - p * qn) * std::pow(b, -s + qn - (big_n + 2) * p * qn) * std::pow(2.0, (1 + p) * qn);
}

TEST(ProofConstant, SmallLambdaAndLimit) {
  const auto pc = proof_constant_terms(1, Exponent::parse("2"), Rational(1, 4));
  EXPECT_NEAR(pc.small_lambda, 64.0, 1e-9);
  EXPECT_NEAR(pc.limit, 64.0 * 256.0, 1e-6);
  EXPECT_NEAR(pc.value(), 16384.0, 1e-6);
}

TEST(ProofConstant, SeriesIdentity) {
  for (double p : {1.5, 2.0, 3.0, 7.0}) {
    const double q = p / (p - 1);
    double s = 0;
    for (int k = 1; k <= 4000; ++k) s += k * std::pow(q, -(k - 1));
    EXPECT_NEAR(s, p * p, 1e-9 * p * p);
  }
}

TEST(ProofConstant, MatchesDirectSupremum) {
  for (int n = 1; n <= 3; ++n) {
    for (const char* ptext : {"3/2", "2", "3", "5"}) {
      for (int shift : {1, 2, 4}) {
        const Exponent p = Exponent::parse(ptext);
        const Rational b = pow2<Rational>(-n - shift);
        const auto params = LemmaParams::make(n, p, b);
        const double a = to_double(params.a);
        const double bd = to_double(b);
        const double pd = p.approx();
        double sup = 0;
        for (int big_n = 0; big_n <= 400; ++big_n) {
          const double t = direct_term(a, bd, pd, big_n);
          ASSERT_TRUE(std::isfinite(t));
          ASSERT_NEAR(std::log(t), log_iteration_term(params, big_n), 1e-9 * std::max(1.0, std::abs(std::log(t))));
          sup = std::max(sup, t);
        }
        const double limit = std::pow(a, pd) * std::pow(bd, -pd * pd);
        const double expected = std::max({std::pow(2 / bd, pd), sup, limit});
        const double c = proof_constant(n, p, b);
        ASSERT_TRUE(std::isfinite(c));
        EXPECT_NEAR(c, expected, 1e-9 * expected) << n << " " << ptext << " " << shift;
      }
    }
  }
}

TEST(GoodLambda, WorkedExample) {
  const auto f = testing::example_1d();
  const auto params = LemmaParams::make(1, Exponent::parse("2"), Rational(1, 4));
  const auto report = good_lambda_check(f, DyadicCube::root(1), params, Rational(4));
  const auto& lemma = record(report, "lemma");
  EXPECT_TRUE(lemma.admissible);
  EXPECT_EQ(lemma.lhs.exact, "0");
  EXPECT_TRUE(report.passed());
}

TEST(GoodLambda, ConstantIsVacuous) {
  const auto c = testing::constant_grid(2, 2, Rational(5));
  const auto params = LemmaParams::make(2, Exponent::parse("2"), Rational(1, 8));
  const GoodLambda<Rational> gl(c, DyadicCube::root(2), params);
  for (const Rational& lambda : {Rational(1, 100), Rational(1), Rational(50)}) {
    const auto report = gl.check(lambda);
    EXPECT_TRUE(record(report, "lemma").admissible);
    EXPECT_EQ(record(report, "lemma").lhs.exact, "0");
    EXPECT_TRUE(report.passed());
  }
}

TEST(GoodLambda, InadmissibleIsFlagged) {
  // g is large on root+: mean over root+ of g is 4 while b lambda = 1/4.
  std::vector<Rational> v(12, Rational(0));
  for (int i = 4; i < 8; ++i) v[static_cast<std::size_t>(i)] = 4;
  const GridFunction<Rational> f(GridShape{1, 2}, v, 1);
  const auto params = LemmaParams::make(1, Exponent::parse("2"), Rational(1, 4));
  const GoodLambda<Rational> gl(f, DyadicCube::root(1), params);
  EXPECT_FALSE(gl.admissible(Rational(1)));
  const auto report = gl.check(Rational(1));
  EXPECT_FALSE(record(report, "lemma").admissible);
  EXPECT_TRUE(report.passed());
  EXPECT_TRUE(gl.admissible(Rational(16)));
}

struct LemmaOracle {
  std::set<std::int64_t> e_lambda;
  std::set<std::int64_t> e_b_lambda;
  std::set<std::int64_t> union_ej;
  bool inclusion = true;
  bool admissible = false;
};

// Cellwise recomputation of E(lambda), E(b lambda), the sets E_{Q_j}(lambda)
// over the stopping cubes of g at b lambda, and the inclusion into
// {M_{Q_j} g_j > (1 - 2^n b) lambda}.
LemmaOracle lemma_oracle(const GridFunction<Rational>& f, const Rational& b, const Rational& lambda) {
  const GridShape& s = f.shape();
  const int n = f.dim();
  const NCube root{0, std::vector<std::int64_t>(static_cast<std::size_t>(n), 0)};
  const Rational c0 = testing::naive_mean(f, root.fwd().fwd());
  const GridFunction<Rational> g = f.map([&](const Rational& v) { return v > c0 ? Rational(v - c0) : Rational(0); });
  LemmaOracle out;
  for (const auto& cell : testing::root_cells(s)) {
    const Rational m = testing::naive_maximal(g, cell, false);
    if (m > lambda) out.e_lambda.insert(testing::linear(s, cell));
    if (m > b * lambda) out.e_b_lambda.insert(testing::linear(s, cell));
  }
  out.admissible = b * lambda >= testing::naive_mean(g, root.fwd());
  const Rational threshold = (1 - pow2<Rational>(n) * b) * lambda;
  for (const NCube& qj : testing::naive_stopping(g, Rational(b * lambda))) {
    const Rational cj = testing::naive_mean(f, qj.fwd().fwd());
    for (const auto& cell : testing::leaf_cells(s, qj)) {
      const NCube leaf{s.level, cell};
      Rational mg = 0;
      Rational mgj = 0;
      for (int k = qj.k; k <= s.level; ++k) {
        const NCube a = testing::ancestor(leaf, k);
        mg = std::max(mg, testing::naive_mean(g, a.fwd()));
        mgj = std::max(mgj, testing::naive_pos_mean(f, {a.fwd()}, cj));
      }
      if (mg > lambda) {
        out.union_ej.insert(testing::linear(s, cell));
        if (!(mgj > threshold)) out.inclusion = false;
      }
    }
  }
  return out;
}

TEST(GoodLambda, MatchesCellwiseOracle) {
  for (std::uint64_t seed = 0; seed < 24; ++seed) {
    const int n = 1 + static_cast<int>(seed % 2);
    const int level = 2 + static_cast<int>(seed % 2);
    const auto f = testing::random_fixed(n, level, 4000 + seed, 0, 24, 4);
    const Rational b = pow2<Rational>(-n - 1 - static_cast<int>(seed % 3 == 0));
    const auto params = LemmaParams::make(n, Exponent::parse("2"), b);
    const GoodLambda<Rational> gl(f, DyadicCube::root(n), params);
    const double k = gl.seminorm().value;
    for (const Rational& lambda : {Rational(1, 4), Rational(1), Rational(2), Rational(4), Rational(16)}) {
      const LemmaOracle o = lemma_oracle(f, b, lambda);
      const auto report = gl.check(lambda);
      const auto& lemma = record(report, "lemma");
      ASSERT_EQ(lemma.admissible, o.admissible);
      const double e = std::ldexp(static_cast<double>(o.e_lambda.size()), -level * n);
      const double eb = std::ldexp(static_cast<double>(o.e_b_lambda.size()), -level * n);
      EXPECT_DOUBLE_EQ(lemma.lhs.decimal, e);
      if (!o.admissible) continue;
      // The decomposition identity and the inclusion are facts about the
      // construction; they must hold and the checker must agree.
      ASSERT_EQ(o.union_ej, o.e_lambda) << "seed " << seed;
      ASSERT_TRUE(o.inclusion) << "seed " << seed;
      EXPECT_TRUE(record(report, "p6").pass);
      EXPECT_TRUE(record(report, "p8").pass);
      EXPECT_TRUE(record(report, "p7").pass);
      EXPECT_TRUE(record(report, "p2").pass);
      const double rhs = 8.0 / (1.0 - std::ldexp(to_double(b), n)) / 2.0 * k / to_double(lambda) * std::sqrt(eb);
      EXPECT_LE(e, rhs * (1 + 1e-9));
      EXPECT_TRUE(lemma.pass);
    }
  }
}

TEST(GoodLambda, FloatModeAgrees) {
  const auto f = testing::random_fixed(2, 3, 77, 0, 30, 4);
  const auto fd = testing::to_f64(f);
  const auto params = LemmaParams::make(2, Exponent::parse("3/2"), Rational(1, 16));
  const GoodLambda<Rational> exact(f, DyadicCube::root(2), params);
  const GoodLambda<double> approx(fd, DyadicCube::root(2), params);
  for (double lambda : {0.5, 1.0, 3.0, 7.5}) {
    const auto re = exact.check(from_double<Rational>(lambda));
    const auto rd = approx.check(lambda);
    ASSERT_EQ(re.records().size(), rd.records().size());
    for (std::size_t i = 0; i < re.records().size(); ++i) {
      EXPECT_EQ(re.records()[i].id, rd.records()[i].id);
      EXPECT_EQ(re.records()[i].pass, rd.records()[i].pass);
      EXPECT_NEAR(re.records()[i].lhs.decimal, rd.records()[i].lhs.decimal, 1e-9);
    }
  }
}

TEST(Theorem, WorkedExample) {
  const auto f = testing::example_1d();
  const auto params = LemmaParams::make(1, Exponent::parse("2"), Rational(1, 4));
  const std::vector<Rational> lambdas{Rational(1), Rational(5)};
  const auto run = theorem_check(f, DyadicCube::root(1), params, std::span<const Rational>(lambdas));
  EXPECT_NEAR(run.lambda0, 8.0 * std::sqrt(2.5), 1e-12);
  EXPECT_NEAR(run.c_proof, 16384.0, 1e-6);
  ASSERT_EQ(run.records.size(), 2u);
  EXPECT_EQ(run.records[0].e_grid, Rational(3, 4));
  EXPECT_EQ(run.records[0].e_aug, Rational(1));
  EXPECT_EQ(run.records[0].dist, Rational(1, 4));
  EXPECT_EQ(run.records[0].branch, "trivial");
  EXPECT_NEAR(run.records[0].bound, 16384.0 * 2.5, 1e-6);
  EXPECT_EQ(run.records[1].e_grid, Rational(0));
  EXPECT_EQ(run.records[1].dist, Rational(0));
  EXPECT_EQ(run.records[1].e_aug, Rational(0));
  EXPECT_NEAR(run.c_empirical_grid, 0.75 / 2.5, 1e-12);
  EXPECT_TRUE(run.report.passed());
  EXPECT_TRUE(record(run.report, "p11").pass);
  EXPECT_TRUE(record(run.report, "p11").exact);
}

TEST(Theorem, ConstantIsVacuous) {
  const auto c = testing::constant_grid(1, 3, Rational(2));
  const auto params = LemmaParams::make(1, Exponent::parse("2"), Rational(1, 4));
  const std::vector<Rational> lambdas{Rational(1, 8), Rational(1), Rational(3)};
  const auto run = theorem_check(c, DyadicCube::root(1), params, std::span<const Rational>(lambdas));
  for (const auto& r : run.records) {
    EXPECT_EQ(r.e_grid, 0);
    EXPECT_EQ(r.e_aug, 0);
    EXPECT_EQ(r.dist, 0);
  }
  EXPECT_EQ(run.lambda0, 0.0);
  EXPECT_TRUE(run.report.passed());
}

TEST(Theorem, LadderIndexing) {
  const auto f = testing::random_fixed(1, 3, 5, 0, 40, 4);
  const auto params = LemmaParams::make(1, Exponent::parse("2"), Rational(1, 4));
  const double l0 = lambda0(f, DyadicCube::root(1), params);
  ASSERT_GT(l0, 0);
  std::vector<Rational> lambdas;
  for (int k = 0; k <= 3; ++k) lambdas.push_back(from_double<Rational>(l0 * std::pow(4.0, k) * 1.5));
  const auto run = theorem_check(f, DyadicCube::root(1), params, std::span<const Rational>(lambdas));
  for (int k = 0; k <= 3; ++k) {
    EXPECT_EQ(run.records[static_cast<std::size_t>(k)].branch, "iteration");
    EXPECT_EQ(run.records[static_cast<std::size_t>(k)].ladder_n, k);
  }
}

TEST(Theorem, RandomInstancesAgainstNaiveMeasures) {
  for (std::uint64_t seed = 0; seed < 12; ++seed) {
    const int n = 1 + static_cast<int>(seed % 2);
    const auto f = testing::random_fixed(n, 3, 6000 + seed, 0, 50, 4);
    const auto params = LemmaParams::make(n, Exponent::parse("2"), pow2<Rational>(-n - 1));
    const DyadicCube root = DyadicCube::root(n);
    const auto grid = default_lambda_grid(f, root, params, jnp_plus_dyadic(f, root, params.p).value);
    std::vector<Rational> lambdas;
    for (double x : grid) lambdas.push_back(from_double<Rational>(x));
    const auto run = theorem_check(f, root, params, std::span<const Rational>(lambdas));
    EXPECT_TRUE(run.report.passed()) << seed;
    EXPECT_LE(run.c_empirical_grid, run.c_proof);
    EXPECT_TRUE(std::isfinite(run.c_empirical_aug));

    const NCube r0{0, std::vector<std::int64_t>(static_cast<std::size_t>(n), 0)};
    const Rational c0 = testing::naive_mean(f, r0.fwd().fwd());
    const auto g = f.map([&](const Rational& v) { return v > c0 ? Rational(v - c0) : Rational(0); });
    for (std::size_t i = 0; i < lambdas.size(); i += 7) {
      long grid_count = 0;
      long aug_count = 0;
      long dist_count = 0;
      for (const auto& cell : testing::root_cells(f.shape())) {
        grid_count += testing::naive_maximal(g, cell, false) > lambdas[i];
        aug_count += testing::naive_maximal(g, cell, true) > lambdas[i];
        dist_count += g.at(testing::linear(f.shape(), cell)) > lambdas[i];
      }
      const Rational cell = testing::naive_volume<Rational>(n, 3);
      EXPECT_EQ(run.records[i].e_grid, grid_count * cell);
      EXPECT_EQ(run.records[i].e_aug, aug_count * cell);
      EXPECT_EQ(run.records[i].dist, dist_count * cell);
    }
  }
}

TEST(DefaultGrid, Shape) {
  const auto f = testing::example_1d();
  const auto params = LemmaParams::make(1, Exponent::parse("2"), Rational(1, 4));
  const double k = std::sqrt(2.5);
  const auto grid = default_lambda_grid(f, DyadicCube::root(1), params, k);
  EXPECT_EQ(grid.size(), 64u + 9u);
  EXPECT_TRUE(std::is_sorted(grid.begin(), grid.end()));
  EXPECT_NEAR(grid.front(), 4.0 / 1024.0, 1e-15);
  const double l0 = 8.0 * k;
  EXPECT_NE(std::find(grid.begin(), grid.end(), l0), grid.end());
  // max g + 1 = 5 ends the log-spaced part.
  EXPECT_NE(std::find_if(grid.begin(), grid.end(), [](double x) { return std::abs(x - 5.0) < 1e-12; }), grid.end());
  const auto flat = default_lambda_grid(testing::constant_grid(1, 2, Rational(1)), DyadicCube::root(1), params, 0.0);
  EXPECT_EQ(flat.size(), 64u);
}

}  // namespace
}  // namespace pjn
