#include <random>

#include <gtest/gtest.h>

#include "ac0/concepts.hpp"
#include "ac0/sandwiching.hpp"
#include "oracles.hpp"

using namespace ac0;

namespace {

std::vector<int> random_table(std::mt19937_64& rng, int d) {
  std::vector<int> t(1u << d);
  for (auto& v : t) v = (rng() & 1) ? 1 : -1;
  return t;
}

// Best one-sided constant term by vertex enumeration over c_S, |S| <= k.
double oracle_side(const std::vector<int>& table, int d, int k, bool upper) {
  const auto basis = enumerate_monomials(d, k);
  LinearProgram lp(basis.size());
  lp.objective[0] = upper ? -1.0 : 1.0;
  for (std::uint32_t t = 0; t < table.size(); ++t) {
    std::vector<double> row;
    for (auto m : basis) row.push_back(oracle::chi(t, m.mask()));
    lp.add_constraint(row, upper ? Relation::GreaterEqual : Relation::LessEqual, table[t]);
  }
  const auto r = oracle::enumerate_vertices(lp);
  EXPECT_EQ(r.status, LPStatus::Optimal);
  return upper ? -r.value : r.value;
}

}  // namespace

TEST(Sandwich, FullDegreeIsExact) {
  std::mt19937_64 rng(1);
  for (int d = 1; d <= 6; ++d) {
    const auto t = random_table(rng, d);
    const auto s = best_sandwich(t, d, d);
    EXPECT_LE(s.gap, 1e-9);
    EXPECT_LE(sandwich_violation(s, t, d), 1e-7);
  }
}

TEST(Sandwich, ConstantFunction) {
  const std::vector<int> one(8, 1);
  const auto s = best_sandwich(one, 3, 0);
  EXPECT_NEAR(s.p_up.coef(Monomial{}), 1.0, 1e-9);
  EXPECT_NEAR(s.p_down.coef(Monomial{}), 1.0, 1e-9);
  EXPECT_NEAR(s.gap, 0.0, 1e-9);
}

TEST(Sandwich, AndOfTwoAtDegreeOne) {
  const auto t = make_and(2, {1, 2}).truth_table();
  const double up = oracle_side(t, 2, 1, true);
  const double down = oracle_side(t, 2, 1, false);
  const auto s = best_sandwich(t, 2, 1);
  EXPECT_NEAR(s.gap, up - down, 1e-9);
  EXPECT_NEAR(s.gap, 1.0, 1e-9);  // frozen from the oracle: up = 0, down = -1
}

TEST(Sandwich, MatchesOracleOnSmallTables) {
  std::mt19937_64 rng(2);
  for (int rep = 0; rep < 12; ++rep) {
    const int d = 2 + static_cast<int>(rep % 2);
    const auto t = random_table(rng, d);
    for (int k = 0; k <= 1; ++k) {
      const auto s = best_sandwich(t, d, k);
      EXPECT_NEAR(s.gap, oracle_side(t, d, k, true) - oracle_side(t, d, k, false), 1e-7);
    }
  }
}

TEST(Sandwich, Properties) {
  std::mt19937_64 rng(3);
  for (int rep = 0; rep < 8; ++rep) {
    const int d = 3 + rep % 4;
    const auto t = random_table(rng, d);
    double prev = 1e300;
    for (int k = 0; k <= d; ++k) {
      const auto s = best_sandwich(t, d, k);
      EXPECT_GE(s.gap, -1e-9);
      EXPECT_LE(s.gap, prev + 1e-9);
      prev = s.gap;
      EXPECT_LE(sandwich_violation(s, t, d), 1e-7);
      // the difference is a nonnegative polynomial with mean = gap
      const auto diff = s.p_up - s.p_down;
      for (double v : evaluate_on_cube(diff)) EXPECT_GE(v, -1e-7);
      EXPECT_NEAR(uniform_expectation(diff), s.gap, 1e-12);
    }
  }
}

TEST(SandwichDegree, Examples) {
  for (int d = 2; d <= 6; ++d) {
    for (int m = 1; m <= d; ++m) {
      std::vector<int> vars;
      for (int i = 1; i <= m; ++i) vars.push_back(i);
      const auto t = make_parity(d, vars).truth_table();
      for (double eps : {0.0, 0.5, 1.99}) EXPECT_EQ(sandwich_degree(t, d, eps), m) << d << " " << m << " " << eps;
      EXPECT_NEAR(best_sandwich(t, d, m - 1).gap, 2.0, 1e-7);
    }
  }
  EXPECT_EQ(sandwich_degree(std::vector<int>(16, 1), 4, 0.1), 0);
  EXPECT_EQ(sandwich_degree(make_and(2, {1, 2}).truth_table(), 2, 0.0), 2);
}

TEST(SandwichDegree, Errors) {
  EXPECT_THROW(sandwich_degree(std::vector<int>(3, 1), 2, 0.1), std::invalid_argument);
  EXPECT_THROW(sandwich_degree(std::vector<int>{1, 0, 1, 1}, 2, 0.1), std::invalid_argument);
  EXPECT_THROW(best_sandwich(std::vector<int>(4, 1), 2, 3), std::invalid_argument);
  EXPECT_THROW(best_sandwich(std::vector<int>(2, 1), 17, 1), DimensionError);
}

TEST(Curve, OneRowPerEps) {
  const auto rows = sandwich_curve({{"and:S=1,2", 3}}, {0.5, 0.1, 0.0});
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_EQ(rows[0].size, 1);
  EXPECT_EQ(rows[2].degree, 2);
}

TEST(Curve, TribesDegreeGrowsAsEpsShrinks) {
  const std::vector<double> grid{1.0, 0.5, 0.25, 0.1, 0.0};
  const auto rows = sandwich_curve({{"tribes:w=2,m=2", 4}, {"tribes:w=3,m=2", 6}}, grid);
  ASSERT_EQ(rows.size(), 10u);
  for (std::size_t i = 1; i < rows.size(); ++i) {
    if (rows[i].spec == rows[i - 1].spec) EXPECT_GE(rows[i].degree, rows[i - 1].degree);
  }
}

TEST(Curve, ParityFamily) {
  const auto rows = sandwich_curve({{"parity:S=1", 4}, {"parity:S=1,2", 4}, {"parity:S=1,2,3", 4}}, {1.5, 0.3});
  for (const auto& r : rows) {
    const int m = static_cast<int>(std::count(r.spec.begin(), r.spec.end(), ',')) + 1;
    EXPECT_EQ(r.degree, m) << r.spec;
  }
}
