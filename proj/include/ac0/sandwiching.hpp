#pragma once

// Optimal l1-sandwiching polynomials of explicit functions, computed by LP
// over all 2^d points of the cube.

#include <cmath>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "ac0/concepts.hpp"
#include "ac0/hypercube.hpp"
#include "ac0/lp.hpp"

namespace ac0 {

inline constexpr int kMaxSandwichDim = 16;

/// Slack allowed when comparing a gap against eps.
inline constexpr double kGapTol = 1e-9;

struct SandwichPair {
  Polynomial p_up;
  Polynomial p_down;
  double gap = 0.0;  // E[p_up - p_down] = c_up(empty) - c_down(empty)
};

namespace detail {

inline void check_table(std::span<const int> table, int dim) {
  if (dim <= 0 || dim > kMaxSandwichDim) throw DimensionError("sandwich: d must be in [1, 16]");
  if (table.size() != (std::size_t{1} << dim)) throw std::invalid_argument("sandwich: table size must be 2^d");
  for (int v : table) {
    if (v != 1 && v != -1) throw std::invalid_argument("sandwich: table entries must be +1 or -1");
  }
}

// Optimal one-sided approximator: above f (upper) or below f (lower), with the
// smallest (resp. largest) constant coefficient.
inline Polynomial one_sided(std::span<const int> table, int dim, int k, bool upper, const LPSolverFn& solver) {
  const auto basis = enumerate_monomials(dim, k);
  const std::size_t m = basis.size();
  LinearProgram lp(m);
  lp.objective[0] = upper ? -1.0 : 1.0;  // basis[0] is the empty monomial
  for (std::uint32_t t = 0; t < table.size(); ++t) {
    std::vector<double> row(m);
    for (std::size_t j = 0; j < m; ++j) row[j] = (std::popcount(t & basis[j].mask()) & 1) ? -1.0 : 1.0;
    lp.add_constraint(std::move(row), upper ? Relation::GreaterEqual : Relation::LessEqual,
                      static_cast<double>(table[t]));
  }
  const LPSolution sol = solver(lp);
  if (!sol.optimal()) {
    throw LPSolverError(std::string("sandwich LP not solved: ") + to_string(sol.status) + " " + sol.message);
  }
  return Polynomial::from_dense(dim, k, sol.values);
}

}  // namespace detail

/// Minimises E[p_up - p_down] subject to p_down <= f <= p_up on every vertex.
/// The two sides decouple into independent LPs.
inline SandwichPair best_sandwich(std::span<const int> table, int dim, int k,
                                  const LPSolverFn& solver = default_lp_solver()) {
  detail::check_table(table, dim);
  if (k < 0 || k > dim) throw std::invalid_argument("best_sandwich: need 0 <= k <= d");
  SandwichPair out{detail::one_sided(table, dim, k, true, solver), detail::one_sided(table, dim, k, false, solver), 0.0};
  out.gap = uniform_expectation(out.p_up) - uniform_expectation(out.p_down);
  return out;
}

/// Smallest k whose optimal sandwich gap is <= eps (never more than d).
inline int sandwich_degree(std::span<const int> table, int dim, double eps,
                           const LPSolverFn& solver = default_lp_solver()) {
  detail::check_table(table, dim);
  for (int k = 0; k < dim; ++k) {
    if (best_sandwich(table, dim, k, solver).gap <= eps + kGapTol) return k;
  }
  return dim;
}

/// Largest pointwise violation of p_down <= f <= p_up.
inline double sandwich_violation(const SandwichPair& pair, std::span<const int> table, int dim) {
  double worst = 0.0;
  for (std::uint32_t t = 0; t < table.size(); ++t) {
    const Point x = Point::from_index(dim, t);
    worst = std::max(worst, table[t] - eval_poly(pair.p_up, x));
    worst = std::max(worst, eval_poly(pair.p_down, x) - table[t]);
  }
  return worst;
}

struct CurveMember {
  std::string spec;  // make_named family string
  int dim = 1;
};

struct CurveRow {
  std::string spec;
  int dim = 1;
  int size = 0;
  int depth = 0;
  double eps = 0.0;
  int degree = 0;
};

/// Empirical sandwiching degree for each family member and eps.
inline std::vector<CurveRow> sandwich_curve(const std::vector<CurveMember>& family, const std::vector<double>& eps_grid,
                                            const LPSolverFn& solver = default_lp_solver()) {
  std::vector<CurveRow> rows;
  for (const auto& member : family) {
    const Circuit c = make_named(member.spec, member.dim);
    const auto table = c.truth_table();
    // Gaps per degree are reused across the eps grid.
    std::vector<double> gaps;
    for (int k = 0; k <= member.dim; ++k) gaps.push_back(best_sandwich(table, member.dim, k, solver).gap);
    for (double eps : eps_grid) {
      int degree = member.dim;
      for (int k = 0; k <= member.dim; ++k) {
        if (gaps[k] <= eps + kGapTol) {
          degree = k;
          break;
        }
      }
      rows.push_back({member.spec, member.dim, c.size(), c.depth(), eps, degree});
    }
  }
  return rows;
}

}  // namespace ac0
