#pragma once

// Degree-k L1 polynomial regression and polynomial threshold functions.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <stdexcept>
#include <utility>
#include <vector>

#include "ac0/contamination.hpp"
#include "ac0/hypercube.hpp"
#include "ac0/lp.hpp"

namespace ac0 {

struct L1Fit {
  Polynomial p;
  double loss = 0.0;  // sum over the sample of |y - p(x)|
};

inline double l1_loss(const Polynomial& p, const LabeledSample& s) {
  double loss = 0.0;
  for (const auto& e : s.examples) loss += std::abs(e.label - eval_poly(p, e.x));
  return loss;
}

/// Minimises sum_{(x,y) in S} |y - p(x)| over deg(p) <= k.
///
/// Identical examples are merged into one weighted residual. For each distinct
/// (x, y) the residual y - p(x) is written as r+ - r- with r+, r- >= 0, and the
/// objective is the weighted sum of r+ + r-. The rows p(x) + r+ - r- = y then
/// start with r+ (y = +1) or r- (y = -1) basic, so no phase one is needed.
inline L1Fit fit_l1(const LabeledSample& s, int k, const LPSolverFn& solver = default_lp_solver()) {
  if (s.size() < 1) throw std::invalid_argument("fit_l1: empty sample");
  const int dim = s.dim;
  if (k < 0 || k > dim) throw std::invalid_argument("fit_l1: need 0 <= k <= d");
  const auto basis = enumerate_monomials(dim, k);
  const std::size_t m = basis.size();

  std::map<std::pair<std::uint32_t, int>, std::size_t> groups;
  for (const auto& e : s.examples) {
    if (e.x.dim() != dim) throw DimensionError("fit_l1: point dimension mismatch");
    if (e.label != 1 && e.label != -1) throw std::invalid_argument("fit_l1: labels must be +1 or -1");
    ++groups[{e.x.index(), e.label}];
  }

  const std::size_t g = groups.size();
  LinearProgram lp(m + 2 * g);
  for (std::size_t j = m; j < m + 2 * g; ++j) lp.set_bounds(j, 0.0, std::nullopt);
  std::size_t row = 0;
  for (const auto& [key, weight] : groups) {
    const auto [idx, y] = key;
    std::vector<double> coefs(m + 2 * g, 0.0);
    for (std::size_t j = 0; j < m; ++j) coefs[j] = (std::popcount(idx & basis[j].mask()) & 1) ? -1.0 : 1.0;
    coefs[m + 2 * row] = 1.0;
    coefs[m + 2 * row + 1] = -1.0;
    lp.add_constraint(std::move(coefs), Relation::Equal, static_cast<double>(y));
    lp.objective[m + 2 * row] = -static_cast<double>(weight);
    lp.objective[m + 2 * row + 1] = -static_cast<double>(weight);
    ++row;
  }

  const LPSolution sol = solver(lp);
  if (!sol.optimal()) {
    throw LPSolverError(std::string("L1 regression LP not solved: ") + to_string(sol.status) + " " + sol.message);
  }
  L1Fit fit{Polynomial::from_dense(dim, k, std::span<const double>(sol.values.data(), m)), 0.0};
  fit.loss = l1_loss(fit.p, s);
  return fit;
}

/// h(x) = sign(p(x) - theta), with sign(0) = +1.
struct PTFHypothesis {
  Polynomial p;
  double theta = 0.0;

  int predict(const Point& x) const { return eval_poly(p, x) - theta >= 0.0 ? 1 : -1; }
};

inline int predict(const PTFHypothesis& h, const Point& x) {
  if (h.p.dim() != x.dim()) throw DimensionError("predict: dimension mismatch");
  return h.predict(x);
}

inline std::size_t count_mistakes(const PTFHypothesis& h, const LabeledSample& s) {
  std::size_t m = 0;
  for (const auto& e : s.examples) m += h.predict(e.x) != e.label;
  return m;
}

/// Picks theta among -inf, the midpoints of consecutive distinct sorted values
/// of p on S, and +inf, minimising the number of mistakes; ties go to the
/// smaller theta.
inline PTFHypothesis choose_threshold(const Polynomial& p, const LabeledSample& s) {
  std::vector<std::pair<double, int>> vals;
  vals.reserve(s.size());
  for (const auto& e : s.examples) vals.emplace_back(eval_poly(p, e.x), e.label);
  std::sort(vals.begin(), vals.end());

  // theta = -inf predicts +1 everywhere.
  std::size_t mistakes = 0;
  for (const auto& [v, y] : vals) mistakes += y != 1;
  std::size_t best = mistakes;
  double best_theta = -std::numeric_limits<double>::infinity();

  // Sweep: raising theta past a group of equal values turns them to -1.
  std::size_t i = 0;
  while (i < vals.size()) {
    std::size_t j = i;
    while (j < vals.size() && vals[j].first == vals[i].first) {
      mistakes += vals[j].second == 1 ? 1 : 0;
      mistakes -= vals[j].second == -1 ? 1 : 0;
      ++j;
    }
    const double theta = j < vals.size() ? 0.5 * (vals[i].first + vals[j].first)
                                         : std::numeric_limits<double>::infinity();
    if (mistakes < best) {
      best = mistakes;
      best_theta = theta;
    }
    i = j;
  }
  return PTFHypothesis{p, best_theta};
}

}  // namespace ac0
