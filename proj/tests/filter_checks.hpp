#pragma once

// Post-hoc checks on a filter report, recomputed from the report and the
// input sample rather than trusted from the filter's own bookkeeping.

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "ac0/contamination.hpp"
#include "ac0/hypercube.hpp"
#include "ac0/outlier_removal.hpp"

namespace checks {

inline double mean(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

inline double sum_over(const ac0::Polynomial& q, const std::vector<ac0::Point>& pts) {
  double s = 0.0;
  for (const auto& x : pts) s += ac0::eval_poly(q, x);
  return s;
}

/// alpha * (a_0 + sum a_i x_i)^2 scaled to meet the norm bound B and the
/// reference-mean bound eps/4. Nonnegative everywhere, degree 2 (k >= 2).
inline ac0::Polynomial random_feasible_square(std::mt19937_64& rng, int dim, const std::vector<ac0::Point>& reference,
                                              std::size_t n, double eps, double bound) {
  std::normal_distribution<double> g;
  ac0::Polynomial lin(dim, 1);
  for (auto m : ac0::enumerate_monomials(dim, 1)) lin.set(m, g(rng));
  ac0::Polynomial q = lin * lin;
  const double ref_mean = sum_over(q, reference) / static_cast<double>(n);
  double alpha = bound / ac0::coef_norm(q);
  if (ref_mean > 0.0) alpha = std::min(alpha, (eps / 4.0) / ref_mean);
  return q * alpha;
}

struct FilterAudit {
  bool progress = true;           // non-terminal iterations shrink the set
  bool within_n = true;           // at most N removal iterations
  bool removal_exact = true;      // removed = {p* > tau*} (or the flagged single max)
  bool sizes_consistent = true;
  double integral_error = 0.0;    // worst |mean - tail decomposition| over iterations
  std::size_t iterations = 0;
};

inline FilterAudit audit(const ac0::FilterReport& rep, const ac0::LabeledSample& input) {
  FilterAudit a;
  a.iterations = rep.iterations.size();
  const auto pts = input.points();
  std::vector<std::size_t> alive(pts.size());
  for (std::size_t i = 0; i < alive.size(); ++i) alive[i] = i;
  std::size_t removals = 0;
  for (const auto& it : rep.iterations) {
    if (it.size_before != alive.size()) a.sizes_consistent = false;
    std::vector<double> cur, ref;
    for (std::size_t i : alive) cur.push_back(ac0::eval_poly(it.p_star, pts[i]));
    for (const auto& x : rep.reference) ref.push_back(ac0::eval_poly(it.p_star, x));
    a.integral_error = std::max(a.integral_error, std::abs(mean(cur) - ac0::tail_integral(cur)));
    a.integral_error = std::max(a.integral_error, std::abs(mean(ref) - ac0::tail_integral(ref)));
    if (it.terminal) {
      if (!it.removed.empty()) a.progress = false;
      continue;
    }
    ++removals;
    if (it.removed.empty()) a.progress = false;
    std::vector<std::size_t> expect;
    if (!it.fallback) {
      for (std::size_t j = 0; j < alive.size(); ++j) {
        if (ac0::exceeds(cur[j], *it.tau)) expect.push_back(alive[j]);
      }
    } else {
      const auto top = std::max_element(cur.begin(), cur.end()) - cur.begin();
      expect.push_back(alive[static_cast<std::size_t>(top)]);
    }
    if (expect != it.removed) a.removal_exact = false;
    std::vector<std::size_t> next;
    std::set_difference(alive.begin(), alive.end(), it.removed.begin(), it.removed.end(), std::back_inserter(next));
    if (next.size() + it.removed.size() != alive.size()) a.sizes_consistent = false;
    alive = std::move(next);
  }
  if (alive != rep.kept) a.sizes_consistent = false;
  if (removals > rep.n) a.within_n = false;
  return a;
}

}  // namespace checks
