#pragma once

// Iterative outlier removal driven by a linear program.
//
// Each round solves
//     maximize    sum_{x in S_i} p(x)
//     subject to  deg(p) <= k,  ||p||_coef <= B,
//                 p(x) >= 0               for every x in S_ref u S_inp,
//                 (1/N) sum_{x in S_ref} p(x) <= eps / 4
// and stops once lambda* = (1/N) sum_{S_i} p*(x) <= eps. Otherwise it finds the
// smallest threshold tau* with
//     (|S_i|/N) Pr_{S_i}[p* > tau*] >= 2 Pr_{S_ref}[p* > tau*] + Delta
// and removes every point of S_i above it. The filter never looks at labels.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "ac0/contamination.hpp"
#include "ac0/hypercube.hpp"
#include "ac0/lp.hpp"
#include "ac0/random.hpp"

namespace ac0 {

/// Values within this distance of a threshold count as not exceeding it.
inline constexpr double kThresholdTieTol = 1e-9;

inline bool exceeds(double value, double tau) { return value > tau + kThresholdTieTol; }

/// 3^k d^(k/2).
inline double default_coef_bound(int dim, int k) {
  return std::pow(3.0, k) * std::pow(static_cast<double>(dim), k / 2.0);
}

struct FilterParams {
  double eps = 0.1;
  int k = 2;
  std::optional<double> coef_bound;       // B; default 3^k d^(k/2)
  std::optional<double> delta;            // Delta; default eps / (2B)
  std::optional<std::size_t> max_iters;   // default N
  std::optional<std::size_t> ref_size;    // |S_ref|; default N

  double resolved_bound(int dim) const { return coef_bound.value_or(default_coef_bound(dim, k)); }
  double resolved_delta(int dim) const { return delta.value_or(eps / (2.0 * resolved_bound(dim))); }

  void validate(int dim) const {
    if (!(eps > 0.0 && eps < 1.0)) throw std::invalid_argument("FilterParams: eps must lie in (0, 1)");
    if (k < 0) throw std::invalid_argument("FilterParams: k must be >= 0");
    if (k > dim) throw std::invalid_argument("FilterParams: k exceeds dimension");
    if (!(resolved_bound(dim) > 0.0)) throw std::invalid_argument("FilterParams: B must be > 0");
    if (!(resolved_delta(dim) > 0.0)) throw std::invalid_argument("FilterParams: Delta must be > 0");
    if (ref_size && *ref_size == 0) throw std::invalid_argument("FilterParams: reference size must be >= 1");
  }
};

/// N fresh uniform points; the learner can draw these since the marginal is known.
inline std::vector<Point> draw_reference(int dim, std::size_t n, std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("draw_reference: N must be >= 1");
  Rng rng(seed);
  return uniform_points(rng, dim, n);
}

namespace detail {

// Multiplicity of each distinct point, keyed by vertex index.
inline std::map<std::uint32_t, std::size_t> histogram(std::span<const Point> pts) {
  std::map<std::uint32_t, std::size_t> h;
  for (const auto& x : pts) ++h[x.index()];
  return h;
}

// sum over the histogram of x^I for every monomial I.
inline std::vector<double> monomial_sums(const std::map<std::uint32_t, std::size_t>& hist,
                                         std::span<const Monomial> basis) {
  std::vector<double> out(basis.size(), 0.0);
  for (const auto& [idx, mult] : hist) {
    for (std::size_t j = 0; j < basis.size(); ++j) {
      const bool odd = std::popcount(idx & basis[j].mask()) & 1;
      out[j] += odd ? -static_cast<double>(mult) : static_cast<double>(mult);
    }
  }
  return out;
}

inline void check_points(std::span<const Point> pts, int dim, const char* what) {
  for (const auto& x : pts) {
    if (x.dim() != dim) throw DimensionError(std::string(what) + ": point dimension mismatch");
  }
}

}  // namespace detail

/// Program (P) for the current set S_i. Variables are the coefficients c_I
/// (free, monomial order of enumerate_monomials) followed by the auxiliaries
/// u_I >= 0 with |c_I| <= u_I. Rows, in order: the 2M + 1 coefficient-norm
/// rows, one nonnegativity row per distinct point of S_ref u S_inp (sorted by
/// vertex index), and the reference-mean row.
inline LinearProgram build_program_P(std::span<const Point> current, std::span<const Point> reference,
                                     std::span<const Point> input, std::size_t n, const FilterParams& params) {
  if (params.k < 0) throw std::invalid_argument("build_program_P: k must be >= 0");
  if (input.empty()) throw std::invalid_argument("build_program_P: empty input set");
  if (n == 0) throw std::invalid_argument("build_program_P: N must be >= 1");
  const int dim = input.front().dim();
  params.validate(dim);
  detail::check_points(current, dim, "build_program_P");
  detail::check_points(reference, dim, "build_program_P");
  detail::check_points(input, dim, "build_program_P");

  const auto basis = enumerate_monomials(dim, params.k);
  const std::size_t m = basis.size();
  LinearProgram lp(2 * m);
  for (std::size_t j = 0; j < m; ++j) lp.set_bounds(m + j, 0.0, std::nullopt);

  const auto obj = detail::monomial_sums(detail::histogram(current), basis);
  std::copy(obj.begin(), obj.end(), lp.objective.begin());

  for (std::size_t j = 0; j < m; ++j) {
    std::vector<double> up(2 * m, 0.0);
    up[j] = 1.0;
    up[m + j] = -1.0;
    lp.add_constraint(std::move(up), Relation::LessEqual, 0.0);
    std::vector<double> lo(2 * m, 0.0);
    lo[j] = -1.0;
    lo[m + j] = -1.0;
    lp.add_constraint(std::move(lo), Relation::LessEqual, 0.0);
  }
  {
    std::vector<double> norm(2 * m, 0.0);
    for (std::size_t j = 0; j < m; ++j) norm[m + j] = 1.0;
    lp.add_constraint(std::move(norm), Relation::LessEqual, params.resolved_bound(dim));
  }

  std::map<std::uint32_t, std::size_t> support = detail::histogram(reference);
  for (const auto& x : input) support[x.index()] += 1;
  for (const auto& [idx, mult] : support) {
    std::vector<double> row(2 * m, 0.0);
    for (std::size_t j = 0; j < m; ++j) row[j] = (std::popcount(idx & basis[j].mask()) & 1) ? -1.0 : 1.0;
    lp.add_constraint(std::move(row), Relation::GreaterEqual, 0.0);
  }

  {
    const auto ref = detail::monomial_sums(detail::histogram(reference), basis);
    std::vector<double> row(2 * m, 0.0);
    for (std::size_t j = 0; j < m; ++j) row[j] = ref[j] / static_cast<double>(n);
    lp.add_constraint(std::move(row), Relation::LessEqual, params.eps / 4.0);
  }
  return lp;
}

/// Optimal polynomial of (P) and lambda* = (1/N) sum_{S_i} p*(x).
struct ProgramSolution {
  Polynomial p_star;
  double lambda = 0.0;
  long lp_iterations = 0;
};

inline ProgramSolution solve_program_P(std::span<const Point> current, std::span<const Point> reference,
                                       std::span<const Point> input, std::size_t n, const FilterParams& params,
                                       const LPSolverFn& solver = default_lp_solver()) {
  const LinearProgram lp = build_program_P(current, reference, input, n, params);
  const LPSolution sol = solver(lp);
  if (!sol.optimal()) {
    throw LPSolverError(std::string("program (P) not solved: ") + to_string(sol.status) + " " + sol.message);
  }
  const int dim = input.front().dim();
  const std::size_t m = lp.num_vars() / 2;
  ProgramSolution out{Polynomial::from_dense(dim, params.k, std::span<const double>(sol.values.data(), m)), 0.0,
                      sol.iterations};
  double sum = 0.0;
  for (const auto& x : current) sum += eval_poly(out.p_star, x);
  out.lambda = sum / static_cast<double>(n);
  return out;
}

/// Smallest tau in {0} u {values >= 0} with
///   count_{S_i}[v > tau] / N >= 2 count_ref[v > tau] / |S_ref| + Delta,
/// where "v > tau" means exceeds(v, tau). Absent when no candidate qualifies.
/// Both tail counts are step functions that only change at sample values, so
/// checking the candidates is exhaustive.
inline std::optional<double> find_tau_star(std::span<const double> current_values, std::span<const double> ref_values,
                                           std::size_t n, double delta) {
  if (ref_values.empty()) throw std::invalid_argument("find_tau_star: empty reference set");
  std::vector<double> cur(current_values.begin(), current_values.end());
  std::vector<double> ref(ref_values.begin(), ref_values.end());
  std::sort(cur.begin(), cur.end());
  std::sort(ref.begin(), ref.end());
  std::vector<double> candidates{0.0};
  for (double v : cur) candidates.push_back(std::max(0.0, v));
  for (double v : ref) candidates.push_back(std::max(0.0, v));
  std::sort(candidates.begin(), candidates.end());
  candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());

  auto tail = [](const std::vector<double>& sorted, double tau) {
    const auto it = std::upper_bound(sorted.begin(), sorted.end(), tau + kThresholdTieTol);
    return static_cast<double>(sorted.end() - it);
  };
  const double nn = static_cast<double>(n);
  const double nref = static_cast<double>(ref.size());
  for (double tau : candidates) {
    const double lhs = tail(cur, tau) / nn;
    const double rhs = 2.0 * tail(ref, tau) / nref + delta;
    if (lhs >= rhs) return tau;
  }
  return std::nullopt;
}

inline std::optional<double> find_tau_star(const Polynomial& p_star, std::span<const Point> current,
                                           std::span<const Point> reference, std::size_t n, double delta) {
  std::vector<double> cur;
  std::vector<double> ref;
  for (const auto& x : current) cur.push_back(eval_poly(p_star, x));
  for (const auto& x : reference) ref.push_back(eval_poly(p_star, x));
  return find_tau_star(cur, ref, n, delta);
}

/// tau0 + sum_j (t_{j+1} - t_j) * Pr[X > t_j] over the sorted distinct values
/// t_j of X, starting at tau0 = min(0, min X). Equals E[X] exactly in real
/// arithmetic; for X >= 0 it is the integral of the tail probability.
inline double tail_integral(std::span<const double> values) {
  if (values.empty()) return 0.0;
  std::vector<double> v(values.begin(), values.end());
  std::sort(v.begin(), v.end());
  const double n = static_cast<double>(v.size());
  double t = std::min(0.0, v.front());
  double total = t;
  std::size_t i = 0;
  while (i < v.size()) {
    while (i < v.size() && v[i] <= t) ++i;
    if (i == v.size()) break;
    const double next = v[i];
    total += (next - t) * static_cast<double>(v.size() - i) / n;
    t = next;
  }
  return total;
}

struct FilterIteration {
  Polynomial p_star;
  double lambda = 0.0;
  std::optional<double> tau;
  bool fallback = false;     // tau* absent or empty removal; max point removed instead
  bool terminal = false;     // lambda* <= eps
  std::size_t size_before = 0;
  std::vector<std::size_t> removed;  // indices into the input sample
  long lp_iterations = 0;
  // Filled in by the harness from provenance tags, never by the filter.
  std::optional<std::size_t> removed_clean;
  std::optional<std::size_t> removed_adversarial;
};

struct FilterReport {
  std::size_t n = 0;
  int dim = 1;
  double eps = 0.0;
  int k = 0;
  double coef_bound = 0.0;
  double delta = 0.0;
  bool converged = false;  // stopped on lambda* <= eps rather than max_iters
  std::vector<std::size_t> kept;  // increasing indices into the input
  std::vector<FilterIteration> iterations;
  std::vector<Point> reference;
  LabeledSample filtered;

  std::size_t total_removed() const { return n - kept.size(); }
  std::size_t fallback_count() const {
    return static_cast<std::size_t>(
        std::count_if(iterations.begin(), iterations.end(), [](const auto& it) { return it.fallback; }));
  }
};

/// Runs the filter on the points of `input`; labels are carried along to
/// `filtered` but never read. `seed` drives the reference sample only.
inline FilterReport filter(const LabeledSample& input, const FilterParams& params, std::uint64_t seed,
                           const LPSolverFn& solver = default_lp_solver()) {
  const std::size_t n = input.size();
  if (n < 1) throw std::invalid_argument("filter: empty input");
  const int dim = input.dim;
  params.validate(dim);

  FilterReport rep;
  rep.n = n;
  rep.dim = dim;
  rep.eps = params.eps;
  rep.k = params.k;
  rep.coef_bound = params.resolved_bound(dim);
  rep.delta = params.resolved_delta(dim);
  rep.reference = draw_reference(dim, params.ref_size.value_or(n), seed);

  const std::vector<Point> all = input.points();
  std::vector<std::size_t> alive(n);
  for (std::size_t i = 0; i < n; ++i) alive[i] = i;
  const std::size_t max_iters = params.max_iters.value_or(n);

  for (std::size_t iter = 0; iter <= max_iters; ++iter) {
    std::vector<Point> current;
    current.reserve(alive.size());
    for (std::size_t i : alive) current.push_back(all[i]);

    ProgramSolution ps = solve_program_P(current, rep.reference, all, n, params, solver);
    FilterIteration rec;
    rec.p_star = ps.p_star;
    rec.lambda = ps.lambda;
    rec.size_before = alive.size();
    rec.lp_iterations = ps.lp_iterations;

    if (ps.lambda <= params.eps) {
      rec.terminal = true;
      rep.iterations.push_back(std::move(rec));
      rep.converged = true;
      break;
    }

    std::vector<double> cur_vals(current.size());
    for (std::size_t i = 0; i < current.size(); ++i) cur_vals[i] = eval_poly(ps.p_star, current[i]);
    std::vector<double> ref_vals;
    ref_vals.reserve(rep.reference.size());
    for (const auto& x : rep.reference) ref_vals.push_back(eval_poly(ps.p_star, x));

    rec.tau = find_tau_star(cur_vals, ref_vals, n, rep.delta);
    std::vector<bool> drop(current.size(), false);
    std::size_t ndrop = 0;
    if (rec.tau) {
      for (std::size_t i = 0; i < current.size(); ++i) {
        if (exceeds(cur_vals[i], *rec.tau)) {
          drop[i] = true;
          ++ndrop;
        }
      }
    }
    if (ndrop == 0) {
      rec.fallback = true;
      const auto top = std::max_element(cur_vals.begin(), cur_vals.end()) - cur_vals.begin();
      drop[static_cast<std::size_t>(top)] = true;
    }
    std::vector<std::size_t> next;
    next.reserve(alive.size());
    for (std::size_t i = 0; i < alive.size(); ++i) {
      if (drop[i]) {
        rec.removed.push_back(alive[i]);
      } else {
        next.push_back(alive[i]);
      }
    }
    alive = std::move(next);
    rep.iterations.push_back(std::move(rec));
    if (alive.empty()) break;
  }

  rep.kept = alive;
  rep.filtered.dim = dim;
  for (std::size_t i : alive) rep.filtered.examples.push_back(input.examples[i]);
  return rep;
}

}  // namespace ac0
