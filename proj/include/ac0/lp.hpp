#pragma once

// Dense two-phase simplex.
//
// Problems are stated as
//     maximize    c . x
//     subject to  a_r . x  {<=, =, >=}  b_r      for every row r
//                 lower_j <= x_j <= upper_j      (either side may be absent)
// and converted internally to standard form (y >= 0, equality rows with
// slack/surplus columns). A free variable keeps a single column that may enter
// in either direction and, once basic, never leaves. Phase one minimises the
// sum of artificial variables; rows that already own a usable unit column skip
// the artificial. The ratio test is Harris's two-pass rule.
//
// Pricing is Dantzig's largest reduced cost. After a run of degenerate pivots
// the solver switches to Bland's rule (smallest-index entering and leaving
// variables) until the objective moves again, which rules out cycling. Every
// choice is index-ordered, so the same program always yields the same vertex.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace ac0 {

enum class Relation { LessEqual, Equal, GreaterEqual };

struct Constraint {
  std::vector<double> coefs;
  Relation relation = Relation::LessEqual;
  double rhs = 0.0;
};

struct LinearProgram {
  std::vector<double> objective;  // maximised
  std::vector<Constraint> constraints;
  std::vector<std::optional<double>> lower;  // absent = -inf
  std::vector<std::optional<double>> upper;  // absent = +inf

  LinearProgram() = default;
  explicit LinearProgram(std::size_t num_vars)
      : objective(num_vars, 0.0), lower(num_vars), upper(num_vars) {}

  std::size_t num_vars() const { return objective.size(); }
  std::size_t num_constraints() const { return constraints.size(); }

  void add_constraint(std::vector<double> coefs, Relation rel, double rhs) {
    constraints.push_back({std::move(coefs), rel, rhs});
  }
  void set_bounds(std::size_t j, std::optional<double> lo, std::optional<double> hi) {
    lower.at(j) = lo;
    upper.at(j) = hi;
  }

  void validate() const {
    const std::size_t n = num_vars();
    if (lower.size() != n || upper.size() != n) throw std::invalid_argument("LinearProgram: bound vectors have wrong size");
    auto finite = [](double v) { return std::isfinite(v); };
    if (!std::all_of(objective.begin(), objective.end(), finite)) throw std::invalid_argument("LinearProgram: non-finite objective");
    for (const auto& c : constraints) {
      if (c.coefs.size() != n) throw std::invalid_argument("LinearProgram: constraint has wrong dimension");
      if (!std::all_of(c.coefs.begin(), c.coefs.end(), finite) || !finite(c.rhs)) {
        throw std::invalid_argument("LinearProgram: non-finite constraint entry");
      }
    }
    for (std::size_t j = 0; j < n; ++j) {
      if ((lower[j] && !finite(*lower[j])) || (upper[j] && !finite(*upper[j]))) {
        throw std::invalid_argument("LinearProgram: non-finite bound");
      }
    }
  }

  /// Largest violation of any constraint or bound at x.
  double max_violation(const std::vector<double>& x) const {
    double worst = 0.0;
    for (const auto& c : constraints) {
      double lhs = 0.0;
      for (std::size_t j = 0; j < x.size(); ++j) lhs += c.coefs[j] * x[j];
      double v = 0.0;
      switch (c.relation) {
        case Relation::LessEqual: v = lhs - c.rhs; break;
        case Relation::GreaterEqual: v = c.rhs - lhs; break;
        case Relation::Equal: v = std::abs(lhs - c.rhs); break;
      }
      worst = std::max(worst, v);
    }
    for (std::size_t j = 0; j < x.size(); ++j) {
      if (lower[j]) worst = std::max(worst, *lower[j] - x[j]);
      if (upper[j]) worst = std::max(worst, x[j] - *upper[j]);
    }
    return worst;
  }
};

enum class LPStatus { Optimal, Infeasible, Unbounded, Failed };

inline const char* to_string(LPStatus s) {
  switch (s) {
    case LPStatus::Optimal: return "optimal";
    case LPStatus::Infeasible: return "infeasible";
    case LPStatus::Unbounded: return "unbounded";
    case LPStatus::Failed: return "failed";
  }
  return "?";
}

struct LPSolution {
  LPStatus status = LPStatus::Failed;
  std::vector<double> values;
  double objective_value = 0.0;
  long iterations = 0;
  std::string message;

  bool optimal() const { return status == LPStatus::Optimal; }
};

struct SimplexOptions {
  double feasibility_tol = 1e-7;
  double optimality_tol = 1e-9;
  double pivot_tol = 1e-11;
  long max_iterations = 0;  // 0 = 50 * (rows + columns) + 1000
  int degenerate_before_bland = 50;
  // Relative size of the deterministic rhs shift used against degeneracy;
  // 0 disables it. The reported vertex is recomputed from the unshifted rows.
  double perturbation = 1e-9;
};

struct LPSolverError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Pluggable solver seam; the embedded simplex is the default.
using LPSolverFn = std::function<LPSolution(const LinearProgram&)>;

namespace detail {

class Simplex {
 public:
  Simplex(const LinearProgram& lp, const SimplexOptions& opt) : lp_(lp), opt_(opt) {}

  LPSolution run() {
    lp_.validate();
    build_standard_form();
    LPSolution sol;
    if (!phase_one(sol)) return sol;
    if (!phase_two(sol)) return sol;
    extract(sol);
    return sol;
  }

 private:
  // Column mapping for original variable j: x_j = offset + sign * y_col.
  struct VarMap {
    int col = -1;
    double sign = 1.0;
    double offset = 0.0;
  };

  double& at(std::size_t r, std::size_t c) { return tab_[r * width_ + c]; }
  double at(std::size_t r, std::size_t c) const { return tab_[r * width_ + c]; }
  double& rhs(std::size_t r) { return tab_[r * width_ + ncols_]; }

  void build_standard_form() {
    const std::size_t n = lp_.num_vars();
    vmap_.resize(n);
    int next = 0;
    struct BoundRow { int col; double ub; };
    std::vector<BoundRow> bound_rows;
    std::vector<int> free_cols;
    for (std::size_t j = 0; j < n; ++j) {
      auto& vm = vmap_[j];
      const auto& lo = lp_.lower[j];
      const auto& hi = lp_.upper[j];
      vm.col = next++;
      if (lo) {
        vm.offset = *lo;
        if (hi) bound_rows.push_back({vm.col, *hi - *lo});
      } else if (hi) {
        vm.sign = -1.0;
        vm.offset = *hi;
      } else {
        free_cols.push_back(vm.col);
      }
    }
    nstruct_ = static_cast<std::size_t>(next);

    // Rows in standard orientation: dense coefficients over structural columns.
    struct Row { std::vector<double> a; Relation rel; double b; };
    std::vector<Row> rows;
    rows.reserve(lp_.num_constraints() + bound_rows.size());
    for (const auto& c : lp_.constraints) {
      Row r{std::vector<double>(nstruct_, 0.0), c.relation, c.rhs};
      for (std::size_t j = 0; j < n; ++j) {
        const double a = c.coefs[j];
        if (a == 0.0) continue;
        const auto& vm = vmap_[j];
        r.b -= a * vm.offset;
        r.a[vm.col] += a * vm.sign;
      }
      rows.push_back(std::move(r));
    }
    for (const auto& br : bound_rows) {
      Row r{std::vector<double>(nstruct_, 0.0), Relation::LessEqual, br.ub};
      r.a[br.col] = 1.0;
      rows.push_back(std::move(r));
    }
    for (auto& r : rows) {
      // Zero-rhs ">=" rows are flipped too so their slack can start basic.
      if (r.b < 0.0 || (r.b == 0.0 && r.rel == Relation::GreaterEqual)) {
        for (double& v : r.a) v = -v;
        r.b = -r.b;
        if (r.rel == Relation::LessEqual) r.rel = Relation::GreaterEqual;
        else if (r.rel == Relation::GreaterEqual) r.rel = Relation::LessEqual;
      }
    }
    m_ = rows.size();

    // Structural singleton columns can serve as initial basics for rows that
    // would otherwise need an artificial.
    std::vector<int> singleton_row(nstruct_, -1);
    {
      std::vector<int> count(nstruct_, 0);
      for (std::size_t i = 0; i < m_; ++i) {
        for (std::size_t j = 0; j < nstruct_; ++j) {
          if (rows[i].a[j] != 0.0) {
            ++count[j];
            singleton_row[j] = static_cast<int>(i);
          }
        }
      }
      for (std::size_t j = 0; j < nstruct_; ++j) {
        if (count[j] != 1) singleton_row[j] = -1;
      }
    }

    std::size_t nslack = 0;
    for (const auto& r : rows) {
      if (r.rel != Relation::Equal) ++nslack;
    }
    std::vector<int> crash(m_, -1);
    std::vector<bool> used(nstruct_, false);
    std::size_t nart = 0;
    for (std::size_t i = 0; i < m_; ++i) {
      if (rows[i].rel == Relation::LessEqual) continue;
      for (std::size_t j = 0; j < nstruct_; ++j) {
        if (!used[j] && singleton_row[j] == static_cast<int>(i) && rows[i].a[j] > 0.0) {
          crash[i] = static_cast<int>(j);
          used[j] = true;
          break;
        }
      }
      if (crash[i] < 0) ++nart;
    }

    art_begin_ = nstruct_ + nslack;
    ncols_ = art_begin_ + nart;
    width_ = ncols_ + 1;
    tab_.assign(m_ * width_, 0.0);
    basis_.assign(m_, -1);
    std::size_t slack = nstruct_;
    std::size_t art = art_begin_;
    for (std::size_t i = 0; i < m_; ++i) {
      auto& r = rows[i];
      double scale = 1.0;
      if (crash[i] >= 0) scale = 1.0 / r.a[crash[i]];
      for (std::size_t j = 0; j < nstruct_; ++j) at(i, j) = r.a[j] * scale;
      rhs(i) = r.b * scale;
      if (r.rel == Relation::LessEqual) {
        at(i, slack) = 1.0;
        basis_[i] = static_cast<int>(slack++);
      } else {
        if (r.rel == Relation::GreaterEqual) at(i, slack++) = -scale;
        if (crash[i] >= 0) {
          at(i, crash[i]) = 1.0;
          basis_[i] = crash[i];
        } else {
          at(i, art) = 1.0;
          basis_[i] = static_cast<int>(art++);
        }
      }
    }
    original_ = tab_;
    if (opt_.perturbation > 0.0) {
      std::uint64_t h = 0x9e3779b97f4a7c15ULL;
      for (std::size_t i = 0; i < m_; ++i) {
        h ^= h >> 31;
        h *= 0xbf58476d1ce4e5b9ULL;
        h ^= h >> 29;
        const double u = static_cast<double>(h >> 11) * 0x1.0p-53;
        rhs(i) += opt_.perturbation * (0.5 + u) * (1.0 + std::abs(rhs(i)));
      }
    }
    active_.assign(m_, true);
    cost_.assign(ncols_, 0.0);
    free_.assign(ncols_, false);
    for (int j : free_cols) free_[j] = true;
    max_iter_ = opt_.max_iterations > 0 ? opt_.max_iterations
                                        : 50L * static_cast<long>(m_ + ncols_) + 1000L;
  }

  bool allowed(std::size_t j) const { return !artificials_barred_ || j < art_begin_; }

  // Recomputes reduced costs d_j = c_j - c_B B^-1 a_j into obj_.
  void price() {
    obj_.assign(width_, 0.0);
    for (std::size_t j = 0; j < ncols_; ++j) obj_[j] = cost_[j];
    for (std::size_t i = 0; i < m_; ++i) {
      if (!active_[i]) continue;
      const double cb = cost_[basis_[i]];
      if (cb == 0.0) continue;
      const double* row = &tab_[i * width_];
      for (std::size_t j = 0; j <= ncols_; ++j) obj_[j] -= cb * row[j];
    }
  }

  void pivot(std::size_t r, std::size_t s) {
    double* prow = &tab_[r * width_];
    const double inv = 1.0 / prow[s];
    for (std::size_t j = 0; j < width_; ++j) prow[j] *= inv;
    prow[s] = 1.0;
    for (std::size_t i = 0; i < m_; ++i) {
      if (i == r || !active_[i]) continue;
      double* row = &tab_[i * width_];
      const double f = row[s];
      if (f == 0.0) continue;
      for (std::size_t j = 0; j < width_; ++j) row[j] -= f * prow[j];
      row[s] = 0.0;
    }
    const double f = obj_[s];
    if (f != 0.0) {
      for (std::size_t j = 0; j < width_; ++j) obj_[j] -= f * prow[j];
      obj_[s] = 0.0;
    }
    basis_[r] = static_cast<int>(s);
  }

  enum class Outcome { Optimal, Unbounded, IterationLimit };

  Outcome iterate(long& iterations) {
    int degenerate_run = 0;
    std::vector<bool> in_basis(ncols_, false);
    for (std::size_t i = 0; i < m_; ++i) {
      if (active_[i]) in_basis[basis_[i]] = true;
    }
    while (true) {
      if (iterations >= max_iter_) return Outcome::IterationLimit;
      const bool bland = degenerate_run >= opt_.degenerate_before_bland;

      // Nonbasic free columns sit at zero and may move either way.
      int enter = -1;
      double dir = 1.0;
      double best = opt_.optimality_tol;
      for (std::size_t j = 0; j < ncols_; ++j) {
        if (in_basis[j] || !allowed(j)) continue;
        const double d = free_[j] ? std::abs(obj_[j]) : obj_[j];
        if (d > best) {
          enter = static_cast<int>(j);
          dir = obj_[j] >= 0.0 ? 1.0 : -1.0;
          if (bland) break;
          best = d;
        }
      }
      if (enter < 0) return Outcome::Optimal;

      // Harris: bound the step with feasibility slack, then take the largest
      // pivot among rows that block within that bound.
      double bound = std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < m_; ++i) {
        if (!active_[i] || free_[basis_[i]]) continue;
        const double a = dir * at(i, enter);
        if (a <= opt_.pivot_tol) continue;
        bound = std::min(bound, (std::max(0.0, rhs(i)) + opt_.feasibility_tol) / a);
      }
      if (!std::isfinite(bound)) return Outcome::Unbounded;
      if (bland) {
        // Exact minimum ratio with smallest-index ties keeps Bland's guarantee.
        bound = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < m_; ++i) {
          if (!active_[i] || free_[basis_[i]]) continue;
          const double a = dir * at(i, enter);
          if (a <= opt_.pivot_tol) continue;
          bound = std::min(bound, std::max(0.0, rhs(i)) / a);
        }
        bound += 1e-12 * (1.0 + bound);
      }
      int leave = -1;
      double best_piv = 0.0;
      double best_ratio = 0.0;
      for (std::size_t i = 0; i < m_; ++i) {
        if (!active_[i] || free_[basis_[i]]) continue;
        const double a = dir * at(i, enter);
        if (a <= opt_.pivot_tol) continue;
        const double ratio = std::max(0.0, rhs(i)) / a;
        if (ratio > bound) continue;
        bool take = leave < 0;
        if (!take && bland) {
          take = basis_[i] < basis_[leave];
        } else if (!take) {
          take = a > best_piv * (1.0 + 1e-9) || (a >= best_piv * (1.0 - 1e-9) && basis_[i] < basis_[leave]);
        }
        if (take) {
          leave = static_cast<int>(i);
          best_piv = a;
          best_ratio = ratio;
        }
      }

      degenerate_run = best_ratio * std::abs(obj_[enter]) <= 1e-14 ? degenerate_run + 1 : 0;
      in_basis[basis_[leave]] = false;
      in_basis[enter] = true;
      pivot(static_cast<std::size_t>(leave), static_cast<std::size_t>(enter));
      ++iterations;
    }
  }

  bool phase_one(LPSolution& sol) {
    if (art_begin_ == ncols_) return true;
    for (std::size_t j = art_begin_; j < ncols_; ++j) cost_[j] = -1.0;
    price();
    const Outcome out = iterate(sol.iterations);
    if (out == Outcome::IterationLimit) {
      sol.status = LPStatus::Failed;
      sol.message = "iteration limit reached in phase one";
      return false;
    }
    double infeas = 0.0;
    for (std::size_t i = 0; i < m_; ++i) {
      if (basis_[i] >= static_cast<int>(art_begin_)) infeas += std::max(0.0, rhs(i));
    }
    if (infeas > opt_.feasibility_tol) {
      sol.status = LPStatus::Infeasible;
      sol.message = "phase one optimum has positive infeasibility";
      return false;
    }
    // Drive remaining (zero-valued) artificials out; rows where that is
    // impossible are linearly dependent and get dropped.
    for (std::size_t i = 0; i < m_; ++i) {
      if (basis_[i] < static_cast<int>(art_begin_)) continue;
      int col = -1;
      double best = opt_.pivot_tol * 1e3;
      for (std::size_t j = 0; j < art_begin_; ++j) {
        const double a = std::abs(at(i, j));
        if (a > best) {
          best = a;
          col = static_cast<int>(j);
        }
      }
      if (col >= 0) {
        pivot(i, static_cast<std::size_t>(col));
      } else {
        active_[i] = false;
      }
    }
    artificials_barred_ = true;
    return true;
  }

  bool phase_two(LPSolution& sol) {
    std::fill(cost_.begin(), cost_.end(), 0.0);
    for (std::size_t j = 0; j < lp_.num_vars(); ++j) {
      const auto& vm = vmap_[j];
      cost_[vm.col] += lp_.objective[j] * vm.sign;
    }
    price();
    const Outcome out = iterate(sol.iterations);
    if (out == Outcome::IterationLimit) {
      sol.status = LPStatus::Failed;
      sol.message = "iteration limit reached in phase two";
      return false;
    }
    if (out == Outcome::Unbounded) {
      sol.status = LPStatus::Unbounded;
      sol.message = "objective unbounded above";
      return false;
    }
    return true;
  }

  std::vector<double> structural_values() const {
    std::vector<double> y(ncols_, 0.0);
    for (std::size_t i = 0; i < m_; ++i) {
      if (!active_[i]) continue;
      const double v = tab_[i * width_ + ncols_];
      y[basis_[i]] = free_[basis_[i]] ? v : std::max(0.0, v);
    }
    return y;
  }

  std::vector<double> to_original(const std::vector<double>& y) const {
    std::vector<double> x(lp_.num_vars());
    for (std::size_t j = 0; j < x.size(); ++j) {
      const auto& vm = vmap_[j];
      x[j] = vm.offset + vm.sign * y[vm.col];
    }
    return x;
  }

  // Re-solves B y_B = b from the untouched standard-form rows with partial
  // pivoting, discarding drift accumulated over many tableau updates.
  std::optional<std::vector<double>> refine() const {
    std::vector<std::size_t> rows;
    for (std::size_t i = 0; i < m_; ++i) {
      if (active_[i]) rows.push_back(i);
    }
    const std::size_t k = rows.size();
    std::vector<double> a(k * (k + 1));
    for (std::size_t r = 0; r < k; ++r) {
      const double* orow = &original_[rows[r] * width_];
      for (std::size_t c = 0; c < k; ++c) {
        const int bi = basis_[rows[c]];
        a[r * (k + 1) + c] = orow[bi];
      }
      a[r * (k + 1) + k] = orow[ncols_];
    }
    for (std::size_t c = 0; c < k; ++c) {
      std::size_t p = c;
      for (std::size_t r = c + 1; r < k; ++r) {
        if (std::abs(a[r * (k + 1) + c]) > std::abs(a[p * (k + 1) + c])) p = r;
      }
      if (std::abs(a[p * (k + 1) + c]) < 1e-14) return std::nullopt;
      if (p != c) {
        for (std::size_t j = 0; j <= k; ++j) std::swap(a[p * (k + 1) + j], a[c * (k + 1) + j]);
      }
      const double piv = a[c * (k + 1) + c];
      for (std::size_t r = c + 1; r < k; ++r) {
        const double f = a[r * (k + 1) + c] / piv;
        if (f == 0.0) continue;
        for (std::size_t j = c; j <= k; ++j) a[r * (k + 1) + j] -= f * a[c * (k + 1) + j];
      }
    }
    std::vector<double> sol(k);
    for (std::size_t c = k; c-- > 0;) {
      double s = a[c * (k + 1) + k];
      for (std::size_t j = c + 1; j < k; ++j) s -= a[c * (k + 1) + j] * sol[j];
      sol[c] = s / a[c * (k + 1) + c];
    }
    std::vector<double> y(ncols_, 0.0);
    for (std::size_t c = 0; c < k; ++c) {
      const int b = basis_[rows[c]];
      y[b] = free_[b] ? sol[c] : std::max(0.0, sol[c]);
    }
    return y;
  }

  void extract(LPSolution& sol) const {
    sol.values = to_original(structural_values());
    double viol = lp_.max_violation(sol.values);
    if (opt_.perturbation > 0.0 || viol > opt_.feasibility_tol) {
      if (auto y = refine()) {
        auto x = to_original(*y);
        const double v2 = lp_.max_violation(x);
        if (v2 <= std::max(viol, opt_.feasibility_tol)) {
          sol.values = std::move(x);
          viol = v2;
        }
      }
    }
    sol.objective_value = 0.0;
    for (std::size_t j = 0; j < sol.values.size(); ++j) sol.objective_value += lp_.objective[j] * sol.values[j];
    if (viol > opt_.feasibility_tol) {
      std::ostringstream os;
      os << "numerical failure: constraint violation " << viol << " at final basis";
      sol.status = LPStatus::Failed;
      sol.message = os.str();
      return;
    }
    sol.status = LPStatus::Optimal;
  }

  const LinearProgram& lp_;
  SimplexOptions opt_;
  std::vector<VarMap> vmap_;
  std::size_t nstruct_ = 0;
  std::size_t m_ = 0;
  std::size_t art_begin_ = 0;
  std::size_t ncols_ = 0;
  std::size_t width_ = 0;
  std::vector<double> tab_;
  std::vector<double> original_;
  std::vector<double> obj_;
  std::vector<double> cost_;
  std::vector<int> basis_;
  std::vector<bool> active_;
  std::vector<bool> free_;
  bool artificials_barred_ = false;
  long max_iter_ = 0;
};

}  // namespace detail

inline LPSolution solve(const LinearProgram& lp, const SimplexOptions& options = {}) {
  return detail::Simplex(lp, options).run();
}

inline LPSolverFn default_lp_solver() {
  return [](const LinearProgram& lp) { return solve(lp); };
}

/// Writes lp in CPLEX LP text format (variables x1..xn, rows c1..cm).
inline void write_lp_format(const LinearProgram& lp, std::ostream& os) {
  lp.validate();
  os.precision(17);
  auto write_terms = [&os](const std::vector<double>& coefs) {
    bool any = false;
    for (std::size_t j = 0; j < coefs.size(); ++j) {
      if (coefs[j] == 0.0) continue;
      os << (coefs[j] < 0 ? " - " : (any ? " + " : " ")) << std::abs(coefs[j]) << " x" << (j + 1);
      any = true;
    }
    if (!any) os << " 0 x1";
  };
  os << "Maximize\n obj:";
  write_terms(lp.objective);
  os << "\nSubject To\n";
  for (std::size_t r = 0; r < lp.num_constraints(); ++r) {
    const auto& c = lp.constraints[r];
    os << " c" << (r + 1) << ":";
    write_terms(c.coefs);
    switch (c.relation) {
      case Relation::LessEqual: os << " <= "; break;
      case Relation::GreaterEqual: os << " >= "; break;
      case Relation::Equal: os << " = "; break;
    }
    os << c.rhs << "\n";
  }
  os << "Bounds\n";
  for (std::size_t j = 0; j < lp.num_vars(); ++j) {
    const auto& lo = lp.lower[j];
    const auto& hi = lp.upper[j];
    os << " ";
    if (!lo && !hi) os << "x" << (j + 1) << " free";
    else if (lo && !hi) os << "x" << (j + 1) << " >= " << *lo;
    else if (!lo) os << "-inf <= x" << (j + 1) << " <= " << *hi;
    else os << *lo << " <= x" << (j + 1) << " <= " << *hi;
    os << "\n";
  }
  os << "End\n";
}

}  // namespace ac0
