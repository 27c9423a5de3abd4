#pragma once

// Fixed corpus of 50 small linear programs. Hand-built cases carry their
// hand-derived answer; the rest are seeded random programs whose answer comes
// from oracle::enumerate_vertices.

#include <optional>
#include <random>
#include <string>
#include <vector>

#include "ac0/lp.hpp"
#include "oracles.hpp"

namespace corpus {

struct Case {
  std::string name;
  ac0::LinearProgram lp;
  std::optional<ac0::LPStatus> expected_status;  // hand-derived, if any
  std::optional<double> expected_value;
};

inline ac0::LinearProgram make(std::vector<double> obj) {
  ac0::LinearProgram lp(obj.size());
  lp.objective = std::move(obj);
  return lp;
}

inline void nonneg(ac0::LinearProgram& lp) {
  for (std::size_t j = 0; j < lp.num_vars(); ++j) lp.set_bounds(j, 0.0, std::nullopt);
}

inline std::vector<Case> hand_cases() {
  using ac0::LPStatus;
  using R = ac0::Relation;
  std::vector<Case> out;

  {
    auto lp = make({1});
    lp.add_constraint({1}, R::LessEqual, 3);
    out.push_back({"x<=3", lp, LPStatus::Optimal, 3.0});
  }
  {
    auto lp = make({1, 1});
    nonneg(lp);
    lp.add_constraint({1, 1}, R::LessEqual, 1);
    out.push_back({"simplex_face", lp, LPStatus::Optimal, 1.0});
  }
  {
    auto lp = make({1});
    nonneg(lp);
    lp.add_constraint({1}, R::LessEqual, -1);
    out.push_back({"infeasible_sign", lp, LPStatus::Infeasible, std::nullopt});
  }
  {
    auto lp = make({1, 0});
    nonneg(lp);
    lp.add_constraint({1, -1}, R::LessEqual, 0);
    out.push_back({"unbounded_ray", lp, LPStatus::Unbounded, std::nullopt});
  }
  {
    // Beale's cycling example; Dantzig pricing without safeguards cycles.
    auto lp = make({0.75, -20, 0.5, -6});
    nonneg(lp);
    lp.add_constraint({0.25, -8, -1, 9}, R::LessEqual, 0);
    lp.add_constraint({0.5, -12, -0.5, 3}, R::LessEqual, 0);
    lp.add_constraint({0, 0, 1, 0}, R::LessEqual, 1);
    out.push_back({"beale_degenerate", lp, LPStatus::Optimal, 1.25});
  }
  {
    auto lp = make({1, 2});
    nonneg(lp);
    lp.add_constraint({1, 1}, R::Equal, 1);
    out.push_back({"equality", lp, LPStatus::Optimal, 2.0});
  }
  {
    auto lp = make({1, 0});
    nonneg(lp);
    lp.add_constraint({1, 1}, R::Equal, 1);
    lp.add_constraint({2, 2}, R::Equal, 2);
    out.push_back({"redundant_equalities", lp, LPStatus::Optimal, 1.0});
  }
  {
    auto lp = make({1, 0});
    nonneg(lp);
    lp.add_constraint({1, 1}, R::Equal, 1);
    lp.add_constraint({1, 1}, R::Equal, 2);
    out.push_back({"inconsistent_equalities", lp, LPStatus::Infeasible, std::nullopt});
  }
  {
    auto lp = make({-1});
    lp.set_bounds(0, std::nullopt, 5.0);
    out.push_back({"upper_only_unbounded", lp, LPStatus::Unbounded, std::nullopt});
  }
  {
    auto lp = make({1, 1});
    lp.set_bounds(0, 0.0, 2.0);
    lp.set_bounds(1, -1.0, 3.0);
    lp.add_constraint({1, 1}, R::LessEqual, 4);
    out.push_back({"boxed", lp, LPStatus::Optimal, 4.0});
  }
  {
    // min |x - 2| through a free epigraph variable t: maximise -t.
    auto lp = make({0, -1});
    lp.add_constraint({-1, 1}, R::GreaterEqual, -2);
    lp.add_constraint({1, 1}, R::GreaterEqual, 2);
    out.push_back({"free_epigraph", lp, LPStatus::Optimal, 0.0});
  }
  {
    auto lp = make({0, 0});
    nonneg(lp);
    lp.add_constraint({1, 1}, R::LessEqual, 1);
    out.push_back({"zero_objective", lp, LPStatus::Optimal, 0.0});
  }
  {
    auto lp = make({1, 1});
    nonneg(lp);
    lp.add_constraint({1, -1}, R::LessEqual, 0);
    lp.add_constraint({-1, 1}, R::LessEqual, 0);
    lp.add_constraint({1, 1}, R::LessEqual, 2);
    out.push_back({"degenerate_origin", lp, LPStatus::Optimal, 2.0});
  }
  {
    auto lp = make({-1, -1});
    lp.add_constraint({1, 1}, R::GreaterEqual, -1);
    out.push_back({"negative_rhs_free", lp, LPStatus::Optimal, 1.0});
  }
  {
    auto lp = make({1, 1});
    lp.set_bounds(0, 0.0, 1.0);
    lp.set_bounds(1, 0.0, 1.0);
    lp.add_constraint({1, 1}, R::GreaterEqual, 3);
    out.push_back({"infeasible_box", lp, LPStatus::Infeasible, std::nullopt});
  }
  {
    // Three constraints through the optimum (1, 1).
    auto lp = make({1, 1});
    nonneg(lp);
    lp.add_constraint({1, 0}, R::LessEqual, 1);
    lp.add_constraint({0, 1}, R::LessEqual, 1);
    lp.add_constraint({1, 1}, R::LessEqual, 2);
    out.push_back({"overdetermined_vertex", lp, LPStatus::Optimal, 2.0});
  }
  {
    auto lp = make({3, 2, 4});
    nonneg(lp);
    lp.add_constraint({1, 1, 2}, R::LessEqual, 4);
    lp.add_constraint({2, 0, 3}, R::LessEqual, 5);
    lp.add_constraint({2, 1, 3}, R::LessEqual, 7);
    out.push_back({"textbook_3var", lp, LPStatus::Optimal, 10.5});
  }
  {
    auto lp = make({1, -1});
    lp.add_constraint({1, -1}, R::Equal, 0.5);
    out.push_back({"free_equality_flat", lp, LPStatus::Optimal, 0.5});
  }
  {
    auto lp = make({1});
    lp.set_bounds(0, 2.0, 2.0);
    out.push_back({"fixed_variable", lp, LPStatus::Optimal, 2.0});
  }
  {
    auto lp = make({1});
    lp.set_bounds(0, 3.0, 2.0);
    out.push_back({"crossed_bounds", lp, LPStatus::Infeasible, std::nullopt});
  }
  return out;
}

/// 30 random programs over 2-3 variables with mixed relations and bounds.
inline std::vector<Case> random_cases() {
  std::mt19937_64 rng(20240611);
  auto pick = [&](int lo, int hi) { return lo + static_cast<int>(rng() % static_cast<std::uint64_t>(hi - lo + 1)); };
  std::vector<Case> out;
  for (int i = 0; i < 30; ++i) {
    const std::size_t n = static_cast<std::size_t>(pick(2, 3));
    ac0::LinearProgram lp(n);
    for (auto& c : lp.objective) c = pick(-3, 3);
    for (std::size_t j = 0; j < n; ++j) {
      switch (pick(0, 3)) {
        case 0: lp.set_bounds(j, 0.0, std::nullopt); break;
        case 1: lp.set_bounds(j, std::nullopt, std::nullopt); break;
        case 2: lp.set_bounds(j, static_cast<double>(pick(-2, 0)), static_cast<double>(pick(1, 4))); break;
        default: lp.set_bounds(j, std::nullopt, static_cast<double>(pick(-1, 3))); break;
      }
    }
    const int m = pick(2, 4);
    for (int r = 0; r < m; ++r) {
      std::vector<double> a(n);
      for (auto& v : a) v = pick(-3, 3);
      const int rel = pick(0, 5);
      const auto relation = rel < 3 ? ac0::Relation::LessEqual : (rel < 5 ? ac0::Relation::GreaterEqual : ac0::Relation::Equal);
      lp.add_constraint(std::move(a), relation, pick(-4, 6));
    }
    out.push_back({"random_" + std::to_string(i), lp, std::nullopt, std::nullopt});
  }
  return out;
}

inline std::vector<Case> all() {
  auto out = hand_cases();
  for (auto& c : random_cases()) out.push_back(std::move(c));
  return out;
}

}  // namespace corpus
