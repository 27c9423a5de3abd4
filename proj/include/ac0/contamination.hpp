#pragma once

// Clean uniform samples and nasty-noise adversaries.
//
// An adversary sees the whole clean sample and the target truth, removes
// floor(eta * N) examples and substitutes as many of its own. Provenance tags
// live only on LabeledSet; learners receive a LabeledSample, which has none.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "ac0/concepts.hpp"
#include "ac0/hypercube.hpp"
#include "ac0/random.hpp"

namespace ac0 {

enum class Provenance { Clean, Adversarial };

inline const char* to_string(Provenance p) { return p == Provenance::Clean ? "clean" : "adversarial"; }

struct LabeledExample {
  Point x;
  int label = 1;

  friend bool operator==(const LabeledExample&, const LabeledExample&) = default;
  friend auto operator<=>(const LabeledExample&, const LabeledExample&) = default;
};

/// What a learner is allowed to see: points and labels.
struct LabeledSample {
  int dim = 1;
  std::vector<LabeledExample> examples;

  std::size_t size() const { return examples.size(); }

  std::vector<Point> points() const {
    std::vector<Point> out;
    out.reserve(examples.size());
    for (const auto& e : examples) out.push_back(e.x);
    return out;
  }
};

/// Harness-side sample: examples with provenance, plus the clean examples the
/// adversary took out.
struct LabeledSet {
  int dim = 1;
  std::size_t original_size = 0;  // N
  std::vector<LabeledExample> items;
  std::vector<Provenance> tags;
  std::vector<LabeledExample> removed;

  std::size_t size() const { return items.size(); }

  std::size_t count(Provenance p) const {
    return static_cast<std::size_t>(std::count(tags.begin(), tags.end(), p));
  }

  LabeledSample view() const { return LabeledSample{dim, items}; }
};

/// floor(eta * N) as used for substitution counts.
inline std::size_t contamination_budget(double eta, std::size_t n) {
  return static_cast<std::size_t>(std::floor(eta * static_cast<double>(n)));
}

inline LabeledSet sample_clean(const Circuit& truth, std::size_t n, std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("sample_clean: N must be >= 1");
  Rng rng(seed);
  LabeledSet out;
  out.dim = truth.dim();
  out.original_size = n;
  out.items.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    Point x = uniform_point(rng, truth.dim());
    out.items.push_back({x, truth.eval(x)});
  }
  out.tags.assign(n, Provenance::Clean);
  return out;
}

/// An adversary's decision: which clean items (by index) to drop and what to
/// put in their place. Both lists must have exactly `budget` entries.
struct AdversaryMove {
  std::vector<std::size_t> removed;
  std::vector<LabeledExample> inserted;
};

using CustomAdversary = std::function<AdversaryMove(std::span<const LabeledExample> clean, const Circuit& truth,
                                                    std::size_t budget, Rng& rng)>;

struct AdversaryStrategy {
  enum class Kind { LabelFlip, PointConcentration, RandomReplacement, Custom };

  Kind kind = Kind::PointConcentration;
  // PointConcentration: the point to pile mass on (default all-ones) and the
  // label to attach (default the negation of the truth's value there).
  std::optional<Point> target;
  std::optional<int> label;
  // LabelFlip: flip the examples with the largest |p(x)|; default is a
  // uniformly random subset.
  std::optional<Polynomial> ranking;
  CustomAdversary custom;

  static AdversaryStrategy label_flip(std::optional<Polynomial> ranking = std::nullopt) {
    AdversaryStrategy a;
    a.kind = Kind::LabelFlip;
    a.ranking = std::move(ranking);
    return a;
  }
  static AdversaryStrategy point_concentration(std::optional<Point> target = std::nullopt,
                                               std::optional<int> label = std::nullopt) {
    AdversaryStrategy a;
    a.kind = Kind::PointConcentration;
    a.target = target;
    a.label = label;
    return a;
  }
  static AdversaryStrategy random_replacement() {
    AdversaryStrategy a;
    a.kind = Kind::RandomReplacement;
    return a;
  }
  static AdversaryStrategy custom_strategy(CustomAdversary fn) {
    AdversaryStrategy a;
    a.kind = Kind::Custom;
    a.custom = std::move(fn);
    return a;
  }

  std::string name() const {
    switch (kind) {
      case Kind::LabelFlip: return "label_flip";
      case Kind::PointConcentration: return "point_concentration";
      case Kind::RandomReplacement: return "random_replacement";
      case Kind::Custom: return "custom";
    }
    return "?";
  }
};

/// Parses "label_flip", "random_replacement" or
/// "point_concentration[:target=1,-1,...][,label=-1]" (target lists d entries).
inline AdversaryStrategy parse_adversary(std::string_view spec, int dim) {
  const auto colon = spec.find(':');
  const auto name = spec.substr(0, colon);
  if (name == "label_flip") return AdversaryStrategy::label_flip();
  if (name == "random_replacement") return AdversaryStrategy::random_replacement();
  if (name != "point_concentration") throw std::invalid_argument("unknown adversary: " + std::string(spec));
  auto a = AdversaryStrategy::point_concentration();
  if (colon == std::string_view::npos) return a;
  std::string_view rest = spec.substr(colon + 1);
  const auto label_pos = rest.find("label=");
  if (label_pos != std::string_view::npos) {
    a.label = detail::parse_int(rest.substr(label_pos + 6));
    if (*a.label != 1 && *a.label != -1) throw std::invalid_argument("adversary label must be +1 or -1");
    rest = rest.substr(0, label_pos);
    while (!rest.empty() && (rest.back() == ',' || rest.back() == ';')) rest.remove_suffix(1);
  }
  if (rest.starts_with("target=")) {
    auto coords = detail::parse_int_list(rest.substr(7), ',');
    if (static_cast<int>(coords.size()) != dim) throw DimensionError("adversary target has wrong dimension");
    a.target = Point(std::span<const int>(coords));
  } else if (!rest.empty()) {
    throw std::invalid_argument("malformed adversary spec: " + std::string(spec));
  }
  return a;
}

namespace detail {

inline AdversaryMove run_adversary(const AdversaryStrategy& adv, std::span<const LabeledExample> clean,
                                   const Circuit& truth, std::size_t budget, Rng& rng) {
  AdversaryMove move;
  const std::size_t n = clean.size();
  switch (adv.kind) {
    case AdversaryStrategy::Kind::LabelFlip: {
      if (adv.ranking) {
        std::vector<std::size_t> order(n);
        std::vector<double> score(n);
        for (std::size_t i = 0; i < n; ++i) {
          order[i] = i;
          score[i] = std::abs(eval_poly(*adv.ranking, clean[i].x));
        }
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return score[a] > score[b]; });
        order.resize(budget);
        std::sort(order.begin(), order.end());
        move.removed = std::move(order);
      } else {
        move.removed = sample_without_replacement(rng, n, budget);
      }
      for (std::size_t i : move.removed) move.inserted.push_back({clean[i].x, -clean[i].label});
      break;
    }
    case AdversaryStrategy::Kind::PointConcentration: {
      const Point target = adv.target.value_or(Point::all_ones(truth.dim()));
      const int label = adv.label.value_or(-truth.eval(target));
      move.removed = sample_without_replacement(rng, n, budget);
      move.inserted.assign(budget, LabeledExample{target, label});
      break;
    }
    case AdversaryStrategy::Kind::RandomReplacement: {
      move.removed = sample_without_replacement(rng, n, budget);
      for (std::size_t i = 0; i < budget; ++i) {
        Point x = uniform_point(rng, truth.dim());
        move.inserted.push_back({x, (rng() >> 63) ? 1 : -1});
      }
      break;
    }
    case AdversaryStrategy::Kind::Custom: {
      if (!adv.custom) throw std::invalid_argument("custom adversary without callback");
      move = adv.custom(clean, truth, budget, rng);
      break;
    }
  }
  return move;
}

}  // namespace detail

/// Replaces floor(eta * N) clean examples according to `adv`. The output order
/// is shuffled so positions carry no provenance information.
inline LabeledSet contaminate(const LabeledSet& clean, double eta, const AdversaryStrategy& adv,
                              const Circuit& truth, std::uint64_t seed) {
  if (!(eta >= 0.0 && eta < 1.0)) throw std::invalid_argument("contaminate: eta must lie in [0, 1)");
  if (clean.count(Provenance::Adversarial) != 0) throw std::invalid_argument("contaminate: input must be all clean");
  if (truth.dim() != clean.dim) throw DimensionError("contaminate: truth dimension mismatch");
  const std::size_t n = clean.size();
  const std::size_t budget = contamination_budget(eta, n);
  if (budget == 0) return clean;

  Rng rng(seed);
  AdversaryMove move = detail::run_adversary(adv, clean.items, truth, budget, rng);

  std::vector<bool> drop(n, false);
  for (std::size_t i : move.removed) {
    if (i >= n || drop[i]) throw std::invalid_argument("adversary removed an invalid or repeated index");
    drop[i] = true;
  }
  if (move.removed.size() != budget || move.inserted.size() != budget) {
    throw std::invalid_argument("adversary must remove and insert exactly floor(eta*N) examples");
  }

  struct Tagged {
    LabeledExample e;
    Provenance tag;
  };
  std::vector<Tagged> merged;
  merged.reserve(n);
  LabeledSet out;
  out.dim = clean.dim;
  out.original_size = clean.original_size;
  for (std::size_t i = 0; i < n; ++i) {
    if (drop[i]) {
      out.removed.push_back(clean.items[i]);
    } else {
      merged.push_back({clean.items[i], Provenance::Clean});
    }
  }
  for (auto& e : move.inserted) {
    if (e.x.dim() != clean.dim || (e.label != 1 && e.label != -1)) {
      throw std::invalid_argument("adversary inserted a malformed example");
    }
    merged.push_back({e, Provenance::Adversarial});
  }
  shuffle(merged, rng);
  for (auto& t : merged) {
    out.items.push_back(t.e);
    out.tags.push_back(t.tag);
  }
  return out;
}

}  // namespace ac0
