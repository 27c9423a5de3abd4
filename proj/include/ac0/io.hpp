#pragma once

// Serialisation: polynomials, circuits, hypotheses and filter reports as JSON;
// labeled samples as CSV.
//
// Polynomial JSON:
//   {"dim": d, "degree_bound": k, "terms": [[[1, 2], 0.5], [[3], -1.0], ...]}
// with terms in size-then-lex monomial order.
//
// Circuit JSON:
//   {"dim": d, "output": id, "nodes": [{"id": 0, "type": "lit", "var": 1, "negated": false},
//                                      {"id": 1, "type": "and", "children": [0]}, ...]}
//
// Labeled sample CSV: header x_1,...,x_d,label[,tag]; one example per row,
// entries +1/-1 (written as 1/-1), tag "clean" or "adversarial".

#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "ac0/concepts.hpp"
#include "ac0/contamination.hpp"
#include "ac0/hypercube.hpp"
#include "ac0/outlier_removal.hpp"
#include "ac0/regression.hpp"
#include "ac0/sandwiching.hpp"

namespace ac0 {

using nlohmann::json;

struct FormatError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline json to_json(const Polynomial& p) {
  json terms = json::array();
  for (const auto& [m, c] : p.terms()) terms.push_back(json::array({m.indices(), c}));
  return json{{"dim", p.dim()}, {"degree_bound", p.degree_bound()}, {"terms", terms}};
}

inline Polynomial polynomial_from_json(const json& j) {
  Polynomial p(j.at("dim").get<int>(), j.at("degree_bound").get<int>());
  for (const auto& t : j.at("terms")) {
    const auto idx = t.at(0).get<std::vector<int>>();
    p.add(Monomial::from_indices(idx, p.dim()), t.at(1).get<double>());
  }
  return p;
}

// JSON has no infinities; thresholds at +-inf are written as strings.
inline json threshold_to_json(double theta) {
  if (std::isinf(theta)) return theta > 0 ? json("inf") : json("-inf");
  return theta;
}

inline double threshold_from_json(const json& j) {
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    throw FormatError("bad threshold: " + s);
  }
  return j.get<double>();
}

inline json to_json(const PTFHypothesis& h) {
  return json{{"polynomial", to_json(h.p)}, {"theta", threshold_to_json(h.theta)}};
}

inline PTFHypothesis hypothesis_from_json(const json& j) {
  return PTFHypothesis{polynomial_from_json(j.at("polynomial")), threshold_from_json(j.at("theta"))};
}

inline json to_json(const Circuit& c) {
  json nodes = json::array();
  for (std::size_t id = 0; id < c.gates().size(); ++id) {
    const Gate& g = c.gates()[id];
    json n{{"id", id}, {"type", to_string(g.kind)}};
    switch (g.kind) {
      case GateKind::Literal:
        n["var"] = g.var;
        n["negated"] = g.negated;
        break;
      case GateKind::Constant:
        n["value"] = g.value;
        break;
      default:
        n["children"] = g.children;
        break;
    }
    nodes.push_back(std::move(n));
  }
  return json{{"dim", c.dim()}, {"output", c.output()}, {"size", c.size()}, {"depth", c.depth()}, {"nodes", nodes}};
}

/// Nodes may appear in any order in the file but must reference earlier ids
/// once sorted by id; ids must be 0..n-1.
inline Circuit circuit_from_json(const json& j) {
  const auto& nodes = j.at("nodes");
  std::vector<Gate> gates(nodes.size());
  std::vector<bool> seen(nodes.size(), false);
  for (const auto& n : nodes) {
    const auto id = n.at("id").get<std::size_t>();
    if (id >= gates.size() || seen[id]) throw FormatError("circuit JSON: bad or repeated node id");
    seen[id] = true;
    Gate g;
    g.kind = gate_kind_from_string(n.at("type").get<std::string>());
    if (g.kind == GateKind::Literal) {
      g.var = n.at("var").get<int>();
      g.negated = n.value("negated", false);
    } else if (g.kind == GateKind::Constant) {
      g.value = n.at("value").get<bool>();
    } else {
      g.children = n.at("children").get<std::vector<int>>();
    }
    gates[id] = std::move(g);
  }
  Circuit c(j.at("dim").get<int>(), std::move(gates), j.at("output").get<int>());
  if (j.contains("size") && j.at("size").get<int>() != c.size()) throw FormatError("circuit JSON: size field mismatch");
  if (j.contains("depth") && j.at("depth").get<int>() != c.depth()) throw FormatError("circuit JSON: depth field mismatch");
  return c;
}

inline json to_json(const SandwichPair& s) {
  return json{{"p_up", to_json(s.p_up)}, {"p_down", to_json(s.p_down)}, {"gap", s.gap}};
}

inline json point_to_json(const Point& x) { return x.coords(); }

inline json to_json(const FilterIteration& it) {
  json j{{"p_star", to_json(it.p_star)},
         {"lambda", it.lambda},
         {"tau", it.tau ? json(*it.tau) : json(nullptr)},
         {"fallback", it.fallback},
         {"terminal", it.terminal},
         {"size_before", it.size_before},
         {"removed_count", it.removed.size()},
         {"removed", it.removed},
         {"lp_iterations", it.lp_iterations}};
  if (it.removed_clean) j["removed_clean_count"] = *it.removed_clean;
  if (it.removed_adversarial) j["removed_adversarial_count"] = *it.removed_adversarial;
  return j;
}

inline json to_json(const FilterReport& r, bool include_reference = true) {
  json iters = json::array();
  for (const auto& it : r.iterations) iters.push_back(to_json(it));
  json j{{"N", r.n},
         {"dim", r.dim},
         {"eps", r.eps},
         {"k", r.k},
         {"B", r.coef_bound},
         {"Delta", r.delta},
         {"converged", r.converged},
         {"kept_count", r.kept.size()},
         {"removed_count", r.total_removed()},
         {"fallback_iterations", r.fallback_count()},
         {"iterations", iters}};
  if (include_reference) {
    json ref = json::array();
    for (const auto& x : r.reference) ref.push_back(point_to_json(x));
    j["reference"] = std::move(ref);
  }
  return j;
}

inline void write_csv(std::ostream& os, const LabeledSet& s, bool with_tags) {
  for (int i = 1; i <= s.dim; ++i) os << "x_" << i << ",";
  os << "label" << (with_tags ? ",tag" : "") << "\n";
  for (std::size_t r = 0; r < s.items.size(); ++r) {
    const auto& e = s.items[r];
    for (int i = 1; i <= s.dim; ++i) os << e.x.coord(i) << ",";
    os << e.label;
    if (with_tags) os << "," << to_string(s.tags[r]);
    os << "\n";
  }
}

inline void write_csv(std::ostream& os, const LabeledSample& s) {
  for (int i = 1; i <= s.dim; ++i) os << "x_" << i << ",";
  os << "label\n";
  for (const auto& e : s.examples) {
    for (int i = 1; i <= s.dim; ++i) os << e.x.coord(i) << ",";
    os << e.label << "\n";
  }
}

/// CSV contents; tags are present only for harness-mode files.
struct CsvSample {
  LabeledSample sample;
  std::optional<std::vector<Provenance>> tags;
};

inline CsvSample read_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw FormatError("CSV: missing header");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  std::vector<std::string> header;
  {
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) header.push_back(cell);
  }
  int dim = 0;
  while (dim < static_cast<int>(header.size()) && header[dim] == "x_" + std::to_string(dim + 1)) ++dim;
  if (dim == 0 || dim >= static_cast<int>(header.size()) || header[dim] != "label") {
    throw FormatError("CSV: header must be x_1..x_d,label[,tag]");
  }
  const bool has_tag = static_cast<int>(header.size()) == dim + 2 && header[dim + 1] == "tag";
  if (!has_tag && static_cast<int>(header.size()) != dim + 1) throw FormatError("CSV: unexpected columns");

  CsvSample out;
  out.sample.dim = dim;
  if (has_tag) out.tags.emplace();
  std::size_t lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    std::vector<std::string> cells;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (cells.size() != header.size()) throw FormatError("CSV: wrong column count on line " + std::to_string(lineno));
    std::vector<int> coords(dim);
    try {
      for (int i = 0; i < dim; ++i) coords[i] = std::stoi(cells[i]);
      const int label = std::stoi(cells[dim]);
      if (label != 1 && label != -1) throw FormatError("label must be +1 or -1");
      out.sample.examples.push_back({Point(std::span<const int>(coords)), label});
    } catch (const std::exception& e) {
      throw FormatError("CSV line " + std::to_string(lineno) + ": " + e.what());
    }
    if (has_tag) {
      if (cells[dim + 1] == "clean") out.tags->push_back(Provenance::Clean);
      else if (cells[dim + 1] == "adversarial") out.tags->push_back(Provenance::Adversarial);
      else throw FormatError("CSV: unknown tag on line " + std::to_string(lineno));
    }
  }
  return out;
}

inline CsvSample read_csv_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open " + path);
  return read_csv(in);
}

/// Whitespace-separated +1/-1 values; the length fixes d = log2(length).
inline std::pair<std::vector<int>, int> read_truth_table(std::istream& is) {
  std::vector<int> table;
  int v = 0;
  while (is >> v) {
    if (v != 1 && v != -1) throw FormatError("truth table entries must be +1 or -1");
    table.push_back(v);
  }
  if (!is.eof()) throw FormatError("truth table: non-integer entry");
  int dim = 0;
  while ((std::size_t{1} << dim) < table.size()) ++dim;
  if (table.empty() || (std::size_t{1} << dim) != table.size() || dim == 0) {
    throw FormatError("truth table length must be 2^d with d >= 1");
  }
  return {std::move(table), dim};
}

}  // namespace ac0
