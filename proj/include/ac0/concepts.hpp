#pragma once

// Ground-truth concepts as AND/OR/NOT circuits over literals.
//
// Gate logic is Boolean with "true" read as +1. Size counts AND, OR and NOT
// gates; depth is the longest leaf-to-output path counting AND/OR gates only
// (NOT gates are free, literals and constants have depth 0).

#include <algorithm>
#include <bit>
#include <cctype>
#include <charconv>
#include <cstdint>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include "ac0/hypercube.hpp"

namespace ac0 {

struct CircuitError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

enum class GateKind { Literal, Constant, And, Or, Not };

inline const char* to_string(GateKind k) {
  switch (k) {
    case GateKind::Literal: return "lit";
    case GateKind::Constant: return "const";
    case GateKind::And: return "and";
    case GateKind::Or: return "or";
    case GateKind::Not: return "not";
  }
  return "?";
}

inline GateKind gate_kind_from_string(std::string_view s) {
  if (s == "lit") return GateKind::Literal;
  if (s == "const") return GateKind::Constant;
  if (s == "and") return GateKind::And;
  if (s == "or") return GateKind::Or;
  if (s == "not") return GateKind::Not;
  throw CircuitError("unknown gate type: " + std::string(s));
}

struct Gate {
  GateKind kind = GateKind::Constant;
  int var = 0;            // Literal: 1-based input index
  bool negated = false;   // Literal: reads not x_var
  bool value = true;      // Constant
  std::vector<int> children;  // And/Or/Not: ids of earlier nodes
};

/// Gate DAG in topological order: every child id is smaller than its parent's.
class Circuit {
 public:
  Circuit(int dim, std::vector<Gate> gates, int output) : dim_(dim), gates_(std::move(gates)), output_(output) {
    if (dim <= 0 || dim > kMaxDim) throw DimensionError("Circuit: bad dimension");
    if (output < 0 || output >= static_cast<int>(gates_.size())) throw CircuitError("Circuit: output id out of range");
    for (std::size_t id = 0; id < gates_.size(); ++id) {
      const Gate& g = gates_[id];
      switch (g.kind) {
        case GateKind::Literal:
          if (g.var < 1 || g.var > dim) throw CircuitError("Circuit: literal index out of range");
          break;
        case GateKind::Constant:
          break;
        case GateKind::Not:
          if (g.children.size() != 1) throw CircuitError("Circuit: NOT must have fan-in 1");
          [[fallthrough]];
        case GateKind::And:
        case GateKind::Or:
          if (g.children.empty()) throw CircuitError("Circuit: gate needs fan-in >= 1");
          for (int c : g.children) {
            // Children must precede their parent, which also rules out cycles.
            if (c < 0 || c >= static_cast<int>(id)) throw CircuitError("Circuit: child id must precede gate (acyclic order)");
          }
          break;
      }
    }
    std::tie(size_, depth_) = recompute_size_depth();
  }

  int dim() const { return dim_; }
  int size() const { return size_; }
  int depth() const { return depth_; }
  int output() const { return output_; }
  const std::vector<Gate>& gates() const { return gates_; }

  /// Gates reachable from the output; unreachable nodes are ignored.
  std::pair<int, int> recompute_size_depth() const {
    std::vector<bool> live(gates_.size(), false);
    live[output_] = true;
    int size = 0;
    for (std::size_t id = gates_.size(); id-- > 0;) {
      if (!live[id]) continue;
      const Gate& g = gates_[id];
      if (g.kind == GateKind::And || g.kind == GateKind::Or || g.kind == GateKind::Not) ++size;
      for (int c : g.children) live[c] = true;
    }
    std::vector<int> depth(gates_.size(), 0);
    for (std::size_t id = 0; id < gates_.size(); ++id) {
      const Gate& g = gates_[id];
      int d = 0;
      for (int c : g.children) d = std::max(d, depth[c]);
      if (g.kind == GateKind::And || g.kind == GateKind::Or) ++d;
      depth[id] = d;
    }
    return {size, depth[output_]};
  }

  bool eval_bool(const Point& x) const {
    if (x.dim() != dim_) throw DimensionError("eval_circuit: dimension mismatch");
    std::vector<char> val(gates_.size(), 0);
    for (std::size_t id = 0; id <= static_cast<std::size_t>(output_); ++id) {
      const Gate& g = gates_[id];
      bool v = false;
      switch (g.kind) {
        case GateKind::Literal: v = (x.coord(g.var) == 1) != g.negated; break;
        case GateKind::Constant: v = g.value; break;
        case GateKind::Not: v = !val[g.children[0]]; break;
        case GateKind::And:
          v = std::all_of(g.children.begin(), g.children.end(), [&](int c) { return val[c] != 0; });
          break;
        case GateKind::Or:
          v = std::any_of(g.children.begin(), g.children.end(), [&](int c) { return val[c] != 0; });
          break;
      }
      val[id] = v ? 1 : 0;
    }
    return val[output_] != 0;
  }

  /// +1 when the circuit outputs true, -1 otherwise.
  int eval(const Point& x) const { return eval_bool(x) ? 1 : -1; }

  /// Outputs on every vertex in enumeration order.
  std::vector<int> truth_table() const {
    if (dim_ > kMaxEnumerationDim) throw DimensionError("truth_table: dimension too large");
    const std::uint32_t n = 1u << dim_;
    std::vector<int> out(n);
    for (std::uint32_t t = 0; t < n; ++t) out[t] = eval(Point::from_index(dim_, t));
    return out;
  }

 private:
  int dim_;
  std::vector<Gate> gates_;
  int output_;
  int size_ = 0;
  int depth_ = 0;
};

inline int eval_circuit(const Circuit& c, const Point& x) { return c.eval(x); }

/// A literal: variable index (1-based) and polarity.
struct Literal {
  int var = 1;
  bool negated = false;
};

/// Incremental builder that appends gates in topological order.
class CircuitBuilder {
 public:
  explicit CircuitBuilder(int dim) : dim_(dim) {}

  int literal(int var, bool negated = false) {
    Gate g;
    g.kind = GateKind::Literal;
    g.var = var;
    g.negated = negated;
    return push(std::move(g));
  }
  int constant(bool value) {
    Gate g;
    g.kind = GateKind::Constant;
    g.value = value;
    return push(std::move(g));
  }
  int gate(GateKind kind, std::vector<int> children) {
    Gate g;
    g.kind = kind;
    g.children = std::move(children);
    return push(std::move(g));
  }

  Circuit build(int output) && { return Circuit(dim_, std::move(gates_), output); }

 private:
  int push(Gate g) {
    gates_.push_back(std::move(g));
    return static_cast<int>(gates_.size()) - 1;
  }

  int dim_;
  std::vector<Gate> gates_;
};

/// OR of ANDs of literals. Always depth 2 and size (#terms + 1), except that an
/// empty term list is the constant false.
inline Circuit make_dnf(int dim, const std::vector<std::vector<Literal>>& terms) {
  CircuitBuilder b(dim);
  if (terms.empty()) {
    const int c = b.constant(false);
    return std::move(b).build(c);
  }
  std::vector<int> ands;
  for (const auto& term : terms) {
    if (term.empty()) throw CircuitError("dnf: empty term");
    std::vector<int> lits;
    for (const auto& l : term) lits.push_back(b.literal(l.var, l.negated));
    ands.push_back(b.gate(GateKind::And, std::move(lits)));
  }
  const int out = b.gate(GateKind::Or, std::move(ands));
  return std::move(b).build(out);
}

inline Circuit make_constant(int dim, bool value) {
  CircuitBuilder b(dim);
  const int c = b.constant(value);
  return std::move(b).build(c);
}

/// AND of the positive literals in `vars` (size 1, depth 1).
inline Circuit make_and(int dim, const std::vector<int>& vars) {
  if (vars.empty()) throw CircuitError("and: empty variable set");
  CircuitBuilder b(dim);
  std::vector<int> lits;
  for (int v : vars) lits.push_back(b.literal(v));
  const int out = b.gate(GateKind::And, std::move(lits));
  return std::move(b).build(out);
}

inline Circuit make_or(int dim, const std::vector<int>& vars) {
  if (vars.empty()) throw CircuitError("or: empty variable set");
  CircuitBuilder b(dim);
  std::vector<int> lits;
  for (int v : vars) lits.push_back(b.literal(v));
  const int out = b.gate(GateKind::Or, std::move(lits));
  return std::move(b).build(out);
}

/// Junta on `vars` with `table` (+-1) indexed like a cube of dimension |vars|:
/// entry t corresponds to x_{vars[i]} = 1 - 2 * bit(i) of t.
/// Realised as the DNF of its true rows.
inline Circuit make_junta(int dim, const std::vector<int>& vars, const std::vector<int>& table) {
  if (vars.empty() || vars.size() > 20) throw CircuitError("junta: need 1..20 variables");
  if (table.size() != (std::size_t{1} << vars.size())) throw CircuitError("junta: table size must be 2^|S|");
  std::vector<std::vector<Literal>> terms;
  for (std::size_t t = 0; t < table.size(); ++t) {
    if (table[t] != 1 && table[t] != -1) throw CircuitError("junta: table entries must be +1 or -1");
    if (table[t] != 1) continue;
    std::vector<Literal> term;
    for (std::size_t i = 0; i < vars.size(); ++i) term.push_back({vars[i], ((t >> i) & 1u) != 0});
    terms.push_back(std::move(term));
  }
  return make_dnf(dim, terms);
}

/// The +-1 parity x^S = prod_{i in S} x_i, i.e. true iff an even number of the
/// inputs in S are false. Realised as a DNF with 2^(|S|-1) terms.
inline Circuit make_parity(int dim, const std::vector<int>& vars) {
  if (vars.empty()) return make_constant(dim, true);
  std::vector<int> table(std::size_t{1} << vars.size());
  for (std::size_t t = 0; t < table.size(); ++t) table[t] = (std::popcount(t) & 1) ? -1 : 1;
  return make_junta(dim, vars, table);
}

/// OR of m disjoint ANDs of width w over x_1..x_{w*m}.
inline Circuit make_tribes(int dim, int w, int m) {
  if (w < 1 || m < 1) throw CircuitError("tribes: need w >= 1 and m >= 1");
  if (w * m > dim) throw CircuitError("tribes: w*m exceeds dimension");
  std::vector<std::vector<Literal>> terms;
  for (int j = 0; j < m; ++j) {
    std::vector<Literal> term;
    for (int i = 0; i < w; ++i) term.push_back({j * w + i + 1, false});
    terms.push_back(std::move(term));
  }
  return make_dnf(dim, terms);
}

namespace detail {

inline int parse_int(std::string_view s) {
  int v = 0;
  while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
  while (!s.empty() && s.back() == ' ') s.remove_suffix(1);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) {
    throw CircuitError("expected integer, got '" + std::string(s) + "'");
  }
  return v;
}

inline std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  if (s.empty()) return out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    out.push_back(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

inline std::vector<int> parse_int_list(std::string_view s, char sep) {
  std::vector<int> out;
  for (auto part : split(s, sep)) out.push_back(parse_int(part));
  return out;
}

}  // namespace detail

/// Builds a named family from a compact spec string:
///
///   const:value=1            constant (+1 / -1)
///   parity:S=1,2,3           x_1 x_2 x_3
///   and:S=1,2   or:S=1,2     single gate over positive literals
///   dnf:terms=1,-2;3         (x1 AND NOT x2) OR x3
///   tribes:w=2,m=3           OR of m width-w ANDs on x_1..x_{wm}
///   junta:S=1,2;table=+-+-   truth table over S, entries '+'/'-'
///
/// Parameters are separated by ':' from the name; S lists use ','.
/// `dnf` terms are separated by ';' (a negative index negates the literal).
inline Circuit make_named(std::string_view spec, int dim) {
  const auto colon = spec.find(':');
  const std::string_view name = spec.substr(0, colon);
  std::string_view rest = colon == std::string_view::npos ? std::string_view{} : spec.substr(colon + 1);

  // key=value pairs; values may themselves contain ',' and ';', so split on
  // the known keys instead of a separator.
  std::map<std::string, std::string> kv;
  {
    std::string key;
    std::size_t pos = 0;
    while (pos < rest.size()) {
      const auto eq = rest.find('=', pos);
      if (eq == std::string_view::npos) throw CircuitError("malformed family spec: " + std::string(spec));
      key = std::string(rest.substr(pos, eq - pos));
      // Value runs until the next "<letters>=" that starts after ',' or ';'.
      std::size_t next = rest.size();
      for (std::size_t q = eq + 1; q < rest.size(); ++q) {
        if (rest[q] != ',' && rest[q] != ';') continue;
        std::size_t r = q + 1;
        while (r < rest.size() && std::isalpha(static_cast<unsigned char>(rest[r]))) ++r;
        if (r > q + 1 && r < rest.size() && rest[r] == '=') {
          next = q;
          break;
        }
      }
      kv[key] = std::string(rest.substr(eq + 1, next - eq - 1));
      pos = next == rest.size() ? next : next + 1;
    }
  }
  auto get = [&](const std::string& k) -> const std::string& {
    auto it = kv.find(k);
    if (it == kv.end()) throw CircuitError("family '" + std::string(name) + "' needs parameter " + k);
    return it->second;
  };

  if (name == "const") return make_constant(dim, detail::parse_int(get("value")) > 0);
  if (name == "parity") {
    const auto& s = get("S");
    return make_parity(dim, s.empty() ? std::vector<int>{} : detail::parse_int_list(s, ','));
  }
  if (name == "and") return make_and(dim, detail::parse_int_list(get("S"), ','));
  if (name == "or") return make_or(dim, detail::parse_int_list(get("S"), ','));
  if (name == "tribes") return make_tribes(dim, detail::parse_int(get("w")), detail::parse_int(get("m")));
  if (name == "dnf") {
    std::vector<std::vector<Literal>> terms;
    for (auto t : detail::split(get("terms"), ';')) {
      std::vector<Literal> term;
      for (int v : detail::parse_int_list(t, ',')) {
        if (v == 0) throw CircuitError("dnf: literal 0 is invalid");
        term.push_back({std::abs(v), v < 0});
      }
      terms.push_back(std::move(term));
    }
    return make_dnf(dim, terms);
  }
  if (name == "junta") {
    std::vector<int> table;
    for (char ch : get("table")) {
      if (ch == '+') table.push_back(1);
      else if (ch == '-') table.push_back(-1);
      else throw CircuitError("junta: table uses '+' and '-'");
    }
    return make_junta(dim, detail::parse_int_list(get("S"), ','), table);
  }
  throw CircuitError("unknown concept family: " + std::string(name));
}

}  // namespace ac0
