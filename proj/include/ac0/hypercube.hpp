#pragma once

// Points, monomials and multilinear polynomials over the hypercube {-1,1}^d,
// plus exact statistics under the uniform distribution.
//
// Conventions used throughout the library:
//   * coordinates and labels are +1 / -1; a Boolean "true" is +1;
//   * enumeration of the cube uses index t in [0, 2^d): coordinate i
//     (1-based) equals 1 - 2 * bit(i - 1) of t, so t = 0 is the all-ones point;
//   * monomials are ordered by size, then lexicographically on their sorted
//     index lists (the "frozen" order used for LP variable indexing).

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <map>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace ac0 {

inline constexpr int kMaxDim = 30;
inline constexpr int kMaxEnumerationDim = 20;

struct DimensionError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// A vertex of {-1,1}^d. Stored as the bitmask of coordinates equal to -1.
class Point {
 public:
  Point() = default;

  Point(int dim, std::uint32_t negative_bits) : dim_(dim), neg_(negative_bits) {
    check_dim(dim);
    if (dim < 32 && (negative_bits >> dim) != 0) {
      throw DimensionError("Point: bits set beyond dimension");
    }
  }

  explicit Point(std::span<const int> coords) : dim_(static_cast<int>(coords.size())) {
    check_dim(dim_);
    for (int i = 0; i < dim_; ++i) {
      if (coords[i] == -1) {
        neg_ |= 1u << i;
      } else if (coords[i] != 1) {
        throw std::invalid_argument("Point: coordinates must be +1 or -1");
      }
    }
  }

  Point(std::initializer_list<int> coords)
      : Point(std::span<const int>(coords.begin(), coords.size())) {}

  static Point all_ones(int dim) { return Point(dim, 0u); }

  /// Cube vertex number t in the enumeration order described above.
  static Point from_index(int dim, std::uint32_t t) { return Point(dim, t); }

  int dim() const { return dim_; }
  std::uint32_t negative_bits() const { return neg_; }
  std::uint32_t index() const { return neg_; }

  /// Coordinate i, 1-based.
  int coord(int i) const {
    if (i < 1 || i > dim_) throw DimensionError("Point::coord: index out of range");
    return ((neg_ >> (i - 1)) & 1u) ? -1 : 1;
  }

  std::vector<int> coords() const {
    std::vector<int> out(dim_);
    for (int i = 0; i < dim_; ++i) out[i] = ((neg_ >> i) & 1u) ? -1 : 1;
    return out;
  }

  friend bool operator==(const Point&, const Point&) = default;
  friend auto operator<=>(const Point&, const Point&) = default;

 private:
  static void check_dim(int dim) {
    if (dim <= 0 || dim > kMaxDim) throw DimensionError("Point: dimension must be in [1, 30]");
  }

  int dim_ = 0;
  std::uint32_t neg_ = 0;
};

/// A set I of coordinates, stored as a bitmask (bit i-1 set iff i in I).
class Monomial {
 public:
  constexpr Monomial() = default;
  constexpr explicit Monomial(std::uint32_t mask) : mask_(mask) {}

  /// Builds I from 1-based indices; rejects duplicates and out-of-range entries.
  static Monomial from_indices(std::span<const int> indices, int dim) {
    std::uint32_t mask = 0;
    for (int i : indices) {
      if (i < 1 || i > dim) throw DimensionError("Monomial: index out of range");
      const std::uint32_t bit = 1u << (i - 1);
      if (mask & bit) throw std::invalid_argument("Monomial: duplicate index");
      mask |= bit;
    }
    return Monomial(mask);
  }
  static Monomial from_indices(std::initializer_list<int> indices, int dim) {
    return from_indices(std::span<const int>(indices.begin(), indices.size()), dim);
  }

  constexpr std::uint32_t mask() const { return mask_; }
  constexpr int size() const { return std::popcount(mask_); }
  constexpr bool empty() const { return mask_ == 0; }

  /// Largest index in I (0 for the empty set).
  int max_index() const { return mask_ == 0 ? 0 : 32 - std::countl_zero(mask_); }

  std::vector<int> indices() const {
    std::vector<int> out;
    for (std::uint32_t m = mask_; m != 0; m &= m - 1) out.push_back(std::countr_zero(m) + 1);
    return out;
  }

  friend constexpr bool operator==(Monomial, Monomial) = default;

 private:
  std::uint32_t mask_ = 0;
};

/// Size-then-lex order on monomials.
struct MonomialOrder {
  bool operator()(Monomial a, Monomial b) const {
    if (a.size() != b.size()) return a.size() < b.size();
    const std::uint32_t diff = a.mask() ^ b.mask();
    if (diff == 0) return false;
    // Sorted index lists first differ at the lowest differing index; the set
    // containing it is lexicographically smaller.
    return (a.mask() & (diff & (~diff + 1))) != 0;
  }
};

/// x^I = prod_{i in I} x_i.
inline int eval_monomial(const Point& x, Monomial m) {
  if (m.max_index() > x.dim()) throw DimensionError("eval_monomial: index exceeds point dimension");
  return (std::popcount(x.negative_bits() & m.mask()) & 1) ? -1 : 1;
}

inline std::uint64_t binomial(int n, int r) {
  if (r < 0 || r > n) return 0;
  std::uint64_t out = 1;
  for (int j = 1; j <= r; ++j) out = out * static_cast<std::uint64_t>(n - r + j) / j;
  return out;
}

/// All I subset of [d] with |I| <= k in size-then-lex order.
inline std::vector<Monomial> enumerate_monomials(int dim, int k) {
  if (dim < 0 || dim > kMaxDim) throw DimensionError("enumerate_monomials: bad dimension");
  if (k < 0 || k > dim) throw std::invalid_argument("enumerate_monomials: need 0 <= k <= d");
  std::vector<Monomial> out;
  for (int size = 0; size <= k; ++size) {
    // Combinations of `size` indices in lexicographic order.
    std::vector<int> idx(size);
    for (int j = 0; j < size; ++j) idx[j] = j + 1;
    while (true) {
      std::uint32_t mask = 0;
      for (int i : idx) mask |= 1u << (i - 1);
      out.emplace_back(mask);
      int j = size - 1;
      while (j >= 0 && idx[j] == dim - size + j + 1) --j;
      if (j < 0) break;
      ++idx[j];
      for (int t = j + 1; t < size; ++t) idx[t] = idx[t - 1] + 1;
    }
  }
  return out;
}

/// Multilinear polynomial sum_I c(I) x^I with |I| <= degree_bound.
class Polynomial {
 public:
  using Terms = std::map<Monomial, double, MonomialOrder>;

  Polynomial() = default;
  Polynomial(int dim, int degree_bound) : dim_(dim), degree_bound_(degree_bound) {
    if (dim <= 0 || dim > kMaxDim) throw DimensionError("Polynomial: bad dimension");
    if (degree_bound < 0) throw std::invalid_argument("Polynomial: negative degree bound");
  }

  static Polynomial constant(int dim, double c) {
    Polynomial p(dim, 0);
    p.set(Monomial{}, c);
    return p;
  }

  /// Coefficients given in the order of enumerate_monomials(dim, k).
  static Polynomial from_dense(int dim, int k, std::span<const double> coefs) {
    const auto basis = enumerate_monomials(dim, k);
    if (basis.size() != coefs.size()) throw std::invalid_argument("Polynomial::from_dense: size mismatch");
    Polynomial p(dim, k);
    for (std::size_t j = 0; j < basis.size(); ++j) p.set(basis[j], coefs[j]);
    return p;
  }

  int dim() const { return dim_; }
  int degree_bound() const { return degree_bound_; }
  const Terms& terms() const { return terms_; }

  double coef(Monomial m) const {
    auto it = terms_.find(m);
    return it == terms_.end() ? 0.0 : it->second;
  }

  /// Sets c(I); a zero coefficient erases the entry.
  void set(Monomial m, double c) {
    if (m.max_index() > dim_) throw DimensionError("Polynomial::set: index exceeds dimension");
    if (m.size() > degree_bound_) throw std::invalid_argument("Polynomial::set: exceeds degree bound");
    if (c == 0.0) {
      terms_.erase(m);
    } else {
      terms_[m] = c;
    }
  }

  void add(Monomial m, double c) { set(m, coef(m) + c); }

  /// Actual degree (largest |I| with nonzero coefficient; 0 for the zero polynomial).
  int degree() const {
    int deg = 0;
    for (const auto& [m, c] : terms_) deg = std::max(deg, m.size());
    return deg;
  }

  std::vector<double> dense(int k) const {
    const auto basis = enumerate_monomials(dim_, k);
    std::vector<double> out(basis.size());
    for (std::size_t j = 0; j < basis.size(); ++j) out[j] = coef(basis[j]);
    return out;
  }

  Polynomial& operator+=(const Polynomial& o) {
    check_same_dim(o);
    degree_bound_ = std::max(degree_bound_, o.degree_bound_);
    for (const auto& [m, c] : o.terms_) add(m, c);
    return *this;
  }
  Polynomial& operator-=(const Polynomial& o) {
    check_same_dim(o);
    degree_bound_ = std::max(degree_bound_, o.degree_bound_);
    for (const auto& [m, c] : o.terms_) add(m, -c);
    return *this;
  }
  Polynomial& operator*=(double s) {
    if (s == 0.0) {
      terms_.clear();
    } else {
      for (auto& [m, c] : terms_) c *= s;
    }
    return *this;
  }

  friend Polynomial operator+(Polynomial a, const Polynomial& b) { return a += b; }
  friend Polynomial operator-(Polynomial a, const Polynomial& b) { return a -= b; }
  friend Polynomial operator*(Polynomial a, double s) { return a *= s; }
  friend Polynomial operator*(double s, Polynomial a) { return a *= s; }

  /// Product reduced with x_i^2 = 1, so x^I * x^J = x^(I xor J).
  friend Polynomial operator*(const Polynomial& a, const Polynomial& b) {
    a.check_same_dim(b);
    Polynomial out(a.dim_, std::min(a.dim_, a.degree_bound_ + b.degree_bound_));
    for (const auto& [ma, ca] : a.terms_) {
      for (const auto& [mb, cb] : b.terms_) out.add(Monomial(ma.mask() ^ mb.mask()), ca * cb);
    }
    return out;
  }

  friend bool operator==(const Polynomial&, const Polynomial&) = default;

  std::string to_string() const {
    if (terms_.empty()) return "0";
    std::ostringstream os;
    os.precision(17);
    bool first = true;
    for (const auto& [m, c] : terms_) {
      if (!first) os << (c < 0 ? " - " : " + ");
      else if (c < 0) os << "-";
      os << std::abs(c);
      for (int i : m.indices()) os << "*x" << i;
      first = false;
    }
    return os.str();
  }

 private:
  void check_same_dim(const Polynomial& o) const {
    if (dim_ != o.dim_) throw DimensionError("Polynomial: dimension mismatch");
  }

  int dim_ = 1;
  int degree_bound_ = 0;
  Terms terms_;
};

inline double eval_poly(const Polynomial& p, const Point& x) {
  if (p.dim() != x.dim()) throw DimensionError("eval_poly: dimension mismatch");
  double sum = 0.0;
  const std::uint32_t neg = x.negative_bits();
  for (const auto& [m, c] : p.terms()) sum += (std::popcount(neg & m.mask()) & 1) ? -c : c;
  return sum;
}

/// l1 norm of the coefficient vector.
inline double coef_norm(const Polynomial& p) {
  double s = 0.0;
  for (const auto& [m, c] : p.terms()) s += std::abs(c);
  return s;
}

/// E_{x ~ Unif}[p(x)]; non-constant parities have mean zero.
inline double uniform_expectation(const Polynomial& p) { return p.coef(Monomial{}); }

/// E_{x ~ Unif}[p(x)^2] by Parseval.
inline double uniform_l2_sq(const Polynomial& p) {
  double s = 0.0;
  for (const auto& [m, c] : p.terms()) s += c * c;
  return s;
}

/// Values of p on every vertex, in enumeration order.
inline std::vector<double> evaluate_on_cube(const Polynomial& p) {
  if (p.dim() > kMaxEnumerationDim) throw DimensionError("evaluate_on_cube: dimension too large");
  const std::uint32_t n = 1u << p.dim();
  std::vector<double> out(n);
  for (std::uint32_t t = 0; t < n; ++t) out[t] = eval_poly(p, Point::from_index(p.dim(), t));
  return out;
}

/// E_{x ~ Unif}[|p(x)|] by enumeration of all 2^d points.
inline double uniform_mean_abs(const Polynomial& p) {
  double s = 0.0;
  for (double v : evaluate_on_cube(p)) s += std::abs(v);
  return s / static_cast<double>(std::size_t{1} << p.dim());
}

/// Multilinear expansion of a +-1 truth table listed in enumeration order.
inline Polynomial fourier_transform(std::span<const double> table, int dim) {
  if (dim <= 0 || dim > kMaxEnumerationDim) throw DimensionError("fourier_transform: dimension out of range");
  const std::size_t n = std::size_t{1} << dim;
  if (table.size() != n) throw std::invalid_argument("fourier_transform: table size must be 2^d");
  // Walsh-Hadamard butterfly. With x_i = 1 - 2 b_i, the transform of f at
  // mask S is sum_t f(t) (-1)^{popcount(t & S)} = 2^d * c(S).
  std::vector<double> a(table.begin(), table.end());
  for (std::size_t h = 1; h < n; h <<= 1) {
    for (std::size_t i = 0; i < n; i += 2 * h) {
      for (std::size_t j = i; j < i + h; ++j) {
        const double u = a[j];
        const double v = a[j + h];
        a[j] = u + v;
        a[j + h] = u - v;
      }
    }
  }
  Polynomial p(dim, dim);
  const double scale = 1.0 / static_cast<double>(n);
  for (std::size_t s = 0; s < n; ++s) {
    const double c = a[s] * scale;
    if (std::abs(c) > 1e-15) p.set(Monomial(static_cast<std::uint32_t>(s)), c);
  }
  return p;
}

inline Polynomial fourier_transform(std::span<const int> table, int dim) {
  std::vector<double> values(table.begin(), table.end());
  return fourier_transform(std::span<const double>(values), dim);
}

}  // namespace ac0
