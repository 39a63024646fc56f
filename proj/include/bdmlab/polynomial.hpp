#pragma once

#include <algorithm>
#include <array>
#include <cassert>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "bdmlab/rational.hpp"

namespace bdmlab {

using MultiIndex = std::array<int, 3>;

inline int total_degree(const MultiIndex& a) { return a[0] + a[1] + a[2]; }

// Graded order: lower total degree first, then x1 before x2 before x3.
struct GradedLess {
  bool operator()(const MultiIndex& a, const MultiIndex& b) const {
    const int da = total_degree(a);
    const int db = total_degree(b);
    if (da != db) return da < db;
    return a > b;
  }
};

/// All multi-indices in `dim` variables with |alpha| <= k, in graded order.
std::vector<MultiIndex> multi_indices_up_to(int dim, int k);
/// All multi-indices in `dim` variables with |alpha| == k, in graded order.
std::vector<MultiIndex> multi_indices_exact(int dim, int k);

/// Multivariate polynomial in 1..3 variables, stored sparsely in monomial
/// form. Zero coefficients are never stored.
template <class T>
class Polynomial {
 public:
  using Scalar = T;
  using TermMap = std::map<MultiIndex, T, GradedLess>;

  explicit Polynomial(int dim = 2) : dim_(dim) {
    if (dim < 1 || dim > 3) throw std::invalid_argument("polynomial dimension must be 1, 2 or 3");
  }

  static Polynomial constant(int dim, const T& c) {
    Polynomial p(dim);
    p.add_term({0, 0, 0}, c);
    return p;
  }
  static Polynomial variable(int dim, int i) {
    MultiIndex a{0, 0, 0};
    a.at(static_cast<std::size_t>(i)) = 1;
    return monomial(dim, a, from_int<T>(1));
  }
  static Polynomial monomial(int dim, const MultiIndex& a, const T& c) {
    Polynomial p(dim);
    p.add_term(a, c);
    return p;
  }

  int dim() const { return dim_; }
  const TermMap& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  int degree() const { return terms_.empty() ? -1 : total_degree(terms_.rbegin()->first); }

  T coefficient(const MultiIndex& a) const {
    auto it = terms_.find(a);
    return it == terms_.end() ? from_int<T>(0) : it->second;
  }

  void add_term(const MultiIndex& a, const T& c) {
    for (int i = dim_; i < 3; ++i) {
      if (a[static_cast<std::size_t>(i)] != 0) throw std::invalid_argument("exponent on unused variable");
    }
    if (bdmlab::is_zero(c)) return;
    auto [it, inserted] = terms_.try_emplace(a, c);
    if (!inserted) {
      it->second += c;
      if (bdmlab::is_zero(it->second)) terms_.erase(it);
    }
  }

  Polynomial& operator+=(const Polynomial& o) {
    check_dim(o);
    for (const auto& [a, c] : o.terms_) add_term(a, c);
    return *this;
  }
  Polynomial& operator-=(const Polynomial& o) {
    check_dim(o);
    for (const auto& [a, c] : o.terms_) add_term(a, T(-c));
    return *this;
  }
  Polynomial& operator*=(const T& s) {
    if (bdmlab::is_zero(s)) {
      terms_.clear();
      return *this;
    }
    for (auto& [a, c] : terms_) c *= s;
    return *this;
  }

  friend Polynomial operator+(Polynomial a, const Polynomial& b) { return a += b; }
  friend Polynomial operator-(Polynomial a, const Polynomial& b) { return a -= b; }
  friend Polynomial operator-(Polynomial a) { return a *= from_int<T>(-1); }
  friend Polynomial operator*(Polynomial a, const T& s) { return a *= s; }
  friend Polynomial operator*(const T& s, Polynomial a) { return a *= s; }

  friend Polynomial operator*(const Polynomial& a, const Polynomial& b) {
    a.check_dim(b);
    Polynomial r(a.dim_);
    for (const auto& [ea, ca] : a.terms_) {
      for (const auto& [eb, cb] : b.terms_) {
        r.add_term({ea[0] + eb[0], ea[1] + eb[1], ea[2] + eb[2]}, T(ca * cb));
      }
    }
    return r;
  }
  Polynomial& operator*=(const Polynomial& o) { return *this = *this * o; }

  friend bool operator==(const Polynomial& a, const Polynomial& b) {
    return a.dim_ == b.dim_ && a.terms_ == b.terms_;
  }

  Polynomial derivative(int i) const {
    Polynomial r(dim_);
    const auto k = static_cast<std::size_t>(i);
    for (const auto& [a, c] : terms_) {
      if (a[k] == 0) continue;
      MultiIndex b = a;
      b[k] -= 1;
      r.add_term(b, T(c * from_int<T>(a[k])));
    }
    return r;
  }

  Polynomial derivative(const MultiIndex& alpha) const {
    Polynomial r = *this;
    for (int i = 0; i < dim_; ++i) {
      for (int n = 0; n < alpha[static_cast<std::size_t>(i)]; ++n) r = r.derivative(i);
    }
    return r;
  }

  /// Derivative along the (not necessarily unit) vector `l`.
  Polynomial directional_derivative(std::span<const T> l) const {
    Polynomial r(dim_);
    for (int i = 0; i < dim_; ++i) {
      const T& li = l[static_cast<std::size_t>(i)];
      if (bdmlab::is_zero(li)) continue;
      r += derivative(i) * li;
    }
    return r;
  }

  bool depends_on(int i) const {
    const auto k = static_cast<std::size_t>(i);
    return std::any_of(terms_.begin(), terms_.end(), [k](const auto& t) { return t.first[k] != 0; });
  }

  template <class P>
  P evaluate(std::span<const P> x) const {
    P sum = from_int<P>(0);
    for (const auto& [a, c] : terms_) {
      P term = from_rational_or_same<P>(c);
      for (int i = 0; i < dim_; ++i) {
        for (int n = 0; n < a[static_cast<std::size_t>(i)]; ++n) term *= x[static_cast<std::size_t>(i)];
      }
      sum += term;
    }
    return sum;
  }

  template <class U>
  Polynomial<U> cast() const {
    Polynomial<U> r(dim_);
    for (const auto& [a, c] : terms_) r.add_term(a, from_rational_or_same<U>(c));
    return r;
  }

  std::string str() const;

 private:
  template <class P>
  static P from_rational_or_same(const T& c) {
    if constexpr (std::is_same_v<P, T>) {
      return c;
    } else if constexpr (std::is_same_v<T, Rational>) {
      return static_cast<P>(c.get_d());
    } else {
      return P(c);
    }
  }

  void check_dim(const Polynomial& o) const {
    if (o.dim_ != dim_) throw std::invalid_argument("polynomial dimension mismatch");
  }

  int dim_;
  TermMap terms_;
};

/// A d-component polynomial vector field.
template <class T>
struct VectorPoly {
  std::vector<Polynomial<T>> components;

  VectorPoly() = default;
  explicit VectorPoly(int dim) : components(static_cast<std::size_t>(dim), Polynomial<T>(dim)) {}
  explicit VectorPoly(std::vector<Polynomial<T>> c) : components(std::move(c)) {
    for (const auto& p : components) {
      if (p.dim() != static_cast<int>(components.size())) {
        throw std::invalid_argument("vector field components must share the field dimension");
      }
    }
  }

  int dim() const { return static_cast<int>(components.size()); }
  Polynomial<T>& operator[](int i) { return components.at(static_cast<std::size_t>(i)); }
  const Polynomial<T>& operator[](int i) const { return components.at(static_cast<std::size_t>(i)); }

  int degree() const {
    int d = -1;
    for (const auto& p : components) d = std::max(d, p.degree());
    return d;
  }
  bool is_zero() const {
    return std::all_of(components.begin(), components.end(), [](const auto& p) { return p.is_zero(); });
  }

  VectorPoly& operator+=(const VectorPoly& o) {
    for (std::size_t i = 0; i < components.size(); ++i) components[i] += o.components.at(i);
    return *this;
  }
  VectorPoly& operator-=(const VectorPoly& o) {
    for (std::size_t i = 0; i < components.size(); ++i) components[i] -= o.components.at(i);
    return *this;
  }
  VectorPoly& operator*=(const T& s) {
    for (auto& p : components) p *= s;
    return *this;
  }
  friend VectorPoly operator+(VectorPoly a, const VectorPoly& b) { return a += b; }
  friend VectorPoly operator-(VectorPoly a, const VectorPoly& b) { return a -= b; }
  friend VectorPoly operator*(VectorPoly a, const T& s) { return a *= s; }
  friend VectorPoly operator*(const T& s, VectorPoly a) { return a *= s; }
  friend bool operator==(const VectorPoly& a, const VectorPoly& b) { return a.components == b.components; }

  Polynomial<T> divergence() const {
    Polynomial<T> r(dim());
    for (int i = 0; i < dim(); ++i) r += (*this)[i].derivative(i);
    return r;
  }

  /// Pointwise inner product with a constant vector.
  Polynomial<T> dot(std::span<const T> c) const {
    Polynomial<T> r(dim());
    for (int i = 0; i < dim(); ++i) {
      if (!bdmlab::is_zero(c[static_cast<std::size_t>(i)])) r += (*this)[i] * c[static_cast<std::size_t>(i)];
    }
    return r;
  }

  /// Pointwise inner product with another field.
  Polynomial<T> dot(const VectorPoly& o) const {
    Polynomial<T> r(dim());
    for (int i = 0; i < dim(); ++i) r += (*this)[i] * o[i];
    return r;
  }

  VectorPoly derivative(int i) const {
    VectorPoly r(dim());
    for (int c = 0; c < dim(); ++c) r[c] = (*this)[c].derivative(i);
    return r;
  }
  VectorPoly derivative(const MultiIndex& alpha) const {
    VectorPoly r(dim());
    for (int c = 0; c < dim(); ++c) r[c] = (*this)[c].derivative(alpha);
    return r;
  }

  template <class U>
  VectorPoly<U> cast() const {
    VectorPoly<U> r(dim());
    for (int c = 0; c < dim(); ++c) r[c] = (*this)[c].template cast<U>();
    return r;
  }

  std::string str() const;
};

/// Unit vector field e_i * p.
template <class T>
VectorPoly<T> axis_field(int dim, int axis, const Polynomial<T>& p) {
  VectorPoly<T> v(dim);
  v[axis] = p;
  return v;
}

/// Affine chart x = offset + A s from `param_dim` parameters into `dim` space.
/// `A` is stored row-major as dim x param_dim.
template <class T>
struct AffineChart {
  int dim = 0;
  int param_dim = 0;
  std::vector<T> matrix;
  std::vector<T> offset;

  const T& a(int row, int col) const { return matrix[static_cast<std::size_t>(row * param_dim + col)]; }
};

/// p o chart, a polynomial in the chart parameters.
template <class T>
Polynomial<T> compose(const Polynomial<T>& p, const AffineChart<T>& chart) {
  if (p.dim() != chart.dim) throw std::invalid_argument("chart does not match polynomial dimension");
  const int m = chart.param_dim;
  std::vector<Polynomial<T>> linear;
  for (int i = 0; i < chart.dim; ++i) {
    Polynomial<T> li = Polynomial<T>::constant(m, chart.offset[static_cast<std::size_t>(i)]);
    for (int j = 0; j < m; ++j) li += Polynomial<T>::variable(m, j) * chart.a(i, j);
    linear.push_back(std::move(li));
  }
  // powers[i][n] = linear[i]^n, built lazily up to the needed exponent.
  std::vector<std::vector<Polynomial<T>>> powers(static_cast<std::size_t>(chart.dim));
  auto power = [&](int i, int n) -> const Polynomial<T>& {
    auto& pw = powers[static_cast<std::size_t>(i)];
    if (pw.empty()) pw.push_back(Polynomial<T>::constant(m, from_int<T>(1)));
    while (static_cast<int>(pw.size()) <= n) pw.push_back(pw.back() * linear[static_cast<std::size_t>(i)]);
    return pw[static_cast<std::size_t>(n)];
  };
  Polynomial<T> r(m);
  for (const auto& [a, c] : p.terms()) {
    Polynomial<T> t = Polynomial<T>::constant(m, c);
    for (int i = 0; i < chart.dim; ++i) {
      if (a[static_cast<std::size_t>(i)] > 0) t *= power(i, a[static_cast<std::size_t>(i)]);
    }
    r += t;
  }
  return r;
}

template <class T>
VectorPoly<T> compose(const VectorPoly<T>& v, const AffineChart<T>& chart) {
  std::vector<Polynomial<T>> c;
  for (const auto& p : v.components) c.push_back(compose(p, chart));
  VectorPoly<T> r;
  r.components = std::move(c);
  return r;
}

/// Integral of s^alpha over the unit simplex in `dim` dimensions:
/// alpha! / (|alpha| + dim)!.
template <class T>
T unit_simplex_monomial_integral(int dim, const MultiIndex& alpha) {
  Rational num(1);
  for (int i = 0; i < dim; ++i) {
    for (int n = 2; n <= alpha[static_cast<std::size_t>(i)]; ++n) num *= n;
  }
  Rational den(1);
  for (int n = 2; n <= total_degree(alpha) + dim; ++n) den *= n;
  Rational q = num / den;
  return from_rational<T>(q);
}

/// Exact integral of p over the unit simplex conv{0, e_1, ..., e_dim}.
template <class T>
T integrate_unit_simplex(const Polynomial<T>& p) {
  T sum = from_int<T>(0);
  for (const auto& [a, c] : p.terms()) sum += c * unit_simplex_monomial_integral<T>(p.dim(), a);
  return sum;
}

/// Parses a polynomial expression in x1..x3 such as "3/2*x1^2 - x2*x3 + 1/20".
Polynomial<Rational> parse_polynomial(int dim, std::string_view text);
/// Parses a ';'-separated list of component polynomials.
VectorPoly<Rational> parse_vector_poly(int dim, std::string_view text);

}  // namespace bdmlab
