#pragma once

#include <functional>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "bdmlab/geometry.hpp"
#include "bdmlab/polynomial.hpp"

namespace bdmlab {

enum class SpaceKind { Pk, Sk, Nk, Qk, PkFacet };
std::string to_string(SpaceKind k);

template <class T>
struct SpaceBasis {
  SpaceKind kind = SpaceKind::Pk;
  int order = 0;
  std::vector<Polynomial<T>> scalars;  // scalar spaces (Pk, PkFacet)
  std::vector<VectorPoly<T>> fields;   // vector spaces (Sk, Nk, Qk, vector Pk)

  std::size_t dim() const { return scalars.empty() ? fields.size() : scalars.size(); }
};

/// Monomials x^alpha, |alpha| <= k, in graded order.
SpaceBasis<Rational> basis_Pk(int dim, int k);
/// Vector monomials e_c x^alpha, component-major.
SpaceBasis<Rational> basis_Pk_vector(int dim, int k);
/// {p in P_k^d : p . x == 0}, full-degree reading.
SpaceBasis<Rational> basis_Sk(int dim, int k);
/// P_{k-1}^d + S_k, reduced to a linearly independent spanning set. Empty for k < 1.
SpaceBasis<Rational> basis_Nk(int dim, int k);
/// {z in P_k^d : div z = 0, z . n = 0 on the boundary of s}.
SpaceBasis<Rational> basis_Qk(const Simplex& s, int k);

/// Coefficient matrix (one row per field) over the vector monomial basis of degree `k`.
Matrix<Rational> coefficient_matrix(const std::vector<VectorPoly<Rational>>& fields, int k);

/// Exact integral of p over s.
Rational integrate_poly(const Polynomial<Rational>& p, const Simplex& s);
/// Integral of p over the facet e_i, including the surface measure. Float
/// because the facet measure is irrational in general.
double integrate_poly_on_facet(const Polynomial<Rational>& p, const Simplex& s, int i);
/// Exact integral of (v . n_i) z over facet e_i; z is given in facet_chart(i) parameters.
Rational facet_flux_moment(const VectorPoly<Rational>& v, const Simplex& s, int i, const Polynomial<Rational>& z);

/// Table of exact moments integral_s x^alpha for |alpha| <= max_degree.
template <class T>
class SimplexMoments {
 public:
  SimplexMoments(const AffineChart<T>& chart, T jacobian, int max_degree);

  int max_degree() const { return max_degree_; }
  const T& moment(const MultiIndex& alpha) const;
  T integrate(const Polynomial<T>& p) const;

 private:
  int dim_;
  int max_degree_;
  std::map<MultiIndex, T, GradedLess> table_;
};

/// For a facet chart: x^alpha o chart as polynomials in the facet parameters,
/// for |alpha| <= max_degree.
template <class T>
class FacetMonomials {
 public:
  FacetMonomials(const AffineChart<T>& chart, int max_degree);

  int max_degree() const { return max_degree_; }
  const Polynomial<T>& composed(const MultiIndex& alpha) const;
  /// integral over the unit (d-1)-simplex of (x^alpha o chart) * s^beta.
  T moment(const MultiIndex& alpha, const MultiIndex& beta) const;

 private:
  int dim_;
  int max_degree_;
  std::vector<Polynomial<T>> composed_;
  std::vector<MultiIndex> alphas_;
};

struct QuadratureRule {
  int dim = 0;
  int degree = 0;
  std::vector<double> points;  // dim coordinates per point, reference unit simplex
  std::vector<double> weights;

  std::size_t size() const { return weights.size(); }
  std::span<const double> point(std::size_t q) const {
    return {points.data() + q * static_cast<std::size_t>(dim), static_cast<std::size_t>(dim)};
  }
};

inline constexpr int max_quadrature_degree = 80;

/// Gauss-Legendre rule with n points on [0, 1].
QuadratureRule gauss_legendre_01(int n);
/// Collapsed (Duffy) tensor Gauss rule on the unit simplex of dimension 1..3,
/// exact for polynomials of total degree <= degree.
QuadratureRule quad_rule(int dim, int degree);

using ScalarField = std::function<double(std::span<const double>)>;
using VectorField = std::function<std::vector<double>(std::span<const double>)>;

/// Integral of f over the simplex with vertices `v`, by affine pullback.
double integrate_field(const ScalarField& f, const std::vector<PointD>& v, int degree);

}  // namespace bdmlab
