#include <doctest.h>

#include <cmath>
#include <random>

#include "bdmlab/polyspace.hpp"

using namespace bdmlab;

namespace {

long binom(int n, int k) {
  long r = 1;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

}  // namespace

TEST_CASE("space dimensions follow the counting formulas") {
  for (int d : {2, 3}) {
    for (int k = 0; k <= 4; ++k) {
      CHECK(basis_Pk(d, k).dim() == static_cast<std::size_t>(binom(k + d, d)));
      CHECK(basis_Pk_vector(d, k).dim() == static_cast<std::size_t>(d * binom(k + d, d)));
      long s = 0;
      for (int j = 1; j <= k; ++j) s += d == 2 ? j : j * (j + 2);
      CHECK(basis_Sk(d, k).dim() == static_cast<std::size_t>(s));
    }
    for (int k = 1; k <= 4; ++k) {
      const long n = d == 2 ? k * (k + 2) : k * (k + 2) * (k + 3) / 2;
      CHECK(basis_Nk(d, k).dim() == static_cast<std::size_t>(n));
    }
  }
  CHECK(basis_Nk(3, 0).dim() == 0);
}

TEST_CASE("bases are linearly independent and satisfy their constraints") {
  for (int d : {2, 3}) {
    for (int k = 1; k <= 3; ++k) {
      const auto s = basis_Sk(d, k);
      CHECK(rank(coefficient_matrix(s.fields, k)) == s.dim());
      for (const auto& p : s.fields) {
        Polynomial<Rational> px(d);
        for (int i = 0; i < d; ++i) px += p[i] * Polynomial<Rational>::variable(d, i);
        CHECK(px.is_zero());
      }
      const auto n = basis_Nk(d, k);
      CHECK(rank(coefficient_matrix(n.fields, k)) == n.dim());
    }
  }
  const auto s1 = basis_Sk(2, 1);
  REQUIRE(s1.dim() == 1);
  // spanned by (-x2, x1)
  const auto& f = s1.fields[0];
  CHECK(f[0].coefficient({0, 1, 0}) == -f[1].coefficient({1, 0, 0}));
}

TEST_CASE("divergence-free bubble spaces") {
  CHECK(basis_Qk(reference_triangle(), 1).dim() == 0);
  CHECK(basis_Qk(reference_tetrahedron(), 1).dim() == 0);
  const auto q2 = basis_Qk(reference_triangle(), 2);
  REQUIRE(q2.dim() == 1);
  // curl of the cubic bubble x1 x2 (1 - x1 - x2) is parallel to the basis field
  const auto b = parse_polynomial(2, "x1*x2*(1 - x1 - x2)");
  VectorPoly<Rational> curl(2);
  curl[0] = b.derivative(1);
  curl[1] = -b.derivative(0);
  const auto& z = q2.fields[0];
  CHECK(z.divergence().is_zero());
  Matrix<Rational> m = coefficient_matrix({curl, z}, 2);
  CHECK(rank(m) == 1);
  // dim P_2^3 minus 24 facet moments minus the 3 mean-free divergence constraints
  CHECK(basis_Qk(reference_tetrahedron(), 2).dim() == 3);
}

TEST_CASE("exact integration") {
  CHECK(integrate_poly(Polynomial<Rational>::constant(2, Rational(1)), reference_triangle()) == Rational(1, 2));
  CHECK(integrate_poly(parse_polynomial(2, "x1*x2"), reference_triangle()) == Rational(1, 24));
  for (const Rational& h : {Rational(1), Rational(1, 3), Rational(7, 2)}) {
    CHECK(integrate_poly(parse_polynomial(2, "x1^4"), tstar(h)) == h / 15);
    CHECK(integrate_poly(parse_polynomial(2, "4*x1^2"), tstar(h)) == 2 * h / 3);
  }
  // affine scaling by |det J|
  const auto p = parse_polynomial(3, "x1*x2 + x3^2 - 2");
  const Simplex s({{0, 0, 0}, {2, 0, 0}, {0, 3, 0}, {0, 0, 5}});
  CHECK(integrate_poly(Polynomial<Rational>::constant(3, Rational(1)), s) == 5);
  CHECK(integrate_poly(p, s) == 30 * integrate_unit_simplex(compose(p, s.chart())));
}

TEST_CASE("quadrature rules are exact to their degree") {
  const auto r = quad_rule(2, 2);
  double s = 0;
  for (std::size_t q = 0; q < r.size(); ++q) s += r.weights[q] * r.point(q)[0] * r.point(q)[1];
  CHECK(s == doctest::Approx(1.0 / 24).epsilon(1e-14));

  for (int d = 1; d <= 3; ++d) {
    for (int deg : {0, 3, 7, 12}) {
      const auto rule = quad_rule(d, deg);
      for (const auto& a : multi_indices_exact(d, deg)) {
        double sum = 0;
        for (std::size_t q = 0; q < rule.size(); ++q) {
          double m = rule.weights[q];
          for (int i = 0; i < d; ++i) m *= std::pow(rule.point(q)[static_cast<std::size_t>(i)], a[static_cast<std::size_t>(i)]);
          sum += m;
        }
        CHECK(sum == doctest::Approx(to_double(unit_simplex_monomial_integral<Rational>(d, a))).epsilon(1e-13));
      }
    }
  }
  const auto g = gauss_legendre_01(5);
  double m9 = 0;
  for (std::size_t q = 0; q < g.size(); ++q) m9 += g.weights[q] * std::pow(g.point(q)[0], 9);
  CHECK(m9 == doctest::Approx(0.1).epsilon(1e-14));
  CHECK_THROWS(quad_rule(2, max_quadrature_degree + 1));
}

TEST_CASE("field integration agrees with exact integration") {
  const Simplex s({{Rational(1, 2), 0}, {3, 1}, {-1, 2}});
  const auto p = parse_polynomial(2, "x1^3*x2 - 3*x2^2 + 1/7");
  const auto pd = p.cast<double>();
  const double q = integrate_field([&](std::span<const double> x) { return pd.evaluate<double>(x); }, s.vertices_double(), 4);
  CHECK(q == doctest::Approx(to_double(integrate_poly(p, s))).epsilon(1e-13));
}
