#include <doctest.h>

#include <cmath>
#include <random>

#include "bdmlab/linalg.hpp"
#include "bdmlab/polynomial.hpp"
#include "bdmlab/rational.hpp"

using namespace bdmlab;

TEST_CASE("rational parsing and printing round-trip") {
  CHECK(parse_rational("3/4") == Rational(3, 4));
  CHECK(parse_rational("-7") == Rational(-7));
  CHECK(parse_rational("0.125") == Rational(1, 8));
  CHECK(to_string(parse_rational("-6/8")) == "-3/4");
  CHECK(rational_from_double(0.375) == Rational(3, 8));
  CHECK_THROWS(parse_rational("1/0"));
  CHECK_THROWS(parse_rational("abc"));
}

TEST_CASE("polynomial arithmetic and derivatives") {
  const auto p = parse_polynomial(2, "x1^2");
  CHECK(p.derivative(0) == parse_polynomial(2, "2*x1"));
  CHECK(p.derivative(1).is_zero());

  const auto u = parse_vector_poly(3, "x1*x3; -x2*x3; 0");
  CHECK(u.divergence().is_zero());

  // directional derivative along (1,1)/sqrt2, computed in floats
  const auto q = parse_polynomial(2, "x1*x2").cast<double>();
  const double l[2] = {1 / std::sqrt(2.0), 1 / std::sqrt(2.0)};
  const auto dq = q.directional_derivative(std::span<const double>(l, 2));
  const double x[2] = {0.3, -1.7};
  CHECK(dq.evaluate<double>(std::span<const double>(x, 2)) == doctest::Approx((0.3 - 1.7) / std::sqrt(2.0)));

  const auto a = parse_polynomial(3, "x1 + 2*x2*x3 - 1/3");
  const auto b = parse_polynomial(3, "x3^2 - x1");
  CHECK((a * b).degree() == 4);
  CHECK((a + b - b) == a);
  CHECK(parse_polynomial(2, "x1*(1 - x1 - 2*x2)") == parse_polynomial(2, "x1 - x1^2 - 2*x1*x2"));
}

TEST_CASE("polynomial printing parses back") {
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<int> coef(-9, 9);
  for (int trial = 0; trial < 20; ++trial) {
    Polynomial<Rational> p(3);
    for (const auto& a : multi_indices_up_to(3, 3)) p.add_term(a, Rational(coef(rng)) / (1 + std::abs(coef(rng))));
    CHECK(parse_polynomial(3, p.str()) == p);
  }
}

TEST_CASE("unit simplex monomial integrals match the factorial formula") {
  // integral of x^alpha over the unit d-simplex = alpha! / (|alpha| + d)!
  CHECK(unit_simplex_monomial_integral<Rational>(2, {0, 0, 0}) == Rational(1, 2));
  CHECK(unit_simplex_monomial_integral<Rational>(2, {1, 1, 0}) == Rational(1, 24));
  CHECK(unit_simplex_monomial_integral<Rational>(3, {2, 0, 1}) == Rational(1, 360));
}

TEST_CASE("exact linear algebra") {
  Matrix<Rational> m(3, 3);
  const int vals[9] = {2, 1, 0, 1, 3, 1, 0, 1, 4};
  for (std::size_t i = 0; i < 9; ++i) m(i / 3, i % 3) = vals[i];
  CHECK(determinant(m) == Rational(18));
  const auto inv = inverse(m);
  for (std::size_t r = 0; r < 3; ++r) {
    for (std::size_t c = 0; c < 3; ++c) {
      Rational s = 0;
      for (std::size_t k = 0; k < 3; ++k) s += m(r, k) * inv(k, c);
      CHECK(s == Rational(r == c ? 1 : 0));
    }
  }
  Matrix<Rational> sing(2, 3);
  sing(0, 0) = 1;
  sing(0, 1) = 2;
  sing(0, 2) = 3;
  sing(1, 0) = 2;
  sing(1, 1) = 4;
  sing(1, 2) = 6;
  CHECK(rank(sing) == 1);
  const auto ns = nullspace(sing);
  CHECK(ns.size() == 2);
  for (const auto& v : ns) CHECK(v[0] + 2 * v[1] + 3 * v[2] == 0);
  Matrix<Rational> zero(2, 2);
  CHECK_THROWS_AS(inverse(zero), SingularMatrixError);
}
