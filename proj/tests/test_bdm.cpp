#include <doctest.h>

#include <cmath>
#include <random>

#include "bdmlab/bdm.hpp"
#include "bdmlab/estimates.hpp"

using namespace bdmlab;

TEST_CASE("degree-of-freedom counts") {
  for (auto v : {DofVariant::nedelec, DofVariant::bdm_original}) {
    const BDMElement e(reference_triangle(), 1, v);
    CHECK(e.ndofs() == 6);
    CHECK(e.facet_dof_count() == 6);
  }
  const BDMElement t(reference_tetrahedron(), 2, DofVariant::nedelec);
  CHECK(t.ndofs() == 30);
  CHECK(t.facet_dof_count() == 24);
  const BDMElement o(reference_triangle(), 2, DofVariant::bdm_original);
  CHECK(o.ndofs() == 12);
  CHECK(o.facet_dof_count() == 9);
  int gradient = 0, interior = 0;
  for (const auto& d : o.dofs()) {
    gradient += d.kind == DofFunctional::Kind::gradient;
    interior += d.kind == DofFunctional::Kind::interior;
  }
  CHECK(gradient == 2);
  CHECK(interior == 1);
  for (int d : {2, 3}) {
    for (int k = 1; k <= 3; ++k) {
      const Simplex s = d == 2 ? reference_triangle() : reference_tetrahedron();
      CHECK(BDMElement(s, k, DofVariant::nedelec).ndofs() == static_cast<std::size_t>(d * (d == 2 ? (k + 1) * (k + 2) / 2 : (k + 1) * (k + 2) * (k + 3) / 6)));
    }
  }
  CHECK_THROWS(BDMElement(reference_triangle(), 0, DofVariant::nedelec));
}

TEST_CASE("golden interpolants") {
  const auto v = parse_vector_poly(2, "0; x1^3");
  CHECK(BDMElement(reference_triangle(), 2, DofVariant::nedelec).interpolate(v) ==
        parse_vector_poly(2, "0; 1/20 - 3/5*x1 + 3/2*x1^2"));
  CHECK(BDMElement(reference_triangle(), 2, DofVariant::bdm_original).interpolate(v) ==
        parse_vector_poly(2, "3/140*x1*(1 - x1 - 2*x2); 1/20 - 3/5*x1 + 3/2*x1^2 - 3/140*x2*(1 - 2*x1 - x2)"));

  const Rational h(1, 7);
  CHECK(BDMElement(tstar(h), 1, DofVariant::nedelec).interpolate(parse_vector_poly(2, "0; x1^2")) ==
        parse_vector_poly(2, "7/2*x1; -7/2*x2 + 1/3"));

  const auto u = parse_vector_poly(3, "x1*x3; -x2*x3; 0");
  const auto iu = BDMElement(stretched_no_rvp_tetrahedron(2, 3, 5), 1, DofVariant::nedelec).interpolate(u);
  CHECK(iu == parse_vector_poly(3, "2*x1; -3*x2; -5/2 + x3"));
}

TEST_CASE("projection, flux preservation and divergence compatibility") {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 12; ++trial) {
    const int d = 2 + trial % 2;
    const int k = 1 + (trial / 2) % 3;
    if (d == 3 && k == 3) continue;
    const Simplex s = random_mac_simplex(rng, d, 2.6);
    for (auto variant : {DofVariant::nedelec, DofVariant::bdm_original}) {
      const BDMElement el(s, k, variant);
      const auto w = random_poly_field(rng, d, k);
      CHECK(el.interpolate(w) == w);
      const auto v = random_poly_field(rng, d, k + 2);
      const auto iv = el.interpolate(v);
      for (const auto& q : facet_flux_residuals(el, v)) CHECK(sgn(q) == 0);
      CHECK(iv.divergence() == l2_project_scalar(v.divergence(), s, k - 1));
    }
  }
}

TEST_CASE("Piola commuting property") {
  std::mt19937_64 rng(9);
  Matrix<Rational> j(3, 3);
  j(0, 0) = 2;
  j(1, 1) = 3;
  j(2, 2) = 5;
  const AffineMap<Rational> map{j, {0, 0, 0}};
  for (int k = 1; k <= 2; ++k) {
    const BDMElement ref(reference_tetrahedron(), k, DofVariant::nedelec);
    const BDMElement phys(map_simplex(map, reference_tetrahedron()), k, DofVariant::nedelec);
    const auto v = random_poly_field(rng, 3, 3);
    CHECK(commutes_with_piola(ref, phys, map, v).commutes);
  }
  Matrix<Rational> id(2, 2);
  id(0, 0) = 1;
  id(1, 1) = 1;
  const BDMElement r2(reference_triangle(), 2, DofVariant::bdm_original);
  CHECK(commutes_with_piola(r2, r2, AffineMap<Rational>{id, {0, 0}}, random_poly_field(rng, 2, 3)).commutes);
}

TEST_CASE("interpolant does not depend on the vertex labelling") {
  std::mt19937_64 rng(31);
  const Simplex s({{0, 0}, {3, 1}, {1, 2}});
  const Simplex p({{1, 2}, {0, 0}, {3, 1}});
  const auto v = random_poly_field(rng, 2, 4);
  for (int k = 1; k <= 3; ++k) {
    CHECK(BDMElement(s, k, DofVariant::nedelec).interpolate(v) == BDMElement(p, k, DofVariant::nedelec).interpolate(v));
  }
  const Simplex t({{0, 0, 0}, {2, 0, 1}, {0, 1, 0}, {1, 1, 3}});
  const Simplex tp({{1, 1, 3}, {0, 1, 0}, {0, 0, 0}, {2, 0, 1}});
  const auto u = random_poly_field(rng, 3, 3);
  CHECK(BDMElement(t, 2, DofVariant::nedelec).interpolate(u) == BDMElement(tp, 2, DofVariant::nedelec).interpolate(u));
}

TEST_CASE("float path agrees with the exact path") {
  std::mt19937_64 rng(4);
  const Simplex s({{0, 0}, {2, Rational(1, 3)}, {Rational(1, 2), 1}});
  const BDMElement el(s, 2, DofVariant::nedelec);
  const auto v = random_poly_field(rng, 2, 3);
  const auto vd = v.cast<double>();
  const auto exact = el.interpolate(v);
  const auto approx = el.interpolate(
      [&](std::span<const double> x) {
        return std::vector<double>{vd[0].evaluate<double>(x), vd[1].evaluate<double>(x)};
      },
      8);
  for (int c = 0; c < 2; ++c) {
    for (const auto& [a, coef] : exact[c].terms()) {
      CHECK(approx[c].coefficient(a) == doctest::Approx(to_double(coef)).epsilon(1e-11));
    }
  }
}

TEST_CASE("structural lemma") {
  const auto r = structural_lemma_check(BDMElement(reference_triangle(), 2, DofVariant::nedelec), 1, parse_polynomial(2, "x1^3"));
  CHECK(r.holds);
  CHECK(structural_lemma_check(BDMElement(reference_tetrahedron(), 1, DofVariant::nedelec), 0, parse_polynomial(3, "x2*x3")).holds);
  CHECK(structural_lemma_check(BDMElement(reference_tetrahedron_no_rvp(), 1, DofVariant::nedelec), 2, parse_polynomial(3, "x1*x2")).holds);
  CHECK_FALSE(structural_lemma_check(BDMElement(reference_triangle(), 2, DofVariant::bdm_original), 1, parse_polynomial(2, "x1^3")).holds);
}
