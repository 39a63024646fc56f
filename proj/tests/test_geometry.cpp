#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "bdmlab/geometry.hpp"
#include "bdmlab/polyspace.hpp"

using namespace bdmlab;

namespace {

void check_vec(const PointD& a, const PointD& b, double tol = 1e-14) {
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i] == doctest::Approx(b[i]).epsilon(tol));
}

double facet_measure(const Simplex& s, int i) {
  return integrate_poly_on_facet(Polynomial<Rational>::constant(s.dim(), Rational(1)), s, i);
}

}  // namespace

TEST_CASE("facet normals of the reference elements") {
  const double r3 = 1 / std::sqrt(3.0), r2 = 1 / std::sqrt(2.0);
  const auto n = facet_normals(reference_tetrahedron());
  check_vec(n[0], {-1, 0, 0});
  check_vec(n[1], {0, -1, 0});
  check_vec(n[2], {0, 0, -1});
  check_vec(n[3], {r3, r3, r3});

  // T-bar with p = (1,1,0), (0,1,0), (0,0,1), 0
  const auto nb = facet_normals(reference_tetrahedron_no_rvp());
  check_vec(nb[1], {r2, -r2, 0});
  check_vec(nb[3], {0, r2, r2});

  const auto n2 = facet_normals(reference_triangle());
  check_vec(n2[0], {-1, 0});
  check_vec(n2[1], {0, -1});
  check_vec(n2[2], {r2, r2});
}

TEST_CASE("degenerate simplices are rejected") {
  CHECK_THROWS(Simplex({{0, 0}, {1, 1}, {2, 2}}));
  CHECK_THROWS(Simplex({{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {1, 1, 0}}));
}

TEST_CASE("facet normals close the surface") {
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<int> c(-20, 20);
  for (int trial = 0; trial < 20; ++trial) {
    const int d = 2 + trial % 2;
    std::vector<Point> v(static_cast<std::size_t>(d + 1), Point(static_cast<std::size_t>(d)));
    for (auto& p : v) {
      for (auto& x : p) x = Rational(c(rng), 3);
    }
    try {
      const Simplex s(v);
      const auto n = facet_normals(s);
      PointD sum(static_cast<std::size_t>(d), 0.0);
      for (int i = 0; i <= d; ++i) {
        const double m = facet_measure(s, i);
        for (int j = 0; j < d; ++j) sum[static_cast<std::size_t>(j)] += m * n[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
      }
      for (double x : sum) CHECK(std::fabs(x) < 1e-12 * s.diameter() * s.diameter());
      // outward: n_i points away from the opposite vertex
      for (int i = 0; i <= d; ++i) {
        const auto vd = s.vertices_double();
        const auto& p = vd[static_cast<std::size_t>(i)];
        const auto& q = vd[static_cast<std::size_t>((i + 1) % (d + 1))];
        double dot = 0;
        for (int j = 0; j < d; ++j) dot += (q[static_cast<std::size_t>(j)] - p[static_cast<std::size_t>(j)]) * n[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
        CHECK(dot > 0);
      }
    } catch (const SingularMatrixError&) {
    } catch (const std::invalid_argument&) {
    }
  }
}

TEST_CASE("maximum angles") {
  CHECK(max_angle(reference_triangle()) == doctest::Approx(std::numbers::pi / 2).epsilon(1e-14));
  for (const Rational& h : {Rational(1), Rational(1, 2), Rational(1, 100)}) {
    CHECK(max_angle(tstar(h)) == doctest::Approx(std::numbers::pi - 2 * std::atan(to_double(h))).epsilon(1e-13));
  }
  // interior dihedral angles are pi minus the angle between outward normals;
  // the largest one on the unit tetrahedron sits between two coordinate facets
  const double right = std::numbers::pi / 2;
  CHECK(max_angle(reference_tetrahedron()) == doctest::Approx(right).epsilon(1e-14));
  CHECK(has_exact_right_max_angle(reference_triangle()));
  CHECK_FALSE(has_exact_right_max_angle(tstar(Rational(1, 2))));

  // T1 members never exceed a right angle, for aspect ratios 1..1e6
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> e(0.0, 6.0);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<Rational> h;
    for (int i = 0; i < 3; ++i) h.push_back(rational_from_double(std::pow(10.0, e(rng))));
    CHECK(max_angle(family_t1(h)) <= right + 1e-12);
  }
}

TEST_CASE("regular vertex diagnostics") {
  const auto r = rvp_report(reference_tetrahedron());
  CHECK(r.rvp_best == doctest::Approx(1.0));
  CHECK(r.best_vertex == 3);
  REQUIRE(r.regular_vertex.has_value());

  const auto t1 = rvp_report(family_t1({Rational(1, 1000), 7, 300}));
  CHECK(t1.rvp_best == doctest::Approx(1.0));
  CHECK(t1.best_vertex == 3);

  const auto dets = rvp_determinants(Simplex({{0, 0, 0}, {1, 1, 0}, {0, 1, 0}, {0, 0, 1}}));
  CHECK(dets[0] == doctest::Approx(1 / std::sqrt(2.0)));
  for (double d : dets) CHECK(d <= 1 / std::sqrt(2.0) + 1e-14);

  // rigid motion and scaling leave rvp_best unchanged
  const Simplex s({{0, 0, 0}, {3, 1, 0}, {1, 2, 0}, {1, 1, 4}});
  const double base = rvp_report(s).rvp_best;
  Matrix<Rational> rot(3, 3);  // rotation by the 3-4-5 angle about x3, scaled by 7
  rot(0, 0) = Rational(21, 5);
  rot(0, 1) = Rational(-28, 5);
  rot(1, 0) = Rational(28, 5);
  rot(1, 1) = Rational(21, 5);
  rot(2, 2) = 7;
  const Simplex moved = map_simplex(AffineMap<Rational>{rot, {1, -2, 5}}, s);
  CHECK(rvp_report(moved).rvp_best == doctest::Approx(base).epsilon(1e-13));
}

TEST_CASE("classification onto the reference families") {
  const Simplex s({{0, 0, 0}, {2, 0, 0}, {0, 3, 0}, {0, 0, 5}});
  const auto r = classify_to_reference_family(s);
  CHECK(r.family == ReferenceFamily::T1);
  REQUIRE(r.size_params.size() == 3);
  CHECK(r.size_params[0] == doctest::Approx(2.0));
  CHECK(r.size_params[1] == doctest::Approx(3.0));
  CHECK(r.size_params[2] == doctest::Approx(5.0));
  // mapping the family element's vertices reproduces s
  for (int i = 0; i < 4; ++i) {
    check_vec(r.map.apply(r.reference_vertices[static_cast<std::size_t>(i)]), s.vertices_double()[static_cast<std::size_t>(i)], 1e-12);
  }

  // moderate stretching keeps a regular vertex above the threshold; strong stretching does not
  CHECK(classify_to_reference_family(stretched_no_rvp_tetrahedron(1, 2, 3)).family == ReferenceFamily::T1);
  const Simplex stretched = stretched_no_rvp_tetrahedron(1, 1, 1000);
  const auto w = classify_to_reference_family(stretched);
  CHECK(w.family == ReferenceFamily::T2);
  for (int i = 0; i < 4; ++i) {
    const auto x = w.map.apply(w.reference_vertices[static_cast<std::size_t>(i)]);
    check_vec(x, stretched.vertices_double()[static_cast<std::size_t>(i)], 1e-12);
  }

  // flat T* loses the maximum angle condition
  const auto flat = classify_to_reference_family(tstar(Rational(1, 1000)));
  CHECK(flat.family == ReferenceFamily::none);
  const auto ok = classify_to_reference_family(tstar(Rational(1)));
  CHECK(ok.family != ReferenceFamily::none);
}

TEST_CASE("Piola transform") {
  const auto v = parse_vector_poly(3, "x1^2*x2 - x3; x2*x3 + 1; x1^3 - 2*x2");
  Matrix<Rational> j(3, 3);
  j(0, 0) = 2;
  j(1, 1) = 3;
  j(2, 2) = 5;
  const AffineMap<Rational> map{j, {0, 0, 0}};
  const auto pushed = piola_push(map, v);
  // diagonal J: component i scales by 1/prod_{j != i} h_j
  const auto back = compose(pushed, map.as_chart());
  CHECK(back[0] == v[0] * Rational(1, 15));
  CHECK(back[1] == v[1] * Rational(1, 10));
  CHECK(back[2] == v[2] * Rational(1, 6));
  CHECK(piola_pull(map, pushed) == v);

  // div v(F x) = det(J)^-1 div v_ref(x) for a general affine map
  Matrix<Rational> a(3, 3);
  const int e[9] = {1, 2, 0, -1, 3, 1, 2, 0, 4};
  for (std::size_t i = 0; i < 9; ++i) a(i / 3, i % 3) = e[i];
  const AffineMap<Rational> g{a, {1, 0, -2}};
  const auto pg = piola_push(g, v);
  CHECK(compose(pg.divergence(), g.as_chart()) == v.divergence() * Rational(1 / g.det()));

  Matrix<Rational> id(3, 3);
  for (std::size_t i = 0; i < 3; ++i) id(i, i) = 1;
  CHECK(piola_push(AffineMap<Rational>{id, {0, 0, 0}}, v) == v);
}

TEST_CASE("simplex text round-trip") {
  const Simplex s({{Rational(1, 3), 0, 2}, {4, Rational(-5, 7), 0}, {0, 1, 1}, {0, 0, 0}});
  std::stringstream ss;
  write_simplex(ss, s);
  const Simplex r = read_simplex(ss);
  CHECK(r.vertices() == s.vertices());
}
