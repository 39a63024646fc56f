#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>
#include <sstream>

#include "bdmlab/shishkin.hpp"
#include "bdmlab/stokes.hpp"

using namespace bdmlab;

TEST_CASE("transition points") {
  CHECK(transition_point(0.01, LogConvention::natural) == doctest::Approx(0.03 * std::log(100.0)));
  CHECK(transition_point(0.01, LogConvention::natural) == doctest::Approx(0.13816).epsilon(1e-4));
  CHECK(transition_point(0.01, LogConvention::base10) == doctest::Approx(0.06).epsilon(1e-14));
  CHECK(transition_point(0.5, LogConvention::natural) == 0.5);
  CHECK_THROWS(transition_point(0.0, LogConvention::natural));
  CHECK_THROWS(transition_point(1.0, LogConvention::natural));
}

TEST_CASE("mesh topology and exact area") {
  for (int n : {2, 4, 8, 16}) {
    for (double eps : {0.1, 0.01, 1e-3, 1e-4}) {
      const auto m = build_shishkin({n, eps, std::nullopt, LogConvention::natural});
      CHECK(m.num_triangles() == static_cast<std::size_t>(2 * n * n));
      CHECK(m.num_vertices() == static_cast<std::size_t>((n + 1) * (n + 1)));
      CHECK(total_area(m) == 1);
      // Euler characteristic V - E + F of the meshed square
      CHECK(static_cast<long>(m.num_vertices()) - static_cast<long>(m.facets.size()) + static_cast<long>(m.num_triangles()) == 1);
      int boundary = 0;
      for (const auto& f : m.facets) {
        if (f.is_boundary()) {
          ++boundary;
          CHECK(f.side != BoundarySide::interior);
        } else {
          CHECK(f.side == BoundarySide::interior);
        }
      }
      CHECK(boundary == 4 * n);
      for (std::size_t t = 0; t < m.num_triangles(); ++t) {
        CHECK(m.triangle(t).chart_determinant() > 0);
        CHECK(has_exact_right_max_angle(m.triangle(t)));
      }
    }
  }
}

TEST_CASE("grid lines and layer orientation") {
  const Rational tau(3, 20);
  const auto m = build_shishkin(8, tau);
  std::set<Rational> xs;
  for (const auto& v : m.vertices) xs.insert(v[0]);
  CHECK(xs.size() == 9);
  CHECK(std::count_if(xs.begin(), xs.end(), [&](const Rational& x) { return x <= tau; }) == 5);
  CHECK(std::count_if(xs.begin(), xs.end(), [&](const Rational& x) { return x >= tau; }) == 5);
  CHECK(xs.count(tau) == 1);
  // layer elements are thin in x1
  for (std::size_t t = 0; t < m.num_triangles(); ++t) {
    const auto& tri = m.triangles[t];
    Rational lo = m.vertices[static_cast<std::size_t>(tri[0])][0], hi = lo;
    for (int v : tri) {
      lo = std::min(lo, m.vertices[static_cast<std::size_t>(v)][0]);
      hi = std::max(hi, m.vertices[static_cast<std::size_t>(v)][0]);
    }
    if (hi <= tau) CHECK(hi - lo == 2 * tau / 8);
  }
  // tau = 1/4, N = 2: two columns of widths 1/4 and 3/4
  const auto m2 = build_shishkin(2, Rational(1, 4));
  CHECK(m2.num_triangles() == 8);
  std::set<Rational> x2;
  for (const auto& v : m2.vertices) x2.insert(v[0]);
  CHECK(x2 == std::set<Rational>{0, Rational(1, 4), 1});
  CHECK_THROWS(build_shishkin(7, Rational(1, 4)));
  CHECK_THROWS(build_shishkin({7, 0.01, std::nullopt, LogConvention::natural}));
}

TEST_CASE("uniform meshes") {
  CHECK(build_uniform(1).num_triangles() == 2);
  CHECK(build_uniform(4).num_triangles() == 32);
  CHECK(build_uniform(5).num_vertices() == 36);
  CHECK(build_uniform(4).vertices == build_shishkin(4, Rational(1, 2)).vertices);
}

TEST_CASE("aspect ratios") {
  // a right isosceles triangle: hypotenuse sqrt2 over twice the inradius (2 - sqrt2)/2
  CHECK(aspect_ratio(0.5) == doctest::Approx(std::sqrt(2.0) / (2.0 - std::sqrt(2.0))));
  CHECK(aspect_ratio(0.5) == doctest::Approx(1.0 + std::sqrt(2.0)));
  CHECK(aspect_ratio(0.06) == doctest::Approx(8.93).epsilon(0.05 / 8.93));
  double prev = aspect_ratio(1e-3);
  for (int i = 2; i <= 500; ++i) {
    const double s = aspect_ratio(i * 1e-3);
    CHECK(s < prev);
    prev = s;
  }
  for (double tau : {0.5, 0.3, 0.06, 0.01}) {
    const auto m = build_shishkin(8, rational_from_double(tau));
    CHECK(mesh_aspect_ratio(m) == doctest::Approx(aspect_ratio(tau)).epsilon(1e-12));
  }
}

TEST_CASE("mesh text round-trip") {
  const auto m = build_shishkin(4, Rational(1, 5));
  std::stringstream ss;
  write_mesh(ss, m);
  const auto r = read_mesh(ss);
  CHECK(r.vertices == m.vertices);
  CHECK(r.triangles == m.triangles);
  CHECK(r.facets.size() == m.facets.size());
}

TEST_CASE("interior penalty parameter") {
  CHECK(penalty(std::numbers::e, 1) == doctest::Approx(4.0));
  CHECK(penalty(8.93, 1) == doctest::Approx(12.0));
  CHECK(penalty(8.93, 2) == doctest::Approx(48.0));
  CHECK(penalty(0.5, 1) == doctest::Approx(4.0));
  CHECK(penalty(8.93, 1, LogConvention::base10) == doctest::Approx(4.0));
}
