#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "bdmlab/stokes.hpp"

using namespace bdmlab;

namespace {

double fd(const std::function<double(std::span<const double>)>& f, std::array<double, 2> x, int d, double h = 1e-5) {
  auto a = x, b = x;
  a[static_cast<std::size_t>(d)] += h;
  b[static_cast<std::size_t>(d)] -= h;
  return (f(a) - f(b)) / (2 * h);
}

}  // namespace

TEST_CASE("ExpPoly derivatives agree with finite differences") {
  const auto p = parse_polynomial(2, "x1^2*x2 - 3*x2^3 + x1").cast<double>();
  const auto e = ExpPoly::polynomial(-4.0, p, 1) + ExpPoly::polynomial(-4.0, p, 2) * 0.5;
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    const std::array<double, 2> x{u(rng), u(rng)};
    for (int d = 0; d < 2; ++d) {
      const double expected = fd([&](std::span<const double> y) { return e.evaluate(y); }, x, d);
      CHECK(e.derivative(d).evaluate(x) == doctest::Approx(expected).epsilon(1e-6));
    }
  }
}

TEST_CASE("manufactured solution") {
  const auto c = manufactured_case(0.1);
  // forcing against -lap u + grad p by nested finite differences
  const std::array<double, 2> x{0.5, 0.5};
  const double h = 1e-3;
  for (int comp = 0; comp < 2; ++comp) {
    const auto uc = [&](std::span<const double> y) { return c.velocity(y)[static_cast<std::size_t>(comp)]; };
    double lap = 0;
    for (int d = 0; d < 2; ++d) {
      auto a = x, b = x;
      a[static_cast<std::size_t>(d)] += h;
      b[static_cast<std::size_t>(d)] -= h;
      lap += (uc(a) - 2 * uc(x) + uc(b)) / (h * h);
    }
    const double gp = fd([&](std::span<const double> y) { return c.p.evaluate(y); }, x, comp);
    CHECK(c.forcing(x)[static_cast<std::size_t>(comp)] == doctest::Approx(-lap + gp).epsilon(1e-5));
  }
  // divergence free and zero on the boundary
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    const std::array<double, 2> y{u(rng), u(rng)};
    CHECK(std::fabs(c.grad_u[0][0].evaluate(y) + c.grad_u[1][1].evaluate(y)) < 1e-13);
    for (const std::array<double, 2> b : {std::array<double, 2>{0, y[1]}, {1, y[1]}, {y[0], 0}, {y[0], 1}}) {
      CHECK(std::fabs(c.velocity(b)[0]) < 1e-15);
      CHECK(std::fabs(c.velocity(b)[1]) < 1e-15);
    }
  }
  CHECK(c.p_mean == doctest::Approx(0.1 * (1 - std::exp(-10.0))));
}

TEST_CASE("local basis is dual to the normal moments") {
  const DGSpace space(build_shishkin(4, Rational(1, 5)));
  const double g[2] = {0.5 - 0.5 / std::sqrt(3.0), 0.5 + 0.5 / std::sqrt(3.0)};
  for (std::size_t t = 0; t < space.mesh().num_triangles(); ++t) {
    const auto dofs = space.triangle_dofs(t);
    for (int i = 0; i < 6; ++i) {
      for (int j = 0; j < 6; ++j) {
        const std::size_t e = dofs[static_cast<std::size_t>(j)] / 2;
        const int q = static_cast<int>(dofs[static_cast<std::size_t>(j)] % 2);
        const auto& n = space.facet_normal(e);
        double m = 0;
        for (int k = 0; k < 2; ++k) {
          const auto x = space.facet_point(e, g[k]);
          const auto v = space.basis_value(t, i, x);
          const double weight = q == 0 ? 1.0 : 2 * g[k] - 1;
          m += 0.5 * space.facet_length(e) * weight * (v[0] * n[0] + v[1] * n[1]);
        }
        CHECK(m == doctest::Approx(i == j ? 1.0 : 0.0).epsilon(1e-12).scale(1.0));
      }
      // flux divergence against the trace of the gradient
      const auto& gr = space.basis_gradient(t, i);
      CHECK(space.basis_divergence(t, i) == doctest::Approx(gr[0][0] + gr[1][1]).epsilon(1e-9).scale(1.0 / space.area(t)));
    }
  }
}

TEST_CASE("assembled operators") {
  const DGSpace space(build_shishkin(4, Rational(1, 5)));
  const auto sys = assemble(space, manufactured_case(0.1), 10.0);
  const Eigen::SparseMatrix<double> asym = sys.A - Eigen::SparseMatrix<double>(sys.A.transpose());
  CHECK(asym.norm() <= 1e-12 * sys.A.norm());

  // coercivity smoke: A restricted to free DOFs is positive definite on a 2x2 mesh with gamma = 10
  const DGSpace small(build_uniform(2));
  const auto s2 = assemble(small, zero_case(), 10.0);
  std::vector<int> free;
  for (std::size_t j = 0; j < small.num_velocity_dofs(); ++j) {
    if (!small.is_boundary_dof(j)) free.push_back(static_cast<int>(j));
  }
  Eigen::MatrixXd dense = Eigen::MatrixXd(s2.A);
  Eigen::MatrixXd af(free.size(), free.size());
  for (std::size_t a = 0; a < free.size(); ++a) {
    for (std::size_t b = 0; b < free.size(); ++b) af(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) = dense(free[a], free[b]);
  }
  CHECK(Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(af).eigenvalues().minCoeff() > 0);
}

TEST_CASE("zero data gives the zero solution") {
  const DGSpace space(build_uniform(4));
  const auto sol = solve(space, assemble(space, zero_case(), 8.0));
  CHECK(sol.u.lpNorm<Eigen::Infinity>() == 0.0);
  CHECK(sol.p.lpNorm<Eigen::Infinity>() == 0.0);
}

TEST_CASE("discrete solution is divergence free with mean-free pressure") {
  const DGSpace space(build_shishkin(8, rational_from_double(transition_point(0.1, LogConvention::natural))));
  const auto c = manufactured_case(0.1);
  const auto sol = solve(space, assemble(space, c, penalty(aspect_ratio(0.5), 1)));
  CHECK(sol.relative_residual < 1e-10);
  CHECK(sol.pressure_mean == doctest::Approx(0.0).scale(1.0).epsilon(1e-12));
  CHECK(sol.max_divergence < 1e-12);
  CHECK(sol.max_normal_jump < 1e-12);
  double trace = 0;
  for (std::size_t t = 0; t < space.mesh().num_triangles(); ++t) {
    const auto g = space.velocity_gradient(sol.u, t);
    trace = std::max(trace, std::fabs(g[0][0] + g[1][1]));
  }
  CHECK(trace < 1e-8);
  const auto err = errors(space, sol, c);
  CHECK(std::isfinite(err.grad_u));
  CHECK(std::isfinite(err.p));
  CHECK(err.grad_u > 0);
}

TEST_CASE("discrete errors are comparable to the interpolation baseline") {
  const auto c = manufactured_case(0.5);
  const DGSpace space(build_uniform(8));
  const auto sol = solve(space, assemble(space, c, 8.0));
  const auto e = errors(space, sol, c);
  const auto ie = errors(space, interpolate_exact(space, c), c);
  CHECK(ie.grad_u > 0);
  CHECK(e.grad_u < 10 * ie.grad_u);
  CHECK(e.p < 10 * (ie.p + ie.grad_u));
  // a larger penalty stays stable
  const auto sol2 = solve(space, assemble(space, c, 16.0));
  CHECK(errors(space, sol2, c).grad_u < 10 * ie.grad_u);
}

TEST_CASE("errors shrink under refinement on uniform meshes") {
  StudyOptions opts;
  const auto rows = convergence_study({0.5}, {4, 8, 16}, MeshKind::uniform, opts);
  REQUIRE(rows.size() == 3);
  CHECK(rows[2].err_grad_u < rows[0].err_grad_u);
  REQUIRE(rows[2].rate_u.has_value());
  CHECK(*rows[2].rate_u > 0.8);
  std::ostringstream a, b;
  write_study_csv(a, rows);
  write_study_csv(b, convergence_study({0.5}, {4, 8, 16}, MeshKind::uniform, opts));
  CHECK(a.str() == b.str());
  CHECK(a.str().rfind("epsilon,mesh_kind,N,ndof,tau,sigma,gamma,err_grad_u,err_p,rate_u,rate_p", 0) == 0);
}

TEST_CASE("facet length scales") {
  const DGSpace space(build_shishkin(4, Rational(1, 10)));
  for (std::size_t e = 0; e < space.mesh().facets.size(); ++e) {
    CHECK(facet_scale(space, e, FacetScale::length) == space.facet_length(e));
    const auto& f = space.mesh().facets[e];
    double h = 2 * space.area(static_cast<std::size_t>(f.left)) / space.facet_length(e);
    if (!f.is_boundary()) h = std::min(h, 2 * space.area(static_cast<std::size_t>(f.right)) / space.facet_length(e));
    CHECK(facet_scale(space, e, FacetScale::height) == doctest::Approx(h).epsilon(1e-14));
  }
  CHECK(parse_facet_scale("height") == FacetScale::height);
  CHECK_THROWS(parse_facet_scale("width"));
}
