#include "bdmlab/stokes.hpp"

#include <Eigen/SparseCholesky>
#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>

#include "bdmlab/kernels.hpp"
#include "bdmlab/polyspace.hpp"

namespace bdmlab {

// --- ExpPoly -------------------------------------------------------------------

ExpPoly ExpPoly::polynomial(double rate, const Polynomial<double>& p, int exp_multiple) {
  ExpPoly e(rate);
  if (!p.is_zero()) e.terms_.emplace(exp_multiple, p);
  return e;
}

ExpPoly ExpPoly::derivative(int i) const {
  ExpPoly r(rate_);
  for (const auto& [m, p] : terms_) {
    Polynomial<double> d = p.derivative(i);
    if (i == 0 && m != 0) d += p * (m * rate_);
    if (!d.is_zero()) r.terms_.emplace(m, std::move(d));
  }
  return r;
}

double ExpPoly::evaluate(std::span<const double> x) const {
  double s = 0.0;
  for (const auto& [m, p] : terms_) {
    const double e = m == 0 ? 1.0 : std::exp(m * rate_ * x[0]);
    s += p.evaluate<double>(x) * e;
  }
  return s;
}

ExpPoly& ExpPoly::operator+=(const ExpPoly& o) {
  if (!o.terms_.empty() && !terms_.empty() && o.rate_ != rate_) throw std::invalid_argument("ExpPoly rates differ");
  if (terms_.empty()) rate_ = o.rate_;
  for (const auto& [m, p] : o.terms_) {
    auto [it, inserted] = terms_.try_emplace(m, p);
    if (!inserted) {
      it->second += p;
      if (it->second.is_zero()) terms_.erase(it);
    }
  }
  return *this;
}

ExpPoly& ExpPoly::operator*=(double s) {
  if (s == 0.0) {
    terms_.clear();
    return *this;
  }
  for (auto& [m, p] : terms_) p *= s;
  return *this;
}

// --- manufactured solution -----------------------------------------------------

std::array<double, 2> StokesCase::velocity(std::span<const double> x) const {
  return {u[0].evaluate(x), u[1].evaluate(x)};
}

std::array<double, 2> StokesCase::forcing(std::span<const double> x) const {
  return {f[0].evaluate(x), f[1].evaluate(x)};
}

StokesCase manufactured_case(double epsilon, double nu) {
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw std::invalid_argument("epsilon must lie in (0, 1)");
  StokesCase c;
  c.epsilon = epsilon;
  c.nu = nu;
  const double rate = -1.0 / epsilon;
  const auto x1 = Polynomial<double>::variable(2, 0);
  const auto x2 = Polynomial<double>::variable(2, 1);
  const auto one = Polynomial<double>::constant(2, 1.0);
  const auto a = x1 * x1 * (one - x1) * (one - x1);
  const auto b = x2 * x2 * (one - x2) * (one - x2);
  const ExpPoly xi = ExpPoly::polynomial(rate, a * b, 1);
  c.u = {xi.derivative(1), xi.derivative(0) * -1.0};
  for (int i = 0; i < 2; ++i) {
    for (int d = 0; d < 2; ++d) c.grad_u[static_cast<std::size_t>(i)][static_cast<std::size_t>(d)] = c.u[static_cast<std::size_t>(i)].derivative(d);
  }
  c.p = ExpPoly::polynomial(rate, one, 1);
  for (int i = 0; i < 2; ++i) {
    const auto& g = c.grad_u[static_cast<std::size_t>(i)];
    const ExpPoly lap = g[0].derivative(0) + g[1].derivative(1);
    c.f[static_cast<std::size_t>(i)] = lap * -nu + c.p.derivative(i);
  }
  c.p_mean = epsilon * -std::expm1(-1.0 / epsilon);
  return c;
}

StokesCase zero_case() {
  StokesCase c;
  c.epsilon = 0.0;
  return c;
}

// --- discrete space --------------------------------------------------------------

namespace {

// Two-point Gauss on [0, 1]; exact for the cubic edge integrands of BDM1.
constexpr std::array<double, 2> kGaussX{0.21132486540518713, 0.78867513459481287};
constexpr std::array<double, 2> kGaussW{0.5, 0.5};

double edge_weight(int q, double s) { return q == 0 ? 1.0 : 2.0 * s - 1.0; }

}  // namespace

DGSpace::DGSpace(Mesh2D mesh) : mesh_(std::move(mesh)) {
  if (mesh_.facets.empty()) mesh_.build_facets();
  const std::size_t nt = mesh_.num_triangles();
  for (const auto& f : mesh_.facets) {
    const auto& a = mesh_.vertices[static_cast<std::size_t>(f.vertices[0])];
    const auto& b = mesh_.vertices[static_cast<std::size_t>(f.vertices[1])];
    const double tx = to_double(b[0]) - to_double(a[0]);
    const double ty = to_double(b[1]) - to_double(a[1]);
    const double len = std::hypot(tx, ty);
    length_.push_back(len);
    normal_.push_back({ty / len, -tx / len});
  }
  area_.resize(nt);
  frame_.resize(nt);
  coeff_.resize(nt);
  grad_.resize(nt);
  for (std::size_t t = 0; t < nt; ++t) {
    const auto& tri = mesh_.triangles[t];
    std::array<std::array<double, 2>, 3> v{};
    for (std::size_t i = 0; i < 3; ++i) {
      const auto& p = mesh_.vertices[static_cast<std::size_t>(tri[i])];
      v[i] = {to_double(p[0]), to_double(p[1])};
    }
    area_[t] = 0.5 * std::fabs((v[1][0] - v[0][0]) * (v[2][1] - v[0][1]) - (v[2][0] - v[0][0]) * (v[1][1] - v[0][1]));
    Frame fr{};
    fr.xc = (v[0][0] + v[1][0] + v[2][0]) / 3.0;
    fr.yc = (v[0][1] + v[1][1] + v[2][1]) / 3.0;
    fr.sx = std::max({v[0][0], v[1][0], v[2][0]}) - std::min({v[0][0], v[1][0], v[2][0]});
    fr.sy = std::max({v[0][1], v[1][1], v[2][1]}) - std::min({v[0][1], v[1][1], v[2][1]});
    frame_[t] = fr;
    // Vandermonde: rows are the local DOFs, columns the scaled monomials e_c {1, X, Y}.
    Eigen::Matrix<double, 6, 6> V = Eigen::Matrix<double, 6, 6>::Zero();
    for (int i = 0; i < 3; ++i) {
      const auto e = static_cast<std::size_t>(mesh_.triangle_facets[t][static_cast<std::size_t>(i)]);
      const auto& n = normal_[e];
      for (int q = 0; q < 2; ++q) {
        for (std::size_t g = 0; g < 2; ++g) {
          const auto x = facet_point(e, kGaussX[g]);
          const double mono[3] = {1.0, (x[0] - fr.xc) / fr.sx, (x[1] - fr.yc) / fr.sy};
          const double w = kGaussW[g] * length_[e] * edge_weight(q, kGaussX[g]);
          for (int c = 0; c < 2; ++c) {
            for (int m = 0; m < 3; ++m) V(2 * i + q, 3 * c + m) += w * n[static_cast<std::size_t>(c)] * mono[m];
          }
        }
      }
    }
    const Eigen::Matrix<double, 6, 6> C = V.partialPivLu().inverse();
    for (int i = 0; i < 6; ++i) {
      auto& g = grad_[t][static_cast<std::size_t>(i)];
      for (int j = 0; j < 6; ++j) coeff_[t][static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = C(j, i);
      for (std::size_t c = 0; c < 2; ++c) {
        g[c][0] = C(static_cast<int>(3 * c + 1), i) / fr.sx;
        g[c][1] = C(static_cast<int>(3 * c + 2), i) / fr.sy;
      }
    }
  }
}

std::size_t DGSpace::num_unknowns() const {
  std::size_t free = 0;
  for (std::size_t j = 0; j < num_velocity_dofs(); ++j) free += is_boundary_dof(j) ? 0 : 1;
  return free + num_pressure_dofs() + 1;
}

std::array<std::size_t, 6> DGSpace::triangle_dofs(std::size_t t) const {
  std::array<std::size_t, 6> d{};
  for (std::size_t i = 0; i < 3; ++i) {
    const auto e = static_cast<std::size_t>(mesh_.triangle_facets[t][i]);
    d[2 * i] = 2 * e;
    d[2 * i + 1] = 2 * e + 1;
  }
  return d;
}

int DGSpace::facet_sign(std::size_t e, std::size_t t) const {
  const auto& f = mesh_.facets[e];
  // the vertex of t opposite e lies on the inner side
  const auto& tri = mesh_.triangles[t];
  int opposite = -1;
  for (int v : tri) {
    if (v != f.vertices[0] && v != f.vertices[1]) opposite = v;
  }
  const auto& a = mesh_.vertices[static_cast<std::size_t>(f.vertices[0])];
  const auto& o = mesh_.vertices[static_cast<std::size_t>(opposite)];
  const double dx = to_double(o[0]) - to_double(a[0]);
  const double dy = to_double(o[1]) - to_double(a[1]);
  return dx * normal_[e][0] + dy * normal_[e][1] < 0.0 ? 1 : -1;
}

std::array<double, 2> DGSpace::basis_value(std::size_t t, int i, std::span<const double> x) const {
  const auto& fr = frame_[t];
  const auto& c = coeff_[t][static_cast<std::size_t>(i)];
  const double X = (x[0] - fr.xc) / fr.sx;
  const double Y = (x[1] - fr.yc) / fr.sy;
  return {c[0] + c[1] * X + c[2] * Y, c[3] + c[4] * X + c[5] * Y};
}

double DGSpace::basis_divergence(std::size_t t, int i) const {
  // div is constant, so it equals the total outward flux over |T|: only the
  // zeroth moment of the own facet contributes.
  if (i % 2 != 0) return 0.0;
  const auto e = static_cast<std::size_t>(mesh_.triangle_facets[t][static_cast<std::size_t>(i / 2)]);
  return facet_sign(e, t) / area_[t];
}

double DGSpace::divergence(const Eigen::VectorXd& u, std::size_t t) const {
  double flux = 0.0;
  for (std::size_t i = 0; i < 3; ++i) {
    const auto e = static_cast<std::size_t>(mesh_.triangle_facets[t][i]);
    flux += facet_sign(e, t) * u[static_cast<Eigen::Index>(2 * e)];
  }
  return flux / area_[t];
}

std::array<double, 2> DGSpace::velocity(const Eigen::VectorXd& u, std::size_t t, std::span<const double> x) const {
  const auto dofs = triangle_dofs(t);
  std::array<double, 2> v{0.0, 0.0};
  for (int i = 0; i < 6; ++i) {
    const auto b = basis_value(t, i, x);
    const double c = u[static_cast<Eigen::Index>(dofs[static_cast<std::size_t>(i)])];
    v[0] += c * b[0];
    v[1] += c * b[1];
  }
  return v;
}

std::array<std::array<double, 2>, 2> DGSpace::velocity_gradient(const Eigen::VectorXd& u, std::size_t t) const {
  const auto dofs = triangle_dofs(t);
  std::array<std::array<double, 2>, 2> g{};
  for (int i = 0; i < 6; ++i) {
    const double c = u[static_cast<Eigen::Index>(dofs[static_cast<std::size_t>(i)])];
    const auto& b = basis_gradient(t, i);
    for (std::size_t r = 0; r < 2; ++r) {
      for (std::size_t d = 0; d < 2; ++d) g[r][d] += c * b[r][d];
    }
  }
  return g;
}

std::array<double, 2> DGSpace::facet_point(std::size_t e, double s) const {
  const auto& f = mesh_.facets[e];
  const auto& a = mesh_.vertices[static_cast<std::size_t>(f.vertices[0])];
  const auto& b = mesh_.vertices[static_cast<std::size_t>(f.vertices[1])];
  const double ax = to_double(a[0]), ay = to_double(a[1]);
  return {ax + s * (to_double(b[0]) - ax), ay + s * (to_double(b[1]) - ay)};
}

// --- quadrature on mesh elements ----------------------------------------------------

namespace {

struct PhysicalRule {
  std::vector<std::array<double, 2>> points;
  std::vector<double> weights;
};

// Reference rule repeated on a split x split subdivision of the triangle.
PhysicalRule element_rule(const Mesh2D& mesh, std::size_t t, int degree, int split) {
  const auto rule = quad_rule(2, degree);
  const auto& tri = mesh.triangles[t];
  std::array<std::array<double, 2>, 3> v{};
  for (std::size_t i = 0; i < 3; ++i) {
    const auto& p = mesh.vertices[static_cast<std::size_t>(tri[i])];
    v[i] = {to_double(p[0]), to_double(p[1])};
  }
  const double e1x = v[1][0] - v[0][0], e1y = v[1][1] - v[0][1];
  const double e2x = v[2][0] - v[0][0], e2y = v[2][1] - v[0][1];
  const double jac = std::fabs(e1x * e2y - e2x * e1y);
  const double h = 1.0 / split;
  const double sub_jac = h * h;
  PhysicalRule out;
  auto push = [&](double s0, double t0, double sa, double ta, double sb, double tb) {
    for (std::size_t q = 0; q < rule.size(); ++q) {
      const auto r = rule.point(q);
      const double s = s0 + sa * r[0] + sb * r[1];
      const double u = t0 + ta * r[0] + tb * r[1];
      out.points.push_back({v[0][0] + e1x * s + e2x * u, v[0][1] + e1y * s + e2y * u});
      out.weights.push_back(rule.weights[q] * sub_jac * jac);
    }
  };
  for (int i = 0; i < split; ++i) {
    for (int j = 0; j + i < split; ++j) {
      push(i * h, j * h, h, 0.0, 0.0, h);
      if (i + j + 1 < split) push((i + 1) * h, (j + 1) * h, -h, 0.0, 0.0, -h);
    }
  }
  return out;
}

struct RuleChoice {
  int degree;
  int split;
};

// Extra resolution for elements much wider (in x1) than the layer scale.
RuleChoice rule_for(const DGSpace& space, const StokesCase& c, std::size_t t, int base_degree) {
  if (c.epsilon <= 0.0) return {base_degree, 1};
  const auto& tri = space.mesh().triangles[t];
  double xmin = 1e300, xmax = -1e300;
  for (int v : tri) {
    const double x = to_double(space.mesh().vertices[static_cast<std::size_t>(v)][0]);
    xmin = std::min(xmin, x);
    xmax = std::max(xmax, x);
  }
  const double layer = 3.0 * c.epsilon * std::fabs(std::log(c.epsilon));
  int degree = base_degree;
  if (c.epsilon <= 1e-3 && xmin < layer) degree = 2 * base_degree;
  const int split = std::clamp(static_cast<int>(std::ceil((xmax - xmin) / (4.0 * c.epsilon))), 1, 8);
  return {degree, split};
}

}  // namespace

double facet_scale(const DGSpace& space, std::size_t e, FacetScale scale) {
  const double len = space.facet_length(e);
  if (scale == FacetScale::length) return len;
  const auto& f = space.mesh().facets[e];
  double h = 2.0 * space.area(static_cast<std::size_t>(f.left)) / len;
  if (!f.is_boundary()) h = std::min(h, 2.0 * space.area(static_cast<std::size_t>(f.right)) / len);
  return h;
}

std::string to_string(FacetScale s) { return s == FacetScale::length ? "length" : "height"; }

FacetScale parse_facet_scale(const std::string& s) {
  if (s == "length") return FacetScale::length;
  if (s == "height") return FacetScale::height;
  throw std::invalid_argument("unknown facet scale: " + s);
}

// --- assembly ----------------------------------------------------------------------

StokesSystem assemble(const DGSpace& space, const StokesCase& c, double gamma, int quad_degree, FacetScale scale) {
  if (!(gamma > 0.0)) throw std::invalid_argument("penalty parameter must be positive");
  const Mesh2D& mesh = space.mesh();
  const std::size_t nu = space.num_velocity_dofs();
  const std::size_t np = space.num_pressure_dofs();
  const double nu_visc = c.nu;
  StokesSystem sys;
  sys.gamma = gamma;
  sys.F = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(nu));
  sys.boundary_values = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(nu));
  std::vector<Eigen::Triplet<double>> ta, tb;

  for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
    const auto dofs = space.triangle_dofs(t);
    const double area = space.area(t);
    for (int i = 0; i < 6; ++i) {
      const auto& gi = space.basis_gradient(t, i);
      for (int j = 0; j < 6; ++j) {
        const auto& gj = space.basis_gradient(t, j);
        double s = 0.0;
        for (std::size_t r = 0; r < 2; ++r) s += gi[r][0] * gj[r][0] + gi[r][1] * gj[r][1];
        ta.emplace_back(static_cast<int>(dofs[static_cast<std::size_t>(i)]), static_cast<int>(dofs[static_cast<std::size_t>(j)]), nu_visc * area * s);
      }
      tb.emplace_back(static_cast<int>(t), static_cast<int>(dofs[static_cast<std::size_t>(i)]), -area * space.basis_divergence(t, i));
    }
    if (!c.f[0].terms().empty() || !c.f[1].terms().empty()) {
      const auto choice = rule_for(space, c, t, quad_degree + 1);
      const auto rule = element_rule(mesh, t, choice.degree, choice.split);
      std::vector<double> fx(rule.weights.size()), fy(rule.weights.size());
      for (std::size_t q = 0; q < rule.weights.size(); ++q) {
        const auto f = c.forcing(rule.points[q]);
        fx[q] = f[0];
        fy[q] = f[1];
      }
      for (int i = 0; i < 6; ++i) {
        std::vector<double> bx(rule.weights.size()), by(rule.weights.size());
        for (std::size_t q = 0; q < rule.weights.size(); ++q) {
          const auto b = space.basis_value(t, i, rule.points[q]);
          bx[q] = b[0];
          by[q] = b[1];
        }
        sys.F[static_cast<Eigen::Index>(dofs[static_cast<std::size_t>(i)])] +=
            kernels::weighted_dot(rule.weights, fx, bx) + kernels::weighted_dot(rule.weights, fy, by);
      }
    }
  }

  // Facet terms of the symmetric interior penalty form.
  const auto g_rule = gauss_legendre_01(6);
  for (std::size_t e = 0; e < mesh.facets.size(); ++e) {
    const auto& facet = mesh.facets[e];
    const double len = space.facet_length(e);
    const double he = facet_scale(space, e, scale);
    const auto& n = space.facet_normal(e);
    struct Side {
      std::size_t t;
      double sign;    // +1 for the side n points away from
      double weight;  // average weight
    };
    std::vector<Side> sides;
    const auto tl = static_cast<std::size_t>(facet.left);
    if (facet.is_boundary()) {
      sides.push_back({tl, static_cast<double>(space.facet_sign(e, tl)), 1.0});
    } else {
      const auto tr = static_cast<std::size_t>(facet.right);
      sides.push_back({tl, static_cast<double>(space.facet_sign(e, tl)), 0.5});
      sides.push_back({tr, static_cast<double>(space.facet_sign(e, tr)), 0.5});
    }
    // Orient n outward of the "+" side: jump = sum_s sign_s v_s.
    std::vector<std::size_t> ids;
    for (const auto& s : sides) {
      for (auto d : space.triangle_dofs(s.t)) {
        if (std::find(ids.begin(), ids.end(), d) == ids.end()) ids.push_back(d);
      }
    }
    const std::size_t m = ids.size();
    Eigen::MatrixXd local = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(m));
    // avg flux {grad v} n (constant along the facet, per side)
    std::vector<std::array<double, 2>> flux(m, {0.0, 0.0});
    for (const auto& s : sides) {
      const auto dofs = space.triangle_dofs(s.t);
      for (int i = 0; i < 6; ++i) {
        const auto k = static_cast<std::size_t>(std::find(ids.begin(), ids.end(), dofs[static_cast<std::size_t>(i)]) - ids.begin());
        const auto& g = space.basis_gradient(s.t, i);
        // on the boundary the outward normal is sign * n
        const double nscale = facet.is_boundary() ? s.sign : 1.0;
        for (std::size_t r = 0; r < 2; ++r) flux[k][r] += s.weight * nscale * (g[r][0] * n[0] + g[r][1] * n[1]);
      }
    }
    for (std::size_t g = 0; g < 2; ++g) {
      const auto x = space.facet_point(e, kGaussX[g]);
      const double w = kGaussW[g] * len;
      std::vector<std::array<double, 2>> jump(m, {0.0, 0.0});
      for (const auto& s : sides) {
        const auto dofs = space.triangle_dofs(s.t);
        const double js = facet.is_boundary() ? 1.0 : s.sign;
        for (int i = 0; i < 6; ++i) {
          const auto k = static_cast<std::size_t>(std::find(ids.begin(), ids.end(), dofs[static_cast<std::size_t>(i)]) - ids.begin());
          const auto b = space.basis_value(s.t, i, x);
          jump[k][0] += js * b[0];
          jump[k][1] += js * b[1];
        }
      }
      for (std::size_t a = 0; a < m; ++a) {
        for (std::size_t b = 0; b < m; ++b) {
          const double fj = flux[b][0] * jump[a][0] + flux[b][1] * jump[a][1];
          const double jf = jump[b][0] * flux[a][0] + jump[b][1] * flux[a][1];
          const double jj = jump[b][0] * jump[a][0] + jump[b][1] * jump[a][1];
          local(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) += w * nu_visc * (-fj - jf + gamma / he * jj);
        }
      }
    }
    for (std::size_t a = 0; a < m; ++a) {
      for (std::size_t b = 0; b < m; ++b) {
        ta.emplace_back(static_cast<int>(ids[a]), static_cast<int>(ids[b]), local(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)));
      }
    }
    if (facet.is_boundary()) {
      // Dirichlet data: normal moments imposed strongly, tangential part by Nitsche terms.
      const auto& s = sides.front();
      const auto dofs = space.triangle_dofs(s.t);
      const double nscale = s.sign;
      for (std::size_t q = 0; q < g_rule.size(); ++q) {
        const auto x = space.facet_point(e, g_rule.points[q]);
        const double w = g_rule.weights[q] * len;
        const auto gv = c.boundary(x);
        if (gv[0] == 0.0 && gv[1] == 0.0) continue;
        for (int qq = 0; qq < 2; ++qq) {
          sys.boundary_values[static_cast<Eigen::Index>(2 * e + static_cast<std::size_t>(qq))] +=
              w * (gv[0] * n[0] + gv[1] * n[1]) * edge_weight(qq, g_rule.points[q]);
        }
        for (int i = 0; i < 6; ++i) {
          const auto& gr = space.basis_gradient(s.t, i);
          const auto b = space.basis_value(s.t, i, x);
          double gn = 0.0;
          for (std::size_t r = 0; r < 2; ++r) gn += gv[r] * nscale * (gr[r][0] * n[0] + gr[r][1] * n[1]);
          const double gb = gv[0] * b[0] + gv[1] * b[1];
          sys.F[static_cast<Eigen::Index>(dofs[static_cast<std::size_t>(i)])] += w * nu_visc * (-gn + gamma / he * gb);
        }
      }
    }
  }
  sys.A.resize(static_cast<Eigen::Index>(nu), static_cast<Eigen::Index>(nu));
  sys.A.setFromTriplets(ta.begin(), ta.end());
  sys.B.resize(static_cast<Eigen::Index>(np), static_cast<Eigen::Index>(nu));
  sys.B.setFromTriplets(tb.begin(), tb.end());
  return sys;
}

// --- solve -------------------------------------------------------------------------

double max_elementwise_divergence(const DGSpace& space, const Eigen::VectorXd& u) {
  double mx = 0.0;
  for (std::size_t t = 0; t < space.mesh().num_triangles(); ++t) {
    mx = std::max(mx, std::fabs(space.divergence(u, t)));
  }
  return mx;
}

double max_normal_jump(const DGSpace& space, const Eigen::VectorXd& u) {
  double mx = 0.0;
  const auto rule = gauss_legendre_01(3);
  for (std::size_t e = 0; e < space.mesh().facets.size(); ++e) {
    const auto& f = space.mesh().facets[e];
    if (f.is_boundary()) continue;
    const auto& n = space.facet_normal(e);
    double sq = 0.0;
    for (std::size_t q = 0; q < rule.size(); ++q) {
      const auto x = space.facet_point(e, rule.points[q]);
      const auto a = space.velocity(u, static_cast<std::size_t>(f.left), x);
      const auto b = space.velocity(u, static_cast<std::size_t>(f.right), x);
      const double j = (a[0] - b[0]) * n[0] + (a[1] - b[1]) * n[1];
      sq += rule.weights[q] * space.facet_length(e) * j * j;
    }
    mx = std::max(mx, std::sqrt(sq));
  }
  return mx;
}

constexpr int kMaxRefinement = 20;

StokesSolution solve(const DGSpace& space, const StokesSystem& sys) {
  const std::size_t nu = space.num_velocity_dofs();
  const std::size_t np = space.num_pressure_dofs();
  std::vector<long> free_index(nu, -1);
  long nfree = 0;
  for (std::size_t j = 0; j < nu; ++j) {
    if (!space.is_boundary_dof(j)) free_index[j] = nfree++;
  }
  const long n = nfree + static_cast<long>(np) + 1;
  const long lam = n - 1;
  const Eigen::VectorXd& ub = sys.boundary_values;

  std::vector<Eigen::Triplet<double>> tk;
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
  for (std::size_t j = 0; j < nu; ++j) {
    if (free_index[j] >= 0) rhs[free_index[j]] = sys.F[static_cast<Eigen::Index>(j)];
  }
  for (int k = 0; k < sys.A.outerSize(); ++k) {
    for (Eigen::SparseMatrix<double>::InnerIterator it(sys.A, k); it; ++it) {
      const long r = free_index[static_cast<std::size_t>(it.row())];
      const long c = free_index[static_cast<std::size_t>(it.col())];
      if (r < 0) continue;
      if (c >= 0) tk.emplace_back(r, c, it.value());
      else rhs[r] -= it.value() * ub[it.col()];
    }
  }
  for (int k = 0; k < sys.B.outerSize(); ++k) {
    for (Eigen::SparseMatrix<double>::InnerIterator it(sys.B, k); it; ++it) {
      const long pr = nfree + it.row();
      const long c = free_index[static_cast<std::size_t>(it.col())];
      if (c >= 0) {
        tk.emplace_back(pr, c, it.value());
        tk.emplace_back(c, pr, it.value());
      } else {
        rhs[pr] -= it.value() * ub[it.col()];
      }
    }
  }
  for (std::size_t t = 0; t < np; ++t) {
    tk.emplace_back(nfree + static_cast<long>(t), lam, space.area(t));
    tk.emplace_back(lam, nfree + static_cast<long>(t), space.area(t));
  }
  Eigen::SparseMatrix<double> K(n, n);
  K.setFromTriplets(tk.begin(), tk.end());
  K.makeCompressed();

  // Symmetric diagonal scaling, then a quasi-definite regularization of the
  // pressure block so that LDL^T needs no pivoting; iterative refinement
  // against the unregularized matrix removes the perturbation.
  Eigen::VectorXd d = Eigen::VectorXd::Ones(n);
  for (long i = 0; i < nfree; ++i) {
    const double a = K.coeff(i, i);
    if (a > 0.0) d[i] = 1.0 / std::sqrt(a);
  }
  Eigen::VectorXd row_sq = Eigen::VectorXd::Zero(n);
  for (int k = 0; k < K.outerSize(); ++k) {
    for (Eigen::SparseMatrix<double>::InnerIterator it(K, k); it; ++it) {
      if (it.row() >= nfree && it.col() < nfree) row_sq[it.row()] += std::pow(it.value() * d[it.col()], 2);
    }
  }
  for (long i = nfree; i < lam; ++i) {
    if (row_sq[i] > 0.0) d[i] = 1.0 / std::sqrt(row_sq[i]);
  }
  double lam_sq = 0.0;
  for (long i = nfree; i < lam; ++i) lam_sq += std::pow(space.area(static_cast<std::size_t>(i - nfree)) * d[i], 2);
  d[lam] = 1.0 / std::sqrt(lam_sq);
  const Eigen::SparseMatrix<double> Ks = d.asDiagonal() * K * d.asDiagonal();
  constexpr double kRegularization = 1e-8;
  Eigen::SparseMatrix<double> shift(n, n);
  {
    std::vector<Eigen::Triplet<double>> diag;
    for (long i = nfree; i < n; ++i) diag.emplace_back(i, i, -kRegularization);
    shift.setFromTriplets(diag.begin(), diag.end());
  }
  const Eigen::SparseMatrix<double> Kreg = Ks + shift;
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>, Eigen::Lower, Eigen::AMDOrdering<int>> ldlt(Kreg);
  if (ldlt.info() != Eigen::Success) throw std::runtime_error("LDL^T factorization of the saddle-point system failed");
  const Eigen::VectorXd bs = d.cwiseProduct(rhs);
  const double bnorm = std::max(rhs.norm(), 1e-300);
  StokesSolution sol;
  Eigen::VectorXd y = ldlt.solve(bs);
  Eigen::VectorXd x = d.cwiseProduct(y);
  Eigen::VectorXd r = rhs - K * x;
  while (r.norm() > 1e-14 * bnorm && sol.refinement_steps < kMaxRefinement) {
    y += ldlt.solve(bs - Ks * y);
    x = d.cwiseProduct(y);
    r = rhs - K * x;
    ++sol.refinement_steps;
  }
  sol.relative_residual = rhs.norm() > 0.0 ? r.norm() / bnorm : r.norm();
  if (sol.relative_residual > 1e-10) {
    throw std::runtime_error("saddle-point solve missed the residual contract: " + std::to_string(sol.relative_residual));
  }
  sol.u = ub;
  for (std::size_t j = 0; j < nu; ++j) {
    if (free_index[j] >= 0) sol.u[static_cast<Eigen::Index>(j)] = x[free_index[j]];
  }
  sol.p = x.segment(nfree, static_cast<Eigen::Index>(np));
  sol.multiplier = x[lam];
  for (std::size_t t = 0; t < np; ++t) sol.pressure_mean += space.area(t) * sol.p[static_cast<Eigen::Index>(t)];
  sol.max_divergence = max_elementwise_divergence(space, sol.u);
  sol.max_normal_jump = max_normal_jump(space, sol.u);
  return sol;
}

double penalty(double sigma, int k, LogConvention c) {
  const double base = 4.0 * k * k;
  if (!(sigma > 1.0)) return base;
  return base * std::ceil(log_with(c, sigma));
}

StokesErrors errors(const DGSpace& space, const StokesSolution& sol, const StokesCase& c, int quad_degree) {
  if (quad_degree < 1) throw std::invalid_argument("quadrature degree must be positive");
  double eu = 0.0, ep = 0.0;
  for (std::size_t t = 0; t < space.mesh().num_triangles(); ++t) {
    const auto choice = rule_for(space, c, t, quad_degree);
    const auto rule = element_rule(space.mesh(), t, choice.degree, choice.split);
    const auto gh = space.velocity_gradient(sol.u, t);
    const double ph = sol.p[static_cast<Eigen::Index>(t)];
    std::vector<double> du(rule.weights.size()), dp(rule.weights.size());
    for (std::size_t q = 0; q < rule.weights.size(); ++q) {
      const auto& x = rule.points[q];
      double s = 0.0;
      for (std::size_t r = 0; r < 2; ++r) {
        for (std::size_t d = 0; d < 2; ++d) {
          const double diff = c.grad_u[r][d].evaluate(x) - gh[r][d];
          s += diff * diff;
        }
      }
      du[q] = s;
      dp[q] = c.p.evaluate(x) - c.p_mean - ph;
    }
    eu += kernels::weighted_sum(rule.weights, du);
    ep += kernels::weighted_dot(rule.weights, dp, dp);
  }
  return {std::sqrt(eu), std::sqrt(ep)};
}

StokesSolution interpolate_exact(const DGSpace& space, const StokesCase& c) {
  StokesSolution s;
  const auto& mesh = space.mesh();
  s.u = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(space.num_velocity_dofs()));
  const auto rule = gauss_legendre_01(12);
  for (std::size_t e = 0; e < mesh.facets.size(); ++e) {
    const auto& n = space.facet_normal(e);
    for (std::size_t q = 0; q < rule.size(); ++q) {
      const auto x = space.facet_point(e, rule.points[q]);
      const auto u = c.velocity(x);
      const double w = rule.weights[q] * space.facet_length(e) * (u[0] * n[0] + u[1] * n[1]);
      s.u[static_cast<Eigen::Index>(2 * e)] += w;
      s.u[static_cast<Eigen::Index>(2 * e + 1)] += w * edge_weight(1, rule.points[q]);
    }
  }
  s.p = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(mesh.num_triangles()));
  for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
    const auto choice = rule_for(space, c, t, 8);
    const auto r = element_rule(mesh, t, choice.degree, choice.split);
    double sum = 0.0;
    for (std::size_t q = 0; q < r.weights.size(); ++q) sum += r.weights[q] * (c.p.evaluate(r.points[q]) - c.p_mean);
    s.p[static_cast<Eigen::Index>(t)] = sum / space.area(t);
  }
  s.max_divergence = max_elementwise_divergence(space, s.u);
  s.max_normal_jump = max_normal_jump(space, s.u);
  return s;
}

// --- study ---------------------------------------------------------------------------

std::string to_string(MeshKind k) { return k == MeshKind::shishkin ? "shishkin" : "uniform"; }

std::vector<StudyRow> convergence_study(const std::vector<double>& eps, const std::vector<int>& Ns, MeshKind kind,
                                        const StudyOptions& opts) {
  if (eps.empty() || Ns.empty()) throw std::invalid_argument("study lists must be nonempty");
  std::vector<StudyRow> rows;
  for (double e : eps) {
    const StokesCase c = manufactured_case(e);
    std::optional<StudyRow> prev;
    for (int N : Ns) {
      StudyRow row;
      row.epsilon = e;
      row.mesh_kind = kind;
      row.N = N;
      Mesh2D mesh;
      if (kind == MeshKind::shishkin) {
        ShishkinParams sp;
        sp.N = N;
        sp.epsilon = e;
        sp.tau = opts.tau;
        sp.log = opts.tau_log;
        row.tau = sp.transition();
        mesh = build_shishkin(sp);
      } else {
        row.tau = 0.5;
        mesh = build_uniform(N);
      }
      row.sigma = aspect_ratio(row.tau);
      row.gamma = opts.gamma ? *opts.gamma : penalty(row.sigma, 1, opts.gamma_log);
      const DGSpace space(std::move(mesh));
      row.ndof = space.num_unknowns();
      const auto sys = assemble(space, c, row.gamma, opts.quad_degree, opts.facet_scale);
      const auto sol = solve(space, sys);
      const auto err = errors(space, sol, c, opts.quad_degree);
      row.err_grad_u = err.grad_u;
      row.err_p = err.p;
      row.max_divergence = sol.max_divergence;
      row.max_normal_jump = sol.max_normal_jump;
      row.relative_residual = sol.relative_residual;
      if (prev && prev->N > 0) {
        const double ratio = std::log2(static_cast<double>(N) / prev->N);
        row.rate_u = std::log2(prev->err_grad_u / row.err_grad_u) / ratio;
        row.rate_p = std::log2(prev->err_p / row.err_p) / ratio;
      }
      rows.push_back(row);
      prev = row;
    }
  }
  return rows;
}

void write_study_csv(std::ostream& out, const std::vector<StudyRow>& rows) {
  out << "epsilon,mesh_kind,N,ndof,tau,sigma,gamma,err_grad_u,err_p,rate_u,rate_p\n";
  for (const auto& r : rows) {
    out << to_string(r.epsilon) << ',' << to_string(r.mesh_kind) << ',' << r.N << ',' << r.ndof << ','
        << to_string(r.tau) << ',' << to_string(r.sigma) << ',' << to_string(r.gamma) << ',' << to_string(r.err_grad_u)
        << ',' << to_string(r.err_p) << ',' << (r.rate_u ? to_string(*r.rate_u) : "") << ','
        << (r.rate_p ? to_string(*r.rate_p) : "") << '\n';
  }
}

}  // namespace bdmlab
