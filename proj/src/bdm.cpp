#include "bdmlab/bdm.hpp"

#include <cmath>
#include <stdexcept>

namespace bdmlab {

std::string to_string(DofVariant v) { return v == DofVariant::nedelec ? "nedelec" : "bdm_original"; }

DofVariant parse_dof_variant(const std::string& s) {
  if (s == "nedelec") return DofVariant::nedelec;
  if (s == "bdm_original" || s == "original") return DofVariant::bdm_original;
  throw std::invalid_argument("unknown DOF variant: " + s);
}

namespace {

// Moment tables sized for fields of a given degree.
struct MomentTables {
  std::vector<FacetMonomials<Rational>> facets;
  SimplexMoments<Rational> volume;

  MomentTables(const Simplex& s, int field_degree, int weight_degree)
      : volume(s.chart(), abs(s.chart_determinant()), field_degree + weight_degree) {
    for (int i = 0; i <= s.dim(); ++i) facets.emplace_back(s.facet_chart(i), field_degree);
  }
};

Rational apply_dof(const DofFunctional& dof, const VectorPoly<Rational>& v, const MomentTables& t,
                   const std::vector<std::vector<Rational>>& normals) {
  Rational sum = 0;
  const int d = v.dim();
  if (dof.kind == DofFunctional::Kind::facet) {
    const auto& fm = t.facets[static_cast<std::size_t>(dof.facet)];
    const auto& w = normals[static_cast<std::size_t>(dof.facet)];
    for (int c = 0; c < d; ++c) {
      const Rational& wc = w[static_cast<std::size_t>(c)];
      if (sgn(wc) == 0) continue;
      for (const auto& [a, coef] : v[c].terms()) sum += wc * coef * fm.moment(a, dof.beta);
    }
    return sum;
  }
  for (int c = 0; c < d; ++c) {
    for (const auto& [a, ca] : v[c].terms()) {
      for (const auto& [g, cg] : dof.weight[c].terms()) {
        sum += ca * cg * t.volume.moment({a[0] + g[0], a[1] + g[1], a[2] + g[2]});
      }
    }
  }
  return sum;
}

int weight_degree(const std::vector<DofFunctional>& dofs) {
  int deg = 0;
  for (const auto& dof : dofs) {
    if (dof.kind != DofFunctional::Kind::facet) deg = std::max(deg, dof.weight.degree());
  }
  return deg;
}

}  // namespace

BDMElement::BDMElement(Simplex s, int k, DofVariant variant)
    : simplex_(std::move(s)), k_(k), variant_(variant) {
  if (k < 1) throw std::invalid_argument("BDM order must be at least 1");
  const int d = simplex_.dim();
  for (int i = 0; i <= d; ++i) {
    for (const auto& beta : multi_indices_up_to(d - 1, k)) {
      DofFunctional f;
      f.kind = DofFunctional::Kind::facet;
      f.facet = i;
      f.beta = beta;
      dofs_.push_back(f);
    }
  }
  if (variant == DofVariant::nedelec) {
    for (auto& z : basis_Nk(d, k - 1).fields) {
      DofFunctional f;
      f.kind = DofFunctional::Kind::interior;
      f.weight = std::move(z);
      dofs_.push_back(std::move(f));
    }
  } else {
    for (const auto& q : basis_Pk(d, k - 1).scalars) {
      if (q.degree() < 1) continue;
      VectorPoly<Rational> grad(d);
      for (int c = 0; c < d; ++c) grad[c] = q.derivative(c);
      DofFunctional f;
      f.kind = DofFunctional::Kind::gradient;
      f.weight = std::move(grad);
      dofs_.push_back(std::move(f));
    }
    for (auto& z : basis_Qk(simplex_, k).fields) {
      DofFunctional f;
      f.kind = DofFunctional::Kind::interior;
      f.weight = std::move(z);
      dofs_.push_back(std::move(f));
    }
  }

  monomials_ = multi_indices_up_to(d, k);
  const std::size_t n = monomials_.size() * static_cast<std::size_t>(d);
  if (dofs_.size() != n) {
    throw UnisolvenceError("DOF count " + std::to_string(dofs_.size()) + " differs from dim P_k^d = " +
                           std::to_string(n));
  }
  const MomentTables tables(simplex_, k, weight_degree(dofs_));
  std::vector<std::vector<Rational>> normals;
  for (int i = 0; i <= d; ++i) normals.push_back(simplex_.scaled_normal(i));
  vandermonde_ = Matrix<Rational>(n, n);
  for (int c = 0; c < d; ++c) {
    for (std::size_t m = 0; m < monomials_.size(); ++m) {
      const auto basis = axis_field(d, c, Polynomial<Rational>::monomial(d, monomials_[m], 1));
      const std::size_t col = static_cast<std::size_t>(c) * monomials_.size() + m;
      for (std::size_t r = 0; r < n; ++r) vandermonde_(r, col) = apply_dof(dofs_[r], basis, tables, normals);
    }
  }
  try {
    lu_ = std::make_shared<const LUFactorization<Rational>>(vandermonde_);
  } catch (const SingularMatrixError&) {
    throw UnisolvenceError("BDM Vandermonde matrix is singular");
  }
}

std::size_t BDMElement::facet_dof_count() const {
  std::size_t n = 0;
  for (const auto& dof : dofs_) n += dof.kind == DofFunctional::Kind::facet ? 1 : 0;
  return n;
}

std::vector<Rational> BDMElement::evaluate_dofs(const VectorPoly<Rational>& v, int degree) const {
  const MomentTables tables(simplex_, std::max(degree, 0), weight_degree(dofs_));
  std::vector<std::vector<Rational>> normals;
  for (int i = 0; i <= dim(); ++i) normals.push_back(simplex_.scaled_normal(i));
  std::vector<Rational> out;
  out.reserve(dofs_.size());
  for (const auto& dof : dofs_) out.push_back(apply_dof(dof, v, tables, normals));
  return out;
}

std::vector<Rational> BDMElement::dof_values(const VectorPoly<Rational>& v) const {
  if (v.dim() != dim()) throw std::invalid_argument("field dimension does not match element");
  return evaluate_dofs(v, v.degree());
}

std::vector<double> BDMElement::dof_values(const VectorField& v, int quad_degree) const {
  if (quad_degree < 0) throw std::invalid_argument("quadrature degree is required for non-polynomial fields");
  const int d = dim();
  const auto ud = static_cast<std::size_t>(d);
  std::vector<double> out;
  out.reserve(dofs_.size());
  const auto facet_rule = quad_rule(d - 1, std::min(quad_degree + k_, max_quadrature_degree));
  const auto cell_rule = quad_rule(d, std::min(quad_degree + k_, max_quadrature_degree));
  const auto chart = simplex_.chart();
  const double jac = std::fabs(to_double(simplex_.chart_determinant()));
  auto map_point = [&](const AffineChart<Rational>& ch, std::span<const double> s) {
    PointD x(ud);
    for (std::size_t r = 0; r < ud; ++r) {
      x[r] = to_double(ch.offset[r]);
      for (int j = 0; j < ch.param_dim; ++j) x[r] += to_double(ch.a(static_cast<int>(r), j)) * s[static_cast<std::size_t>(j)];
    }
    return x;
  };
  for (const auto& dof : dofs_) {
    double sum = 0.0;
    if (dof.kind == DofFunctional::Kind::facet) {
      const auto fchart = simplex_.facet_chart(dof.facet);
      const auto w = simplex_.scaled_normal(dof.facet);
      for (std::size_t q = 0; q < facet_rule.size(); ++q) {
        const auto s = facet_rule.point(q);
        const auto fx = v(map_point(fchart, s));
        double flux = 0.0;
        for (std::size_t c = 0; c < ud; ++c) flux += fx[c] * to_double(w[c]);
        double sb = 1.0;
        for (int j = 0; j < d - 1; ++j) sb *= std::pow(s[static_cast<std::size_t>(j)], dof.beta[static_cast<std::size_t>(j)]);
        sum += facet_rule.weights[q] * flux * sb;
      }
    } else {
      const auto z = dof.weight.cast<double>();
      for (std::size_t q = 0; q < cell_rule.size(); ++q) {
        const auto x = map_point(chart, cell_rule.point(q));
        const auto fx = v(x);
        double dotp = 0.0;
        for (int c = 0; c < d; ++c) dotp += fx[static_cast<std::size_t>(c)] * z[c].evaluate<double>(std::span<const double>(x));
        sum += cell_rule.weights[q] * dotp;
      }
      sum *= jac;
    }
    out.push_back(sum);
  }
  return out;
}

VectorPoly<Rational> BDMElement::field_from_dofs(const std::vector<Rational>& dof_values) const {
  const auto coeffs = lu_->solve(dof_values);
  const int d = dim();
  VectorPoly<Rational> p(d);
  for (int c = 0; c < d; ++c) {
    for (std::size_t m = 0; m < monomials_.size(); ++m) {
      p[c].add_term(monomials_[m], coeffs[static_cast<std::size_t>(c) * monomials_.size() + m]);
    }
  }
  return p;
}

VectorPoly<Rational> BDMElement::interpolate(const VectorPoly<Rational>& v) const {
  return field_from_dofs(dof_values(v));
}

VectorPoly<double> BDMElement::interpolate(const VectorField& v, int quad_degree) const {
  const auto values = dof_values(v, quad_degree);
  std::vector<Rational> exact;
  exact.reserve(values.size());
  for (double x : values) exact.push_back(rational_from_double(x));
  return field_from_dofs(exact).cast<double>();
}

PiolaReport commutes_with_piola(const BDMElement& ref, const BDMElement& phys, const AffineMap<Rational>& map,
                                const VectorPoly<Rational>& v_ref) {
  if (ref.order() != phys.order() || ref.variant() != phys.variant()) {
    throw std::invalid_argument("elements differ in order or DOF variant");
  }
  PiolaReport r;
  r.pushed_interpolant = piola_push(map, ref.interpolate(v_ref));
  r.interpolated_push = phys.interpolate(piola_push(map, v_ref));
  r.commutes = r.pushed_interpolant == r.interpolated_push;
  return r;
}

namespace {

bool same_vertices(const Simplex& a, const Simplex& b) {
  return a.dim() == b.dim() && a.vertices() == b.vertices();
}

}  // namespace

StructuralReport structural_lemma_check(const BDMElement& el, int axis, const Polynomial<Rational>& f) {
  const Simplex& s = el.simplex();
  const bool reference = s.dim() == 2 ? same_vertices(s, reference_triangle())
                                      : same_vertices(s, reference_tetrahedron()) ||
                                            same_vertices(s, reference_tetrahedron_no_rvp());
  if (!reference) throw std::invalid_argument("structural lemma check needs a reference element");
  if (axis < 0 || axis >= s.dim()) throw std::invalid_argument("axis out of range");
  if (f.dim() != s.dim()) throw std::invalid_argument("polynomial dimension does not match element");
  if (f.depends_on(axis)) throw std::invalid_argument("f must not depend on the field's own coordinate");

  StructuralReport r;
  r.interpolant = el.interpolate(axis_field(s.dim(), axis, f));
  r.holds = true;
  for (int c = 0; c < s.dim(); ++c) {
    if (c != axis && !r.interpolant[c].is_zero()) {
      r.holds = false;
      r.detail += "component " + std::to_string(c + 1) + " is nonzero; ";
    }
  }
  if (r.interpolant[axis].depends_on(axis)) {
    r.holds = false;
    r.detail += "component " + std::to_string(axis + 1) + " depends on x" + std::to_string(axis + 1) + "; ";
  }
  return r;
}

std::vector<Rational> facet_flux_residuals(const BDMElement& el, const VectorPoly<Rational>& v) {
  const auto diff = v - el.interpolate(v);
  std::vector<Rational> out;
  for (const auto& dof : el.dofs()) {
    if (dof.kind != DofFunctional::Kind::facet) continue;
    const auto z = Polynomial<Rational>::monomial(el.dim() - 1, dof.beta, 1);
    out.push_back(facet_flux_moment(diff, el.simplex(), dof.facet, z));
  }
  return out;
}

Polynomial<Rational> l2_project_scalar(const Polynomial<Rational>& f, const Simplex& s, int m) {
  const int d = s.dim();
  const auto basis = basis_Pk(d, m).scalars;
  const std::size_t n = basis.size();
  Matrix<Rational> gram(n, n);
  std::vector<Rational> rhs(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) {
      gram(i, j) = integrate_poly(basis[i] * basis[j], s);
      gram(j, i) = gram(i, j);
    }
    rhs[i] = integrate_poly(basis[i] * f, s);
  }
  const auto c = solve(gram, rhs);
  Polynomial<Rational> p(d);
  for (std::size_t i = 0; i < n; ++i) p += basis[i] * c[i];
  return p;
}

}  // namespace bdmlab
