#include "bdmlab/verify.hpp"

#include <cmath>
#include <stdexcept>

#include "bdmlab/polyspace.hpp"

namespace bdmlab {

bool SuiteResult::passed() const {
  for (const auto& c : checks) {
    if (!c.ok) return false;
  }
  return !checks.empty();
}

void SuiteResult::add(std::string label, std::string expected, std::string computed, bool ok) {
  checks.push_back({std::move(label), std::move(expected), std::move(computed), ok});
}

namespace {

std::string h_label(const std::vector<Rational>& h) {
  std::string s = "h=(";
  for (std::size_t i = 0; i < h.size(); ++i) s += (i ? "," : "") + to_string(h[i]);
  return s + ")";
}

// Float quadrature of a polynomial over a simplex, used as an independent
// route next to the exact monomial formulas.
double quadrature_integral(const Polynomial<Rational>& p, const Simplex& s) {
  const auto pd = p.cast<double>();
  const int degree = std::max(p.degree(), 0);
  return integrate_field([&](std::span<const double> x) { return pd.evaluate<double>(x); }, s.vertices_double(), degree);
}

bool close(double a, double b, double rel) { return std::fabs(a - b) <= rel * std::max(std::fabs(b), 1e-300); }

}  // namespace

SuiteResult verify_dof_variants() {
  SuiteResult r;
  r.name = "dof-variants";
  const auto v = parse_vector_poly(2, "0; x1^3");
  const auto expected_ned = parse_vector_poly(2, "0; 1/20 - 3/5*x1 + 3/2*x1^2");
  const auto expected_orig =
      parse_vector_poly(2, "3/140*x1*(1 - x1 - 2*x2); 1/20 - 3/5*x1 + 3/2*x1^2 - 3/140*x2*(1 - 2*x1 - x2)");
  const BDMElement ned(reference_triangle(), 2, DofVariant::nedelec);
  const BDMElement orig(reference_triangle(), 2, DofVariant::bdm_original);
  const auto in = ned.interpolate(v);
  const auto io = orig.interpolate(v);
  r.add("nedelec k=2 interpolant of (0, x1^3)", expected_ned.str(), in.str(), in == expected_ned);
  r.add("bdm_original k=2 interpolant of (0, x1^3)", expected_orig.str(), io.str(), io == expected_orig);
  // both interpolants must preserve every facet moment of v
  for (const auto* el : {&ned, &orig}) {
    bool zero = true;
    for (const auto& q : facet_flux_residuals(*el, v)) zero = zero && sgn(q) == 0;
    r.add(to_string(el->variant()) + " facet moments preserved", "all zero", zero ? "all zero" : "nonzero", zero);
  }
  // k = 1: the two DOF sets coincide
  const auto w = parse_vector_poly(2, "x1*x2 - x2^2; 3*x1^2 + x2");
  const auto a = BDMElement(reference_triangle(), 1, DofVariant::nedelec).interpolate(w);
  const auto b = BDMElement(reference_triangle(), 1, DofVariant::bdm_original).interpolate(w);
  r.add("k=1 variants agree", a.str(), b.str(), a == b);
  return r;
}

SuiteResult verify_counterexample_2d(const std::vector<Rational>& hs_in) {
  SuiteResult r;
  r.name = "counterexample-2d";
  const std::vector<Rational> hs = hs_in.empty() ? std::vector<Rational>{1, Rational(1, 2), Rational(1, 8), Rational(1, 64)} : hs_in;
  const auto v = parse_vector_poly(2, "0; x1^2");
  const auto v2 = v[1];
  const auto dv2 = v2.derivative(0);
  for (const auto& h : hs) {
    const Simplex t = tstar(h);
    const auto iv = BDMElement(t, 1, DofVariant::nedelec).interpolate(v);
    VectorPoly<Rational> closed(2);
    closed[0] = Polynomial<Rational>::variable(2, 0) * Rational(1 / (2 * h));
    closed[1] = Polynomial<Rational>::variable(2, 1) * Rational(-1 / (2 * h)) + Polynomial<Rational>::constant(2, Rational(1, 3));
    const std::string hl = "h=" + to_string(h);
    r.add(hl + " interpolant", closed.str(), iv.str(), iv == closed);

    const Rational n_iv = l2_norm_sq(iv, t);
    const Rational n_v2 = l2_norm_sq(v2, t);
    const Rational n_dv2 = l2_norm_sq(dv2, t);
    const Rational e_iv = 1 / (24 * h) + h / 24;
    const Rational e_v2 = h / 15;
    const Rational e_dv2 = 2 * h / 3;
    r.add(hl + " |I v|^2", to_string(e_iv), to_string(n_iv), n_iv == e_iv);
    r.add(hl + " |v2|^2", to_string(e_v2), to_string(n_v2), n_v2 == e_v2);
    r.add(hl + " |dv2/dx1|^2", to_string(e_dv2), to_string(n_dv2), n_dv2 == e_dv2);
    const double q_iv = quadrature_integral(iv.dot(iv), t);
    const double q_v2 = quadrature_integral(v2 * v2, t);
    const double q_dv2 = quadrature_integral(dv2 * dv2, t);
    const bool agree = close(q_iv, to_double(e_iv), 1e-12) && close(q_v2, to_double(e_v2), 1e-12) &&
                       close(q_dv2, to_double(e_dv2), 1e-12);
    r.add(hl + " quadrature route", "1e-12 relative", to_string(q_iv) + "," + to_string(q_v2) + "," + to_string(q_dv2), agree);
  }
  std::vector<std::vector<Rational>> grid;
  for (int j = 1; j <= 10; ++j) grid.push_back({Rational(1, 1L << j)});
  auto sw = sweep(element_family_tstar(), [&](const auto&, const Simplex&) { return v; },
                  EstimateSpec{EstimateId::stability_mac, 1, 0, DofVariant::nedelec, {}}, grid);
  r.add("stability_mac sweep over h = 2^-1..2^-10", "diverging", to_string(sw.verdict), sw.verdict == Verdict::diverging);
  r.sweeps.push_back(std::move(sw));
  return r;
}

SuiteResult verify_counterexample_3d(const std::vector<std::vector<Rational>>& hs_in) {
  SuiteResult r;
  r.name = "counterexample-3d";
  std::vector<std::vector<Rational>> hs = hs_in;
  if (hs.empty()) {
    hs = {{1, 1, 1}, {2, 3, 7}, {Rational(1, 2), Rational(1, 3), 5}, {1, 1, 1024}, {Rational(1, 10), 4, Rational(3, 7)}};
  }
  const auto u = parse_vector_poly(3, "x1*x3; -x2*x3; 0");
  for (const auto& h : hs) {
    if (h.size() != 3) throw std::invalid_argument("3D counterexample needs (h1, h2, h3)");
    const Simplex t = stretched_no_rvp_tetrahedron(h[0], h[1], h[2]);
    const auto iu = BDMElement(t, 1, DofVariant::nedelec).interpolate(u);
    const auto closed = parse_vector_poly(3, "2/5*x1; -3/5*x2; " + to_string(Rational(-h[2] / 10)) + " + 1/5*x3") * h[2];
    const std::string hl = h_label(h);
    r.add(hl + " interpolant", closed.str(), iu.str(), iu == closed);

    // normalization: |du1/dx1|^2 = |x3|^2, pinned by an exact formula and by quadrature
    const auto x3 = Polynomial<Rational>::variable(3, 2);
    const Rational norm = l2_norm_sq(x3, t);
    const Rational norm_formula = h[0] * h[1] * h[2] * h[2] * h[2] / 20;
    const double norm_quad = quadrature_integral(x3 * x3, t);
    r.add(hl + " |x3|^2", to_string(norm_formula), to_string(norm), norm == norm_formula && close(norm_quad, to_double(norm_formula), 1e-12));

    const Rational err = l2_norm_sq(u - iu, t) / norm;
    const Rational err_closed = (38 * h[0] * h[0] + 38 * h[1] * h[1] + 21 * h[2] * h[2]) / 3150;
    r.add(hl + " |u - Iu|^2 / |x3|^2", to_string(err_closed), to_string(err), err == err_closed);

    std::vector<Rational> terms;
    for (int i = 0; i < 3; ++i) terms.push_back((l2_norm_sq(u[0].derivative(i), t) + l2_norm_sq(u[1].derivative(i), t)) / norm);
    const std::vector<Rational> terms_closed{1, 1, (h[0] * h[0] + h[1] * h[1]) / (3 * h[2] * h[2])};
    for (int i = 0; i < 3; ++i) {
      r.add(hl + " derivative term " + std::to_string(i + 1), to_string(terms_closed[static_cast<std::size_t>(i)]),
            to_string(terms[static_cast<std::size_t>(i)]), terms[static_cast<std::size_t>(i)] == terms_closed[static_cast<std::size_t>(i)]);
    }
  }
  std::vector<std::vector<Rational>> grid;
  for (int j = 0; j <= 10; ++j) grid.push_back({1, 1, Rational(1L << j)});
  auto sw = sweep(element_family_no_rvp(), [&](const auto&, const Simplex&) { return u; },
                  EstimateSpec{EstimateId::interpolation_axes, 1, 0, DofVariant::nedelec, {}}, grid);
  r.add("axis-weighted estimate sweep over h3/h1 = 2^0..2^10", "diverging", to_string(sw.verdict), sw.verdict == Verdict::diverging);
  r.sweeps.push_back(std::move(sw));
  return r;
}

SuiteResult verify_structural_lemmas(int max_k) {
  SuiteResult r;
  r.name = "structural-lemmas";
  struct Ref {
    std::string name;
    Simplex s;
  };
  const std::vector<Ref> refs{{"2D reference triangle", reference_triangle()},
                              {"3D reference tetrahedron", reference_tetrahedron()},
                              {"3D tetrahedron without regular vertex", reference_tetrahedron_no_rvp()}};
  for (const auto& ref : refs) {
    const int d = ref.s.dim();
    for (int k = 1; k <= max_k; ++k) {
      const BDMElement el(ref.s, k, DofVariant::nedelec);
      int total = 0, held = 0;
      std::string failures;
      for (int axis = 0; axis < d; ++axis) {
        for (const auto& a : multi_indices_up_to(d, k)) {
          if (a[static_cast<std::size_t>(axis)] != 0) continue;
          const auto f = Polynomial<Rational>::monomial(d, a, Rational(1));
          const auto rep = structural_lemma_check(el, axis, f);
          ++total;
          if (rep.holds) ++held;
          else failures += "axis " + std::to_string(axis + 1) + " f=" + f.str() + ": " + rep.detail;
        }
      }
      r.add(ref.name + " k=" + std::to_string(k), std::to_string(total) + "/" + std::to_string(total),
            std::to_string(held) + "/" + std::to_string(total) + (failures.empty() ? "" : " " + failures), held == total);
    }
  }
  // control: the original DOF set breaks the single-component structure
  const auto io = BDMElement(reference_triangle(), 2, DofVariant::bdm_original)
                      .interpolate(axis_field(2, 1, Polynomial<Rational>::monomial(2, {3, 0, 0}, Rational(1))));
  r.notes.push_back({"bdm_original k=2, (0, x1^3): first component", "nonzero", io[0].str(), !io[0].is_zero()});
  return r;
}

std::vector<std::string> suite_names() {
  return {"dof-variants", "counterexample-2d", "counterexample-3d", "structural-lemmas"};
}

SuiteResult run_suite(const std::string& name) {
  if (name == "dof-variants") return verify_dof_variants();
  if (name == "counterexample-2d") return verify_counterexample_2d();
  if (name == "counterexample-3d") return verify_counterexample_3d();
  if (name == "structural-lemmas") return verify_structural_lemmas();
  throw std::invalid_argument("unknown verify suite: " + name);
}

}  // namespace bdmlab
