#include "bdmlab/estimates.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <ostream>
#include <stdexcept>

namespace bdmlab {

ElementFamily element_family_t1() {
  return {"T1", {"h1", "h2", "h3"}, [](const std::vector<Rational>& h) { return family_t1(h); }};
}

ElementFamily element_family_t2() {
  return {"T2", {"h1", "h2", "h3"}, [](const std::vector<Rational>& h) { return family_t2(h); }};
}

ElementFamily element_family_tstar() {
  return {"Tstar", {"h"}, [](const std::vector<Rational>& h) { return tstar(h.at(0)); }};
}

ElementFamily element_family_no_rvp() {
  return {"no_rvp", {"h1", "h2", "h3"}, [](const std::vector<Rational>& h) {
            return stretched_no_rvp_tetrahedron(h.at(0), h.at(1), h.at(2));
          }};
}

std::string to_string(EstimateId id) {
  switch (id) {
    case EstimateId::stability_rvp: return "stability_rvp";
    case EstimateId::stability_mac: return "stability_mac";
    case EstimateId::interpolation_rvp: return "interpolation_rvp";
    case EstimateId::interpolation_mac: return "interpolation_mac";
    case EstimateId::interpolation_axes: return "interpolation_axes";
  }
  return "?";
}

EstimateId parse_estimate_id(const std::string& s) {
  for (auto id : {EstimateId::stability_rvp, EstimateId::stability_mac, EstimateId::interpolation_rvp,
                  EstimateId::interpolation_mac, EstimateId::interpolation_axes}) {
    if (to_string(id) == s) return id;
  }
  throw std::invalid_argument("unknown estimate id: " + s);
}

double EstimateTerm::value() const { return weight * std::sqrt(std::max(norm_sq, 0.0)); }

double EstimateReport::rhs() const {
  double s = 0.0;
  for (const auto& t : rhs_terms) s += t.value();
  return s;
}

double EstimateReport::ratio() const {
  const double r = rhs();
  if (r == 0.0) return lhs == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  return lhs / r;
}

// ---------------------------------------------------------------------------

Rational l2_norm_sq(const Polynomial<Rational>& f, const Simplex& s) { return integrate_poly(f * f, s); }

Rational l2_norm_sq(const VectorPoly<Rational>& v, const Simplex& s) {
  Rational sum = 0;
  for (const auto& c : l2_norm_sq_components(v, s)) sum += c;
  return sum;
}

std::vector<Rational> l2_norm_sq_components(const VectorPoly<Rational>& v, const Simplex& s) {
  std::vector<Rational> out;
  for (const auto& c : v.components) out.push_back(c.is_zero() ? Rational(0) : l2_norm_sq(c, s));
  return out;
}

namespace {

EstimateTerm exact_term(std::string label, double weight, const Rational& norm_sq) {
  EstimateTerm t;
  t.label = std::move(label);
  t.weight = weight;
  t.exact_norm_sq = norm_sq;
  t.norm_sq = to_double(norm_sq);
  return t;
}

EstimateTerm abs_derivative_term(const std::vector<Polynomial<Rational>>& comps, const Simplex& s, int m,
                                 const std::string& label) {
  const int d = s.dim();
  std::vector<std::vector<Polynomial<Rational>>> derivs(comps.size());
  bool single = true;
  int degree = 0;
  for (std::size_t c = 0; c < comps.size(); ++c) {
    for (const auto& beta : multi_indices_exact(d, m)) {
      auto p = comps[c].derivative(beta);
      if (p.is_zero()) continue;
      degree = std::max(degree, p.degree());
      derivs[c].push_back(std::move(p));
    }
    single = single && derivs[c].size() <= 1;
  }
  if (single) {
    Rational sum = 0;
    for (const auto& list : derivs) {
      if (!list.empty()) sum += l2_norm_sq(list.front(), s);
    }
    return exact_term(label, 1.0, sum);
  }
  // |.| is not polynomial; a rule well beyond the polynomial degree keeps
  // the quadrature error far below the sweep thresholds.
  std::vector<std::vector<Polynomial<double>>> dd(derivs.size());
  for (std::size_t c = 0; c < derivs.size(); ++c) {
    for (const auto& p : derivs[c]) dd[c].push_back(p.cast<double>());
  }
  const ScalarField g = [&dd](std::span<const double> x) {
    double total = 0.0;
    for (const auto& list : dd) {
      double a = 0.0;
      for (const auto& p : list) a += std::fabs(p.evaluate<double>(x));
      total += a * a;
    }
    return total;
  };
  EstimateTerm t;
  t.label = label;
  t.norm_sq = integrate_field(g, s.vertices_double(), std::min(2 * degree + 16, max_quadrature_degree));
  return t;
}

Polynomial<Rational> directional(const Polynomial<Rational>& p, const std::vector<Rational>& dir) {
  return p.directional_derivative(std::span<const Rational>(dir));
}

VectorPoly<Rational> directional(const VectorPoly<Rational>& v, const std::vector<Rational>& dir) {
  VectorPoly<Rational> r(v.dim());
  for (int c = 0; c < v.dim(); ++c) r[c] = directional(v[c], dir);
  return r;
}

std::string alpha_label(const MultiIndex& a, int d) {
  std::string s = "dl(";
  for (int i = 0; i < d; ++i) {
    if (i) s += ",";
    s += std::to_string(a[static_cast<std::size_t>(i)]);
  }
  return s + ")";
}

}  // namespace

EstimateTerm abs_derivative_norm(const VectorPoly<Rational>& v, const Simplex& s, int m, const std::string& label) {
  return abs_derivative_term(v.components, s, m, label);
}

VectorPoly<Rational> poly_project(const VectorPoly<Rational>& v, const Simplex& s, int m) {
  if (m < 0) throw std::invalid_argument("projection degree must be nonnegative");
  VectorPoly<Rational> w(v.dim());
  for (int c = 0; c < v.dim(); ++c) w[c] = l2_project_scalar(v[c], s, m);
  return w;
}

std::vector<std::vector<Rational>> rvp_directions(const Simplex& s, const RegularityOptions& opts) {
  const auto report = rvp_report(s, opts);
  if (!report.regular_vertex) throw std::invalid_argument("element has no regular vertex");
  const auto e = s.edge_matrix_from(*report.regular_vertex);
  std::vector<std::vector<Rational>> dirs;
  for (std::size_t c = 0; c < e.cols(); ++c) {
    std::vector<Rational> l(e.rows());
    for (std::size_t r = 0; r < e.rows(); ++r) l[r] = e(r, c);
    dirs.push_back(std::move(l));
  }
  return dirs;
}

std::vector<std::vector<Rational>> axis_directions(const std::vector<Rational>& h) {
  std::vector<std::vector<Rational>> dirs;
  for (std::size_t i = 0; i < h.size(); ++i) {
    std::vector<Rational> l(h.size(), Rational(0));
    l[i] = h[i];
    dirs.push_back(std::move(l));
  }
  return dirs;
}

std::vector<EstimateTerm> rhs_directional(const VectorPoly<Rational>& v, const Simplex& s, int m,
                                          const std::vector<std::vector<Rational>>& scaled_dirs) {
  const int d = s.dim();
  if (static_cast<int>(scaled_dirs.size()) != d) throw std::invalid_argument("need one direction per dimension");
  std::vector<EstimateTerm> terms;
  for (const auto& a : multi_indices_exact(d, m + 1)) {
    VectorPoly<Rational> w = v;
    for (int i = 0; i < d; ++i) {
      for (int n = 0; n < a[static_cast<std::size_t>(i)]; ++n) w = directional(w, scaled_dirs[static_cast<std::size_t>(i)]);
    }
    terms.push_back(exact_term(alpha_label(a, d), 1.0, l2_norm_sq(w, s)));
  }
  auto div_term = abs_derivative_term({v.divergence()}, s, m, "hT_div");
  div_term.weight = std::pow(s.diameter(), m + 1);
  terms.push_back(std::move(div_term));
  return terms;
}

std::vector<EstimateTerm> rhs_rvp(const VectorPoly<Rational>& v, const Simplex& s, int m,
                                  const RegularityOptions& opts) {
  return rhs_directional(v, s, m, rvp_directions(s, opts));
}

std::vector<EstimateTerm> rhs_mac(const VectorPoly<Rational>& v, const Simplex& s, int m) {
  auto t = abs_derivative_norm(v, s, m + 1, "hT_D");
  t.weight = std::pow(s.diameter(), m + 1);
  return {t};
}

Rational stability_lhs_sq(const VectorPoly<Rational>& v, const BDMElement& el) {
  return l2_norm_sq(el.interpolate(v), el.simplex());
}

std::vector<EstimateTerm> stability_rhs_rvp(const VectorPoly<Rational>& v, const Simplex& s,
                                            const std::vector<std::vector<Rational>>& scaled_dirs) {
  std::vector<EstimateTerm> terms;
  terms.push_back(exact_term("v", 1.0, l2_norm_sq(v, s)));
  for (std::size_t j = 0; j < scaled_dirs.size(); ++j) {
    terms.push_back(exact_term("h" + std::to_string(j + 1) + "_dl" + std::to_string(j + 1), 1.0,
                               l2_norm_sq(directional(v, scaled_dirs[j]), s)));
  }
  terms.push_back(exact_term("hT_div", s.diameter(), l2_norm_sq(v.divergence(), s)));
  return terms;
}

std::vector<EstimateTerm> stability_rhs_mac(const VectorPoly<Rational>& v, const Simplex& s) {
  std::vector<EstimateTerm> terms;
  terms.push_back(exact_term("v", 1.0, l2_norm_sq(v, s)));
  for (int j = 0; j < s.dim(); ++j) {
    terms.push_back(exact_term("hT_dx" + std::to_string(j + 1), s.diameter(), l2_norm_sq(v.derivative(j), s)));
  }
  return terms;
}

EstimateReport evaluate_estimate(const EstimateSpec& spec, const Simplex& s, const VectorPoly<Rational>& v,
                                 const std::vector<Rational>& params) {
  if (spec.m < 0 || spec.m > spec.k) throw std::invalid_argument("need 0 <= m <= k");
  const BDMElement el(s, spec.k, spec.variant);
  const auto iv = el.interpolate(v);
  EstimateReport r;
  r.estimate_id = spec.id;
  for (const auto& p : params) r.element_params.push_back(to_double(p));
  const bool stability = spec.id == EstimateId::stability_rvp || spec.id == EstimateId::stability_mac;
  const Rational lhs_sq = stability ? l2_norm_sq(iv, s) : l2_norm_sq(v - iv, s);
  r.exact_lhs_sq = lhs_sq;
  r.lhs = std::sqrt(to_double(lhs_sq));
  switch (spec.id) {
    case EstimateId::stability_rvp: r.rhs_terms = stability_rhs_rvp(v, s, rvp_directions(s, spec.regularity)); break;
    case EstimateId::stability_mac: r.rhs_terms = stability_rhs_mac(v, s); break;
    case EstimateId::interpolation_rvp: r.rhs_terms = rhs_rvp(v, s, spec.m, spec.regularity); break;
    case EstimateId::interpolation_mac: r.rhs_terms = rhs_mac(v, s, spec.m); break;
    case EstimateId::interpolation_axes:
      if (static_cast<int>(params.size()) != s.dim()) throw std::invalid_argument("axis estimate needs h per axis");
      r.rhs_terms = rhs_directional(v, s, spec.m, axis_directions(params));
      break;
  }
  return r;
}

// ---------------------------------------------------------------------------

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::bounded: return "bounded";
    case Verdict::diverging: return "diverging";
    case Verdict::inconclusive: return "inconclusive";
  }
  return "inconclusive";
}

Verdict classify_ratios(const std::vector<double>& ratios, double factor) {
  if (ratios.empty()) return Verdict::inconclusive;
  bool increasing = ratios.size() > 1;
  for (std::size_t i = 1; i < ratios.size(); ++i) increasing = increasing && ratios[i] > ratios[i - 1];
  if (increasing && ratios.back() > factor * ratios.front()) return Verdict::diverging;
  const auto [lo, hi] = std::minmax_element(ratios.begin(), ratios.end());
  if (*hi == 0.0) return Verdict::bounded;
  if (*lo > 0.0 && std::isfinite(*hi) && *hi < factor * *lo) return Verdict::bounded;
  return Verdict::inconclusive;
}

SweepResult sweep(const ElementFamily& family, const FieldGenerator& field, const EstimateSpec& spec,
                  const std::vector<std::vector<Rational>>& grid) {
  if (grid.empty()) throw std::invalid_argument("sweep grid is empty");
  SweepResult r;
  r.family = family.kind;
  r.param_names = family.param_names;
  r.grid = grid;
  for (const auto& p : grid) {
    const Simplex s = family.make(p);
    r.reports.push_back(evaluate_estimate(spec, s, field(p, s), p));
    r.ratios.push_back(r.reports.back().ratio());
  }
  r.verdict = classify_ratios(r.ratios);
  return r;
}

void write_sweep_csv(std::ostream& out, const SweepResult& r) {
  out << "estimate_id";
  for (const auto& n : r.param_names) out << ',' << n;
  out << ",lhs";
  if (!r.reports.empty()) {
    for (const auto& t : r.reports.front().rhs_terms) out << ',' << t.label;
  }
  out << ",ratio,verdict\n";
  for (std::size_t i = 0; i < r.reports.size(); ++i) {
    const auto& rep = r.reports[i];
    out << to_string(rep.estimate_id);
    for (const auto& p : r.grid[i]) out << ',' << to_string(to_double(p));
    out << ',' << to_string(rep.lhs);
    for (const auto& t : rep.rhs_terms) out << ',' << to_string(t.value());
    out << ',' << to_string(rep.ratio()) << ',' << to_string(r.verdict) << '\n';
  }
}

// ---------------------------------------------------------------------------

namespace {

Polynomial<Rational> random_poly(std::mt19937_64& rng, int dim, int k, int range) {
  std::uniform_int_distribution<int> dist(-range, range);
  Polynomial<Rational> p(dim);
  for (const auto& a : multi_indices_up_to(dim, k)) p.add_term(a, Rational(dist(rng)));
  return p;
}

}  // namespace

VectorPoly<Rational> random_poly_field(std::mt19937_64& rng, int dim, int k, int range) {
  VectorPoly<Rational> v(dim);
  for (int c = 0; c < dim; ++c) v[c] = random_poly(rng, dim, k, range);
  return v;
}

VectorPoly<Rational> random_divergence_free_field(std::mt19937_64& rng, int dim, int k, int range) {
  VectorPoly<Rational> v(dim);
  if (dim == 2) {
    const auto psi = random_poly(rng, 2, k + 1, range);
    v[0] = psi.derivative(1);
    v[1] = -psi.derivative(0);
    return v;
  }
  if (dim != 3) throw std::invalid_argument("dimension must be 2 or 3");
  const auto a = random_poly_field(rng, 3, k + 1, range);
  v[0] = a[2].derivative(1) - a[1].derivative(2);
  v[1] = a[0].derivative(2) - a[2].derivative(0);
  v[2] = a[1].derivative(0) - a[0].derivative(1);
  return v;
}

Simplex random_mac_simplex(std::mt19937_64& rng, int dim, double max_angle_bound) {
  std::uniform_int_distribution<int> coord(-8, 8);
  std::uniform_int_distribution<int> shrink(0, 4);
  for (int attempt = 0; attempt < 100000; ++attempt) {
    std::vector<Rational> scale;
    for (int j = 0; j < dim; ++j) scale.push_back(Rational(1, 1L << shrink(rng)));
    std::vector<Point> verts;
    for (int v = 0; v <= dim; ++v) {
      Point p;
      for (int j = 0; j < dim; ++j) p.push_back(Rational(coord(rng)) * scale[static_cast<std::size_t>(j)]);
      verts.push_back(std::move(p));
    }
    try {
      Simplex s(std::move(verts));
      if (max_angle(s) <= max_angle_bound) return s;
    } catch (const std::invalid_argument&) {
    }
  }
  throw std::runtime_error("could not draw a simplex satisfying the angle bound");
}

}  // namespace bdmlab
