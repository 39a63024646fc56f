#include "bdmlab/polyspace.hpp"

#include <cmath>
#include <map>
#include <numbers>

#include "bdmlab/kernels.hpp"

namespace bdmlab {

std::string to_string(SpaceKind k) {
  switch (k) {
    case SpaceKind::Pk: return "Pk";
    case SpaceKind::Sk: return "Sk";
    case SpaceKind::Nk: return "Nk";
    case SpaceKind::Qk: return "Qk";
    case SpaceKind::PkFacet: return "Pk_facet";
  }
  return "?";
}

namespace {

// Column layout of vector fields of degree <= k: component-major over the
// graded monomials.
struct VectorLayout {
  int dim;
  std::vector<MultiIndex> monomials;
  std::map<MultiIndex, std::size_t, GradedLess> position;

  VectorLayout(int d, int k) : dim(d), monomials(multi_indices_up_to(d, k)) {
    for (std::size_t i = 0; i < monomials.size(); ++i) position[monomials[i]] = i;
  }
  std::size_t size() const { return monomials.size() * static_cast<std::size_t>(dim); }
  std::size_t column(int comp, const MultiIndex& a) const {
    return static_cast<std::size_t>(comp) * monomials.size() + position.at(a);
  }
  VectorPoly<Rational> field(const std::vector<Rational>& coeffs) const {
    VectorPoly<Rational> v(dim);
    for (int c = 0; c < dim; ++c) {
      for (std::size_t m = 0; m < monomials.size(); ++m) v[c].add_term(monomials[m], coeffs[static_cast<std::size_t>(c) * monomials.size() + m]);
    }
    return v;
  }
};

std::vector<VectorPoly<Rational>> nullspace_fields(const Matrix<Rational>& constraints, const VectorLayout& layout) {
  std::vector<VectorPoly<Rational>> out;
  for (const auto& x : nullspace(constraints)) out.push_back(layout.field(x));
  return out;
}

}  // namespace

Matrix<Rational> coefficient_matrix(const std::vector<VectorPoly<Rational>>& fields, int k) {
  if (fields.empty()) return {};
  const VectorLayout layout(fields.front().dim(), k);
  Matrix<Rational> m(fields.size(), layout.size());
  for (std::size_t r = 0; r < fields.size(); ++r) {
    for (int c = 0; c < layout.dim; ++c) {
      for (const auto& [a, coef] : fields[r][c].terms()) {
        if (total_degree(a) > k) throw std::invalid_argument("field degree exceeds coefficient layout");
        m(r, layout.column(c, a)) = coef;
      }
    }
  }
  return m;
}

SpaceBasis<Rational> basis_Pk(int dim, int k) {
  SpaceBasis<Rational> b;
  b.kind = SpaceKind::Pk;
  b.order = k;
  for (const auto& a : multi_indices_up_to(dim, k)) b.scalars.push_back(Polynomial<Rational>::monomial(dim, a, 1));
  return b;
}

SpaceBasis<Rational> basis_Pk_vector(int dim, int k) {
  SpaceBasis<Rational> b;
  b.kind = SpaceKind::Pk;
  b.order = k;
  for (int c = 0; c < dim; ++c) {
    for (const auto& a : multi_indices_up_to(dim, k)) {
      b.fields.push_back(axis_field(dim, c, Polynomial<Rational>::monomial(dim, a, 1)));
    }
  }
  return b;
}

SpaceBasis<Rational> basis_Sk(int dim, int k) {
  SpaceBasis<Rational> b;
  b.kind = SpaceKind::Sk;
  b.order = k;
  if (k < 0) return b;
  const VectorLayout layout(dim, k);
  const auto targets = multi_indices_up_to(dim, k + 1);
  std::map<MultiIndex, std::size_t, GradedLess> row_of;
  for (std::size_t i = 0; i < targets.size(); ++i) row_of[targets[i]] = i;
  // p . x = sum_c x_c p_c: the coefficient of x^gamma collects p_c[gamma - e_c].
  Matrix<Rational> m(targets.size(), layout.size());
  for (int c = 0; c < dim; ++c) {
    for (const auto& a : layout.monomials) {
      MultiIndex g = a;
      g[static_cast<std::size_t>(c)] += 1;
      m(row_of.at(g), layout.column(c, a)) = 1;
    }
  }
  b.fields = nullspace_fields(m, layout);
  return b;
}

SpaceBasis<Rational> basis_Nk(int dim, int k) {
  SpaceBasis<Rational> b;
  b.kind = SpaceKind::Nk;
  b.order = k;
  if (k < 1) return b;
  std::vector<VectorPoly<Rational>> candidates = basis_Pk_vector(dim, k - 1).fields;
  const auto s = basis_Sk(dim, k).fields;
  candidates.insert(candidates.end(), s.begin(), s.end());
  // Keep each candidate that raises the rank; P_{k-1}^d comes first and is kept whole.
  std::size_t current_rank = 0;
  for (const auto& f : candidates) {
    auto trial = b.fields;
    trial.push_back(f);
    const std::size_t r = rank(coefficient_matrix(trial, k));
    if (r > current_rank) {
      b.fields.push_back(f);
      current_rank = r;
    }
  }
  return b;
}

SpaceBasis<Rational> basis_Qk(const Simplex& s, int k) {
  SpaceBasis<Rational> b;
  b.kind = SpaceKind::Qk;
  b.order = k;
  const int d = s.dim();
  const VectorLayout layout(d, k);
  std::vector<std::vector<Rational>> rows;

  // Divergence: coefficient of x^gamma in sum_c d/dx_c z_c.
  for (const auto& g : multi_indices_up_to(d, k - 1)) {
    std::vector<Rational> row(layout.size());
    for (int c = 0; c < d; ++c) {
      MultiIndex a = g;
      a[static_cast<std::size_t>(c)] += 1;
      row[layout.column(c, a)] = a[static_cast<std::size_t>(c)];
    }
    rows.push_back(std::move(row));
  }
  // Normal traces: (z . w_i) o chart_i vanishes identically.
  for (int i = 0; i <= d; ++i) {
    const auto w = s.scaled_normal(i);
    const FacetMonomials<Rational> fm(s.facet_chart(i), k);
    const auto facet_monomials = multi_indices_up_to(d - 1, k);
    std::map<MultiIndex, std::size_t, GradedLess> pos;
    for (std::size_t j = 0; j < facet_monomials.size(); ++j) pos[facet_monomials[j]] = j;
    std::vector<std::vector<Rational>> block(facet_monomials.size(), std::vector<Rational>(layout.size()));
    for (int c = 0; c < d; ++c) {
      if (sgn(w[static_cast<std::size_t>(c)]) == 0) continue;
      for (const auto& a : layout.monomials) {
        for (const auto& [beta, coef] : fm.composed(a).terms()) {
          block[pos.at(beta)][layout.column(c, a)] += w[static_cast<std::size_t>(c)] * coef;
        }
      }
    }
    for (auto& r : block) rows.push_back(std::move(r));
  }
  Matrix<Rational> m(rows.size(), layout.size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (std::size_t c = 0; c < layout.size(); ++c) m(r, c) = rows[r][c];
  }
  b.fields = nullspace_fields(m, layout);
  return b;
}

Rational integrate_poly(const Polynomial<Rational>& p, const Simplex& s) {
  if (p.dim() != s.dim()) throw std::invalid_argument("polynomial and simplex dimensions differ");
  return Rational(integrate_unit_simplex(compose(p, s.chart())) * abs(s.chart_determinant()));
}

double integrate_poly_on_facet(const Polynomial<Rational>& p, const Simplex& s, int i) {
  const auto w = s.scaled_normal(i);
  double measure = 0.0;
  for (const auto& c : w) measure += to_double(c) * to_double(c);
  measure = std::sqrt(measure);
  return to_double(integrate_unit_simplex(compose(p, s.facet_chart(i)))) * measure;
}

Rational facet_flux_moment(const VectorPoly<Rational>& v, const Simplex& s, int i, const Polynomial<Rational>& z) {
  const auto w = s.scaled_normal(i);
  const auto flux = compose(v.dot(std::span<const Rational>(w)), s.facet_chart(i));
  return integrate_unit_simplex(flux * z);
}

// ---------------------------------------------------------------------------

template <class T>
SimplexMoments<T>::SimplexMoments(const AffineChart<T>& chart, T jacobian, int max_degree)
    : dim_(chart.dim), max_degree_(max_degree) {
  const auto alphas = multi_indices_up_to(dim_, max_degree);
  std::map<MultiIndex, Polynomial<T>, GradedLess> composed;
  std::vector<Polynomial<T>> linear;
  for (int i = 0; i < dim_; ++i) {
    Polynomial<T> li = Polynomial<T>::constant(dim_, chart.offset[static_cast<std::size_t>(i)]);
    for (int j = 0; j < dim_; ++j) li += Polynomial<T>::variable(dim_, j) * chart.a(i, j);
    linear.push_back(std::move(li));
  }
  for (const auto& a : alphas) {
    Polynomial<T> p(dim_);
    if (total_degree(a) == 0) {
      p = Polynomial<T>::constant(dim_, from_int<T>(1));
    } else {
      int j = 0;
      while (a[static_cast<std::size_t>(j)] == 0) ++j;
      MultiIndex prev = a;
      prev[static_cast<std::size_t>(j)] -= 1;
      p = composed.at(prev) * linear[static_cast<std::size_t>(j)];
    }
    table_.emplace(a, integrate_unit_simplex(p) * jacobian);
    composed.emplace(a, std::move(p));
  }
}

template <class T>
const T& SimplexMoments<T>::moment(const MultiIndex& alpha) const {
  auto it = table_.find(alpha);
  if (it == table_.end()) throw std::out_of_range("moment degree exceeds table");
  return it->second;
}

template <class T>
T SimplexMoments<T>::integrate(const Polynomial<T>& p) const {
  T sum = from_int<T>(0);
  for (const auto& [a, c] : p.terms()) sum += c * moment(a);
  return sum;
}

template <class T>
FacetMonomials<T>::FacetMonomials(const AffineChart<T>& chart, int max_degree)
    : dim_(chart.dim), max_degree_(max_degree), alphas_(multi_indices_up_to(chart.dim, max_degree)) {
  const int m = chart.param_dim;
  std::vector<Polynomial<T>> linear;
  for (int i = 0; i < dim_; ++i) {
    Polynomial<T> li = Polynomial<T>::constant(m, chart.offset[static_cast<std::size_t>(i)]);
    for (int j = 0; j < m; ++j) li += Polynomial<T>::variable(m, j) * chart.a(i, j);
    linear.push_back(std::move(li));
  }
  std::map<MultiIndex, std::size_t, GradedLess> where;
  for (const auto& a : alphas_) {
    Polynomial<T> p(m);
    if (total_degree(a) == 0) {
      p = Polynomial<T>::constant(m, from_int<T>(1));
    } else {
      int j = 0;
      while (a[static_cast<std::size_t>(j)] == 0) ++j;
      MultiIndex prev = a;
      prev[static_cast<std::size_t>(j)] -= 1;
      p = composed_[where.at(prev)] * linear[static_cast<std::size_t>(j)];
    }
    where[a] = composed_.size();
    composed_.push_back(std::move(p));
  }
}

template <class T>
const Polynomial<T>& FacetMonomials<T>::composed(const MultiIndex& alpha) const {
  for (std::size_t i = 0; i < alphas_.size(); ++i) {
    if (alphas_[i] == alpha) return composed_[i];
  }
  throw std::out_of_range("facet monomial degree exceeds table");
}

template <class T>
T FacetMonomials<T>::moment(const MultiIndex& alpha, const MultiIndex& beta) const {
  const auto& p = composed(alpha);
  T sum = from_int<T>(0);
  for (const auto& [g, c] : p.terms()) {
    sum += c * unit_simplex_monomial_integral<T>(p.dim(), {g[0] + beta[0], g[1] + beta[1], g[2] + beta[2]});
  }
  return sum;
}

template class SimplexMoments<Rational>;
template class SimplexMoments<double>;
template class FacetMonomials<Rational>;
template class FacetMonomials<double>;

// ---------------------------------------------------------------------------

QuadratureRule gauss_legendre_01(int n) {
  if (n < 1) throw std::invalid_argument("Gauss rule needs at least one point");
  QuadratureRule r;
  r.dim = 1;
  r.degree = 2 * n - 1;
  r.points.resize(static_cast<std::size_t>(n));
  r.weights.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    // Newton iteration on P_n from the Chebyshev-type initial guess.
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 1.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      if (n == 1) p1 = x, p0 = 1.0;
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::fabs(dx) < 1e-16) break;
    }
    {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
    }
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    r.points[static_cast<std::size_t>(n - 1 - i)] = 0.5 * (x + 1.0);
    r.weights[static_cast<std::size_t>(n - 1 - i)] = 0.5 * w;
  }
  return r;
}

QuadratureRule quad_rule(int dim, int degree) {
  if (degree < 0 || degree > max_quadrature_degree) {
    throw std::invalid_argument("unsupported quadrature degree " + std::to_string(degree));
  }
  if (dim < 1 || dim > 3) throw std::invalid_argument("quadrature dimension must be 1, 2 or 3");
  QuadratureRule r;
  r.dim = dim;
  r.degree = degree;
  if (dim == 1) {
    r = gauss_legendre_01((degree + 2) / 2);
    r.degree = degree;
    return r;
  }
  if (dim == 2) {
    const auto g = gauss_legendre_01((degree + 3) / 2);
    for (std::size_t a = 0; a < g.size(); ++a) {
      for (std::size_t b = 0; b < g.size(); ++b) {
        const double u = g.points[a], v = g.points[b];
        r.points.push_back(u);
        r.points.push_back(v * (1.0 - u));
        r.weights.push_back(g.weights[a] * g.weights[b] * (1.0 - u));
      }
    }
    return r;
  }
  const auto g = gauss_legendre_01((degree + 4) / 2);
  for (std::size_t a = 0; a < g.size(); ++a) {
    for (std::size_t b = 0; b < g.size(); ++b) {
      for (std::size_t c = 0; c < g.size(); ++c) {
        const double u = g.points[a], v = g.points[b], w = g.points[c];
        r.points.push_back(u);
        r.points.push_back(v * (1.0 - u));
        r.points.push_back(w * (1.0 - u) * (1.0 - v));
        r.weights.push_back(g.weights[a] * g.weights[b] * g.weights[c] * (1.0 - u) * (1.0 - u) * (1.0 - v));
      }
    }
  }
  return r;
}

double integrate_field(const ScalarField& f, const std::vector<PointD>& v, int degree) {
  const int d = static_cast<int>(v.size()) - 1;
  const auto rule = quad_rule(d, degree);
  const auto ud = static_cast<std::size_t>(d);
  Matrix<double> e(ud, ud);
  for (std::size_t r = 0; r < ud; ++r) {
    for (std::size_t c = 0; c < ud; ++c) e(r, c) = v[c + 1][r] - v[0][r];
  }
  const double jac = std::fabs(determinant(e));
  std::vector<double> values(rule.size());
  PointD x(ud);
  for (std::size_t q = 0; q < rule.size(); ++q) {
    const auto s = rule.point(q);
    for (std::size_t r = 0; r < ud; ++r) {
      x[r] = v[0][r];
      for (std::size_t c = 0; c < ud; ++c) x[r] += e(r, c) * s[c];
    }
    values[q] = f(x);
  }
  return jac * kernels::weighted_sum(rule.weights, values);
}

}  // namespace bdmlab
