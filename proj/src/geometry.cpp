#include "bdmlab/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <numbers>
#include <numeric>
#include <ostream>
#include <sstream>

namespace bdmlab {

namespace {

PointD to_doubles(const Point& p) {
  PointD out;
  for (const auto& c : p) out.push_back(to_double(c));
  return out;
}

double dot(const PointD& a, const PointD& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm(const PointD& a) { return std::sqrt(dot(a, a)); }

PointD sub(const PointD& a, const PointD& b) {
  PointD r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] - b[i];
  return r;
}

double angle_between(const PointD& a, const PointD& b) {
  const double c = std::clamp(dot(a, b) / (norm(a) * norm(b)), -1.0, 1.0);
  return std::acos(c);
}

Matrix<double> to_double_matrix(const Matrix<Rational>& m) {
  Matrix<double> r(m.rows(), m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t j = 0; j < m.cols(); ++j) r(i, j) = to_double(m(i, j));
  }
  return r;
}

}  // namespace

Simplex::Simplex(std::vector<Point> vertices) : vertices_(std::move(vertices)) {
  const std::size_t n = vertices_.size();
  if (n != 3 && n != 4) throw std::invalid_argument("a simplex needs 3 (triangle) or 4 (tetrahedron) vertices");
  dim_ = static_cast<int>(n) - 1;
  for (const auto& v : vertices_) {
    if (static_cast<int>(v.size()) != dim_) throw std::invalid_argument("vertex coordinate count does not match dimension");
  }
  Matrix<Rational> e(static_cast<std::size_t>(dim_), static_cast<std::size_t>(dim_));
  for (int j = 1; j <= dim_; ++j) {
    for (int i = 0; i < dim_; ++i) {
      e(static_cast<std::size_t>(i), static_cast<std::size_t>(j - 1)) = vertex(j)[static_cast<std::size_t>(i)] - vertex(0)[static_cast<std::size_t>(i)];
    }
  }
  chart_det_ = determinant(e);
  if (sgn(chart_det_) == 0) throw std::invalid_argument("degenerate simplex (zero volume)");
}

Simplex Simplex::from_doubles(const std::vector<PointD>& vertices) {
  std::vector<Point> v;
  for (const auto& p : vertices) {
    Point q;
    for (double c : p) q.push_back(rational_from_double(c));
    v.push_back(std::move(q));
  }
  return Simplex(std::move(v));
}

std::vector<PointD> Simplex::vertices_double() const {
  std::vector<PointD> out;
  for (const auto& v : vertices_) out.push_back(to_doubles(v));
  return out;
}

std::vector<int> Simplex::facet_vertices(int i) const {
  std::vector<int> out;
  for (int j = 0; j <= dim_; ++j) {
    if (j != i) out.push_back(j);
  }
  return out;
}

AffineChart<Rational> Simplex::chart() const {
  AffineChart<Rational> ch;
  ch.dim = dim_;
  ch.param_dim = dim_;
  ch.offset = vertex(0);
  ch.matrix.resize(static_cast<std::size_t>(dim_ * dim_));
  for (int r = 0; r < dim_; ++r) {
    for (int c = 0; c < dim_; ++c) {
      ch.matrix[static_cast<std::size_t>(r * dim_ + c)] = vertex(c + 1)[static_cast<std::size_t>(r)] - vertex(0)[static_cast<std::size_t>(r)];
    }
  }
  return ch;
}

AffineChart<Rational> Simplex::facet_chart(int i) const {
  const auto fv = facet_vertices(i);
  AffineChart<Rational> ch;
  ch.dim = dim_;
  ch.param_dim = dim_ - 1;
  ch.offset = vertex(fv[0]);
  ch.matrix.resize(static_cast<std::size_t>(dim_ * (dim_ - 1)));
  for (int r = 0; r < dim_; ++r) {
    for (int c = 0; c < dim_ - 1; ++c) {
      ch.matrix[static_cast<std::size_t>(r * (dim_ - 1) + c)] =
          vertex(fv[static_cast<std::size_t>(c + 1)])[static_cast<std::size_t>(r)] - vertex(fv[0])[static_cast<std::size_t>(r)];
    }
  }
  return ch;
}

std::vector<Rational> Simplex::scaled_normal(int i) const {
  const auto fv = facet_vertices(i);
  std::vector<Rational> w(static_cast<std::size_t>(dim_));
  const Point& o = vertex(fv[0]);
  if (dim_ == 2) {
    const Rational ex = vertex(fv[1])[0] - o[0];
    const Rational ey = vertex(fv[1])[1] - o[1];
    w = {ey, Rational(-ex)};
  } else {
    Point a(3), b(3);
    for (std::size_t k = 0; k < 3; ++k) {
      a[k] = vertex(fv[1])[k] - o[k];
      b[k] = vertex(fv[2])[k] - o[k];
    }
    w = {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
  }
  // Orient away from the opposite vertex.
  Rational side = 0;
  for (std::size_t k = 0; k < w.size(); ++k) side += w[k] * (vertex(i)[k] - o[k]);
  if (sgn(side) > 0) {
    for (auto& c : w) c = -c;
  }
  return w;
}

Rational Simplex::volume() const {
  Rational f = 1;
  for (int n = 2; n <= dim_; ++n) f *= n;
  return Rational(abs(chart_det_) / f);
}

double Simplex::diameter() const {
  const auto v = vertices_double();
  double d = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    for (std::size_t j = i + 1; j < v.size(); ++j) d = std::max(d, norm(sub(v[i], v[j])));
  }
  return d;
}

Matrix<Rational> Simplex::edge_matrix_from(int k) const {
  Matrix<Rational> e(static_cast<std::size_t>(dim_), static_cast<std::size_t>(dim_));
  std::size_t col = 0;
  for (int j = 0; j <= dim_; ++j) {
    if (j == k) continue;
    for (int i = 0; i < dim_; ++i) {
      e(static_cast<std::size_t>(i), col) = vertex(j)[static_cast<std::size_t>(i)] - vertex(k)[static_cast<std::size_t>(i)];
    }
    ++col;
  }
  return e;
}

AffineMap<Rational> vertex_map(const Simplex& from, const Simplex& to) {
  if (from.dim() != to.dim()) throw std::invalid_argument("vertex_map needs simplices of equal dimension");
  const auto ef = from.edge_matrix_from(0);
  const auto et = to.edge_matrix_from(0);
  const auto inv = inverse(ef);
  const auto d = static_cast<std::size_t>(from.dim());
  AffineMap<Rational> m{Matrix<Rational>(d, d), std::vector<Rational>(d)};
  for (std::size_t r = 0; r < d; ++r) {
    for (std::size_t c = 0; c < d; ++c) {
      Rational s = 0;
      for (std::size_t k = 0; k < d; ++k) s += et(r, k) * inv(k, c);
      m.matrix(r, c) = s;
    }
  }
  for (std::size_t r = 0; r < d; ++r) {
    Rational s = to.vertex(0)[r];
    for (std::size_t c = 0; c < d; ++c) s -= m.matrix(r, c) * from.vertex(0)[c];
    m.offset[r] = s;
  }
  return m;
}

Simplex map_simplex(const AffineMap<Rational>& map, const Simplex& s) {
  std::vector<Point> v;
  for (const auto& p : s.vertices()) v.push_back(map.apply(p));
  return Simplex(std::move(v));
}

double infinity_norm(const Matrix<double>& m) {
  double best = 0.0;
  for (std::size_t r = 0; r < m.rows(); ++r) {
    double s = 0.0;
    for (std::size_t c = 0; c < m.cols(); ++c) s += std::fabs(m(r, c));
    best = std::max(best, s);
  }
  return best;
}

std::vector<PointD> facet_normals(const Simplex& s) {
  std::vector<PointD> out;
  for (int i = 0; i <= s.dim(); ++i) {
    PointD w = to_doubles(s.scaled_normal(i));
    const double n = norm(w);
    for (auto& c : w) c /= n;
    out.push_back(std::move(w));
  }
  return out;
}

namespace {

// Interior angles of the triangle (a, b, c) at each of its vertices.
std::array<double, 3> triangle_angles(const PointD& a, const PointD& b, const PointD& c) {
  return {angle_between(sub(b, a), sub(c, a)), angle_between(sub(a, b), sub(c, b)), angle_between(sub(a, c), sub(b, c))};
}

}  // namespace

double max_angle(const Simplex& s) {
  const auto v = s.vertices_double();
  if (s.dim() == 2) {
    const auto ang = triangle_angles(v[0], v[1], v[2]);
    return *std::max_element(ang.begin(), ang.end());
  }
  double best = 0.0;
  const auto normals = facet_normals(s);
  for (std::size_t a = 0; a < normals.size(); ++a) {
    for (std::size_t b = a + 1; b < normals.size(); ++b) {
      const double c = std::clamp(dot(normals[a], normals[b]), -1.0, 1.0);
      best = std::max(best, std::numbers::pi - std::acos(c));
    }
  }
  for (int i = 0; i < 4; ++i) {
    const auto fv = s.facet_vertices(i);
    const auto ang = triangle_angles(v[static_cast<std::size_t>(fv[0])], v[static_cast<std::size_t>(fv[1])], v[static_cast<std::size_t>(fv[2])]);
    best = std::max(best, *std::max_element(ang.begin(), ang.end()));
  }
  return best;
}

bool has_exact_right_max_angle(const Simplex& s) {
  if (s.dim() != 2) throw std::invalid_argument("exact right-angle test is for triangles");
  int right = 0;
  for (int k = 0; k < 3; ++k) {
    const Point& p = s.vertex(k);
    const Point& a = s.vertex((k + 1) % 3);
    const Point& b = s.vertex((k + 2) % 3);
    const Rational d = (a[0] - p[0]) * (b[0] - p[0]) + (a[1] - p[1]) * (b[1] - p[1]);
    if (sgn(d) == 0) {
      ++right;
    } else if (sgn(d) < 0) {
      return false;
    }
  }
  return right == 1;
}

std::string to_string(ReferenceFamily f) {
  switch (f) {
    case ReferenceFamily::T1: return "T1";
    case ReferenceFamily::T2: return "T2";
    case ReferenceFamily::none: return "none";
  }
  return "none";
}

std::vector<double> rvp_determinants(const Simplex& s) {
  std::vector<double> dets;
  const auto d = static_cast<std::size_t>(s.dim());
  for (int k = 0; k <= s.dim(); ++k) {
    Matrix<double> n = to_double_matrix(s.edge_matrix_from(k));
    for (std::size_t c = 0; c < d; ++c) {
      double len = 0.0;
      for (std::size_t r = 0; r < d; ++r) len += n(r, c) * n(r, c);
      len = std::sqrt(len);
      for (std::size_t r = 0; r < d; ++r) n(r, c) /= len;
    }
    dets.push_back(std::fabs(determinant(n)));
  }
  return dets;
}

namespace {

// T1 candidate anchored at vertex k: J has the unit edge directions as
// columns, the family element has lengths h_i along the axes.
RegularityReport t1_candidate(const Simplex& s, int k) {
  RegularityReport r;
  const auto d = static_cast<std::size_t>(s.dim());
  const Matrix<double> e = to_double_matrix(s.edge_matrix_from(k));
  Matrix<double> j(d, d);
  for (std::size_t c = 0; c < d; ++c) {
    double len = 0.0;
    for (std::size_t row = 0; row < d; ++row) len += e(row, c) * e(row, c);
    len = std::sqrt(len);
    r.size_params.push_back(len);
    PointD l(d);
    for (std::size_t row = 0; row < d; ++row) {
      l[row] = e(row, c) / len;
      j(row, c) = l[row];
    }
    r.directions.push_back(std::move(l));
  }
  r.map = AffineMap<double>{j, to_doubles(s.vertex(k))};
  std::size_t col = 0;
  for (int v = 0; v <= s.dim(); ++v) {
    PointD ref(d, 0.0);
    if (v != k) {
      ref[col] = r.size_params[col];
      ++col;
    }
    r.reference_vertices.push_back(std::move(ref));
  }
  r.norm_j = infinity_norm(j);
  r.norm_j_inv = infinity_norm(inverse(j));
  return r;
}

// T2 candidate: ordering (q0, q1, q2, q3) of the vertices playing the roles of
// 0, h1 e1 + h2 e2, h2 e2, h3 e3.
std::optional<RegularityReport> t2_candidate(const Simplex& s, const std::array<int, 4>& role) {
  const auto v = s.vertices_double();
  const PointD& q0 = v[static_cast<std::size_t>(role[0])];
  const PointD& q1 = v[static_cast<std::size_t>(role[1])];
  const PointD& q2 = v[static_cast<std::size_t>(role[2])];
  const PointD& q3 = v[static_cast<std::size_t>(role[3])];
  const std::array<PointD, 3> cols{sub(q1, q2), sub(q2, q0), sub(q3, q0)};
  RegularityReport r;
  Matrix<double> j(3, 3);
  for (std::size_t c = 0; c < 3; ++c) {
    const double len = norm(cols[c]);
    r.size_params.push_back(len);
    PointD l(3);
    for (std::size_t row = 0; row < 3; ++row) {
      l[row] = cols[c][row] / len;
      j(row, c) = l[row];
    }
    r.directions.push_back(std::move(l));
  }
  Matrix<double> jinv;
  try {
    jinv = inverse(j);
  } catch (const SingularMatrixError&) {
    return std::nullopt;
  }
  r.map = AffineMap<double>{j, q0};
  const double h1 = r.size_params[0], h2 = r.size_params[1], h3 = r.size_params[2];
  r.reference_vertices.assign(4, PointD(3, 0.0));
  r.reference_vertices[static_cast<std::size_t>(role[1])] = {h1, h2, 0.0};
  r.reference_vertices[static_cast<std::size_t>(role[2])] = {0.0, h2, 0.0};
  r.reference_vertices[static_cast<std::size_t>(role[3])] = {0.0, 0.0, h3};
  r.norm_j = infinity_norm(j);
  r.norm_j_inv = infinity_norm(jinv);
  return r;
}

}  // namespace

RegularityReport rvp_report(const Simplex& s, const RegularityOptions& opts) {
  const auto dets = rvp_determinants(s);
  int best = 0;
  for (int k = 1; k < static_cast<int>(dets.size()); ++k) {
    if (dets[static_cast<std::size_t>(k)] > dets[static_cast<std::size_t>(best)]) best = k;
  }
  RegularityReport r = t1_candidate(s, best);
  r.best_vertex = best;
  r.rvp_best = std::min(1.0, dets[static_cast<std::size_t>(best)]);
  if (r.rvp_best >= opts.rvp_threshold) r.regular_vertex = best;
  r.max_angle = max_angle(s);
  return r;
}

RegularityReport classify_to_reference_family(const Simplex& s, const RegularityOptions& opts) {
  RegularityReport base = rvp_report(s, opts);
  if (base.regular_vertex && base.condition_product() <= opts.condition_cap) {
    base.family = ReferenceFamily::T1;
    return base;
  }
  RegularityReport best = base;
  if (s.dim() == 3) {
    std::array<int, 4> role{0, 1, 2, 3};
    do {
      auto cand = t2_candidate(s, role);
      if (cand && cand->condition_product() < best.condition_product()) {
        cand->rvp_best = base.rvp_best;
        cand->best_vertex = base.best_vertex;
        cand->regular_vertex = base.regular_vertex;
        cand->max_angle = base.max_angle;
        best = *cand;
        best.family = ReferenceFamily::T2;
      }
    } while (std::next_permutation(role.begin(), role.end()));
  }
  if (best.condition_product() > opts.condition_cap) best.family = ReferenceFamily::none;
  return best;
}

AffineChart<Rational> vertex_chart(const Simplex& s, int k) {
  const auto e = s.edge_matrix_from(k);
  AffineChart<Rational> ch;
  ch.dim = s.dim();
  ch.param_dim = s.dim();
  ch.offset = s.vertex(k);
  for (std::size_t r = 0; r < e.rows(); ++r) {
    for (std::size_t c = 0; c < e.cols(); ++c) ch.matrix.push_back(e(r, c));
  }
  return ch;
}

Simplex reference_triangle() { return Simplex({{1, 0}, {0, 1}, {0, 0}}); }

Simplex reference_tetrahedron() { return Simplex({{1, 0, 0}, {0, 1, 0}, {0, 0, 1}, {0, 0, 0}}); }

Simplex reference_tetrahedron_no_rvp() { return Simplex({{1, 1, 0}, {0, 1, 0}, {0, 0, 1}, {0, 0, 0}}); }

Simplex family_t1(const std::vector<Rational>& h) {
  if (h.size() == 2) return Simplex({{h[0], 0}, {0, h[1]}, {0, 0}});
  if (h.size() == 3) return Simplex({{h[0], 0, 0}, {0, h[1], 0}, {0, 0, h[2]}, {0, 0, 0}});
  throw std::invalid_argument("T1 family needs 2 or 3 size parameters");
}

Simplex family_t2(const std::vector<Rational>& h) {
  if (h.size() != 3) throw std::invalid_argument("T2 family needs 3 size parameters");
  return Simplex({{h[0], h[1], 0}, {0, h[1], 0}, {0, 0, h[2]}, {0, 0, 0}});
}

Simplex tstar(const Rational& h) { return Simplex({{-1, 0}, {1, 0}, {0, h}}); }

Simplex stretched_no_rvp_tetrahedron(const Rational& h1, const Rational& h2, const Rational& h3) {
  return Simplex({{0, 0, 0}, {h1, 0, 0}, {0, 0, h3}, {0, h2, h3}});
}

Simplex read_simplex(std::istream& in) {
  std::vector<Point> vertices;
  std::string line;
  while (std::getline(in, line)) {
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    Point p;
    std::string tok;
    while (ls >> tok) p.push_back(parse_rational(tok));
    if (!p.empty()) vertices.push_back(std::move(p));
  }
  return Simplex(std::move(vertices));
}

void write_simplex(std::ostream& out, const Simplex& s) {
  for (const auto& v : s.vertices()) {
    for (std::size_t i = 0; i < v.size(); ++i) out << (i ? " " : "") << v[i].get_str();
    out << '\n';
  }
}

}  // namespace bdmlab
