#include "bdmlab/shishkin.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace bdmlab {

std::string to_string(LogConvention c) { return c == LogConvention::natural ? "natural" : "base10"; }

LogConvention parse_log_convention(const std::string& s) {
  if (s == "natural" || s == "ln") return LogConvention::natural;
  if (s == "base10" || s == "log10") return LogConvention::base10;
  throw std::invalid_argument("unknown log convention: " + s);
}

double log_with(LogConvention c, double x) { return c == LogConvention::natural ? std::log(x) : std::log10(x); }

std::string to_string(BoundarySide s) {
  switch (s) {
    case BoundarySide::interior: return "interior";
    case BoundarySide::left: return "left";
    case BoundarySide::right: return "right";
    case BoundarySide::bottom: return "bottom";
    case BoundarySide::top: return "top";
  }
  return "interior";
}

Simplex Mesh2D::triangle(std::size_t t) const {
  const auto& tri = triangles.at(t);
  return Simplex({vertices[static_cast<std::size_t>(tri[0])], vertices[static_cast<std::size_t>(tri[1])],
                  vertices[static_cast<std::size_t>(tri[2])]});
}

void Mesh2D::build_facets() {
  facets.clear();
  triangle_facets.assign(triangles.size(), {-1, -1, -1});
  std::map<std::array<int, 2>, int> index;
  for (std::size_t t = 0; t < triangles.size(); ++t) {
    for (int i = 0; i < 3; ++i) {
      int a = triangles[t][static_cast<std::size_t>((i + 1) % 3)];
      int b = triangles[t][static_cast<std::size_t>((i + 2) % 3)];
      if (a > b) std::swap(a, b);
      auto [it, inserted] = index.try_emplace({a, b}, static_cast<int>(facets.size()));
      if (inserted) {
        MeshFacet f;
        f.vertices = {a, b};
        f.left = static_cast<int>(t);
        facets.push_back(f);
      } else {
        auto& f = facets[static_cast<std::size_t>(it->second)];
        if (f.right >= 0) throw std::invalid_argument("non-manifold edge in mesh");
        f.right = static_cast<int>(t);
      }
      triangle_facets[t][static_cast<std::size_t>(i)] = it->second;
    }
  }
  for (auto& f : facets) {
    if (!f.is_boundary()) continue;
    const Point& p = vertices[static_cast<std::size_t>(f.vertices[0])];
    const Point& q = vertices[static_cast<std::size_t>(f.vertices[1])];
    if (p[0] == q[0] && sgn(p[0]) == 0) f.side = BoundarySide::left;
    else if (p[0] == q[0] && p[0] == 1) f.side = BoundarySide::right;
    else if (p[1] == q[1] && sgn(p[1]) == 0) f.side = BoundarySide::bottom;
    else if (p[1] == q[1] && p[1] == 1) f.side = BoundarySide::top;
  }
}

double transition_point(double epsilon, LogConvention c) {
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw std::invalid_argument("epsilon must lie in (0, 1)");
  return std::min(0.5, 3.0 * epsilon * std::fabs(log_with(c, epsilon)));
}

double ShishkinParams::transition() const { return tau ? *tau : transition_point(epsilon, log); }

namespace {

Mesh2D tensor_mesh(const std::vector<Rational>& xs, const std::vector<Rational>& ys) {
  Mesh2D m;
  const std::size_t nx = xs.size(), ny = ys.size();
  for (std::size_t j = 0; j < ny; ++j) {
    for (std::size_t i = 0; i < nx; ++i) m.vertices.push_back({xs[i], ys[j]});
  }
  auto id = [nx](std::size_t i, std::size_t j) { return static_cast<int>(j * nx + i); };
  for (std::size_t j = 0; j + 1 < ny; ++j) {
    for (std::size_t i = 0; i + 1 < nx; ++i) {
      // lower-left to upper-right diagonal
      m.triangles.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1)});
      m.triangles.push_back({id(i, j), id(i + 1, j + 1), id(i, j + 1)});
    }
  }
  m.build_facets();
  return m;
}

}  // namespace

Mesh2D build_shishkin(int N, const Rational& tau) {
  if (N < 2 || N % 2 != 0) throw std::invalid_argument("Shishkin meshes need an even N >= 2");
  if (sgn(tau) <= 0 || tau >= 1) throw std::invalid_argument("tau must lie in (0, 1)");
  std::vector<Rational> xs, ys;
  const int half = N / 2;
  for (int i = 0; i <= N; ++i) {
    if (i <= half) xs.push_back(Rational(i) * 2 * tau / N);
    else xs.push_back(tau + Rational(i - half) * 2 * (1 - tau) / N);
    ys.push_back(Rational(i) / N);
  }
  return tensor_mesh(xs, ys);
}

Mesh2D build_shishkin(const ShishkinParams& p) { return build_shishkin(p.N, rational_from_double(p.transition())); }

Mesh2D build_uniform(int N) {
  if (N < 1) throw std::invalid_argument("uniform meshes need N >= 1");
  std::vector<Rational> xs;
  for (int i = 0; i <= N; ++i) xs.push_back(Rational(i) / N);
  return tensor_mesh(xs, xs);
}

double aspect_ratio(double tau) {
  if (!(tau > 0.0 && tau < 1.0)) throw std::invalid_argument("tau must lie in (0, 1)");
  const double r = std::sqrt(1.0 + 4.0 * tau * tau);
  return r / (1.0 + 2.0 * tau - r);
}

double triangle_aspect_ratio(const Simplex& t) {
  const auto v = t.vertices_double();
  double longest = 0.0, perimeter = 0.0;
  for (int i = 0; i < 3; ++i) {
    const auto& a = v[static_cast<std::size_t>(i)];
    const auto& b = v[static_cast<std::size_t>((i + 1) % 3)];
    const double len = std::hypot(a[0] - b[0], a[1] - b[1]);
    longest = std::max(longest, len);
    perimeter += len;
  }
  const double area = std::fabs(to_double(t.volume()));
  // inradius = 2 area / perimeter
  return longest * perimeter / (4.0 * area);
}

double mesh_aspect_ratio(const Mesh2D& m) {
  double s = 0.0;
  for (std::size_t t = 0; t < m.num_triangles(); ++t) s = std::max(s, triangle_aspect_ratio(m.triangle(t)));
  return s;
}

Rational total_area(const Mesh2D& m) {
  Rational a = 0;
  for (std::size_t t = 0; t < m.num_triangles(); ++t) a += m.triangle(t).volume();
  return a;
}

void write_mesh(std::ostream& out, const Mesh2D& m) {
  out << "2 " << m.num_vertices() << ' ' << m.num_triangles() << '\n';
  for (const auto& p : m.vertices) out << to_string(p[0]) << ' ' << to_string(p[1]) << '\n';
  for (const auto& t : m.triangles) out << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
}

Mesh2D read_mesh(std::istream& in) {
  int dim = 0;
  std::size_t nv = 0, nt = 0;
  if (!(in >> dim >> nv >> nt) || dim != 2) throw std::invalid_argument("bad mesh header");
  Mesh2D m;
  for (std::size_t i = 0; i < nv; ++i) {
    std::string x, y;
    if (!(in >> x >> y)) throw std::invalid_argument("truncated vertex list");
    m.vertices.push_back({parse_rational(x), parse_rational(y)});
  }
  for (std::size_t t = 0; t < nt; ++t) {
    std::array<int, 3> tri{};
    if (!(in >> tri[0] >> tri[1] >> tri[2])) throw std::invalid_argument("truncated triangle list");
    for (int v : tri) {
      if (v < 0 || static_cast<std::size_t>(v) >= nv) throw std::invalid_argument("triangle index out of range");
    }
    m.triangles.push_back(tri);
  }
  m.build_facets();
  return m;
}

}  // namespace bdmlab
