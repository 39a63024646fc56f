#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "bdmlab/linalg.hpp"
#include "bdmlab/polynomial.hpp"
#include "bdmlab/rational.hpp"

namespace bdmlab {

using Point = std::vector<Rational>;
using PointD = std::vector<double>;

/// A triangle or tetrahedron with exact vertex coordinates. Facet i is the
/// convex hull of all vertices except vertex i.
class Simplex {
 public:
  explicit Simplex(std::vector<Point> vertices);
  static Simplex from_doubles(const std::vector<PointD>& vertices);

  int dim() const { return dim_; }
  const std::vector<Point>& vertices() const { return vertices_; }
  const Point& vertex(int i) const { return vertices_.at(static_cast<std::size_t>(i)); }
  std::vector<PointD> vertices_double() const;

  /// Vertex indices of facet i in ascending order.
  std::vector<int> facet_vertices(int i) const;

  /// x = p_0 + sum_j s_j (p_j - p_0), mapping the unit simplex onto this one.
  AffineChart<Rational> chart() const;
  /// Facet chart anchored at the facet's lowest-index vertex, spanned by the
  /// edge vectors to its remaining vertices in ascending index order.
  AffineChart<Rational> facet_chart(int i) const;
  /// Outward facet normal scaled so that, with facet_chart(i),
  /// integral_{e_i} f ds = integral_{unit} (f o chart) |w| and
  /// integral_{e_i} (v . n_i) z ds = integral_{unit} ((v . w) z) o chart.
  std::vector<Rational> scaled_normal(int i) const;

  /// det of the chart matrix; its sign is the orientation.
  Rational chart_determinant() const { return chart_det_; }
  Rational volume() const;
  double diameter() const;

  /// d x d matrix with columns p_j - p_k for j != k (ascending).
  Matrix<Rational> edge_matrix_from(int k) const;

 private:
  int dim_;
  std::vector<Point> vertices_;
  Rational chart_det_;
};

template <class T>
struct AffineMap {
  Matrix<T> matrix;
  std::vector<T> offset;

  int dim() const { return static_cast<int>(offset.size()); }
  std::vector<T> apply(const std::vector<T>& x) const {
    std::vector<T> y = offset;
    for (std::size_t r = 0; r < offset.size(); ++r) {
      for (std::size_t c = 0; c < offset.size(); ++c) y[r] += matrix(r, c) * x[c];
    }
    return y;
  }
  T det() const { return determinant(matrix); }
  AffineMap inverse() const {
    AffineMap inv{bdmlab::inverse(matrix), std::vector<T>(offset.size(), from_int<T>(0))};
    for (std::size_t r = 0; r < offset.size(); ++r) {
      T s = from_int<T>(0);
      for (std::size_t c = 0; c < offset.size(); ++c) s -= inv.matrix(r, c) * offset[c];
      inv.offset[r] = s;
    }
    return inv;
  }
  AffineChart<T> as_chart() const {
    AffineChart<T> ch;
    ch.dim = dim();
    ch.param_dim = dim();
    for (std::size_t r = 0; r < offset.size(); ++r) {
      for (std::size_t c = 0; c < offset.size(); ++c) ch.matrix.push_back(matrix(r, c));
    }
    ch.offset = offset;
    return ch;
  }
};

/// Affine map with F(from.vertex(i)) = to.vertex(i) for every i.
AffineMap<Rational> vertex_map(const Simplex& from, const Simplex& to);
Simplex map_simplex(const AffineMap<Rational>& map, const Simplex& s);

double infinity_norm(const Matrix<double>& m);

/// Unit outward normals ordered by opposite vertex.
std::vector<PointD> facet_normals(const Simplex& s);

/// Largest interior angle (d = 2) or largest of all dihedral and in-facet
/// angles (d = 3), in radians.
double max_angle(const Simplex& s);

/// True iff the triangle has an exact right angle and its other angles are acute.
bool has_exact_right_max_angle(const Simplex& s);

enum class ReferenceFamily { T1, T2, none };
std::string to_string(ReferenceFamily f);

struct RegularityOptions {
  double rvp_threshold = 0.1;
  double condition_cap = 100.0;
};

struct RegularityReport {
  double max_angle = 0.0;
  double rvp_best = 0.0;
  int best_vertex = 0;                ///< vertex with the largest |det N_k|
  std::optional<int> regular_vertex;  ///< best_vertex if rvp_best >= threshold
  ReferenceFamily family = ReferenceFamily::none;
  std::vector<double> size_params;        ///< h_i
  std::vector<PointD> directions;         ///< unit l_i
  std::vector<PointD> reference_vertices; ///< family element, vertex i maps to s.vertex(i)
  AffineMap<double> map;                  ///< reference element -> s
  double norm_j = 0.0;
  double norm_j_inv = 0.0;
  double condition_product() const { return norm_j * norm_j_inv; }
};

/// Regular-vertex diagnostics: |det N_k| for every vertex, ties broken by the
/// lowest index.
RegularityReport rvp_report(const Simplex& s, const RegularityOptions& opts = {});
/// |det N_k| for every vertex k.
std::vector<double> rvp_determinants(const Simplex& s);

/// Maps s onto one of the reference families T1 or T2 by a conditioned
/// affine map; family none when no candidate meets the condition cap.
RegularityReport classify_to_reference_family(const Simplex& s, const RegularityOptions& opts = {});

/// Chart from the unit simplex whose columns are the edge vectors h_i l_i
/// leaving vertex k, so that h^alpha D^alpha_l v = D^alpha_s (v o chart).
AffineChart<Rational> vertex_chart(const Simplex& s, int k);

/// Contravariant Piola transform: v(F(x)) = (det J)^-1 J v_ref(x).
template <class T>
VectorPoly<T> piola_push(const AffineMap<T>& map, const VectorPoly<T>& v_ref) {
  const int d = map.dim();
  if (v_ref.dim() != d) throw std::invalid_argument("field dimension does not match map");
  const T det = map.det();
  if (is_zero(det)) throw SingularMatrixError("Piola map is singular");
  const VectorPoly<T> pulled = compose(v_ref, map.inverse().as_chart());
  VectorPoly<T> out(d);
  for (int r = 0; r < d; ++r) {
    for (int c = 0; c < d; ++c) {
      const T& a = map.matrix(static_cast<std::size_t>(r), static_cast<std::size_t>(c));
      if (!is_zero(a)) out[r] += pulled[c] * T(a / det);
    }
  }
  return out;
}

/// Inverse Piola transform: the reference field whose push-forward is v.
template <class T>
VectorPoly<T> piola_pull(const AffineMap<T>& map, const VectorPoly<T>& v) {
  const int d = map.dim();
  const T det = map.det();
  const Matrix<T> jinv = bdmlab::inverse(map.matrix);
  const VectorPoly<T> composed = compose(v, map.as_chart());
  VectorPoly<T> out(d);
  for (int r = 0; r < d; ++r) {
    for (int c = 0; c < d; ++c) {
      const T& a = jinv(static_cast<std::size_t>(r), static_cast<std::size_t>(c));
      if (!is_zero(a)) out[r] += composed[c] * T(a * det);
    }
  }
  return out;
}

// Reference elements, numbered so that facet e_i is opposite p_i.
Simplex reference_triangle();                  ///< p = (1,0), (0,1), (0,0)
Simplex reference_tetrahedron();               ///< p = e1, e2, e3, 0
Simplex reference_tetrahedron_no_rvp();        ///< p = (1,1,0), (0,1,0), (0,0,1), 0
Simplex family_t1(const std::vector<Rational>& h);  ///< h_i e_i ..., 0
Simplex family_t2(const std::vector<Rational>& h);  ///< h1 e1 + h2 e2, h2 e2, h3 e3, 0
Simplex tstar(const Rational& h);              ///< conv{(-1,0), (1,0), (0,h)}
/// Tetrahedron (0,0,0), (h1,0,0), (0,0,h3), (0,h2,h3): a rotated T2 member.
Simplex stretched_no_rvp_tetrahedron(const Rational& h1, const Rational& h2, const Rational& h3);

/// One vertex per line, coordinates separated by whitespace.
Simplex read_simplex(std::istream& in);
void write_simplex(std::ostream& out, const Simplex& s);

}  // namespace bdmlab
