#pragma once

#include <array>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "bdmlab/geometry.hpp"
#include "bdmlab/rational.hpp"

namespace bdmlab {

enum class LogConvention { natural, base10 };
std::string to_string(LogConvention c);
LogConvention parse_log_convention(const std::string& s);
double log_with(LogConvention c, double x);

enum class BoundarySide { interior, left, right, bottom, top };
std::string to_string(BoundarySide s);

struct MeshFacet {
  std::array<int, 2> vertices{};  ///< ascending global indices
  int left = -1;                  ///< first incident triangle
  int right = -1;                 ///< second incident triangle, -1 on the boundary
  BoundarySide side = BoundarySide::interior;
  bool is_boundary() const { return right < 0; }
};

/// Triangulation of the unit square with exact vertex coordinates and
/// counter-clockwise triangles.
struct Mesh2D {
  std::vector<Point> vertices;
  std::vector<std::array<int, 3>> triangles;
  std::vector<MeshFacet> facets;
  /// facet index of the edge opposite local vertex i of triangle t
  std::vector<std::array<int, 3>> triangle_facets;

  std::size_t num_vertices() const { return vertices.size(); }
  std::size_t num_triangles() const { return triangles.size(); }
  Simplex triangle(std::size_t t) const;
  /// Rebuilds facets and triangle_facets from the triangle list.
  void build_facets();
};

struct ShishkinParams {
  int N = 8;
  double epsilon = 0.01;
  std::optional<double> tau;  ///< overrides the transition point formula
  LogConvention log = LogConvention::natural;

  double transition() const;
};

/// tau = min{1/2, 3 eps |log eps|}.
double transition_point(double epsilon, LogConvention c);

Mesh2D build_shishkin(const ShishkinParams& p);
Mesh2D build_shishkin(int N, const Rational& tau);
Mesh2D build_uniform(int N);

/// sqrt(1 + 4 tau^2) / (1 + 2 tau - sqrt(1 + 4 tau^2)).
double aspect_ratio(double tau);
/// longest edge / (2 inradius) of one triangle.
double triangle_aspect_ratio(const Simplex& t);
/// Maximum triangle_aspect_ratio over the mesh.
double mesh_aspect_ratio(const Mesh2D& m);
Rational total_area(const Mesh2D& m);

/// Header "dim nv nt", then vertex lines and 0-based triangle lines.
void write_mesh(std::ostream& out, const Mesh2D& m);
Mesh2D read_mesh(std::istream& in);

}  // namespace bdmlab
