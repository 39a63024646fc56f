#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <array>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "bdmlab/polynomial.hpp"
#include "bdmlab/shishkin.hpp"

namespace bdmlab {

/// Sum of terms P_m(x) exp(m c x1) with polynomial P_m; closed under
/// differentiation, which is all the manufactured solution needs.
class ExpPoly {
 public:
  ExpPoly() = default;
  explicit ExpPoly(double rate) : rate_(rate) {}
  static ExpPoly polynomial(double rate, const Polynomial<double>& p, int exp_multiple = 0);

  double rate() const { return rate_; }
  const std::map<int, Polynomial<double>>& terms() const { return terms_; }

  ExpPoly derivative(int i) const;
  double evaluate(std::span<const double> x) const;

  ExpPoly& operator+=(const ExpPoly& o);
  ExpPoly& operator*=(double s);
  friend ExpPoly operator+(ExpPoly a, const ExpPoly& b) { return a += b; }
  friend ExpPoly operator-(ExpPoly a, const ExpPoly& b) { return a += b * -1.0; }
  friend ExpPoly operator*(ExpPoly a, double s) { return a *= s; }

 private:
  double rate_ = 0.0;
  std::map<int, Polynomial<double>> terms_;
};

struct StokesCase {
  double epsilon = 0.0;
  double nu = 1.0;
  std::array<ExpPoly, 2> u;
  std::array<std::array<ExpPoly, 2>, 2> grad_u;  ///< grad_u[c][d] = du_c/dx_d
  ExpPoly p;
  std::array<ExpPoly, 2> f;
  double p_mean = 0.0;  ///< integral of p over the unit square

  std::array<double, 2> velocity(std::span<const double> x) const;
  std::array<double, 2> forcing(std::span<const double> x) const;
  std::array<double, 2> boundary(std::span<const double> x) const { return velocity(x); }
};

/// xi = x1^2 (1-x1)^2 x2^2 (1-x2)^2 exp(-x1/eps), u = curl xi, p = exp(-x1/eps),
/// f = -nu lap u + grad p.
StokesCase manufactured_case(double epsilon, double nu = 1.0);
/// f = 0, g = 0, p = 0.
StokesCase zero_case();

/// BDM1 velocities (two normal moments per edge, normals oriented from the
/// lower to the higher global vertex index) and piecewise-constant pressures.
class DGSpace {
 public:
  explicit DGSpace(Mesh2D mesh);

  const Mesh2D& mesh() const { return mesh_; }
  std::size_t num_velocity_dofs() const { return 2 * mesh_.facets.size(); }
  std::size_t num_pressure_dofs() const { return mesh_.num_triangles(); }
  /// Free velocity DOFs plus pressures plus the mean-value multiplier.
  std::size_t num_unknowns() const;
  bool is_boundary_dof(std::size_t j) const { return mesh_.facets[j / 2].is_boundary(); }

  /// Global velocity DOFs of triangle t in local order (facet opposite vertex i, moment q).
  std::array<std::size_t, 6> triangle_dofs(std::size_t t) const;
  double area(std::size_t t) const { return area_[t]; }
  double facet_length(std::size_t e) const { return length_[e]; }
  const std::array<double, 2>& facet_normal(std::size_t e) const { return normal_[e]; }
  /// +1 if the facet normal points out of triangle t.
  int facet_sign(std::size_t e, std::size_t t) const;

  /// Value of local basis function i of triangle t at x.
  std::array<double, 2> basis_value(std::size_t t, int i, std::span<const double> x) const;
  /// Constant gradient: g[c][d] = d phi_c / d x_d.
  const std::array<std::array<double, 2>, 2>& basis_gradient(std::size_t t, int i) const { return grad_[t][static_cast<std::size_t>(i)]; }
  /// Constant divergence of basis i, from the flux identity (exact up to rounding of 1/|T|).
  double basis_divergence(std::size_t t, int i) const;
  /// Elementwise divergence of a coefficient vector: outward zeroth moments over |T|.
  double divergence(const Eigen::VectorXd& u, std::size_t t) const;

  /// Field of a global coefficient vector on triangle t.
  std::array<double, 2> velocity(const Eigen::VectorXd& u, std::size_t t, std::span<const double> x) const;
  std::array<std::array<double, 2>, 2> velocity_gradient(const Eigen::VectorXd& u, std::size_t t) const;

  /// Point on facet e at parameter s in [0,1], from its lower to its higher vertex.
  std::array<double, 2> facet_point(std::size_t e, double s) const;

 private:
  Mesh2D mesh_;
  std::vector<double> area_;
  std::vector<double> length_;
  std::vector<std::array<double, 2>> normal_;
  struct Frame {
    double xc, yc, sx, sy;
  };
  std::vector<Frame> frame_;
  // coeff_[t][i][3c + m]: component c of basis i in the scaled monomials 1, X, Y
  std::vector<std::array<std::array<double, 6>, 6>> coeff_;
  std::vector<std::array<std::array<std::array<double, 2>, 2>, 6>> grad_;
};

struct StokesSystem {
  Eigen::SparseMatrix<double> A;  ///< all velocity DOFs
  Eigen::SparseMatrix<double> B;  ///< pressures x velocity DOFs, -int q div v
  Eigen::VectorXd F;              ///< velocity load including Nitsche data terms
  Eigen::VectorXd boundary_values;  ///< prescribed normal moments (boundary DOFs only)
  double gamma = 0.0;
};

/// Length scale h_e in the penalty gamma / h_e: the facet length, or the
/// smallest height of an adjacent triangle over the facet (2|T| / |e|).
enum class FacetScale { length, height };
std::string to_string(FacetScale s);
FacetScale parse_facet_scale(const std::string& s);
double facet_scale(const DGSpace& space, std::size_t e, FacetScale scale);

StokesSystem assemble(const DGSpace& space, const StokesCase& c, double gamma, int quad_degree = 8,
                      FacetScale scale = FacetScale::length);

struct StokesSolution {
  Eigen::VectorXd u;  ///< all velocity DOFs
  Eigen::VectorXd p;  ///< one value per triangle
  double multiplier = 0.0;
  double relative_residual = 0.0;
  int refinement_steps = 0;
  double max_divergence = 0.0;
  double max_normal_jump = 0.0;
  double pressure_mean = 0.0;
};

/// Regularized LDL^T of the scaled saddle-point system with the zero-mean
/// pressure row, followed by iterative refinement against the unregularized
/// matrix; throws std::runtime_error when the factorization fails or the
/// relative residual stays above 1e-10.
StokesSolution solve(const DGSpace& space, const StokesSystem& sys);

/// Elementwise |div u_h| (max) and interior normal-jump L2 norms (max).
double max_elementwise_divergence(const DGSpace& space, const Eigen::VectorXd& u);
double max_normal_jump(const DGSpace& space, const Eigen::VectorXd& u);

/// 4 k^2 ceil(log sigma); 4 k^2 when sigma <= 1.
double penalty(double sigma, int k, LogConvention c = LogConvention::natural);

struct StokesErrors {
  double grad_u = 0.0;
  double p = 0.0;
};

/// Broken H1 seminorm of u - u_h and L2 norm of (p - mean p) - p_h.
StokesErrors errors(const DGSpace& space, const StokesSolution& sol, const StokesCase& c, int quad_degree = 8);

/// Canonical BDM1 interpolant of the exact velocity and elementwise means of
/// the mean-free exact pressure.
StokesSolution interpolate_exact(const DGSpace& space, const StokesCase& c);

enum class MeshKind { shishkin, uniform };
std::string to_string(MeshKind k);

struct StudyOptions {
  LogConvention tau_log = LogConvention::natural;
  LogConvention gamma_log = LogConvention::natural;
  std::optional<double> tau;
  std::optional<double> gamma;
  FacetScale facet_scale = FacetScale::length;
  int quad_degree = 8;
};

struct StudyRow {
  double epsilon = 0.0;
  MeshKind mesh_kind = MeshKind::shishkin;
  int N = 0;
  std::size_t ndof = 0;
  double tau = 0.0;
  double sigma = 0.0;
  double gamma = 0.0;
  double err_grad_u = 0.0;
  double err_p = 0.0;
  std::optional<double> rate_u;
  std::optional<double> rate_p;
  double max_divergence = 0.0;
  double max_normal_jump = 0.0;
  double relative_residual = 0.0;
};

/// One row per (epsilon, N); rates from consecutive N of the same epsilon.
std::vector<StudyRow> convergence_study(const std::vector<double>& eps, const std::vector<int>& Ns, MeshKind kind,
                                        const StudyOptions& opts = {});
void write_study_csv(std::ostream& out, const std::vector<StudyRow>& rows);

}  // namespace bdmlab
