#pragma once

#include <functional>
#include <iosfwd>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "bdmlab/bdm.hpp"
#include "bdmlab/geometry.hpp"
#include "bdmlab/polynomial.hpp"

namespace bdmlab {

/// A parametrized element family; `make` must return a valid simplex for every grid point.
struct ElementFamily {
  std::string kind;
  std::vector<std::string> param_names;
  std::function<Simplex(const std::vector<Rational>&)> make;
};

ElementFamily element_family_t1();
ElementFamily element_family_t2();
ElementFamily element_family_tstar();
/// Tetrahedron (0,0,0), (h1,0,0), (0,0,h3), (0,h2,h3).
ElementFamily element_family_no_rvp();

enum class EstimateId { stability_rvp, stability_mac, interpolation_rvp, interpolation_mac, interpolation_axes };
std::string to_string(EstimateId id);
EstimateId parse_estimate_id(const std::string& s);

/// weight * sqrt(norm_sq); norm_sq is exact when the integrand is polynomial.
struct EstimateTerm {
  std::string label;
  double weight = 1.0;
  double norm_sq = 0.0;
  std::optional<Rational> exact_norm_sq;
  double value() const;
};

struct EstimateReport {
  EstimateId estimate_id = EstimateId::stability_mac;
  std::vector<double> element_params;
  double lhs = 0.0;
  std::optional<Rational> exact_lhs_sq;
  std::vector<EstimateTerm> rhs_terms;
  double rhs() const;
  /// lhs / rhs; 0 when both vanish, +inf when only the rhs vanishes.
  double ratio() const;
};

// --- norms -----------------------------------------------------------------

Rational l2_norm_sq(const Polynomial<Rational>& f, const Simplex& s);
Rational l2_norm_sq(const VectorPoly<Rational>& v, const Simplex& s);
/// Per-component squared norms.
std::vector<Rational> l2_norm_sq_components(const VectorPoly<Rational>& v, const Simplex& s);

/// || D^m v ||^2 where (D^m v)_c is the sum of |d^beta v_c| over all |beta| = m.
/// Exact when at most one derivative per component is nonzero, quadrature otherwise.
EstimateTerm abs_derivative_norm(const VectorPoly<Rational>& v, const Simplex& s, int m, const std::string& label);

/// L2 projection onto P_m^d, componentwise Gram solve.
VectorPoly<Rational> poly_project(const VectorPoly<Rational>& v, const Simplex& s, int m);

// --- directions --------------------------------------------------------------

/// Scaled directions h_i l_i = p_i - p_k leaving the regular vertex k.
/// Throws std::invalid_argument when the element has no regular vertex.
std::vector<std::vector<Rational>> rvp_directions(const Simplex& s, const RegularityOptions& opts = {});
/// h_i e_i.
std::vector<std::vector<Rational>> axis_directions(const std::vector<Rational>& h);

// --- estimates ---------------------------------------------------------------

/// Terms sum_{|alpha| = m+1} h^alpha ||D^alpha_l v|| and h_T^{m+1} ||D^m div v||.
/// `scaled_dirs` holds the vectors h_i l_i.
std::vector<EstimateTerm> rhs_directional(const VectorPoly<Rational>& v, const Simplex& s, int m,
                                          const std::vector<std::vector<Rational>>& scaled_dirs);
std::vector<EstimateTerm> rhs_rvp(const VectorPoly<Rational>& v, const Simplex& s, int m,
                                  const RegularityOptions& opts = {});
/// h_T^{m+1} ||D^{m+1} v||.
std::vector<EstimateTerm> rhs_mac(const VectorPoly<Rational>& v, const Simplex& s, int m);

Rational stability_lhs_sq(const VectorPoly<Rational>& v, const BDMElement& el);
/// ||v||, h_j ||dv/dl_j||, h_T ||div v||.
std::vector<EstimateTerm> stability_rhs_rvp(const VectorPoly<Rational>& v, const Simplex& s,
                                            const std::vector<std::vector<Rational>>& scaled_dirs);
/// ||v||, h_T ||dv/dx_j||.
std::vector<EstimateTerm> stability_rhs_mac(const VectorPoly<Rational>& v, const Simplex& s);

struct EstimateSpec {
  EstimateId id = EstimateId::interpolation_mac;
  int k = 1;
  int m = 0;
  DofVariant variant = DofVariant::nedelec;
  RegularityOptions regularity;
};

/// Evaluates one estimate. For interpolation_axes the directions are h_i e_i
/// with h taken from `params`.
EstimateReport evaluate_estimate(const EstimateSpec& spec, const Simplex& s, const VectorPoly<Rational>& v,
                                 const std::vector<Rational>& params = {});

// --- sweeps ------------------------------------------------------------------

enum class Verdict { bounded, diverging, inconclusive };
std::string to_string(Verdict v);
/// diverging iff ratios increase monotonically and last/first > 10; bounded
/// iff max/min < 10; inconclusive otherwise.
Verdict classify_ratios(const std::vector<double>& ratios, double factor = 10.0);

using FieldGenerator = std::function<VectorPoly<Rational>(const std::vector<Rational>& params, const Simplex& s)>;

struct SweepResult {
  std::string family;
  std::vector<std::string> param_names;
  std::vector<std::vector<Rational>> grid;
  std::vector<EstimateReport> reports;
  std::vector<double> ratios;
  Verdict verdict = Verdict::inconclusive;
};

SweepResult sweep(const ElementFamily& family, const FieldGenerator& field, const EstimateSpec& spec,
                  const std::vector<std::vector<Rational>>& grid);

/// Columns: estimate_id, the family parameters, lhs, one column per rhs term, ratio, verdict.
void write_sweep_csv(std::ostream& out, const SweepResult& r);

// --- random inputs -------------------------------------------------------------

/// Random field in P_k^d with integer coefficients in [-range, range].
VectorPoly<Rational> random_poly_field(std::mt19937_64& rng, int dim, int k, int range = 5);
/// curl of a random potential of degree k+1 (2D: scalar stream function,
/// 3D: vector potential); divergence free and of degree k.
VectorPoly<Rational> random_divergence_free_field(std::mt19937_64& rng, int dim, int k, int range = 5);
/// Random simplex with small rational coordinates and max angle below `max_angle_bound`.
Simplex random_mac_simplex(std::mt19937_64& rng, int dim, double max_angle_bound);

}  // namespace bdmlab
