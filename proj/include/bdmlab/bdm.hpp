#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "bdmlab/geometry.hpp"
#include "bdmlab/linalg.hpp"
#include "bdmlab/polynomial.hpp"
#include "bdmlab/polyspace.hpp"

namespace bdmlab {

enum class DofVariant { nedelec, bdm_original };
std::string to_string(DofVariant v);
DofVariant parse_dof_variant(const std::string& s);

/// One degree of freedom. Facet moments integrate (v . n_i) s^beta over facet
/// i in its chart parameters; interior moments integrate v . z over the element.
struct DofFunctional {
  enum class Kind { facet, gradient, interior };
  Kind kind = Kind::facet;
  int facet = -1;
  MultiIndex beta{0, 0, 0};
  VectorPoly<Rational> weight;  // z (interior) or grad z (gradient)
};

class UnisolvenceError : public SingularMatrixError {
 public:
  using SingularMatrixError::SingularMatrixError;
};

class BDMElement {
 public:
  BDMElement(Simplex s, int k, DofVariant variant);

  const Simplex& simplex() const { return simplex_; }
  int order() const { return k_; }
  DofVariant variant() const { return variant_; }
  int dim() const { return simplex_.dim(); }
  std::size_t ndofs() const { return dofs_.size(); }
  const std::vector<DofFunctional>& dofs() const { return dofs_; }
  const Matrix<Rational>& vandermonde() const { return vandermonde_; }
  std::size_t facet_dof_count() const;

  /// DOF values of a polynomial field, exact.
  std::vector<Rational> dof_values(const VectorPoly<Rational>& v) const;
  /// DOF values of an evaluable field by quadrature of the given degree.
  std::vector<double> dof_values(const VectorField& v, int quad_degree) const;

  /// The unique p in P_k^d with DOF(p) = DOF(v).
  VectorPoly<Rational> interpolate(const VectorPoly<Rational>& v) const;
  /// Float path; the DOF values are taken exactly and solved with the exact factorization.
  VectorPoly<double> interpolate(const VectorField& v, int quad_degree) const;
  /// Field with the given coefficient vector over the component-major monomial basis.
  VectorPoly<Rational> field_from_dofs(const std::vector<Rational>& dof_values) const;

 private:
  Simplex simplex_;
  int k_;
  DofVariant variant_;
  std::vector<DofFunctional> dofs_;
  std::vector<MultiIndex> monomials_;
  Matrix<Rational> vandermonde_;
  std::shared_ptr<const LUFactorization<Rational>> lu_;

  std::vector<Rational> evaluate_dofs(const VectorPoly<Rational>& v, int degree) const;
};

/// Outcome of comparing push(I_ref v) with I_phys(push v).
struct PiolaReport {
  bool commutes = false;
  VectorPoly<Rational> pushed_interpolant;
  VectorPoly<Rational> interpolated_push;
};

PiolaReport commutes_with_piola(const BDMElement& ref, const BDMElement& phys, const AffineMap<Rational>& map,
                                const VectorPoly<Rational>& v_ref);

struct StructuralReport {
  bool holds = false;
  VectorPoly<Rational> interpolant;
  std::string detail;
};

/// Interpolates f e_axis on a reference element and checks that the result
/// keeps the single-component shape and does not depend on x_axis.
StructuralReport structural_lemma_check(const BDMElement& el, int axis, const Polynomial<Rational>& f);

/// Facet flux residuals integral_{e_i} (v - Iv) . n_i z for every facet DOF; all zero for a correct operator.
std::vector<Rational> facet_flux_residuals(const BDMElement& el, const VectorPoly<Rational>& v);

/// L2 projection of a scalar polynomial onto P_m(s), exact.
Polynomial<Rational> l2_project_scalar(const Polynomial<Rational>& f, const Simplex& s, int m);

}  // namespace bdmlab
