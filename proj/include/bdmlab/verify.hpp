#pragma once

#include <optional>
#include <string>
#include <vector>

#include "bdmlab/estimates.hpp"

namespace bdmlab {

struct CheckLine {
  std::string label;
  std::string expected;
  std::string computed;
  bool ok = false;
};

struct SuiteResult {
  std::string name;
  std::vector<CheckLine> checks;
  std::vector<SweepResult> sweeps;
  /// Lines that are reported but do not decide pass/fail.
  std::vector<CheckLine> notes;

  bool passed() const;
  void add(std::string label, std::string expected, std::string computed, bool ok);
};

/// k = 2 interpolants of (0, x1^3) on the reference triangle under both DOF sets.
SuiteResult verify_dof_variants();
/// v = (0, x1^2) on T*(h): interpolant, norm triple, and a stability_mac sweep.
SuiteResult verify_counterexample_2d(const std::vector<Rational>& hs = {});
/// u = (x1 x3, -x2 x3, 0) on the stretched tetrahedron without a regular vertex.
SuiteResult verify_counterexample_3d(const std::vector<std::vector<Rational>>& hs = {});
/// Single-component fields with monomial profiles on the reference elements.
SuiteResult verify_structural_lemmas(int max_k = 2);

std::vector<std::string> suite_names();
/// Throws std::invalid_argument for an unknown name.
SuiteResult run_suite(const std::string& name);

}  // namespace bdmlab
