// Acceptance run: one "criterion N: PASS|FAIL" line per criterion, exit 1 if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "bdmlab/bdm.hpp"
#include "bdmlab/estimates.hpp"
#include "bdmlab/shishkin.hpp"
#include "bdmlab/stokes.hpp"
#include "bdmlab/verify.hpp"

using namespace bdmlab;

namespace {

// time limits in seconds
constexpr double kLimit1 = 1.0;
constexpr double kLimit2 = 1.0;
constexpr double kLimit3 = 5.0;
constexpr double kLimit4 = 30.0;
constexpr double kLimit5 = 30.0;
constexpr double kLimit6 = 60.0;
constexpr double kLimit7 = 10.0;
constexpr double kLimit8 = 300.0;

constexpr double kBoundedFactor = 10.0;     // max/min ratio across an anisotropic sweep
constexpr double kMacRatioCap = 10.0;       // interpolation_mac ratio on random simplices
constexpr double kMacAngle = 2.6;           // radians, for the random simplex generator
constexpr double kSigmaTarget = 8.93;
constexpr double kSigmaTol = 0.05;
constexpr double kRateMin = 0.9;
constexpr double kLayerGain = 5.0;
constexpr double kDivTol = 1e-12;
constexpr double kJumpTol = 1e-12;

struct Outcome {
  bool ok = true;
  std::string detail;
  void fail(const std::string& why) {
    ok = false;
    if (!detail.empty()) detail += "; ";
    detail += why;
  }
  void note(const std::string& s) {
    if (!detail.empty()) detail += "; ";
    detail += s;
  }
};

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", x);
  return buf;
}

bool run(int id, double limit, const std::function<void(Outcome&)>& body) {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    body(o);
  } catch (const std::exception& e) {
    o.fail(std::string("exception: ") + e.what());
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (secs >= limit) o.fail("time " + fmt(secs) + " s over " + fmt(limit) + " s");
  std::printf("criterion %d: %s (%.2f s) %s\n", id, o.ok ? "PASS" : "FAIL", secs, o.detail.c_str());
  std::fflush(stdout);
  return o.ok;
}

void absorb_suite(Outcome& o, const SuiteResult& r) {
  int failed = 0;
  for (const auto& c : r.checks) {
    if (!c.ok) {
      ++failed;
      o.fail(c.label + " expected " + c.expected + " got " + c.computed);
    }
  }
  o.note(r.name + " " + std::to_string(r.checks.size() - static_cast<std::size_t>(failed)) + "/" +
         std::to_string(r.checks.size()) + " checks");
  if (r.checks.empty()) o.fail("no checks ran");
}

void criterion4(Outcome& o) {
  std::mt19937_64 rng(4);
  int reproduced = 0, total = 0;
  for (int i = 0; i < 200; ++i) {
    const int d = 2 + i % 2;
    const int k = 1 + (i / 2) % 3;
    const Simplex s = random_mac_simplex(rng, d, kMacAngle);
    const auto w = random_poly_field(rng, d, k);
    for (auto variant : {DofVariant::nedelec, DofVariant::bdm_original}) {
      ++total;
      if (BDMElement(s, k, variant).interpolate(w) == w) ++reproduced;
    }
    if (k == 1) {
      const auto v = random_poly_field(rng, d, 3);
      if (BDMElement(s, 1, DofVariant::nedelec).interpolate(v) != BDMElement(s, 1, DofVariant::bdm_original).interpolate(v)) {
        o.fail("k=1 variants differ on field " + std::to_string(i));
      }
    }
  }
  o.note(std::to_string(reproduced) + "/" + std::to_string(total) + " reproduced");
  if (reproduced != total) o.fail("projection property violated");
}

void criterion6(Outcome& o) {
  std::mt19937_64 rng(7);
  const auto v = random_divergence_free_field(rng, 3, 3);
  std::vector<std::vector<Rational>> grid;
  for (long eta : {1L, 100L, 10000L, 1000000L}) grid.push_back({1, 1, Rational(eta)});
  for (int k = 1; k <= 2; ++k) {
    const auto sw = sweep(element_family_t1(), [&](const auto&, const Simplex&) { return v; },
                          EstimateSpec{EstimateId::interpolation_rvp, k, k, DofVariant::nedelec, {}}, grid);
    double lo = INFINITY, hi = 0;
    for (double r : sw.ratios) {
      lo = std::min(lo, r);
      hi = std::max(hi, r);
    }
    o.note("rvp k=" + std::to_string(k) + " max/min " + fmt(hi / lo));
    if (!(lo > 0 && hi / lo < kBoundedFactor)) o.fail("rvp ratios not bounded for k=" + std::to_string(k));
  }
  std::mt19937_64 srng(70);
  double worst = 0;
  for (int i = 0; i < 100; ++i) {
    const int d = 2 + i % 2;
    const int k = 1 + (i / 2) % 2;
    const Simplex s = random_mac_simplex(srng, d, kMacAngle);
    const auto f = random_poly_field(srng, d, k + 2);
    for (int m = 0; m <= k; ++m) {
      const double r = evaluate_estimate({EstimateId::interpolation_mac, k, m, DofVariant::nedelec, {}}, s, f).ratio();
      worst = std::max(worst, r);
    }
  }
  o.note("mac max ratio " + fmt(worst));
  if (!(worst < kMacRatioCap)) o.fail("mac ratio over cap " + fmt(kMacRatioCap));
}

void criterion7(Outcome& o) {
  for (int n : {2, 8, 32}) {
    const auto m = build_shishkin({n, 0.01, std::nullopt, LogConvention::base10});
    if (m.num_triangles() != static_cast<std::size_t>(2 * n * n)) o.fail("triangle count at N=" + std::to_string(n));
    if (total_area(m) != 1) o.fail("area sum at N=" + std::to_string(n));
    for (std::size_t t = 0; t < m.num_triangles(); ++t) {
      if (!has_exact_right_max_angle(m.triangle(t))) {
        o.fail("triangle " + std::to_string(t) + " at N=" + std::to_string(n) + " lacks an exact right max angle");
        break;
      }
    }
  }
  const double tau = transition_point(0.01, LogConvention::base10);
  const double sigma = aspect_ratio(tau);
  const double sigma_mesh = mesh_aspect_ratio(build_shishkin({8, 0.01, std::nullopt, LogConvention::base10}));
  o.note("sigma(" + fmt(tau) + ") = " + fmt(sigma) + ", mesh " + fmt(sigma_mesh));
  if (std::fabs(sigma - kSigmaTarget) > kSigmaTol) o.fail("sigma off target");
  if (std::fabs(sigma_mesh - sigma) > 1e-9 * sigma) o.fail("mesh sigma disagrees with closed form");
}

void criterion8(Outcome& o) {
  const StudyOptions opts;
  double max_div = 0, max_jump = 0;
  const auto track = [&](const std::vector<StudyRow>& rows) {
    for (const auto& r : rows) {
      max_div = std::max(max_div, r.max_divergence);
      max_jump = std::max(max_jump, r.max_normal_jump);
    }
  };

  const auto fine = convergence_study({0.1}, {8, 16, 32, 64}, MeshKind::shishkin, opts);
  track(fine);
  const auto& last = fine.back();
  o.note("eps=0.1 rates u " + fmt(last.rate_u.value_or(NAN)) + " p " + fmt(last.rate_p.value_or(NAN)));
  if (!(last.rate_u.value_or(0) >= kRateMin && last.rate_p.value_or(0) >= kRateMin)) o.fail("eps=0.1 rate below " + fmt(kRateMin));

  const auto sh = convergence_study({0.01}, {32}, MeshKind::shishkin, opts);
  const auto un = convergence_study({0.01}, {32}, MeshKind::uniform, opts);
  track(sh);
  track(un);
  const double gain_u = un[0].err_grad_u / sh[0].err_grad_u;
  const double gain_p = un[0].err_p / sh[0].err_p;
  o.note("eps=0.01 N=32 uniform/shishkin u " + fmt(gain_u) + " p " + fmt(gain_p));
  if (!(gain_u >= kLayerGain && gain_p >= kLayerGain)) o.fail("layer gain below " + fmt(kLayerGain));
  // informational only: the same comparison with the facet height as penalty length scale
  StudyOptions height = opts;
  height.facet_scale = FacetScale::height;
  const auto sh_h = convergence_study({0.01}, {32}, MeshKind::shishkin, height);
  const auto un_h = convergence_study({0.01}, {32}, MeshKind::uniform, height);
  o.note("(facet-height penalty: u " + fmt(un_h[0].err_grad_u / sh_h[0].err_grad_u) + " p " +
         fmt(un_h[0].err_p / sh_h[0].err_p) + ", not gated)");

  const auto coarse = convergence_study({1e-3}, {8, 16, 32, 64}, MeshKind::uniform, opts);
  track(coarse);
  const double ru = coarse.back().rate_u.value_or(NAN);
  o.note("eps=1e-3 uniform rates u " + fmt(ru) + " p " + fmt(coarse.back().rate_p.value_or(NAN)));
  if (!(ru < kRateMin)) o.fail("uniform rate not sub-optimal");

  o.note("max div " + fmt(max_div) + " max jump " + fmt(max_jump));
  if (!(max_div <= kDivTol)) o.fail("divergence over " + fmt(kDivTol));
  if (!(max_jump <= kJumpTol)) o.fail("normal jump over " + fmt(kJumpTol));
}

}  // namespace

int main() {
  bool all = true;
  all &= run(1, kLimit1, [](Outcome& o) { absorb_suite(o, verify_dof_variants()); });
  all &= run(2, kLimit2, [](Outcome& o) { absorb_suite(o, verify_counterexample_2d()); });
  all &= run(3, kLimit3, [](Outcome& o) { absorb_suite(o, verify_counterexample_3d()); });
  all &= run(4, kLimit4, criterion4);
  all &= run(5, kLimit5, [](Outcome& o) { absorb_suite(o, verify_structural_lemmas(2)); });
  all &= run(6, kLimit6, criterion6);
  all &= run(7, kLimit7, criterion7);
  all &= run(8, kLimit8, criterion8);
  return all ? 0 : 1;
}
