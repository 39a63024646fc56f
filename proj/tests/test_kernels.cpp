#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "bdmlab/kernels.hpp"

using namespace bdmlab;
namespace k = bdmlab::kernels;

namespace {

std::vector<double> random_vector(std::mt19937_64& rng, std::size_t n) {
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  std::vector<double> v(n);
  for (auto& x : v) x = d(rng);
  return v;
}

double bound(std::span<const double> a, std::span<const double> b, std::span<const double> c) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += std::fabs(a[i] * b[i] * (c.empty() ? 1.0 : c[i]));
  return 1e-14 * (s + 1.0);
}

}  // namespace

TEST_CASE("SIMD kernels agree with the scalar reference") {
  std::mt19937_64 rng(42);
  for (std::size_t n : {0u, 1u, 3u, 4u, 5u, 7u, 8u, 9u, 15u, 16u, 17u, 63u, 64u, 1001u}) {
    const auto w = random_vector(rng, n);
    const auto f = random_vector(rng, n);
    const auto g = random_vector(rng, n);
    const double s_ws = k::scalar::weighted_sum(w, f);
    const double s_wd = k::scalar::weighted_dot(w, f, g);
    const double s_d = k::scalar::dot(f, g);
#ifdef BDMLAB_HAVE_AVX2_KERNELS
    if (k::detected_isa() == k::Isa::avx2) {
      CHECK(std::fabs(k::avx2::weighted_sum(w, f) - s_ws) <= bound(w, f, {}));
      CHECK(std::fabs(k::avx2::weighted_dot(w, f, g) - s_wd) <= bound(w, f, g));
      CHECK(std::fabs(k::avx2::dot(f, g) - s_d) <= bound(f, g, {}));
      auto y1 = g;
      auto y2 = g;
      k::scalar::axpy(0.75, f, y1);
      k::avx2::axpy(0.75, f, y2);
      for (std::size_t i = 0; i < n; ++i) CHECK(y1[i] == doctest::Approx(y2[i]).epsilon(1e-15));
    }
#endif
    // dispatcher matches whichever kernel is active
    CHECK(std::fabs(k::weighted_sum(w, f) - s_ws) <= bound(w, f, {}));
  }
}

TEST_CASE("dispatch can be forced to scalar") {
  const auto before = k::active_isa();
  k::set_active_isa(k::Isa::scalar);
  CHECK(k::active_isa() == k::Isa::scalar);
  const std::vector<double> w{1, 2, 3}, f{4, 5, 6};
  CHECK(k::weighted_sum(w, f) == 32.0);
  k::set_active_isa(before);
  CHECK(k::active_isa() == before);
}
