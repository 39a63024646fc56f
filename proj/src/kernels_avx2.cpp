#include "bdmlab/kernels.hpp"

#ifdef BDMLAB_HAVE_AVX2_KERNELS

#include <immintrin.h>

#include <cstddef>

#define BDMLAB_AVX2 __attribute__((target("avx2,fma")))

namespace bdmlab::kernels::avx2 {

namespace {

BDMLAB_AVX2 inline double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

}  // namespace

BDMLAB_AVX2 double weighted_sum(std::span<const double> w, std::span<const double> f) {
  const std::size_t n = w.size();
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(w.data() + i), _mm256_loadu_pd(f.data() + i), acc0);
    acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(w.data() + i + 4), _mm256_loadu_pd(f.data() + i + 4), acc1);
  }
  for (; i + 4 <= n; i += 4) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(w.data() + i), _mm256_loadu_pd(f.data() + i), acc0);
  }
  double s = hsum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) s += w[i] * f[i];
  return s;
}

BDMLAB_AVX2 double weighted_dot(std::span<const double> w, std::span<const double> f, std::span<const double> g) {
  const std::size_t n = w.size();
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d wf = _mm256_mul_pd(_mm256_loadu_pd(w.data() + i), _mm256_loadu_pd(f.data() + i));
    acc = _mm256_fmadd_pd(wf, _mm256_loadu_pd(g.data() + i), acc);
  }
  double s = hsum(acc);
  for (; i < n; ++i) s += w[i] * f[i] * g[i];
  return s;
}

BDMLAB_AVX2 double dot(std::span<const double> a, std::span<const double> b) { return weighted_sum(a, b); }

BDMLAB_AVX2 void axpy(double a, std::span<const double> x, std::span<double> y) {
  const std::size_t n = x.size();
  const __m256d av = _mm256_set1_pd(a);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(y.data() + i, _mm256_fmadd_pd(av, _mm256_loadu_pd(x.data() + i), _mm256_loadu_pd(y.data() + i)));
  }
  for (; i < n; ++i) y[i] += a * x[i];
}

}  // namespace bdmlab::kernels::avx2

#endif
