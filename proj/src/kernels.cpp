#include <atomic>
#include <cstdlib>
#include <cstring>

#include "bdmlab/kernels.hpp"

namespace bdmlab::kernels {

namespace {

Isa initial_isa() {
  if (const char* env = std::getenv("BDMLAB_SIMD"); env != nullptr && std::strcmp(env, "scalar") == 0) {
    return Isa::scalar;
  }
  return detected_isa();
}

std::atomic<Isa>& isa_slot() {
  static std::atomic<Isa> slot{initial_isa()};
  return slot;
}

}  // namespace

std::string to_string(Isa isa) { return isa == Isa::avx2 ? "avx2" : "scalar"; }

Isa detected_isa() {
#ifdef BDMLAB_HAVE_AVX2_KERNELS
  __builtin_cpu_init();
  if (__builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma")) return Isa::avx2;
#endif
  return Isa::scalar;
}

Isa active_isa() { return isa_slot().load(std::memory_order_relaxed); }

void set_active_isa(Isa isa) {
  if (isa == Isa::avx2 && detected_isa() != Isa::avx2) isa = Isa::scalar;
  isa_slot().store(isa, std::memory_order_relaxed);
}

double weighted_sum(std::span<const double> w, std::span<const double> f) {
#ifdef BDMLAB_HAVE_AVX2_KERNELS
  if (active_isa() == Isa::avx2) return avx2::weighted_sum(w, f);
#endif
  return scalar::weighted_sum(w, f);
}

double weighted_dot(std::span<const double> w, std::span<const double> f, std::span<const double> g) {
#ifdef BDMLAB_HAVE_AVX2_KERNELS
  if (active_isa() == Isa::avx2) return avx2::weighted_dot(w, f, g);
#endif
  return scalar::weighted_dot(w, f, g);
}

double dot(std::span<const double> a, std::span<const double> b) {
#ifdef BDMLAB_HAVE_AVX2_KERNELS
  if (active_isa() == Isa::avx2) return avx2::dot(a, b);
#endif
  return scalar::dot(a, b);
}

void axpy(double a, std::span<const double> x, std::span<double> y) {
#ifdef BDMLAB_HAVE_AVX2_KERNELS
  if (active_isa() == Isa::avx2) {
    avx2::axpy(a, x, y);
    return;
  }
#endif
  scalar::axpy(a, x, y);
}

}  // namespace bdmlab::kernels
