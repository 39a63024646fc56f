#pragma once

#include <span>
#include <string>

// Data-parallel reductions used by the quadrature paths. Each kernel has a
// scalar reference implementation and, on x86-64, an AVX2/FMA variant; the
// dispatcher picks one at runtime from the CPU feature set.
namespace bdmlab::kernels {

enum class Isa { scalar, avx2 };

std::string to_string(Isa isa);
/// Best ISA supported by the running CPU (and compiled in).
Isa detected_isa();
/// ISA used by the dispatching entry points. Defaults to detected_isa(),
/// unless BDMLAB_SIMD=scalar is set in the environment.
Isa active_isa();
/// Overrides the dispatch choice; requesting an unsupported ISA falls back to scalar.
void set_active_isa(Isa isa);

/// sum_i w_i f_i
double weighted_sum(std::span<const double> w, std::span<const double> f);
/// sum_i w_i f_i g_i
double weighted_dot(std::span<const double> w, std::span<const double> f, std::span<const double> g);
/// sum_i a_i b_i
double dot(std::span<const double> a, std::span<const double> b);
/// y += a x
void axpy(double a, std::span<const double> x, std::span<double> y);

namespace scalar {
double weighted_sum(std::span<const double> w, std::span<const double> f);
double weighted_dot(std::span<const double> w, std::span<const double> f, std::span<const double> g);
double dot(std::span<const double> a, std::span<const double> b);
void axpy(double a, std::span<const double> x, std::span<double> y);
}  // namespace scalar

#if defined(__x86_64__) || defined(_M_X64)
#define BDMLAB_HAVE_AVX2_KERNELS 1
namespace avx2 {
double weighted_sum(std::span<const double> w, std::span<const double> f);
double weighted_dot(std::span<const double> w, std::span<const double> f, std::span<const double> g);
double dot(std::span<const double> a, std::span<const double> b);
void axpy(double a, std::span<const double> x, std::span<double> y);
}  // namespace avx2
#endif

}  // namespace bdmlab::kernels
