#pragma once

#include <gmpxx.h>

#include <cmath>
#include <string>
#include <string_view>
#include <type_traits>

namespace bdmlab {

// Exact arithmetic is backed by GMP rationals; every mpq_class value is kept
// in canonical (reduced) form.
using Rational = mpq_class;

enum class ScalarMode { exact, float64 };

inline double to_double(const Rational& q) { return q.get_d(); }
inline double to_double(double x) { return x; }

/// Exact rational value of a finite double.
Rational rational_from_double(double x);

/// Parses "p", "p/q" or a decimal literal such as "-0.125" / "1e-3" exactly.
Rational parse_rational(std::string_view text);

std::string to_string(const Rational& q);
std::string to_string(double x);

template <class T>
T from_rational(const Rational& q) {
  if constexpr (std::is_same_v<T, Rational>) {
    return q;
  } else {
    return static_cast<T>(q.get_d());
  }
}

template <class T>
T from_int(long v) {
  if constexpr (std::is_same_v<T, Rational>) {
    return Rational(v);
  } else {
    return static_cast<T>(v);
  }
}

template <class T>
bool is_zero(const T& v) {
  if constexpr (std::is_same_v<T, Rational>) {
    return sgn(v) == 0;
  } else {
    return v == 0.0;
  }
}

template <class T>
T abs_value(const T& v) {
  if constexpr (std::is_same_v<T, Rational>) {
    return abs(v);
  } else {
    return std::fabs(v);
  }
}

}  // namespace bdmlab
