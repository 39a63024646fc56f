#include "bdmlab/rational.hpp"

#include <charconv>
#include <stdexcept>
#include <string>

namespace bdmlab {

Rational rational_from_double(double x) {
  if (!std::isfinite(x)) throw std::invalid_argument("non-finite value has no rational form");
  Rational q(x);  // GMP converts doubles exactly
  q.canonicalize();
  return q;
}

Rational parse_rational(std::string_view text) {
  std::string s(text);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.pop_back();
  std::size_t start = 0;
  while (start < s.size() && std::isspace(static_cast<unsigned char>(s[start]))) ++start;
  s = s.substr(start);
  if (s.empty()) throw std::invalid_argument("empty number");

  if (auto slash = s.find('/'); slash != std::string::npos) {
    Rational q;
    try {
      q = Rational(mpz_class(s.substr(0, slash), 10), mpz_class(s.substr(slash + 1), 10));
    } catch (const std::invalid_argument&) {
      throw std::invalid_argument("malformed rational '" + s + "'");
    }
    if (sgn(q.get_den()) == 0) throw std::invalid_argument("zero denominator in '" + s + "'");
    q.canonicalize();
    return q;
  }

  // Decimal literal: mantissa digits with optional point, optional exponent.
  bool negative = false;
  std::size_t i = 0;
  if (s[i] == '+' || s[i] == '-') negative = s[i++] == '-';
  std::string digits;
  long frac_digits = 0;
  bool seen_point = false;
  for (; i < s.size() && s[i] != 'e' && s[i] != 'E'; ++i) {
    if (s[i] == '.') {
      if (seen_point) throw std::invalid_argument("malformed number '" + s + "'");
      seen_point = true;
    } else if (std::isdigit(static_cast<unsigned char>(s[i]))) {
      digits.push_back(s[i]);
      if (seen_point) ++frac_digits;
    } else {
      throw std::invalid_argument("malformed number '" + s + "'");
    }
  }
  if (digits.empty()) throw std::invalid_argument("malformed number '" + s + "'");
  long exponent = 0;
  if (i < s.size()) {
    const std::string e = s.substr(i + 1);
    auto [ptr, ec] = std::from_chars(e.data() + (e.size() > 0 && e[0] == '+' ? 1 : 0), e.data() + e.size(), exponent);
    if (ec != std::errc() || ptr != e.data() + e.size()) throw std::invalid_argument("malformed exponent in '" + s + "'");
  }
  exponent -= frac_digits;
  mpz_class mant(digits, 10);
  mpz_class scale;
  mpz_ui_pow_ui(scale.get_mpz_t(), 10, static_cast<unsigned long>(exponent < 0 ? -exponent : exponent));
  Rational q = exponent < 0 ? Rational(mant, scale) : Rational(mant * scale);
  q.canonicalize();
  return negative ? Rational(-q) : q;
}

std::string to_string(const Rational& q) { return q.get_str(); }

std::string to_string(double x) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, ptr);
}

}  // namespace bdmlab
