#include "bdmlab/polynomial.hpp"

#include <cctype>
#include <sstream>

namespace bdmlab {

std::vector<MultiIndex> multi_indices_exact(int dim, int k) {
  std::vector<MultiIndex> out;
  if (k < 0) return out;
  if (dim == 1) {
    out.push_back({k, 0, 0});
  } else if (dim == 2) {
    for (int a = k; a >= 0; --a) out.push_back({a, k - a, 0});
  } else {
    for (int a = k; a >= 0; --a) {
      for (int b = k - a; b >= 0; --b) out.push_back({a, b, k - a - b});
    }
  }
  return out;
}

std::vector<MultiIndex> multi_indices_up_to(int dim, int k) {
  std::vector<MultiIndex> out;
  for (int n = 0; n <= k; ++n) {
    auto layer = multi_indices_exact(dim, n);
    out.insert(out.end(), layer.begin(), layer.end());
  }
  return out;
}

namespace {

template <class T>
std::string coefficient_text(const T& c) {
  if constexpr (std::is_same_v<T, Rational>) {
    return c.get_str();
  } else {
    return to_string(c);
  }
}

template <class T>
bool is_negative(const T& c) {
  if constexpr (std::is_same_v<T, Rational>) {
    return sgn(c) < 0;
  } else {
    return c < 0;
  }
}

template <class T>
bool is_one(const T& c) {
  return c == from_int<T>(1);
}

}  // namespace

template <class T>
std::string Polynomial<T>::str() const {
  if (terms_.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  for (const auto& [a, c] : terms_) {
    const bool neg = is_negative(c);
    const T mag = neg ? T(-c) : c;
    if (first) {
      if (neg) os << "-";
    } else {
      os << (neg ? " - " : " + ");
    }
    first = false;
    const bool constant = total_degree(a) == 0;
    if (constant || !is_one(mag)) {
      os << coefficient_text(mag);
      if (!constant) os << "*";
    }
    bool first_var = true;
    for (int i = 0; i < dim_; ++i) {
      const int e = a[static_cast<std::size_t>(i)];
      if (e == 0) continue;
      if (!first_var) os << "*";
      first_var = false;
      os << "x" << (i + 1);
      if (e > 1) os << "^" << e;
    }
  }
  return os.str();
}

template <class T>
std::string VectorPoly<T>::str() const {
  std::string s = "(";
  for (std::size_t i = 0; i < components.size(); ++i) {
    if (i) s += "; ";
    s += components[i].str();
  }
  return s + ")";
}

template class Polynomial<Rational>;
template class Polynomial<double>;
template struct VectorPoly<Rational>;
template struct VectorPoly<double>;

namespace {

class ExpressionParser {
 public:
  ExpressionParser(int dim, std::string_view text) : dim_(dim), text_(text) {}

  Polynomial<Rational> parse() {
    auto p = expression();
    skip_space();
    if (pos_ != text_.size()) fail("unexpected character");
    return p;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    throw std::invalid_argument("polynomial parse error at offset " + std::to_string(pos_) + ": " + what +
                                " in '" + std::string(text_) + "'");
  }
  void skip_space() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }
  bool accept(char c) {
    skip_space();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  Polynomial<Rational> expression() {
    Polynomial<Rational> acc = term();
    while (true) {
      if (accept('+')) {
        acc += term();
      } else if (accept('-')) {
        acc -= term();
      } else {
        return acc;
      }
    }
  }

  Polynomial<Rational> term() {
    Polynomial<Rational> acc = unary();
    while (true) {
      if (accept('*')) {
        acc *= unary();
      } else if (accept('/')) {
        const auto d = unary();
        if (d.degree() > 0 || d.is_zero()) fail("division by a non-constant or zero");
        acc *= Rational(1 / d.coefficient({0, 0, 0}));
      } else {
        skip_space();
        // implicit multiplication such as "3x1" or "x1 x2"
        if (pos_ < text_.size() && (text_[pos_] == 'x' || text_[pos_] == '(')) {
          acc *= unary();
        } else {
          return acc;
        }
      }
    }
  }

  Polynomial<Rational> unary() {
    if (accept('-')) return -unary();
    if (accept('+')) return unary();
    return power();
  }

  Polynomial<Rational> power() {
    Polynomial<Rational> base = primary();
    if (accept('^')) {
      skip_space();
      std::size_t start = pos_;
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
      if (start == pos_) fail("expected integer exponent");
      const int e = std::stoi(std::string(text_.substr(start, pos_ - start)));
      Polynomial<Rational> r = Polynomial<Rational>::constant(dim_, Rational(1));
      for (int i = 0; i < e; ++i) r *= base;
      return r;
    }
    return base;
  }

  Polynomial<Rational> primary() {
    skip_space();
    if (pos_ >= text_.size()) fail("unexpected end");
    const char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      auto p = expression();
      if (!accept(')')) fail("expected ')'");
      return p;
    }
    if (c == 'x') {
      ++pos_;
      if (pos_ >= text_.size() || !std::isdigit(static_cast<unsigned char>(text_[pos_]))) fail("expected variable index");
      const int idx = text_[pos_++] - '1';
      if (idx < 0 || idx >= dim_) fail("variable out of range");
      return Polynomial<Rational>::variable(dim_, idx);
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      std::size_t start = pos_;
      while (pos_ < text_.size() && (std::isdigit(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '.')) ++pos_;
      return Polynomial<Rational>::constant(dim_, parse_rational(text_.substr(start, pos_ - start)));
    }
    fail("unexpected character");
  }

  int dim_;
  std::string_view text_;
  std::size_t pos_ = 0;
};

}  // namespace

Polynomial<Rational> parse_polynomial(int dim, std::string_view text) { return ExpressionParser(dim, text).parse(); }

VectorPoly<Rational> parse_vector_poly(int dim, std::string_view text) {
  std::vector<Polynomial<Rational>> comps;
  std::size_t start = 0;
  while (true) {
    const auto semi = text.find(';', start);
    comps.push_back(parse_polynomial(dim, text.substr(start, semi == std::string_view::npos ? semi : semi - start)));
    if (semi == std::string_view::npos) break;
    start = semi + 1;
  }
  if (static_cast<int>(comps.size()) != dim) {
    throw std::invalid_argument("expected " + std::to_string(dim) + " components, got " + std::to_string(comps.size()));
  }
  return VectorPoly<Rational>(std::move(comps));
}

}  // namespace bdmlab
