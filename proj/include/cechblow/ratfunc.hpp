#pragma once

// Rational functions: reduced quotients of polynomials over the rationals.

#include <vector>

#include "cechblow/poly.hpp"

namespace cechblow {

/// Canonical form: gcd(num, den) is constant and den has leading
/// coefficient 1; the zero function is 0/1.
class RatFunc {
 public:
  RatFunc() = default;

  explicit RatFunc(const Poly& p)
      : num_(p), den_(Poly::constant(p.nvars(), 1)) {}

  RatFunc(const Poly& num, const Poly& den) : num_(num), den_(den) {
    if (den_.is_zero()) throw DivisionByZeroFunction();
    if (num_.nvars() != den_.nvars())
      throw Error("numerator and denominator over different rings");
    canonicalize();
  }

  static RatFunc constant(std::size_t nvars, const Rational& c) {
    return RatFunc(Poly::constant(nvars, c));
  }

  static RatFunc variable(std::size_t nvars, std::size_t i) {
    return RatFunc(Poly::variable(nvars, i));
  }

  const Poly& num() const { return num_; }
  const Poly& den() const { return den_; }
  std::size_t nvars() const { return num_.nvars(); }
  bool is_zero() const { return num_.is_zero(); }
  bool is_polynomial() const { return den_.is_constant(); }

  RatFunc operator-() const { return from_reduced(-num_, den_); }

  friend RatFunc operator+(const RatFunc& a, const RatFunc& b) {
    if (a.den_ == b.den_) return RatFunc(a.num_ + b.num_, a.den_);
    return RatFunc(a.num_ * b.den_ + b.num_ * a.den_, a.den_ * b.den_);
  }

  friend RatFunc operator-(const RatFunc& a, const RatFunc& b) {
    return a + (-b);
  }

  friend RatFunc operator*(const RatFunc& a, const RatFunc& b) {
    return RatFunc(a.num_ * b.num_, a.den_ * b.den_);
  }

  friend RatFunc operator/(const RatFunc& a, const RatFunc& b) {
    if (b.is_zero()) throw DivisionByZeroFunction();
    return RatFunc(a.num_ * b.den_, a.den_ * b.num_);
  }

  RatFunc& operator+=(const RatFunc& o) { return *this = *this + o; }
  RatFunc& operator-=(const RatFunc& o) { return *this = *this - o; }
  RatFunc& operator*=(const RatFunc& o) { return *this = *this * o; }

  RatFunc pow(unsigned k) const { return from_reduced(num_.pow(k), den_.pow(k)); }

  friend bool operator==(const RatFunc& a, const RatFunc& b) {
    return a.num_ == b.num_ && a.den_ == b.den_;
  }

  /// Exact value at a point.
  Rational evaluate(std::span<const Rational> point) const {
    const Rational d = den_.evaluate(point);
    const Rational n = num_.evaluate(point);
    if (d == 0) {
      if (n == 0) throw IndeterminateAtPoint();
      throw PoleAtPoint();
    }
    return n / d;
  }

 private:
  static RatFunc from_reduced(Poly num, Poly den) {
    RatFunc r;
    r.num_ = std::move(num);
    r.den_ = std::move(den);
    r.fix_sign();
    return r;
  }

  void canonicalize() {
    if (num_.is_zero()) {
      den_ = Poly::constant(num_.nvars(), 1);
      return;
    }
    if (!den_.is_constant()) {
      const Poly g = gcd(num_, den_);
      if (!g.is_constant()) {
        num_ = divide_exact(num_, g);
        den_ = divide_exact(den_, g);
      }
    }
    fix_sign();
  }

  void fix_sign() {
    if (num_.is_zero()) {
      den_ = Poly::constant(num_.nvars(), 1);
      return;
    }
    const Rational lc = den_.leading_coefficient();
    if (lc != 1) {
      const Rational inv = Rational(1) / lc;
      num_ *= inv;
      den_ *= inv;
    }
  }

  Poly num_;
  Poly den_;
};

inline RatFunc operator+(const RatFunc& a, const Poly& b) { return a + RatFunc(b); }
inline RatFunc operator*(const RatFunc& a, const Poly& b) { return a * RatFunc(b); }
inline RatFunc operator*(const Poly& a, const RatFunc& b) { return RatFunc(a) * b; }

/// Substitutes a polynomial through rational images, returning num/den
/// where den is a product of powers of the image denominators.
inline std::pair<Poly, Poly> substitute_parts(const Poly& p,
                                              std::span<const RatFunc> images) {
  const std::size_t n = p.nvars();
  if (images.size() != n) throw Error("substitution arity mismatch");
  const std::size_t out_vars = images.empty() ? 0 : images[0].nvars();
  std::vector<unsigned> degs(n);
  for (std::size_t i = 0; i < n; ++i) degs[i] = p.degree_in(i);

  std::vector<std::vector<Poly>> num_pow(n), den_pow(n);
  auto power = [&](std::vector<std::vector<Poly>>& cache, const Poly& base,
                   std::size_t i, unsigned k) -> const Poly& {
    auto& c = cache[i];
    if (c.empty()) c.push_back(Poly::constant(out_vars, 1));
    while (c.size() <= k) c.push_back(c.back() * base);
    return c[k];
  };

  Poly num(out_vars);
  for (const auto& [e, c] : p.terms()) {
    Poly term = Poly::constant(out_vars, c);
    for (std::size_t i = 0; i < n; ++i) {
      if (degs[i] == 0) continue;
      if (e[i] > 0) term *= power(num_pow, images[i].num(), i, e[i]);
      // Canonical constant denominators are 1.
      if (degs[i] - e[i] > 0 && !images[i].den().is_constant())
        term *= power(den_pow, images[i].den(), i, degs[i] - e[i]);
    }
    num += term;
  }
  Poly den = Poly::constant(out_vars, 1);
  for (std::size_t i = 0; i < n; ++i) {
    if (degs[i] > 0 && !images[i].den().is_constant())
      den *= power(den_pow, images[i].den(), i, degs[i]);
  }
  return {num, den};
}

/// Composition f(images). Throws DenominatorCollapse when the composed
/// denominator vanishes identically.
inline RatFunc substitute(const RatFunc& f, std::span<const RatFunc> images) {
  auto [nn, nd] = substitute_parts(f.num(), images);
  auto [dn, dd] = substitute_parts(f.den(), images);
  if (dn.is_zero()) throw DenominatorCollapse();
  return RatFunc(nn * dd, nd * dn);
}

inline RatFunc substitute(const RatFunc& f, std::initializer_list<RatFunc> images) {
  return substitute(f, std::span<const RatFunc>(images.begin(), images.size()));
}

inline RatFunc substitute(const Poly& p, std::span<const RatFunc> images) {
  return substitute(RatFunc(p), images);
}

enum class ArithOp { add, sub, mul, div, pow };

/// Binary arithmetic dispatch; for pow, b must be a non-negative integer
/// constant.
inline RatFunc arith(const RatFunc& a, const RatFunc& b, ArithOp op) {
  switch (op) {
    case ArithOp::add:
      return a + b;
    case ArithOp::sub:
      return a - b;
    case ArithOp::mul:
      return a * b;
    case ArithOp::div:
      return a / b;
    case ArithOp::pow: {
      if (!b.is_polynomial() || !b.num().is_constant())
        throw Error("exponent must be a constant");
      const Rational e = b.num().constant_term();
      if (e.get_den() != 1 || e < 0 || !e.get_num().fits_uint_p())
        throw Error("exponent must be a non-negative integer");
      return a.pow(static_cast<unsigned>(e.get_num().get_ui()));
    }
  }
  throw Error("unknown arithmetic operation");
}

inline std::string to_string(const RatFunc& f,
                             const std::vector<std::string>& names) {
  if (f.is_polynomial()) return to_string(f.num(), names);
  return "(" + to_string(f.num(), names) + ")/(" + to_string(f.den(), names) + ")";
}

inline std::string to_string(const RatFunc& f) {
  return to_string(f, default_names(f.nvars()));
}

inline RatFunc parse_ratfunc(std::string_view num, std::string_view den,
                             const std::vector<std::string>& names) {
  return RatFunc(parse_poly(num, names), parse_poly(den, names));
}

}  // namespace cechblow
