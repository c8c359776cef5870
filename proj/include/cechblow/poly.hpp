#pragma once

// Sparse multivariate polynomials over the rationals.
//
// Terms live in a map keyed by exponent vectors under graded lexicographic
// order, so iteration is ascending and the leading term is the last entry.
// Zero coefficients are never stored.

#include <gmpxx.h>

#include <algorithm>
#include <cctype>
#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace cechblow {

using Rational = mpq_class;
using Exponents = std::vector<unsigned>;
using Point = std::vector<Rational>;

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NotDivisible : public Error {
 public:
  NotDivisible() : Error("polynomial is not divisible") {}
};

class DivisionByZeroFunction : public Error {
 public:
  DivisionByZeroFunction() : Error("division by the zero function") {}
};

class DenominatorCollapse : public Error {
 public:
  DenominatorCollapse()
      : Error("substitution makes the denominator identically zero") {}
};

class PoleAtPoint : public Error {
 public:
  PoleAtPoint() : Error("pole at point") {}
};

class IndeterminateAtPoint : public Error {
 public:
  IndeterminateAtPoint() : Error("indeterminate value at point") {}
};

inline unsigned total_degree(const Exponents& e) {
  unsigned d = 0;
  for (unsigned x : e) d += x;
  return d;
}

/// Graded lexicographic order: total degree first, then lexicographic with
/// variable 0 most significant.
struct GrlexLess {
  bool operator()(const Exponents& a, const Exponents& b) const {
    const unsigned da = total_degree(a);
    const unsigned db = total_degree(b);
    if (da != db) return da < db;
    return a < b;
  }
};

inline Rational make_rational(long num, long den = 1) {
  Rational r(num, den);
  r.canonicalize();
  return r;
}

class Poly {
 public:
  using TermMap = std::map<Exponents, Rational, GrlexLess>;

  Poly() = default;
  explicit Poly(std::size_t nvars) : nvars_(nvars) {}

  static Poly constant(std::size_t nvars, const Rational& c) {
    Poly p(nvars);
    if (c != 0) p.terms_.emplace(Exponents(nvars, 0), c);
    return p;
  }

  static Poly variable(std::size_t nvars, std::size_t index) {
    if (index >= nvars) throw Error("variable index out of range");
    Exponents e(nvars, 0);
    e[index] = 1;
    Poly p(nvars);
    p.terms_.emplace(std::move(e), Rational(1));
    return p;
  }

  static Poly monomial(Exponents e, const Rational& c = 1) {
    Poly p(e.size());
    if (c != 0) p.terms_.emplace(std::move(e), c);
    return p;
  }

  std::size_t nvars() const { return nvars_; }
  const TermMap& terms() const { return terms_; }
  std::size_t size() const { return terms_.size(); }
  bool is_zero() const { return terms_.empty(); }

  bool is_constant() const {
    return terms_.empty() ||
           (terms_.size() == 1 && cechblow::total_degree(terms_.begin()->first) == 0);
  }

  Rational constant_term() const {
    if (terms_.empty()) return 0;
    auto it = terms_.begin();
    return cechblow::total_degree(it->first) == 0 ? it->second : Rational(0);
  }

  unsigned total_degree() const {
    return terms_.empty() ? 0 : cechblow::total_degree(terms_.rbegin()->first);
  }

  unsigned degree_in(std::size_t v) const {
    unsigned d = 0;
    for (const auto& [e, c] : terms_) d = std::max(d, e[v]);
    return d;
  }

  bool mentions(std::size_t v) const {
    for (const auto& [e, c] : terms_)
      if (e[v] != 0) return true;
    return false;
  }

  const Exponents& leading_exponents() const {
    if (terms_.empty()) throw Error("leading term of zero polynomial");
    return terms_.rbegin()->first;
  }

  const Rational& leading_coefficient() const {
    if (terms_.empty()) throw Error("leading coefficient of zero polynomial");
    return terms_.rbegin()->second;
  }

  Rational coefficient(const Exponents& e) const {
    auto it = terms_.find(e);
    return it == terms_.end() ? Rational(0) : it->second;
  }

  /// Adds c*x^e in place.
  void add_term(const Exponents& e, const Rational& c) {
    if (c == 0) return;
    auto [it, inserted] = terms_.try_emplace(e, c);
    if (!inserted) {
      it->second += c;
      if (it->second == 0) terms_.erase(it);
    }
  }

  Poly operator-() const {
    Poly r = *this;
    for (auto& [e, c] : r.terms_) c = -c;
    return r;
  }

  Poly& operator+=(const Poly& o) {
    check_compatible(o);
    for (const auto& [e, c] : o.terms_) add_term(e, c);
    return *this;
  }

  Poly& operator-=(const Poly& o) {
    check_compatible(o);
    for (const auto& [e, c] : o.terms_) add_term(e, -c);
    return *this;
  }

  Poly& operator*=(const Rational& s) {
    if (s == 0) {
      terms_.clear();
      return *this;
    }
    for (auto& [e, c] : terms_) c *= s;
    return *this;
  }

  friend Poly operator+(Poly a, const Poly& b) { return a += b; }
  friend Poly operator-(Poly a, const Poly& b) { return a -= b; }
  friend Poly operator*(Poly a, const Rational& s) { return a *= s; }
  friend Poly operator*(const Rational& s, Poly a) { return a *= s; }

  friend Poly operator*(const Poly& a, const Poly& b) {
    a.check_compatible(b);
    Poly r(a.nvars_);
    Exponents e(a.nvars_);
    for (const auto& [ea, ca] : a.terms_) {
      for (const auto& [eb, cb] : b.terms_) {
        for (std::size_t i = 0; i < e.size(); ++i) e[i] = ea[i] + eb[i];
        r.add_term(e, ca * cb);
      }
    }
    return r;
  }

  Poly& operator*=(const Poly& o) { return *this = *this * o; }

  friend bool operator==(const Poly& a, const Poly& b) {
    return a.nvars_ == b.nvars_ && a.terms_ == b.terms_;
  }

  Poly pow(unsigned k) const {
    Poly result = constant(nvars_, 1);
    Poly base = *this;
    while (k > 0) {
      if (k & 1u) result *= base;
      k >>= 1u;
      if (k > 0) base *= base;
    }
    return result;
  }

  Rational evaluate(std::span<const Rational> point) const {
    if (point.size() != nvars_) throw Error("point dimension mismatch");
    Rational sum = 0;
    Rational term;
    for (const auto& [e, c] : terms_) {
      term = c;
      for (std::size_t i = 0; i < nvars_; ++i) {
        for (unsigned k = 0; k < e[i]; ++k) term *= point[i];
      }
      sum += term;
    }
    return sum;
  }

  Poly derivative(std::size_t v) const {
    Poly r(nvars_);
    for (const auto& [e, c] : terms_) {
      if (e[v] == 0) continue;
      Exponents d = e;
      d[v] -= 1;
      r.add_term(d, c * e[v]);
    }
    return r;
  }

  /// Coefficient of v^k, as a polynomial not involving v.
  Poly coefficient_in(std::size_t v, unsigned k) const {
    Poly r(nvars_);
    for (const auto& [e, c] : terms_) {
      if (e[v] != k) continue;
      Exponents d = e;
      d[v] = 0;
      r.terms_.emplace(std::move(d), c);
    }
    return r;
  }

  /// Leading coefficient with respect to variable v.
  Poly leading_coefficient_in(std::size_t v) const {
    return coefficient_in(v, degree_in(v));
  }

  /// Substitutes one polynomial per variable.
  Poly compose(std::span<const Poly> images) const {
    if (images.size() != nvars_) throw Error("substitution arity mismatch");
    const std::size_t out_vars = images.empty() ? 0 : images[0].nvars();
    std::vector<std::vector<Poly>> powers(nvars_);
    for (std::size_t i = 0; i < nvars_; ++i) {
      if (images[i].nvars() != out_vars)
        throw Error("substitution images disagree on variable count");
      powers[i].push_back(constant(out_vars, 1));
    }
    Poly r(out_vars);
    for (const auto& [e, c] : terms_) {
      Poly term = constant(out_vars, c);
      for (std::size_t i = 0; i < nvars_; ++i) {
        while (powers[i].size() <= e[i])
          powers[i].push_back(powers[i].back() * images[i]);
        if (e[i] > 0) term *= powers[i][e[i]];
      }
      r += term;
    }
    return r;
  }

  /// Common monomial factor: componentwise minimum exponent over all terms.
  Exponents monomial_content() const {
    Exponents m(nvars_, 0);
    bool first = true;
    for (const auto& [e, c] : terms_) {
      if (first) {
        m = e;
        first = false;
      } else {
        for (std::size_t i = 0; i < nvars_; ++i) m[i] = std::min(m[i], e[i]);
      }
    }
    return m;
  }

 private:
  void check_compatible(const Poly& o) const {
    if (nvars_ != o.nvars_) throw Error("polynomials over different rings");
  }

  std::size_t nvars_ = 0;
  TermMap terms_;
};

inline Poly operator*(const Poly& a, long s) { return a * Rational(s); }

// ---------------------------------------------------------------------------
// Division and gcd.

/// Returns q with p == d*q when such a polynomial exists.
inline std::optional<Poly> try_divide(const Poly& p, const Poly& d) {
  if (d.is_zero()) throw DivisionByZeroFunction();
  const std::size_t n = p.nvars();
  Poly rem = p;
  Poly quot(n);
  const Exponents& ld = d.leading_exponents();
  const Rational& lc = d.leading_coefficient();
  Exponents e(n);
  while (!rem.is_zero()) {
    const Exponents& lr = rem.leading_exponents();
    for (std::size_t i = 0; i < n; ++i) {
      if (lr[i] < ld[i]) return std::nullopt;
      e[i] = lr[i] - ld[i];
    }
    Poly t = Poly::monomial(e, rem.leading_coefficient() / lc);
    quot += t;
    rem -= t * d;
  }
  return quot;
}

inline Poly divide_exact(const Poly& p, const Poly& d) {
  auto q = try_divide(p, d);
  if (!q) throw NotDivisible();
  return *std::move(q);
}

inline bool divides(const Poly& d, const Poly& p) {
  return try_divide(p, d).has_value();
}

/// Scales so the leading coefficient is 1; zero stays zero.
inline Poly normalize(const Poly& p) {
  if (p.is_zero()) return p;
  return p * (Rational(1) / p.leading_coefficient());
}

/// Highest-index variable appearing in p, if any.
inline std::optional<std::size_t> main_variable(const Poly& p) {
  for (std::size_t v = p.nvars(); v-- > 0;)
    if (p.mentions(v)) return v;
  return std::nullopt;
}

/// lc_v(b)^(deg_v a - deg_v b + 1) * a reduced modulo b in variable v.
inline Poly pseudo_remainder(const Poly& a, const Poly& b, std::size_t v) {
  const unsigned db = b.degree_in(v);
  const Poly lcb = b.leading_coefficient_in(v);
  Poly r = a;
  int e = static_cast<int>(a.degree_in(v)) - static_cast<int>(db) + 1;
  if (e < 0) return a;
  while (!r.is_zero() && r.degree_in(v) >= db) {
    const unsigned dr = r.degree_in(v);
    Exponents shift(a.nvars(), 0);
    shift[v] = dr - db;
    Poly t = r.leading_coefficient_in(v) * Poly::monomial(shift);
    r = lcb * r - t * b;
    --e;
  }
  return lcb.pow(static_cast<unsigned>(std::max(e, 0))) * r;
}

Poly gcd(const Poly& p, const Poly& q);

/// Gcd of the coefficients of p viewed as a polynomial in v.
inline Poly content_in(const Poly& p, std::size_t v) {
  Poly c(p.nvars());
  const unsigned d = p.degree_in(v);
  for (unsigned k = 0; k <= d; ++k) {
    Poly coeff = p.coefficient_in(v, k);
    if (coeff.is_zero()) continue;
    c = gcd(c, coeff);
    if (c.is_constant()) break;
  }
  return c;
}

inline Poly primitive_part_in(const Poly& p, std::size_t v) {
  if (p.is_zero()) return p;
  return divide_exact(p, content_in(p, v));
}

/// Greatest common divisor, normalized to leading coefficient 1.
/// Recursion on the main variable with a subresultant remainder sequence.
inline Poly gcd(const Poly& p, const Poly& q) {
  const std::size_t n = p.nvars();
  if (p.is_zero()) return normalize(q);
  if (q.is_zero()) return normalize(p);
  if (p.is_constant() || q.is_constant()) return Poly::constant(n, 1);
  if (divides(q, p)) return normalize(q);
  if (divides(p, q)) return normalize(p);

  const auto vp = main_variable(p);
  const auto vq = main_variable(q);
  const std::size_t v = std::max(*vp, *vq);
  if (!p.mentions(v)) return gcd(p, content_in(q, v));
  if (!q.mentions(v)) return gcd(content_in(p, v), q);

  const Poly cp = content_in(p, v);
  const Poly cq = content_in(q, v);
  const Poly c = gcd(cp, cq);
  Poly a = divide_exact(p, cp);
  Poly b = divide_exact(q, cq);
  if (a.degree_in(v) < b.degree_in(v)) std::swap(a, b);

  Poly g = Poly::constant(n, 1);
  Poly h = Poly::constant(n, 1);
  for (;;) {
    const unsigned delta = a.degree_in(v) - b.degree_in(v);
    Poly r = pseudo_remainder(a, b, v);
    if (r.is_zero()) break;
    if (r.degree_in(v) == 0) return normalize(c);
    a = std::move(b);
    b = divide_exact(r, g * h.pow(delta));
    g = a.leading_coefficient_in(v);
    if (delta == 1) {
      h = g;
    } else if (delta > 1) {
      h = divide_exact(g.pow(delta), h.pow(delta - 1));
    }
  }
  return normalize(c * primitive_part_in(b, v));
}

/// Square-free decomposition: p = lc * prod f_i^i with f_i pairwise coprime
/// and square-free. Returned as (factor, multiplicity) with nonconstant
/// factors only. Multivariate via repeated gcd with all partial derivatives.
inline std::vector<std::pair<Poly, unsigned>> squarefree_decomposition(
    const Poly& p) {
  std::vector<std::pair<Poly, unsigned>> out;
  if (p.is_zero() || p.is_constant()) return out;
  // Repeatedly peel off the square-free part: sf = p / gcd(p, all partials).
  Poly rest = normalize(p);
  std::vector<Poly> layers;  // layers[k] = product of factors with mult > k
  while (!rest.is_constant()) {
    Poly g = rest;
    for (std::size_t v = 0; v < rest.nvars(); ++v) {
      if (!rest.mentions(v)) continue;
      g = gcd(g, rest.derivative(v));
    }
    layers.push_back(divide_exact(rest, g));
    rest = g;
  }
  for (std::size_t k = 0; k < layers.size(); ++k) {
    Poly f = layers[k];
    if (k + 1 < layers.size()) f = divide_exact(f, layers[k + 1]);
    f = normalize(f);
    if (!f.is_constant()) out.emplace_back(f, static_cast<unsigned>(k + 1));
  }
  return out;
}

/// Product of the distinct nonconstant square-free factors.
inline Poly squarefree_part(const Poly& p) {
  Poly r = Poly::constant(p.nvars(), 1);
  for (const auto& [f, m] : squarefree_decomposition(p)) r *= f;
  return r;
}

// ---------------------------------------------------------------------------
// Formatting and parsing.

inline std::vector<std::string> default_names(std::size_t n) {
  static const char* kNames[] = {"x", "y", "z", "w"};
  std::vector<std::string> names;
  for (std::size_t i = 0; i < n; ++i)
    names.push_back(i < 4 ? kNames[i] : "v" + std::to_string(i));
  return names;
}

inline std::string to_string(const Poly& p,
                             const std::vector<std::string>& names) {
  if (p.is_zero()) return "0";
  std::ostringstream os;
  bool first = true;
  for (auto it = p.terms().rbegin(); it != p.terms().rend(); ++it) {
    const auto& [e, c] = *it;
    Rational a = abs(c);
    const bool neg = c < 0;
    if (first) {
      if (neg) os << "-";
    } else {
      os << (neg ? " - " : " + ");
    }
    first = false;
    const bool is_const = total_degree(e) == 0;
    bool wrote = false;
    if (a != 1 || is_const) {
      os << a.get_str();
      wrote = true;
    }
    for (std::size_t i = 0; i < e.size(); ++i) {
      if (e[i] == 0) continue;
      if (wrote) os << "*";
      os << names.at(i);
      if (e[i] > 1) os << "^" << e[i];
      wrote = true;
    }
  }
  return os.str();
}

inline std::string to_string(const Poly& p) {
  return to_string(p, default_names(p.nvars()));
}

namespace detail {

class PolyParser {
 public:
  PolyParser(std::string_view src, const std::vector<std::string>& names)
      : src_(src), names_(names) {}

  Poly parse() {
    Poly p = expr();
    skip_ws();
    if (pos_ != src_.size()) fail("unexpected trailing input");
    return p;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    throw Error("polynomial parse error at offset " + std::to_string(pos_) +
                ": " + what);
  }

  void skip_ws() {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_])))
      ++pos_;
  }

  bool eat(char ch) {
    skip_ws();
    if (pos_ < src_.size() && src_[pos_] == ch) {
      ++pos_;
      return true;
    }
    return false;
  }

  Poly expr() {
    Poly acc = term();
    for (;;) {
      if (eat('+')) {
        acc += term();
      } else if (eat('-')) {
        acc -= term();
      } else {
        return acc;
      }
    }
  }

  Poly term() {
    Poly acc = unary();
    for (;;) {
      if (eat('*')) {
        acc *= unary();
      } else if (eat('/')) {
        Poly d = unary();
        if (!d.is_constant() || d.is_zero()) fail("division by non-constant");
        acc *= Rational(1) / d.constant_term();
      } else {
        skip_ws();
        // Implicit multiplication: "2x", "x y", "(x+1)(x-1)".
        if (pos_ < src_.size() &&
            (src_[pos_] == '(' || std::isalpha(static_cast<unsigned char>(src_[pos_])))) {
          acc *= unary();
        } else {
          return acc;
        }
      }
    }
  }

  Poly unary() {
    if (eat('-')) return -unary();
    if (eat('+')) return unary();
    return power();
  }

  Poly power() {
    Poly base = atom();
    if (eat('^')) {
      skip_ws();
      std::size_t start = pos_;
      while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_;
      if (start == pos_) fail("expected exponent");
      base = base.pow(static_cast<unsigned>(std::stoul(std::string(src_.substr(start, pos_ - start)))));
    }
    return base;
  }

  Poly atom() {
    skip_ws();
    const std::size_t n = names_.size();
    if (pos_ >= src_.size()) fail("unexpected end of input");
    const char ch = src_[pos_];
    if (ch == '(') {
      ++pos_;
      Poly inner = expr();
      if (!eat(')')) fail("expected ')'");
      return inner;
    }
    if (std::isdigit(static_cast<unsigned char>(ch))) {
      std::size_t start = pos_;
      while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_;
      return Poly::constant(n, Rational(std::string(src_.substr(start, pos_ - start))));
    }
    if (std::isalpha(static_cast<unsigned char>(ch))) {
      std::size_t start = pos_;
      while (pos_ < src_.size() && std::isalnum(static_cast<unsigned char>(src_[pos_]))) ++pos_;
      const std::string_view ident = src_.substr(start, pos_ - start);
      for (std::size_t i = 0; i < n; ++i)
        if (names_[i] == ident) return Poly::variable(n, i);
      pos_ = start;
      fail("unknown variable '" + std::string(ident) + "'");
    }
    fail(std::string("unexpected character '") + ch + "'");
  }

  std::string_view src_;
  const std::vector<std::string>& names_;
  std::size_t pos_ = 0;
};

}  // namespace detail

/// Parses expressions such as "x^2*(x-1)^2 + y^2" over the given variables.
inline Poly parse_poly(std::string_view src,
                       const std::vector<std::string>& names) {
  return detail::PolyParser(src, names).parse();
}

inline Poly parse_poly(std::string_view src) {
  return parse_poly(src, default_names(2));
}

}  // namespace cechblow
