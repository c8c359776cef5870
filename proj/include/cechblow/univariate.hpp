#pragma once

// Dense univariate polynomials over the rationals: Sturm sequences, real
// root isolation, rational root extraction, and resultants of multivariate
// polynomials.

#include <algorithm>
#include <optional>
#include <utility>
#include <vector>

#include "cechblow/poly.hpp"

namespace cechblow::uni {

/// Coefficients, constant term first; no trailing zeros.
using UPoly = std::vector<Rational>;

inline void trim(UPoly& p) {
  while (!p.empty() && p.back() == 0) p.pop_back();
}

inline int degree(const UPoly& p) { return static_cast<int>(p.size()) - 1; }

/// Views p as a polynomial in variable v; p must not mention other variables.
inline UPoly from_poly(const Poly& p, std::size_t v) {
  UPoly out(p.degree_in(v) + 1, 0);
  for (const auto& [e, c] : p.terms()) {
    for (std::size_t i = 0; i < e.size(); ++i)
      if (i != v && e[i] != 0) throw Error("polynomial is not univariate");
    out[e[v]] = c;
  }
  trim(out);
  return out;
}

inline Poly to_poly(const UPoly& u, std::size_t nvars, std::size_t v) {
  Poly p(nvars);
  Exponents e(nvars, 0);
  for (std::size_t k = 0; k < u.size(); ++k) {
    e[v] = static_cast<unsigned>(k);
    p.add_term(e, u[k]);
  }
  return p;
}

inline Rational eval(const UPoly& p, const Rational& x) {
  Rational r = 0;
  for (std::size_t k = p.size(); k-- > 0;) r = r * x + p[k];
  return r;
}

inline UPoly derivative(const UPoly& p) {
  UPoly d;
  for (std::size_t k = 1; k < p.size(); ++k) d.push_back(p[k] * static_cast<unsigned long>(k));
  trim(d);
  return d;
}

inline UPoly rem(UPoly a, const UPoly& b) {
  if (b.empty()) throw DivisionByZeroFunction();
  const int db = degree(b);
  while (degree(a) >= db) {
    const Rational f = a.back() / b.back();
    const int shift = degree(a) - db;
    for (int k = 0; k <= db; ++k) a[shift + k] -= f * b[k];
    a.pop_back();
    trim(a);
  }
  return a;
}

inline UPoly quo(UPoly a, const UPoly& b) {
  if (b.empty()) throw DivisionByZeroFunction();
  const int db = degree(b);
  if (degree(a) < db) return {};
  UPoly q(degree(a) - db + 1, 0);
  while (degree(a) >= db) {
    const Rational f = a.back() / b.back();
    const int shift = degree(a) - db;
    q[shift] = f;
    for (int k = 0; k <= db; ++k) a[shift + k] -= f * b[k];
    a.pop_back();
    trim(a);
  }
  return q;
}

/// Scales p by a positive rational so its coefficients are coprime integers.
inline UPoly primitive(UPoly p) {
  if (p.empty()) return p;
  mpz_class den = 1, num = 0;
  for (const auto& c : p) {
    den = lcm(den, mpz_class(c.get_den()));
    num = gcd(num, mpz_class(c.get_num()));
  }
  const Rational s = Rational(den) / Rational(num);
  for (auto& c : p) c *= s;
  return p;
}

inline UPoly monic(UPoly p) {
  if (p.empty()) return p;
  const Rational lc = p.back();
  for (auto& c : p) c /= lc;
  return p;
}

inline UPoly gcd(UPoly a, UPoly b) {
  while (!b.empty()) {
    UPoly r = primitive(rem(a, b));
    a = std::move(b);
    b = std::move(r);
  }
  return monic(a);
}

inline UPoly squarefree_part(const UPoly& p) {
  if (degree(p) <= 0) return p;
  return monic(quo(p, gcd(p, derivative(p))));
}

inline int sign(const Rational& r) { return sgn(r); }

/// Sturm sequence of a square-free polynomial.
inline std::vector<UPoly> sturm_sequence(const UPoly& p) {
  std::vector<UPoly> seq{primitive(p)};
  UPoly d = primitive(derivative(p));
  if (d.empty()) return seq;
  seq.push_back(d);
  for (;;) {
    UPoly r = rem(seq[seq.size() - 2], seq.back());
    if (r.empty()) break;
    for (auto& c : r) c = -c;
    seq.push_back(primitive(r));
  }
  return seq;
}

inline int sign_changes_at(const std::vector<UPoly>& seq, const Rational& x) {
  int changes = 0, last = 0;
  for (const auto& q : seq) {
    const int s = sign(eval(q, x));
    if (s == 0) continue;
    if (last != 0 && s != last) ++changes;
    last = s;
  }
  return changes;
}

/// Number of distinct real roots in (a, b].
inline int count_roots(const std::vector<UPoly>& seq, const Rational& a, const Rational& b) {
  return sign_changes_at(seq, a) - sign_changes_at(seq, b);
}

/// Cauchy bound: every root has absolute value below the result.
inline Rational root_bound(const UPoly& p) {
  Rational m = 0;
  for (std::size_t k = 0; k + 1 < p.size(); ++k) m = std::max(m, Rational(abs(p[k] / p.back())));
  return m + 1;
}

struct RealRoots {
  std::vector<Rational> rational;  ///< sorted ascending
  /// Isolating intervals (a, b] of the remaining, irrational roots.
  std::vector<std::pair<Rational, Rational>> irrational;
  bool all_rational() const { return irrational.empty(); }
};

/// All real roots of a nonzero polynomial; rational ones exactly.
inline RealRoots real_roots(const UPoly& p_in) {
  RealRoots out;
  UPoly p = p_in;
  trim(p);
  if (p.empty()) throw Error("real roots of the zero polynomial");
  if (degree(p) == 0) return out;
  // Zero root separately keeps the remaining factor's constant term nonzero.
  std::size_t zeros = 0;
  while (zeros < p.size() && p[zeros] == 0) ++zeros;
  if (zeros > 0) {
    out.rational.push_back(0);
    p.erase(p.begin(), p.begin() + static_cast<long>(zeros));
  }
  p = primitive(squarefree_part(p));
  if (degree(p) <= 0) return out;

  // Every rational root m/q in lowest terms has q | lc, so lc*root is an integer.
  const mpz_class lc = abs(mpz_class(p.back().get_num()));
  const Rational width = Rational(1) / Rational(lc);
  const auto seq = sturm_sequence(p);
  const Rational bound = root_bound(p);

  std::vector<std::pair<Rational, Rational>> work{{-bound, bound}};
  while (!work.empty()) {
    auto [a, b] = work.back();
    work.pop_back();
    const int n = count_roots(seq, a, b);
    if (n == 0) continue;
    if (n > 1) {
      const Rational mid = (a + b) / 2;
      work.emplace_back(a, mid);
      work.emplace_back(mid, b);
      continue;
    }
    while (b - a >= width) {
      const Rational mid = (a + b) / 2;
      if (count_roots(seq, a, mid) == 1) {
        b = mid;
      } else {
        a = mid;
      }
    }
    // Candidates m/lc with a < m/lc <= b.
    std::optional<Rational> hit;
    // Smallest integer strictly above lc*a.
    const Rational la = a * Rational(lc);
    mpz_class m;
    mpz_fdiv_q(m.get_mpz_t(), la.get_num_mpz_t(), la.get_den_mpz_t());
    m += 1;
    for (; Rational(m) / Rational(lc) <= b; m += 1) {
      const Rational cand = Rational(m) / Rational(lc);
      if (eval(p, cand) == 0) {
        hit = cand;
        break;
      }
    }
    if (hit) {
      out.rational.push_back(*hit);
    } else {
      out.irrational.emplace_back(a, b);
    }
  }
  std::sort(out.rational.begin(), out.rational.end());
  std::sort(out.irrational.begin(), out.irrational.end());
  return out;
}

}  // namespace cechblow::uni

namespace cechblow {

/// Resultant of a and b with respect to variable v (fraction-free Bareiss
/// elimination of the Sylvester matrix).
inline Poly resultant(const Poly& a, const Poly& b, std::size_t v) {
  const std::size_t n = a.nvars();
  if (a.is_zero() || b.is_zero()) return Poly(n);
  const unsigned m = a.degree_in(v), k = b.degree_in(v);
  if (m == 0) return a.pow(k);
  if (k == 0) return b.pow(m);
  const std::size_t sz = m + k;
  std::vector<std::vector<Poly>> M(sz, std::vector<Poly>(sz, Poly(n)));
  for (std::size_t r = 0; r < k; ++r)
    for (unsigned i = 0; i <= m; ++i) M[r][r + i] = a.coefficient_in(v, m - i);
  for (std::size_t r = 0; r < m; ++r)
    for (unsigned i = 0; i <= k; ++i) M[k + r][r + i] = b.coefficient_in(v, k - i);

  Poly prev = Poly::constant(n, 1);
  bool negate = false;
  for (std::size_t c = 0; c < sz; ++c) {
    if (M[c][c].is_zero()) {
      std::size_t piv = c + 1;
      while (piv < sz && M[piv][c].is_zero()) ++piv;
      if (piv == sz) return Poly(n);
      std::swap(M[piv], M[c]);
      negate = !negate;
    }
    for (std::size_t r = c + 1; r < sz; ++r) {
      for (std::size_t j = c + 1; j < sz; ++j)
        M[r][j] = divide_exact(M[c][c] * M[r][j] - M[r][c] * M[c][j], prev);
      M[r][c] = Poly(n);
    }
    prev = M[c][c];
  }
  return negate ? -M[sz - 1][sz - 1] : M[sz - 1][sz - 1];
}

}  // namespace cechblow
