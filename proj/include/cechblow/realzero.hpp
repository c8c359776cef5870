#pragma once

// Certified reasoning about real zero sets of bivariate polynomials.
//
// The calculus is sound but incomplete. Real zeros are described through
// weighted sums of squares: if f * c = sum w_i t_i^2 + k with w_i > 0,
// k >= 0, then V(f) lies in the common zeros of the t_i (or is empty when
// k > 0). Common zeros are found by resultant elimination and rational root
// extraction, so only finite sets of rational points are ever certified.

#include <algorithm>
#include <numeric>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "cechblow/json_io.hpp"
#include "cechblow/ratfunc.hpp"
#include "cechblow/univariate.hpp"

namespace cechblow {

// ---------------------------------------------------------------------------
// Weighted sums of squares.

/// value() = sum_i weights[i] * terms[i]^2 + constant.
struct SquareSum {
  std::vector<Rational> weights;
  std::vector<Poly> terms;
  Rational constant = 0;

  Poly value(std::size_t nvars) const {
    Poly v = Poly::constant(nvars, constant);
    for (std::size_t i = 0; i < terms.size(); ++i) v += weights[i] * terms[i] * terms[i];
    return v;
  }

  bool well_formed() const {
    if (weights.size() != terms.size() || constant < 0) return false;
    return std::all_of(weights.begin(), weights.end(), [](const Rational& w) { return w > 0; });
  }

  /// Multiplies every term by m, i.e. value() * m^2 (the constant becomes a term).
  SquareSum scaled_by(const Poly& m) const {
    SquareSum out;
    for (std::size_t i = 0; i < terms.size(); ++i) {
      out.weights.push_back(weights[i]);
      out.terms.push_back(terms[i] * m);
    }
    if (constant != 0) {
      out.weights.push_back(constant);
      out.terms.push_back(m);
    }
    return out;
  }
};

using Hints = std::vector<SquareSum>;

/// h with p == w * h^2 for some w > 0 (h has leading coefficient 1).
inline std::optional<std::pair<Rational, Poly>> square_root(const Poly& p) {
  if (p.is_zero()) return std::nullopt;
  const Rational w = p.leading_coefficient();
  if (w <= 0) return std::nullopt;
  const Exponents& le = p.leading_exponents();
  Exponents half(le.size());
  for (std::size_t i = 0; i < le.size(); ++i) {
    if (le[i] % 2 != 0) return std::nullopt;
    half[i] = le[i] / 2;
  }
  const Poly target = p * (Rational(1) / w);
  const Poly lead = Poly::monomial(half);
  Poly h = lead;
  Poly rest = target - h * h;
  // Each step fixes the next term of h from the leading term of the residual.
  for (std::size_t guard = 0; !rest.is_zero(); ++guard) {
    if (guard > target.size() + 2) return std::nullopt;
    const Exponents& re = rest.leading_exponents();
    Exponents e(re.size());
    for (std::size_t i = 0; i < re.size(); ++i) {
      if (re[i] < half[i]) return std::nullopt;
      e[i] = re[i] - half[i];
    }
    if (!GrlexLess{}(e, half)) return std::nullopt;
    const Poly t = Poly::monomial(e, rest.leading_coefficient() / 2);
    rest -= t * (h + h + t);
    h += t;
  }
  return std::make_pair(w, h);
}

namespace detail {

inline void sos_candidates(const Poly& p, std::vector<SquareSum>& out, int depth);

inline std::optional<SquareSum> first_sos(const Poly& p, int depth) {
  std::vector<SquareSum> c;
  sos_candidates(p, c, depth);
  if (c.empty()) return std::nullopt;
  return c.front();
}

/// Writes p = sum over groups x_v^(2j) g_j(other vars) with each g_j a sum of
/// squares found recursively.
inline std::optional<SquareSum> grouped_sos(const Poly& p, std::size_t v, int depth) {
  const std::size_t n = p.nvars();
  const unsigned d = p.degree_in(v);
  SquareSum out;
  int groups = 0;
  for (unsigned j = 0; j <= d; ++j) {
    const Poly g = p.coefficient_in(v, j);
    if (g.is_zero()) continue;
    if (j % 2 != 0) return std::nullopt;
    ++groups;
    auto s = first_sos(g, depth + 1);
    if (!s) return std::nullopt;
    Exponents e(n, 0);
    e[v] = j / 2;
    const SquareSum part = j == 0 ? *s : s->scaled_by(Poly::monomial(e));
    out.weights.insert(out.weights.end(), part.weights.begin(), part.weights.end());
    out.terms.insert(out.terms.end(), part.terms.begin(), part.terms.end());
    out.constant += part.constant;
  }
  if (groups < 2) return std::nullopt;
  return out;
}

inline void sos_candidates(const Poly& p, std::vector<SquareSum>& out, int depth) {
  const std::size_t n = p.nvars();
  if (p.is_zero() || depth > 8) return;
  if (p.is_constant()) {
    if (p.constant_term() > 0) out.push_back(SquareSum{{}, {}, p.constant_term()});
    return;
  }
  const Exponents mc = p.monomial_content();
  if (total_degree(mc) > 0) {
    Exponents half(n);
    for (std::size_t i = 0; i < n; ++i) {
      if (mc[i] % 2 != 0) return;
      half[i] = mc[i] / 2;
    }
    const Poly m = Poly::monomial(half);
    std::vector<SquareSum> inner;
    sos_candidates(divide_exact(p, m * m), inner, depth + 1);
    for (const auto& s : inner) out.push_back(s.scaled_by(m));
    return;
  }
  if (auto r = square_root(p)) out.push_back(SquareSum{{r->first}, {r->second}, 0});
  for (std::size_t v = n; v-- > 0;) {
    if (!p.mentions(v)) continue;
    if (auto s = grouped_sos(p, v, depth)) out.push_back(*std::move(s));
  }
}

}  // namespace detail

/// Sums of squares read off syntactically: common monomial factors, perfect
/// squares, and grouping by even powers of one variable.
inline std::vector<SquareSum> syntactic_sos(const Poly& p) {
  std::vector<SquareSum> out;
  detail::sos_candidates(p, out, 0);
  return out;
}

/// Removes the common factor h of the terms: value = h^2 * stripped.value.
inline std::pair<Poly, SquareSum> strip_common_factor(const SquareSum& s, std::size_t nvars) {
  Poly h(nvars);
  if (s.constant != 0) return {Poly::constant(nvars, 1), s};
  for (const auto& t : s.terms) h = gcd(h, t);
  if (h.is_zero() || h.is_constant()) return {Poly::constant(nvars, 1), s};
  SquareSum out;
  out.weights = s.weights;
  for (const auto& t : s.terms) out.terms.push_back(divide_exact(t, h));
  // Constant terms fold into the constant.
  SquareSum folded;
  for (std::size_t i = 0; i < out.terms.size(); ++i) {
    if (out.terms[i].is_constant()) {
      folded.constant += out.weights[i] * out.terms[i].constant_term() * out.terms[i].constant_term();
    } else {
      folded.weights.push_back(out.weights[i]);
      folded.terms.push_back(out.terms[i]);
    }
  }
  return {h, folded};
}

// ---------------------------------------------------------------------------
// Common zeros.

struct CommonZeros {
  enum class Status { Finite, Unknown, NonRational };
  Status status = Status::Unknown;
  std::vector<Point> points;  ///< sorted, distinct
  Poly eliminant;             ///< for NonRational
  std::string reason;

  bool finite() const { return status == Status::Finite; }
  static CommonZeros finite_set(std::vector<Point> pts) {
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    return {Status::Finite, std::move(pts), Poly(), ""};
  }
  static CommonZeros unknown(std::string why) { return {Status::Unknown, {}, Poly(), std::move(why)}; }
};

namespace detail {

inline CommonZeros unite(const CommonZeros& a, const CommonZeros& b) {
  if (!a.finite()) return a;
  if (!b.finite()) return b;
  std::vector<Point> pts = a.points;
  pts.insert(pts.end(), b.points.begin(), b.points.end());
  return CommonZeros::finite_set(std::move(pts));
}

/// p with variable `fixed` set to value, as a univariate polynomial in the other variable.
inline uni::UPoly specialize(const Poly& p, std::size_t fixed, const Rational& value) {
  const std::size_t free = 1 - fixed;
  uni::UPoly out(p.degree_in(free) + 1, 0);
  for (const auto& [e, c] : p.terms()) {
    Rational t = c;
    for (unsigned k = 0; k < e[fixed]; ++k) t *= value;
    out[e[free]] += t;
  }
  uni::trim(out);
  return out;
}

inline Point make_point(std::size_t fixed, const Rational& a, const Rational& b) {
  return fixed == 0 ? Point{a, b} : Point{b, a};
}

}  // namespace detail

inline CommonZeros common_zeros(std::vector<Poly> fs);

/// Real zeros of a single polynomial, without hints.
inline CommonZeros single_zeros(const Poly& p) {
  if (p.is_zero()) return CommonZeros::unknown("zero polynomial");
  if (p.is_constant()) return CommonZeros::finite_set({});
  CommonZeros last = CommonZeros::unknown("no sum-of-squares decomposition found");
  for (const auto& s : syntactic_sos(p)) {
    if (s.constant > 0) return CommonZeros::finite_set({});
    CommonZeros z = common_zeros(s.terms);
    if (z.finite()) return z;
    if (z.status == CommonZeros::Status::NonRational) last = z;
  }
  const auto parts = squarefree_decomposition(p);
  if (parts.size() > 1 || (parts.size() == 1 && parts[0].second > 1)) {
    CommonZeros acc = CommonZeros::finite_set({});
    for (const auto& [f, m] : parts) {
      acc = detail::unite(acc, single_zeros(f));
      if (!acc.finite()) return acc;
    }
    return acc;
  }
  return last;
}

/// Simultaneous real zeros of bivariate polynomials, when finite and rational.
inline CommonZeros common_zeros(std::vector<Poly> fs) {
  std::erase_if(fs, [](const Poly& f) { return f.is_zero(); });
  if (fs.empty()) return CommonZeros::unknown("no equations");
  for (const auto& f : fs)
    if (f.is_constant()) return CommonZeros::finite_set({});
  if (fs.front().nvars() != 2) return CommonZeros::unknown("only planar charts are supported");
  if (fs.size() == 1) return single_zeros(fs.front());

  // V(a) ∩ V(b) = V(g) ∪ (V(a/g) ∩ V(b/g)) for g = gcd(a, b).
  const Poly g = gcd(fs[0], fs[1]);
  if (!g.is_constant()) {
    std::vector<Poly> with_g{g}, without_g{divide_exact(fs[0], g), divide_exact(fs[1], g)};
    for (std::size_t i = 2; i < fs.size(); ++i) {
      with_g.push_back(fs[i]);
      without_g.push_back(fs[i]);
    }
    const CommonZeros a = common_zeros(std::move(with_g));
    if (!a.finite()) return a;
    return detail::unite(a, common_zeros(std::move(without_g)));
  }

  CommonZeros failure;
  for (std::size_t elim : {std::size_t{1}, std::size_t{0}}) {
    const std::size_t keep = 1 - elim;
    const Poly r = resultant(fs[0], fs[1], elim);
    const auto roots = uni::real_roots(uni::from_poly(r, keep));
    if (!roots.all_rational()) {
      if (failure.eliminant.is_zero()) {
        failure = {CommonZeros::Status::NonRational, {}, r,
                   "eliminant has real roots that are not rational"};
      }
      continue;
    }
    std::vector<Point> pts;
    bool irrational = false;
    for (const auto& x0 : roots.rational) {
      uni::UPoly h;
      for (const auto& f : fs) h = uni::gcd(h, detail::specialize(f, keep, x0));
      if (h.empty()) return CommonZeros::unknown("a coordinate line lies in the zero set");
      const auto ys = uni::real_roots(h);
      if (!ys.all_rational()) {
        irrational = true;
        failure = {CommonZeros::Status::NonRational, {}, uni::to_poly(h, 2, elim),
                   "common zero with an irrational coordinate"};
        break;
      }
      for (const auto& y0 : ys.rational) pts.push_back(detail::make_point(keep, x0, y0));
    }
    if (irrational) return failure;
    return CommonZeros::finite_set(std::move(pts));
  }
  return failure;
}

// ---------------------------------------------------------------------------
// Zero certificates.

/// factor * cofactor == sos.value(), so V(factor) ⊆ V(sos).
struct ZeroPiece {
  Poly factor;
  unsigned multiplicity = 1;
  Poly cofactor;
  SquareSum sos;
};

struct ZeroCert {
  enum class Kind { EmptyByPositivity, FinitePoints, SmoothFactors, Declared };
  Kind kind = Kind::FinitePoints;
  Poly subject;
  /// EmptyByPositivity / FinitePoints: subject == scale * prod factor^mult.
  Rational scale = 1;
  std::vector<ZeroPiece> pieces;
  std::vector<Point> points;
  /// SmoothFactors: subject == scale * prod factor^mult.
  std::vector<std::pair<Poly, unsigned>> factors;
  bool verified = true;

  bool is_empty_set() const {
    return (kind == Kind::EmptyByPositivity || kind == Kind::FinitePoints || kind == Kind::Declared) &&
           points.empty();
  }
  bool is_finite() const { return kind != Kind::SmoothFactors; }
};

inline const char* kind_name(ZeroCert::Kind k) {
  switch (k) {
    case ZeroCert::Kind::EmptyByPositivity:
      return "EmptyByPositivity";
    case ZeroCert::Kind::FinitePoints:
      return "FinitePoints";
    case ZeroCert::Kind::SmoothFactors:
      return "SmoothFactors";
    case ZeroCert::Kind::Declared:
      return "Declared";
  }
  return "?";
}

/// Zeros of one piece: the common zeros of its squares, filtered by the factor.
inline CommonZeros piece_zeros(const ZeroPiece& piece) {
  if (piece.sos.constant > 0) return CommonZeros::finite_set({});
  CommonZeros z = common_zeros(piece.sos.terms);
  if (!z.finite()) return z;
  std::vector<Point> pts;
  for (const auto& p : z.points)
    if (piece.factor.evaluate(p) == 0) pts.push_back(p);
  return CommonZeros::finite_set(std::move(pts));
}

struct ZeroOutcome {
  enum class Status { Certified, Unknown, NonRational };
  Status status = Status::Unknown;
  std::optional<ZeroCert> cert;
  Poly eliminant;
  std::string reason;

  bool ok() const { return status == Status::Certified; }
};

namespace detail {

struct PieceSearch {
  std::vector<ZeroPiece> pieces;
  std::vector<Point> points;
  Rational scale = 1;
  CommonZeros failure = CommonZeros::unknown("no decomposition found");
};

inline bool add_piece(PieceSearch& st, ZeroPiece piece) {
  CommonZeros z = piece_zeros(piece);
  if (!z.finite()) {
    if (z.status == CommonZeros::Status::NonRational) st.failure = z;
    return false;
  }
  st.points.insert(st.points.end(), z.points.begin(), z.points.end());
  st.pieces.push_back(std::move(piece));
  return true;
}

inline bool cover(PieceSearch& st, const Poly& p, unsigned mult, std::span<const SquareSum> hints,
                  int depth) {
  const std::size_t n = p.nvars();
  Poly rest = p;
  while (!rest.is_constant()) {
    bool progressed = false;
    for (const auto& s : syntactic_sos(rest)) {
      if (add_piece(st, ZeroPiece{rest, mult, Poly::constant(n, 1), s})) {
        rest = Poly::constant(n, 1);
        progressed = true;
        break;
      }
    }
    if (progressed) break;
    for (const auto& h : hints) {
      const Poly hv = h.value(n);
      const Poly g = normalize(gcd(rest, hv));
      if (g.is_constant()) continue;
      if (add_piece(st, ZeroPiece{g, mult, divide_exact(hv, g), h})) {
        rest = divide_exact(rest, g);
        progressed = true;
        break;
      }
    }
    if (progressed) continue;
    if (depth > 0) return false;
    const auto parts = squarefree_decomposition(rest);
    if (parts.size() > 1 || (parts.size() == 1 && parts[0].second > 1)) {
      Poly product = Poly::constant(n, 1);
      for (const auto& [f, m] : parts) {
        if (!cover(st, f, mult * m, hints, depth + 1)) return false;
        product *= f.pow(m);
      }
      rest = divide_exact(rest, product);
      continue;
    }
    return false;
  }
  st.scale *= rest.constant_term();
  return true;
}

}  // namespace detail

/// Finite-point certificate for V(q), using syntactic decompositions of q and
/// of its factors shared with the hint decompositions.
inline ZeroOutcome zero_cert(const Poly& q, std::span<const SquareSum> hints = {}) {
  ZeroOutcome out;
  if (q.is_zero()) {
    out.reason = "zero polynomial";
    return out;
  }
  if (q.nvars() != 2 && !q.is_constant()) {
    out.reason = "only planar charts are supported";
    return out;
  }
  // Hints are used with the common factor of their terms removed; otherwise
  // that factor's curve would make every piece's zero set infinite.
  Hints prepared;
  for (const auto& h : hints) {
    SquareSum s = strip_common_factor(h, q.nvars()).second;
    if (!s.terms.empty() || s.constant > 0) prepared.push_back(std::move(s));
  }
  detail::PieceSearch st;
  if (!detail::cover(st, q, 1, prepared, 0)) {
    out.status = st.failure.status == CommonZeros::Status::NonRational ? ZeroOutcome::Status::NonRational
                                                                       : ZeroOutcome::Status::Unknown;
    out.eliminant = st.failure.eliminant;
    out.reason = st.failure.reason;
    return out;
  }
  ZeroCert c;
  c.subject = q;
  c.scale = st.scale;
  c.pieces = std::move(st.pieces);
  c.points = CommonZeros::finite_set(std::move(st.points)).points;
  const bool positive = std::all_of(c.pieces.begin(), c.pieces.end(),
                                    [](const ZeroPiece& p) { return p.sos.constant > 0; });
  c.kind = positive ? ZeroCert::Kind::EmptyByPositivity : ZeroCert::Kind::FinitePoints;
  out.status = ZeroOutcome::Status::Certified;
  out.cert = std::move(c);
  return out;
}

/// Certificate for an explicit decomposition supplied by the caller.
inline ZeroOutcome zero_points(const Poly& q, const std::optional<SquareSum>& hint = std::nullopt) {
  if (hint) {
    const Hints h{*hint};
    return zero_cert(q, h);
  }
  return zero_cert(q);
}

inline ZeroCert smooth_factors_cert(std::vector<std::pair<Poly, unsigned>> factors) {
  ZeroCert c;
  c.kind = ZeroCert::Kind::SmoothFactors;
  Poly prod = Poly::constant(factors.empty() ? 2 : factors.front().first.nvars(), 1);
  for (const auto& [f, m] : factors) prod *= f.pow(m);
  c.subject = prod;
  c.factors = std::move(factors);
  return c;
}

inline ZeroCert declared_cert(const Poly& subject, std::vector<Point> points) {
  ZeroCert c;
  c.kind = ZeroCert::Kind::Declared;
  c.subject = subject;
  c.points = CommonZeros::finite_set(std::move(points)).points;
  c.verified = false;
  return c;
}

/// Re-checks every identity in the certificate and recomputes its point set.
inline bool replay(const ZeroCert& c, std::string* why = nullptr) {
  auto fail = [&](const std::string& m) {
    if (why) *why = m;
    return false;
  };
  const std::size_t n = c.subject.nvars();
  switch (c.kind) {
    case ZeroCert::Kind::Declared:
      return fail("declared certificates are not verified");
    case ZeroCert::Kind::SmoothFactors: {
      Poly prod = Poly::constant(n, c.scale);
      for (const auto& [f, m] : c.factors) prod *= f.pow(m);
      if (!(prod == c.subject)) return fail("factor product differs from subject");
      return true;
    }
    case ZeroCert::Kind::EmptyByPositivity:
    case ZeroCert::Kind::FinitePoints: {
      if (c.scale == 0) return fail("zero scale");
      Poly prod = Poly::constant(n, c.scale);
      std::vector<Point> pts;
      for (const auto& piece : c.pieces) {
        if (!piece.sos.well_formed()) return fail("negative weight or constant");
        if (!(piece.factor * piece.cofactor == piece.sos.value(n)))
          return fail("piece identity factor * cofactor = sum of squares fails");
        if (c.kind == ZeroCert::Kind::EmptyByPositivity && piece.sos.constant <= 0)
          return fail("positivity certificate without positive constant");
        prod *= piece.factor.pow(piece.multiplicity);
        const CommonZeros z = piece_zeros(piece);
        if (!z.finite()) return fail("piece zero set is not finite and rational");
        pts.insert(pts.end(), z.points.begin(), z.points.end());
      }
      if (!(prod == c.subject)) return fail("piece product differs from subject");
      if (CommonZeros::finite_set(std::move(pts)).points != c.points)
        return fail("recomputed points differ");
      return true;
    }
  }
  return fail("unknown kind");
}

// ---------------------------------------------------------------------------
// Rational witness search.

/// Rationals ordered by height max(|p|, q): 0, 1, -1, 2, -2, 1/2, -1/2, ...
inline std::vector<Rational> rationals_by_height(unsigned max_height) {
  std::vector<Rational> out{0};
  for (unsigned h = 1; h <= max_height; ++h) {
    for (unsigned q = 1; q <= h; ++q) {
      for (unsigned p = 0; p <= h; ++p) {
        if (std::max(p, q) != h || p == 0) continue;
        if (std::gcd(p, q) != 1) continue;
        out.push_back(make_rational(p, q));
        out.push_back(-make_rational(p, q));
      }
    }
  }
  return out;
}

/// A rational zero of p at which keep(point) holds, searching vertical and
/// horizontal lines through low-height rationals.
template <class Pred>
std::optional<Point> find_rational_zero(const Poly& p, Pred keep, unsigned max_height = 6) {
  if (p.is_zero() || p.is_constant()) return std::nullopt;
  const auto values = rationals_by_height(max_height);
  for (const auto& a : values) {
    for (std::size_t fixed : {std::size_t{0}, std::size_t{1}}) {
      const uni::UPoly u = detail::specialize(p, fixed, a);
      if (u.empty()) {
        for (const auto& b : values) {
          Point pt = detail::make_point(fixed, a, b);
          if (keep(pt)) return pt;
        }
        continue;
      }
      for (const auto& b : uni::real_roots(u).rational) {
        Point pt = detail::make_point(fixed, a, b);
        if (keep(pt)) return pt;
      }
    }
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Units, containment, regularity.

struct UnitOutcome {
  enum class Status { Yes, No, Unknown };
  Status status = Status::Unknown;
  std::optional<ZeroCert> cert;
  std::optional<Point> witness;
};

/// Whether q has no real zeros.
inline UnitOutcome is_unit(const Poly& q, std::span<const SquareSum> hints = {}) {
  UnitOutcome out;
  if (q.is_zero()) {
    out.status = UnitOutcome::Status::No;
    out.witness = Point(q.nvars(), 0);
    return out;
  }
  const ZeroOutcome z = zero_cert(q, hints);
  if (z.ok()) {
    if (z.cert->points.empty()) {
      out.status = UnitOutcome::Status::Yes;
      out.cert = z.cert;
    } else {
      out.status = UnitOutcome::Status::No;
      out.witness = z.cert->points.front();
    }
    return out;
  }
  if (q.nvars() == 2) {
    if (auto w = find_rational_zero(q, [](const Point&) { return true; })) {
      out.status = UnitOutcome::Status::No;
      out.witness = *w;
    }
  }
  return out;
}

struct ContainsOutcome {
  enum class Status { Yes, No, Unknown };
  Status status = Status::Unknown;
  std::optional<Point> witness;
};

/// Decides V(inner.subject) ⊆ V(outer.subject).
inline ContainsOutcome contains(const ZeroCert& inner, const ZeroCert& outer) {
  ContainsOutcome out;
  if (inner.is_finite() && inner.points.empty()) {
    out.status = ContainsOutcome::Status::Yes;
    return out;
  }
  if (!inner.is_finite()) return out;
  for (const auto& p : inner.points) {
    if (outer.subject.evaluate(p) != 0) {
      out.status = ContainsOutcome::Status::No;
      out.witness = p;
      return out;
    }
  }
  out.status = ContainsOutcome::Status::Yes;
  return out;
}

/// Evidence that the reduced denominator of `function` has no real zeros
/// outside V(q): den = unit * blocked * residual, blocked | q^power, and every
/// real zero of residual is a zero of q.
struct RegularityCert {
  RatFunc function;
  Poly q;
  Poly blocked;
  unsigned power = 0;
  Poly residual;
  ZeroCert residual_cert;
};

struct RegularityOutcome {
  enum class Status { Certified, NotRegular, Undecidable };
  Status status = Status::Undecidable;
  std::optional<RegularityCert> cert;
  std::optional<Point> witness;
  std::string reason;

  bool ok() const { return status == Status::Certified; }
};

/// Splits d = blocked * residual with blocked | q^k and gcd(residual, q) = 1.
inline std::pair<Poly, Poly> split_against(const Poly& d, const Poly& q) {
  const std::size_t n = d.nvars();
  Poly blocked = Poly::constant(n, 1);
  Poly residual = d;
  if (q.is_constant()) return {blocked, residual};
  for (;;) {
    const Poly g = gcd(residual, q);
    if (g.is_constant()) break;
    residual = divide_exact(residual, g);
    blocked *= g;
  }
  return {blocked, residual};
}

/// Certifies that the real zeros of d lie inside V(q); `function` is recorded.
inline RegularityOutcome certify_zeros_inside(const RatFunc& function, const Poly& d, const Poly& q,
                                              std::span<const SquareSum> hints = {}) {
  RegularityOutcome out;
  auto [blocked, residual] = split_against(d, q);
  unsigned power = 0;
  if (!blocked.is_constant()) {
    Poly qk = Poly::constant(q.nvars(), 1);
    while (!divides(blocked, qk)) {
      qk *= q;
      ++power;
    }
  }
  auto outside_q = [&](const Point& p) { return q.evaluate(p) != 0; };
  const ZeroOutcome z = zero_cert(residual, hints);
  if (z.ok()) {
    for (const auto& p : z.cert->points) {
      if (outside_q(p)) {
        out.status = RegularityOutcome::Status::NotRegular;
        out.witness = p;
        out.reason = "zero outside V(Q)";
        return out;
      }
    }
    out.status = RegularityOutcome::Status::Certified;
    out.cert = RegularityCert{function, q, blocked, power, residual, *z.cert};
    return out;
  }
  if (auto w = find_rational_zero(residual, outside_q)) {
    out.status = RegularityOutcome::Status::NotRegular;
    out.witness = *w;
    out.reason = "rational zero outside V(Q)";
    return out;
  }
  out.reason = z.reason.empty() ? "zero set undecided" : z.reason;
  if (z.status == ZeroOutcome::Status::NonRational) out.reason += " (eliminant " + to_string(z.eliminant) + ")";
  return out;
}

/// f is regular on chart ∖ V(q).
inline RegularityOutcome certify_regular(const RatFunc& f, const Poly& q,
                                         std::span<const SquareSum> hints = {}) {
  return certify_zeros_inside(f, f.den(), q, hints);
}

/// f is regular and nowhere zero on chart ∖ V(q).
inline RegularityOutcome certify_nonvanishing(const RatFunc& f, const Poly& q,
                                              std::span<const SquareSum> hints = {}) {
  if (f.is_zero()) {
    RegularityOutcome out;
    out.status = RegularityOutcome::Status::NotRegular;
    out.reason = "zero function";
    return out;
  }
  return certify_zeros_inside(f, f.num(), q, hints);
}

/// Replays the containment: factorisation, divisibility, and point checks.
inline bool replay(const RegularityCert& c, const Poly& d, std::string* why = nullptr) {
  auto fail = [&](const std::string& m) {
    if (why) *why = m;
    return false;
  };
  const Poly prod = c.blocked * c.residual;
  if (!(normalize(prod) == normalize(d))) return fail("blocked * residual differs from denominator");
  if (!divides(c.blocked, c.q.pow(c.power))) return fail("blocked part does not divide Q^k");
  if (!(c.residual_cert.subject == c.residual)) return fail("certificate subject mismatch");
  if (!replay(c.residual_cert, why)) return false;
  for (const auto& p : c.residual_cert.points)
    if (c.q.evaluate(p) != 0) return fail("residual zero outside V(Q)");
  return true;
}

inline bool replay_regular(const RegularityCert& c, std::string* why = nullptr) {
  return replay(c, c.function.den(), why);
}

inline bool replay_nonvanishing(const RegularityCert& c, std::string* why = nullptr) {
  return replay(c, c.function.num(), why);
}

// ---------------------------------------------------------------------------
// Sampling oracle.

struct Grid {
  Rational lo = -2;
  Rational hi = 2;
  unsigned steps = 101;  ///< points per axis

  std::vector<Rational> axis() const {
    std::vector<Rational> out;
    if (steps == 1) return {lo};
    for (unsigned i = 0; i < steps; ++i) out.push_back(lo + (hi - lo) * Rational(i) / Rational(steps - 1));
    return out;
  }
};

/// A grid point outside V(q) where d vanishes.
inline std::optional<Point> sample_zero_outside(const Poly& d, const Poly& q, const Grid& grid) {
  if (d.is_constant()) return std::nullopt;
  const auto ax = grid.axis();
  for (const auto& x : ax) {
    // Roots in y on this vertical line catch grid points cheaply.
    const uni::UPoly u = detail::specialize(d, 0, x);
    std::set<Rational> hits;
    if (u.empty()) {
      hits.insert(ax.begin(), ax.end());
    } else {
      for (const auto& r : uni::real_roots(u).rational) hits.insert(r);
    }
    for (const auto& y : ax) {
      if (!hits.count(y)) continue;
      const Point p{x, y};
      if (q.evaluate(p) != 0) return p;
    }
  }
  return std::nullopt;
}

/// A grid point in chart ∖ V(q) where f has a pole.
inline std::optional<Point> sample_refute(const RatFunc& f, const Poly& q, const Grid& grid = {}) {
  return sample_zero_outside(f.den(), q, grid);
}

// ---------------------------------------------------------------------------
// JSON.

inline Json to_json(const SquareSum& s) {
  Json w = Json::array(), t = Json::array();
  for (const auto& x : s.weights) w.push_back(rational_to_string(x));
  for (const auto& x : s.terms) t.push_back(to_json(x));
  return {{"weights", w}, {"terms", t}, {"const", rational_to_string(s.constant)}};
}

inline SquareSum square_sum_from_json(const Json& j, const std::string& ptr, std::size_t nvars) {
  SquareSum s;
  const Json& w = require(j, "weights", ptr);
  const Json& t = require(j, "terms", ptr);
  if (!w.is_array() || !t.is_array() || w.size() != t.size())
    throw SchemaError(ptr, "weights and terms must be arrays of equal length");
  for (std::size_t i = 0; i < w.size(); ++i) {
    s.weights.push_back(rational_from_json(w[i], ptr + "/weights/" + std::to_string(i)));
    s.terms.push_back(poly_from_json(t[i], ptr + "/terms/" + std::to_string(i), nvars));
  }
  s.constant = j.contains("const") ? rational_from_json(j["const"], ptr + "/const") : Rational(0);
  return s;
}

inline Json to_json(const ZeroCert& c) {
  Json j = {{"kind", kind_name(c.kind)}, {"subject", to_json(c.subject)}};
  switch (c.kind) {
    case ZeroCert::Kind::EmptyByPositivity:
    case ZeroCert::Kind::FinitePoints: {
      Json pieces = Json::array();
      for (const auto& p : c.pieces) {
        pieces.push_back({{"factor", to_json(p.factor)},
                          {"mult", p.multiplicity},
                          {"cofactor", to_json(p.cofactor)},
                          {"sos", to_json(p.sos)}});
      }
      j["scale"] = rational_to_string(c.scale);
      j["pieces"] = pieces;
      j["points"] = points_to_json(c.points);
      break;
    }
    case ZeroCert::Kind::SmoothFactors: {
      Json fs = Json::array();
      for (const auto& [f, m] : c.factors) fs.push_back({{"factor", to_json(f)}, {"mult", m}});
      j["scale"] = rational_to_string(c.scale);
      j["factors"] = fs;
      break;
    }
    case ZeroCert::Kind::Declared:
      j["points"] = points_to_json(c.points);
      j["verified"] = c.verified;
      break;
  }
  return j;
}

inline ZeroCert zero_cert_from_json(const Json& j, const std::string& ptr) {
  ZeroCert c;
  const std::string kind = require(j, "kind", ptr).get<std::string>();
  c.subject = poly_from_json(require(j, "subject", ptr), ptr + "/subject");
  const std::size_t n = c.subject.nvars();
  if (j.contains("scale")) c.scale = rational_from_json(j["scale"], ptr + "/scale");
  if (kind == "EmptyByPositivity" || kind == "FinitePoints") {
    c.kind = kind == "FinitePoints" ? ZeroCert::Kind::FinitePoints : ZeroCert::Kind::EmptyByPositivity;
    const Json& ps = require(j, "pieces", ptr);
    for (std::size_t i = 0; i < ps.size(); ++i) {
      const std::string pp = ptr + "/pieces/" + std::to_string(i);
      ZeroPiece piece;
      piece.factor = poly_from_json(require(ps[i], "factor", pp), pp + "/factor", n);
      piece.multiplicity = ps[i].value("mult", 1u);
      piece.cofactor = poly_from_json(require(ps[i], "cofactor", pp), pp + "/cofactor", n);
      piece.sos = square_sum_from_json(require(ps[i], "sos", pp), pp + "/sos", n);
      c.pieces.push_back(std::move(piece));
    }
    c.points = points_from_json(require(j, "points", ptr), ptr + "/points");
  } else if (kind == "SmoothFactors") {
    c.kind = ZeroCert::Kind::SmoothFactors;
    const Json& fs = require(j, "factors", ptr);
    for (std::size_t i = 0; i < fs.size(); ++i) {
      const std::string fp = ptr + "/factors/" + std::to_string(i);
      c.factors.emplace_back(poly_from_json(require(fs[i], "factor", fp), fp + "/factor", n),
                             fs[i].value("mult", 1u));
    }
  } else if (kind == "Declared") {
    c.kind = ZeroCert::Kind::Declared;
    c.points = points_from_json(require(j, "points", ptr), ptr + "/points");
    c.verified = false;
  } else {
    throw SchemaError(ptr + "/kind", "unknown certificate kind '" + kind + "'");
  }
  return c;
}

inline Json to_json(const RegularityCert& c) {
  return {{"function", to_json(c.function)}, {"Q", to_json(c.q)},
          {"blocked", to_json(c.blocked)},   {"power", c.power},
          {"residual", to_json(c.residual)}, {"residual_cert", to_json(c.residual_cert)}};
}

inline RegularityCert regularity_cert_from_json(const Json& j, const std::string& ptr) {
  RegularityCert c;
  c.function = ratfunc_from_json(require(j, "function", ptr), ptr + "/function");
  const std::size_t n = c.function.nvars();
  c.q = poly_from_json(require(j, "Q", ptr), ptr + "/Q", n);
  c.blocked = poly_from_json(require(j, "blocked", ptr), ptr + "/blocked", n);
  c.power = require(j, "power", ptr).get<unsigned>();
  c.residual = poly_from_json(require(j, "residual", ptr), ptr + "/residual", n);
  c.residual_cert = zero_cert_from_json(require(j, "residual_cert", ptr), ptr + "/residual_cert");
  return c;
}

}  // namespace cechblow
