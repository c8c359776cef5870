#pragma once

// Rank-one bundles on two-set coverings given by a transition function g
// (s2 = g s1 on U1 ∩ U2), the family ξ_{k,l} with g = P_{k,l}, their
// pullbacks through towers, bounded spaces of global sections, and the
// search for towers on which ξ_{k,l} becomes trivial.

#include <array>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "cechblow/cech.hpp"

namespace cechblow {

class NotASection : public Error {
 public:
  explicit NotASection(const std::string& why) : Error("not a section: " + why) {}
};

struct LineBundle {
  Covering covering;  ///< exactly two sets
  RatFunc g;          ///< s2 = g * s1
  RegularityCert regular_cert;       ///< g regular on U1 ∩ U2
  RegularityCert nonvanishing_cert;  ///< g nowhere zero on U1 ∩ U2
  Hints hints;                       ///< extra decompositions valid on this chart

  const Poly& q(int i) const { return covering.sets.at(static_cast<std::size_t>(i)).q; }
  Hints all_hints() const {
    Hints h = covering.all_hints();
    h.insert(h.end(), hints.begin(), hints.end());
    return h;
  }
};

inline LineBundle make_bundle(const Covering& cov, const RatFunc& g, Hints hints = {}) {
  if (cov.size() != 2) throw Error("line bundles here live on two-set coverings");
  LineBundle b{cov, g, {}, {}, std::move(hints)};
  const Poly q12 = b.q(0) * b.q(1);
  const Hints all = b.all_hints();
  const RegularityOutcome r = certify_regular(g, q12, all);
  if (!r.ok()) throw Error("transition is not regular on the overlap: " + r.reason);
  const RegularityOutcome nv = certify_nonvanishing(g, q12, all);
  if (!nv.ok()) throw Error("transition vanishes on the overlap: " + nv.reason);
  b.regular_cert = *r.cert;
  b.nonvanishing_cert = *nv.cert;
  return b;
}

inline bool verify_bundle(const LineBundle& b, std::string* why = nullptr) {
  const Poly q12 = b.q(0) * b.q(1);
  if (!(b.regular_cert.function == b.g) || !(b.nonvanishing_cert.function == b.g) || !(b.regular_cert.q == q12) ||
      !(b.nonvanishing_cert.q == q12)) {
    if (why) *why = "certificates are for another transition or set";
    return false;
  }
  return replay_regular(b.regular_cert, why) && replay_nonvanishing(b.nonvanishing_cert, why);
}

/// x^(2k) (x-1)^(2l) + y^2.
inline Poly p_kl(unsigned k, unsigned l) {
  const Poly x = Poly::variable(2, 0), y = Poly::variable(2, 1), one = Poly::constant(2, 1);
  return x.pow(2 * k) * (x - one).pow(2 * l) + y * y;
}

inline Poly bad_point_q(unsigned which) {
  const Poly x = Poly::variable(2, 0), y = Poly::variable(2, 1), one = Poly::constant(2, 1);
  return which == 0 ? x * x + y * y : (x - one) * (x - one) + y * y;
}

inline Covering bad_points_covering() {
  std::vector<OpenSet> sets;
  for (unsigned i = 0; i < 2; ++i) sets.push_back(make_open_set(0, bad_point_q(i), syntactic_hints(bad_point_q(i))));
  return make_covering(0, std::move(sets));
}

inline LineBundle make_xi(unsigned k, unsigned l) {
  const Poly p = p_kl(k, l);
  return make_bundle(bad_points_covering(), RatFunc(p), syntactic_hints(p));
}

// ---------------------------------------------------------------------------
// Sections.

struct BundleSection {
  RatFunc s1, s2;
  RegularityCert c1, c2;  ///< s_i regular on U_i
};

inline std::optional<BundleSection> try_section(const LineBundle& b, const RatFunc& s1, const RatFunc& s2,
                                                const Hints& extra = {}, std::string* why = nullptr,
                                                bool* undecided = nullptr) {
  if (!(b.g * s1 == s2)) {
    if (why) *why = "g * s1 != s2";
    return std::nullopt;
  }
  Hints hints = b.all_hints();
  hints.insert(hints.end(), extra.begin(), extra.end());
  const RegularityOutcome r1 = certify_regular(s1, b.q(0), hints);
  const RegularityOutcome r2 = certify_regular(s2, b.q(1), hints);
  if (!r1.ok() || !r2.ok()) {
    if (why) *why = !r1.ok() ? "s1: " + r1.reason : "s2: " + r2.reason;
    if (undecided) {
      *undecided = (!r1.ok() && r1.status == RegularityOutcome::Status::Undecidable) ||
                   (r1.ok() && r2.status == RegularityOutcome::Status::Undecidable);
    }
    return std::nullopt;
  }
  return BundleSection{s1, s2, *r1.cert, *r2.cert};
}

inline BundleSection make_section(const LineBundle& b, const RatFunc& s1, const RatFunc& s2, const Hints& extra = {}) {
  std::string why;
  auto s = try_section(b, s1, s2, extra, &why);
  if (!s) throw NotASection(why);
  return *s;
}

inline bool verify_section(const LineBundle& b, const BundleSection& s, std::string* why = nullptr) {
  if (!(b.g * s.s1 - s.s2).is_zero()) {
    if (why) *why = "cocycle identity fails";
    return false;
  }
  if (!(s.c1.function == s.s1) || !(s.c2.function == s.s2) || !(s.c1.q == b.q(0)) || !(s.c2.q == b.q(1))) {
    if (why) *why = "certificates are for other functions";
    return false;
  }
  return replay_regular(s.c1, why) && replay_regular(s.c2, why);
}

struct VanishingOutcome {
  enum class Status { Yes, No, Undecidable };
  Status status = Status::Undecidable;
  std::optional<RegularityCert> c1, c2;  ///< s_i nowhere zero on U_i
  std::optional<Point> witness;
  int side = 0;  ///< set of the witness, 1 or 2
  std::string reason;
};

inline VanishingOutcome nowhere_vanishing(const LineBundle& b, const BundleSection& s, const Hints& extra = {}) {
  VanishingOutcome out;
  Hints hints = b.all_hints();
  hints.insert(hints.end(), extra.begin(), extra.end());
  // s2 first: it is the side that carries the zeros forced by g.
  for (int side : {2, 1}) {
    const RatFunc& f = side == 1 ? s.s1 : s.s2;
    const RegularityOutcome r = certify_nonvanishing(f, b.q(side - 1), hints);
    if (r.status == RegularityOutcome::Status::NotRegular) {
      out.status = VanishingOutcome::Status::No;
      out.witness = r.witness;
      out.side = side;
      out.reason = r.reason;
      return out;
    }
    if (!r.ok()) {
      out.reason = r.reason;
      return out;
    }
    (side == 1 ? out.c1 : out.c2) = *r.cert;
  }
  out.status = VanishingOutcome::Status::Yes;
  return out;
}

/// Basis of { (A1/H1^N, A2/H2^N) : g s1 = s2, deg A_i <= D + N deg H_i }.
/// H_i defaults to Q_i; an override must have its real zeros inside V(Q_i).
/// Writing g = gn/gd, the identity is gn H2^N A1 = gd H1^N A2, so with
/// L = gn H2^N, R = gd H1^N and G = gcd(L, R): A1 = (R/G) B, A2 = (L/G) B.
inline std::vector<BundleSection> global_sections_bounded(const LineBundle& b, unsigned D, unsigned N,
                                                          const std::optional<std::array<Poly, 2>>& dens = {}) {
  const std::array<Poly, 2> h = dens ? *dens : std::array<Poly, 2>{b.q(0), b.q(1)};
  const Hints hints = b.all_hints();
  for (int i = 0; i < 2; ++i) {
    const RegularityOutcome r = certify_regular(RatFunc(Poly::constant(2, 1), h[i]), b.q(i), hints);
    if (!r.ok()) throw Error("denominator override has zeros off V(Q_i)");
  }
  const Poly L = b.g.num() * h[1].pow(N), R = b.g.den() * h[0].pow(N);
  const Poly G = gcd(L, R);
  const Poly a1 = divide_exact(R, G), a2 = divide_exact(L, G);
  const long bound1 = long(D + N * h[0].total_degree()) - long(a1.total_degree());
  const long bound2 = long(D + N * h[1].total_degree()) - long(a2.total_degree());
  const long bound = std::min(bound1, bound2);
  std::vector<BundleSection> out;
  if (bound < 0) return out;
  const RatFunc d1(Poly::constant(2, 1), h[0].pow(N)), d2(Poly::constant(2, 1), h[1].pow(N));
  for (const auto& e : monomials_up_to(2, static_cast<unsigned>(bound))) {
    const Poly B = Poly::monomial(e);
    out.push_back(make_section(b, RatFunc(a1 * B) * d1, RatFunc(a2 * B) * d2));
  }
  return out;
}

/// Some bounded section is nonzero at p, evaluated on a set containing p.
inline bool generated_at(const LineBundle& b, const Point& p, unsigned D, unsigned N) {
  const int side = b.q(0).evaluate(p) != 0 ? 1 : (b.q(1).evaluate(p) != 0 ? 2 : 0);
  if (side == 0) throw Error("point is not in the covering");
  for (const auto& s : global_sections_bounded(b, D, N)) {
    const RatFunc& f = side == 1 ? s.s1 : s.s2;
    if (f.num().evaluate(p) != 0) return true;
  }
  return false;
}

// ---------------------------------------------------------------------------
// Pullback with unit-square stripping.

struct StripEntry {
  Poly u;      ///< g_raw = u^2 * g_stripped (cumulatively)
  int side;    ///< u is a unit on U_side
  RegularityCert cert;
};

struct PulledBundle {
  LineBundle raw;
  LineBundle bundle;  ///< raw with the logged squares removed
  std::vector<StripEntry> log;
};

inline LineBundle pullback_bundle_raw(const Tower& t, int leaf, const LineBundle& b) {
  const PolyMap& m = t.chart(leaf).to_base;
  Hints hints = compose(b.hints, m);
  for (const auto* c : {&b.regular_cert, &b.nonvanishing_cert}) {
    const Hints h = compose(cert_hints(c->residual_cert), m);
    hints.insert(hints.end(), h.begin(), h.end());
  }
  return make_bundle(pullback_covering(t, leaf, b.covering), compose(b.g, m), std::move(hints));
}

/// A bundle with transition g u^2, u a unit on U_1, is isomorphic to the one
/// with transition g through (s1, s2) -> (s1 / u^2, s2); symmetrically on U_2
/// through (s1, s2) -> (s1, s2 u^2).
inline PulledBundle strip_squares(const LineBundle& raw) {
  PulledBundle out{raw, raw, {}};
  const Hints hints = raw.all_hints();
  Poly num = raw.g.num();
  for (const auto& [f, mult] : squarefree_decomposition(raw.g.num())) {
    if (mult < 2) continue;
    const Poly u = f.pow(mult / 2);
    for (int side : {1, 2}) {
      const RegularityOutcome r = certify_nonvanishing(RatFunc(u), raw.q(side - 1), hints);
      if (!r.ok()) continue;
      num = divide_exact(num, u * u);
      out.log.push_back({u, side, *r.cert});
      break;
    }
  }
  if (!out.log.empty()) out.bundle = make_bundle(raw.covering, RatFunc(num, raw.g.den()), raw.hints);
  return out;
}

inline PulledBundle pullback_bundle(const Tower& t, int leaf, const LineBundle& b) {
  return strip_squares(pullback_bundle_raw(t, leaf, b));
}

inline std::map<int, PulledBundle> pullback_bundle(const Tower& t, const LineBundle& b) {
  std::map<int, PulledBundle> out;
  for (int leaf : t.leaves()) out.emplace(leaf, pullback_bundle(t, leaf, b));
  return out;
}

/// prod u^2 * stripped == raw, and each u is certified a unit on its side.
inline bool verify_strip_log(const PulledBundle& p, std::string* why = nullptr) {
  RatFunc acc = p.bundle.g;
  for (const auto& e : p.log) {
    acc = acc * RatFunc(e.u * e.u);
    if (!(e.cert.function == RatFunc(e.u)) || !(e.cert.q == p.raw.q(e.side - 1))) {
      if (why) *why = "strip certificate is for another factor or set";
      return false;
    }
    if (!replay_nonvanishing(e.cert, why)) return false;
  }
  if (!(acc == p.raw.g)) {
    if (why) *why = "stripped factors do not recompose the raw transition";
    return false;
  }
  return true;
}

/// A section of the stripped bundle as a section of the raw one.
inline std::pair<RatFunc, RatFunc> unstrip(const PulledBundle& p, const RatFunc& s1, const RatFunc& s2) {
  RatFunc a = s1, b = s2;
  for (const auto& e : p.log) {
    if (e.side == 1) {
      a = a / RatFunc(e.u * e.u);
    } else {
      b = b * RatFunc(e.u * e.u);
    }
  }
  return {a, b};
}

// ---------------------------------------------------------------------------
// Sections on towers.

/// A base pair (S1, S2 = g S1) that restricts to a section on every leaf.
struct TowerSection {
  Tower tower;
  RatFunc S1, S2;
  std::map<int, BundleSection> leaves;
  std::map<int, VanishingOutcome> nonvanishing;  ///< filled when checked
};

struct TowerCheck {
  std::optional<TowerSection> section;
  bool undecided = false;
  std::string reason;
};

/// Checks that (S1, g S1) is regular and nowhere zero on every leaf.
inline TowerCheck check_tower_section(const Tower& t, const LineBundle& b, const RatFunc& S1,
                                      const Hints& base_hints = {}) {
  TowerCheck out;
  TowerSection ts{t, S1, b.g * S1, {}, {}};
  for (int leaf : t.leaves()) {
    const PolyMap& m = t.chart(leaf).to_base;
    const LineBundle lb = t.depth() == 0 ? b : pullback_bundle_raw(t, leaf, b);
    const Hints hints = compose(base_hints, m);
    std::string why;
    auto s = try_section(lb, compose(ts.S1, m), compose(ts.S2, m), hints, &why, &out.undecided);
    if (!s) {
      out.reason = "leaf " + std::to_string(leaf) + ": " + why;
      return out;
    }
    VanishingOutcome nv = nowhere_vanishing(lb, *s, hints);
    if (nv.status != VanishingOutcome::Status::Yes) {
      out.reason = "leaf " + std::to_string(leaf) + " vanishing: " + nv.reason;
      out.undecided = nv.status == VanishingOutcome::Status::Undecidable;
      return out;
    }
    ts.leaves.emplace(leaf, std::move(*s));
    ts.nonvanishing.emplace(leaf, std::move(nv));
  }
  out.section = std::move(ts);
  return out;
}

/// Successive blowups at c1 = (0,0) (letter 1) or c2 = (1,0) (letter 2) on
/// the newest chart One.
inline Tower chart_one_tower(const std::vector<int>& word) {
  Tower t;
  int leaf = 0;
  for (int c : word) {
    t = t.blowup_at(leaf, c == 1 ? Point{0, 0} : Point{1, 0});
    leaf = t.chart(leaf).children[0];
  }
  return t;
}

/// x^(2j) + y^2 and (x-1)^(2j) + y^2: polynomials vanishing only at c1, c2.
inline Poly point_supported(int which, unsigned j) {
  const Poly x = Poly::variable(2, 0), y = Poly::variable(2, 1), one = Poly::constant(2, 1);
  return (which == 1 ? x : x - one).pow(2 * j) + y * y;
}

/// s~ = (1/(x^(2k)+y^2), P/(x^(2k)+y^2)) on c1^k, and
/// t~ = (((x-1)^(2l)+y^2)/P, (x-1)^(2l)+y^2) on c2^l.
inline TowerCheck chain_section(unsigned k, unsigned l, int which) {
  const LineBundle b = make_xi(k, l);
  const unsigned n = which == 1 ? k : l;
  const Poly h = point_supported(which, n);
  const RatFunc S1 = which == 1 ? RatFunc(Poly::constant(2, 1), h) : RatFunc(h, p_kl(k, l));
  return check_tower_section(chart_one_tower(std::vector<int>(n, which)), b, S1, syntactic_hints(h));
}

struct SearchResult {
  bool found = false;
  unsigned depth = 0;
  std::vector<int> word;
  std::optional<TowerSection> section;
  std::string candidate;                 ///< description of the winning candidate
  std::vector<unsigned> towers_per_depth;
  unsigned candidates_tested = 0;
  unsigned undecided = 0;                ///< candidates whose check was undecidable
};

namespace detail {

struct Candidate {
  std::string name;
  RatFunc S1;
  Hints hints;
};

/// The finite candidate family tested on every tower: the bounded base
/// sections at (D, N), then (1/H1, g/H1) for H1 = x^(2j) + y^2, then
/// (H2/g, H2) for H2 = (x-1)^(2j) + y^2, with 1 <= j <= D/2.
inline std::vector<Candidate> candidates(const LineBundle& b, unsigned D, unsigned N) {
  std::vector<Candidate> out;
  const auto basis = global_sections_bounded(b, D, N);
  for (std::size_t i = 0; i < basis.size(); ++i) out.push_back({"bounded[" + std::to_string(i) + "]", basis[i].s1, {}});
  for (int which : {1, 2}) {
    for (unsigned j = 1; 2 * j <= D; ++j) {
      const Poly h = point_supported(which, j);
      const RatFunc S1 = which == 1 ? RatFunc(Poly::constant(2, 1), h) : RatFunc(h) / b.g;
      out.push_back({std::string(which == 1 ? "c1" : "c2") + "-supported j=" + std::to_string(j), S1,
                     syntactic_hints(h)});
    }
  }
  return out;
}

}  // namespace detail

/// Breadth-first over chart-One words in {c1, c2}, shortest first; returns
/// the first tower carrying a nowhere-vanishing candidate section.
inline SearchResult search_trivializing_tower(unsigned k, unsigned l, unsigned max_depth, unsigned D, unsigned N) {
  SearchResult res;
  const LineBundle b = make_xi(k, l);
  const auto cands = detail::candidates(b, D, N);
  for (unsigned depth = 0; depth <= max_depth; ++depth) {
    unsigned count = 0;
    for (unsigned code = 0; code < (1u << depth); ++code) {
      std::vector<int> word;
      for (unsigned i = 0; i < depth; ++i) word.push_back((code >> (depth - 1 - i)) & 1u ? 2 : 1);
      const Tower t = chart_one_tower(word);
      ++count;
      for (const auto& c : cands) {
        ++res.candidates_tested;
        TowerCheck chk = check_tower_section(t, b, c.S1, c.hints);
        if (chk.undecided) ++res.undecided;
        if (chk.section) {
          res.found = true;
          res.depth = depth;
          res.word = word;
          res.section = std::move(chk.section);
          res.candidate = c.name;
          res.towers_per_depth.push_back(count);
          return res;
        }
      }
    }
    res.towers_per_depth.push_back(count);
  }
  return res;
}

// ---------------------------------------------------------------------------
// JSON.

inline Json to_json(const LineBundle& b) {
  return {{"covering", to_json(b.covering)},
          {"g", to_json(b.g)},
          {"regular_cert", to_json(b.regular_cert)},
          {"nonvanishing_cert", to_json(b.nonvanishing_cert)}};
}

inline Json to_json(const BundleSection& s) {
  return {{"s1", to_json(s.s1)}, {"s2", to_json(s.s2)}, {"c1", to_json(s.c1)}, {"c2", to_json(s.c2)}};
}

inline Json to_json(const TowerSection& ts) {
  Json leaves = Json::object();
  for (const auto& [leaf, s] : ts.leaves) {
    Json e = to_json(s);
    auto it = ts.nonvanishing.find(leaf);
    if (it != ts.nonvanishing.end() && it->second.c1 && it->second.c2) {
      e["nonvanishing"] = {to_json(*it->second.c1), to_json(*it->second.c2)};
    }
    leaves[std::to_string(leaf)] = std::move(e);
  }
  return {{"tower", to_json(ts.tower)}, {"S1", to_json(ts.S1)}, {"S2", to_json(ts.S2)}, {"leaves", leaves}};
}

inline Json to_json(const SearchResult& r, unsigned k, unsigned l) {
  Json j = {{"k", k},
            {"l", l},
            {"found", r.found},
            {"towers_per_depth", r.towers_per_depth},
            {"candidates_tested", r.candidates_tested},
            {"undecided", r.undecided}};
  if (r.found) {
    j["min_depth"] = r.depth;
    j["word"] = r.word;
    j["candidate"] = r.candidate;
    j["section"] = to_json(*r.section);
  } else {
    j["min_depth"] = nullptr;
  }
  return j;
}

}  // namespace cechblow
