#pragma once

// Planar charts, open sets, coverings and towers of point blowups.
//
// A blowup of a chart at (a, b) produces two charts:
//   One: (x, y) = (r, b + (r - a) s)      exceptional divisor r = a
//   Two: (x, y) = (a + r s, b + s)        exceptional divisor s = 0
// At the origin these are the familiar (r, rs) and (rs, s).

#include <array>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "cechblow/realzero.hpp"

namespace cechblow {

class UnknownChart : public Error {
 public:
  explicit UnknownChart(int id) : Error("unknown or non-leaf chart " + std::to_string(id)) {}
};

enum class ChartKind { Base, One, Two };

inline const char* kind_name(ChartKind k) {
  switch (k) {
    case ChartKind::Base:
      return "Base";
    case ChartKind::One:
      return "One";
    case ChartKind::Two:
      return "Two";
  }
  return "?";
}

using PolyMap = std::array<Poly, 2>;
using RatMap = std::array<RatFunc, 2>;

struct Chart {
  int id = 0;
  int parent = -1;
  ChartKind kind = ChartKind::Base;
  Point center;  ///< blowup center in parent coordinates (non-base charts)
  std::vector<std::string> names;
  PolyMap to_parent;  ///< parent coordinates as polynomials in this chart's
  PolyMap to_base;    ///< base coordinates as polynomials in this chart's
  RatMap from_base;   ///< this chart's coordinates as rational functions on the base
  std::vector<int> children;
  std::optional<Point> blown_at;  ///< set once the chart has been blown up
  unsigned depth = 0;

  bool is_leaf() const { return children.empty(); }
  /// The exceptional divisor of the blowup that created this chart.
  Poly exceptional() const {
    if (kind == ChartKind::One) return Poly::variable(2, 0) - Poly::constant(2, center[0]);
    if (kind == ChartKind::Two) return Poly::variable(2, 1);
    return Poly::constant(2, 1);
  }
};

/// Chart maps for a blowup at `center` (in parent coordinates).
inline PolyMap blowup_map(ChartKind which, const Point& center) {
  const Poly r = Poly::variable(2, 0), s = Poly::variable(2, 1);
  const Poly a = Poly::constant(2, center[0]), b = Poly::constant(2, center[1]);
  if (which == ChartKind::One) return {r, b + (r - a) * s};
  return {a + r * s, b + s};
}

inline RatMap to_ratmap(const PolyMap& m) { return {RatFunc(m[0]), RatFunc(m[1])}; }

inline Poly compose(const Poly& p, const PolyMap& m) { return p.compose(std::span<const Poly>(m)); }

inline RatFunc compose(const RatFunc& f, const PolyMap& m) {
  const RatMap r = to_ratmap(m);
  return substitute(f, std::span<const RatFunc>(r));
}

inline RatFunc compose(const RatFunc& f, const RatMap& m) {
  return substitute(f, std::span<const RatFunc>(m));
}

inline SquareSum compose(const SquareSum& s, const PolyMap& m) {
  SquareSum out = s;
  for (auto& t : out.terms) t = compose(t, m);
  return out;
}

inline Hints compose(const Hints& hs, const PolyMap& m) {
  Hints out;
  for (const auto& h : hs) out.push_back(compose(h, m));
  return out;
}

struct TowerStep {
  int chart = 0;
  Point center;
};

/// A multi-blowup of a planar base chart. Immutable; blowup_at returns a new tower.
class Tower {
 public:
  explicit Tower(std::vector<std::string> base_names = {"x", "y"}) {
    Chart base;
    base.names = std::move(base_names);
    const Poly x = Poly::variable(2, 0), y = Poly::variable(2, 1);
    base.to_parent = {x, y};
    base.to_base = {x, y};
    base.from_base = {RatFunc(x), RatFunc(y)};
    charts_.push_back(std::move(base));
  }

  const std::vector<Chart>& charts() const { return charts_; }
  const std::vector<TowerStep>& steps() const { return steps_; }
  std::size_t depth() const { return steps_.size(); }
  const std::vector<std::string>& base_names() const { return charts_.front().names; }

  const Chart& chart(int id) const {
    if (id < 0 || static_cast<std::size_t>(id) >= charts_.size()) throw UnknownChart(id);
    return charts_[static_cast<std::size_t>(id)];
  }

  std::vector<int> leaves() const {
    std::vector<int> out;
    for (const auto& c : charts_)
      if (c.is_leaf()) out.push_back(c.id);
    return out;
  }

  /// Blows up the leaf chart at a rational point of it.
  Tower blowup_at(int leaf, const Point& center) const {
    if (leaf < 0 || static_cast<std::size_t>(leaf) >= charts_.size() || !chart(leaf).is_leaf())
      throw UnknownChart(leaf);
    if (center.size() != 2) throw Error("blowup center must be a planar point");
    Tower t = *this;
    const Chart parent = chart(leaf);
    for (ChartKind which : {ChartKind::One, ChartKind::Two}) {
      Chart c;
      c.id = static_cast<int>(t.charts_.size());
      c.parent = leaf;
      c.kind = which;
      c.center = center;
      c.names = {"r", "s"};
      c.to_parent = blowup_map(which, center);
      c.to_base = {compose(parent.to_base[0], c.to_parent), compose(parent.to_base[1], c.to_parent)};
      const RatFunc& px = parent.from_base[0];
      const RatFunc& py = parent.from_base[1];
      const RatFunc a = RatFunc::constant(2, center[0]), b = RatFunc::constant(2, center[1]);
      if (which == ChartKind::One) {
        c.from_base = {px, (py - b) / (px - a)};
      } else {
        c.from_base = {(px - a) / (py - b), py - b};
      }
      c.depth = parent.depth + 1;
      t.charts_[static_cast<std::size_t>(leaf)].children.push_back(c.id);
      t.charts_.push_back(std::move(c));
    }
    t.charts_[static_cast<std::size_t>(leaf)].blown_at = center;
    t.steps_.push_back({leaf, center});
    return t;
  }

  /// The step that blew up `chart`, with the ids of its One and Two children.
  std::optional<std::pair<int, int>> children_of(int id) const {
    const Chart& c = chart(id);
    if (c.is_leaf()) return std::nullopt;
    return std::make_pair(c.children[0], c.children[1]);
  }

  /// Polynomial map from chart `id` to its ancestor `ancestor`.
  PolyMap map_to_ancestor(int id, int ancestor) const {
    const Poly x = Poly::variable(2, 0), y = Poly::variable(2, 1);
    PolyMap m{x, y};
    int cur = id;
    while (cur != ancestor) {
      const Chart& c = chart(cur);
      if (c.parent < 0) throw Error("chart is not a descendant");
      m = {compose(c.to_parent[0], m), compose(c.to_parent[1], m)};
      cur = c.parent;
    }
    return m;
  }

  /// Leaf ids descending from chart `id` (itself when it is a leaf).
  std::vector<int> leaves_below(int id) const {
    std::vector<int> out, stack{id};
    while (!stack.empty()) {
      const int c = stack.back();
      stack.pop_back();
      if (chart(c).is_leaf()) {
        out.push_back(c);
      } else {
        for (auto it = chart(c).children.rbegin(); it != chart(c).children.rend(); ++it) stack.push_back(*it);
      }
    }
    std::sort(out.begin(), out.end());
    return out;
  }

  friend bool operator==(const Tower& a, const Tower& b) {
    if (a.steps_.size() != b.steps_.size()) return false;
    for (std::size_t i = 0; i < a.steps_.size(); ++i)
      if (a.steps_[i].chart != b.steps_[i].chart || a.steps_[i].center != b.steps_[i].center) return false;
    return true;
  }

 private:
  std::vector<Chart> charts_;
  std::vector<TowerStep> steps_;
};

/// Rational transition from chart x of tower tx to chart y of tower ty over
/// the same base: y's coordinates as rational functions of x's.
inline RatMap transition(const Tower& tx, int x, const Tower& ty, int y) {
  const Chart& cx = tx.chart(x);
  const Chart& cy = ty.chart(y);
  return {compose(cy.from_base[0], cx.to_base), compose(cy.from_base[1], cx.to_base)};
}

inline std::optional<Point> apply_map(const RatMap& m, const Point& p) {
  try {
    return Point{m[0].evaluate(p), m[1].evaluate(p)};
  } catch (const PoleAtPoint&) {
    return std::nullopt;
  } catch (const IndeterminateAtPoint&) {
    return std::nullopt;
  }
}

inline bool is_polynomial(const RatMap& m) { return m[0].is_polynomial() && m[1].is_polynomial(); }

// ---------------------------------------------------------------------------
// Pullbacks.

/// f composed with each leaf chart's map to the base.
inline std::map<int, RatFunc> pullback_function(const Tower& t, const RatFunc& f) {
  std::map<int, RatFunc> out;
  for (int leaf : t.leaves()) out.emplace(leaf, compose(f, t.chart(leaf).to_base));
  return out;
}

/// chart ∖ V(q); `hints` are sum-of-squares decompositions that certify zero
/// sets on this chart (typically pulled back from the base).
struct OpenSet {
  int chart = 0;
  Poly q;
  Hints hints;
  std::optional<ZeroCert> q_cert;
};

inline OpenSet make_open_set(int chart, const Poly& q, Hints hints = {}) {
  if (q.is_zero()) throw Error("open set complement of V(0) is empty");
  OpenSet u{chart, q, std::move(hints), std::nullopt};
  const auto z = zero_cert(q, u.hints);
  if (z.ok()) u.q_cert = z.cert;
  return u;
}

/// The syntactic decompositions of q and of its square-free factors.
inline Hints syntactic_hints(const Poly& q) {
  Hints out;
  for (const auto& s : syntactic_sos(q)) out.push_back(s);
  for (const auto& [f, m] : squarefree_decomposition(q))
    for (const auto& s : syntactic_sos(f)) out.push_back(s);
  return out;
}

inline OpenSet pullback_openset(const Tower& t, int leaf, const OpenSet& u) {
  const Chart& c = t.chart(leaf);
  const Poly q = compose(u.q, c.to_base);
  return make_open_set(leaf, q, compose(u.hints, c.to_base));
}

inline std::map<int, OpenSet> pullback_openset(const Tower& t, const OpenSet& u) {
  std::map<int, OpenSet> out;
  for (int leaf : t.leaves()) out.emplace(leaf, pullback_openset(t, leaf, u));
  return out;
}

/// A finite covering of one chart by open sets, certified by the absence of
/// real zeros of sum_i Q_i^2.
struct Covering {
  int chart = 0;
  std::vector<OpenSet> sets;
  ZeroCert coverage_cert;

  std::size_t size() const { return sets.size(); }
  Hints all_hints() const {
    Hints h;
    for (const auto& s : sets) h.insert(h.end(), s.hints.begin(), s.hints.end());
    return h;
  }
};

class NotACovering : public Error {
 public:
  explicit NotACovering(const std::string& why) : Error("sets do not cover the chart: " + why) {}
};

/// sum_i Q_i^(2m) with the certificate whose squares are the Q_i^m.
inline std::optional<ZeroCert> coverage_cert(const std::vector<Poly>& qs, unsigned m = 1) {
  if (qs.empty()) return std::nullopt;
  const std::size_t n = qs.front().nvars();
  ZeroPiece piece;
  piece.cofactor = Poly::constant(n, 1);
  for (const auto& q : qs) {
    const Poly qm = q.pow(m);
    if (qm.is_constant()) {
      piece.sos.constant += qm.constant_term() * qm.constant_term();
    } else {
      piece.sos.weights.push_back(1);
      piece.sos.terms.push_back(qm);
    }
  }
  piece.factor = piece.sos.value(n);
  const CommonZeros z = piece_zeros(piece);
  if (!z.finite() || !z.points.empty()) return std::nullopt;
  ZeroCert c;
  c.subject = piece.factor;
  c.kind = piece.sos.constant > 0 ? ZeroCert::Kind::EmptyByPositivity : ZeroCert::Kind::FinitePoints;
  c.pieces.push_back(std::move(piece));
  return c;
}

inline Covering make_covering(int chart, std::vector<OpenSet> sets) {
  std::vector<Poly> qs;
  for (const auto& s : sets) qs.push_back(s.q);
  auto cert = coverage_cert(qs);
  if (!cert) throw NotACovering("common zeros of the Q_i not certified empty");
  return Covering{chart, std::move(sets), *std::move(cert)};
}

inline Covering pullback_covering(const Tower& t, int leaf, const Covering& cov) {
  std::vector<OpenSet> sets;
  for (const auto& s : cov.sets) sets.push_back(pullback_openset(t, leaf, s));
  return make_covering(leaf, std::move(sets));
}

inline std::map<int, Covering> pullback_covering(const Tower& t, const Covering& cov) {
  std::map<int, Covering> out;
  for (int leaf : t.leaves()) out.emplace(leaf, pullback_covering(t, leaf, cov));
  return out;
}

// ---------------------------------------------------------------------------
// Refinement.

struct Refinement {
  Tower tower;
  /// Per leaf of `tower`: (ancestor chart in a, polynomial map to it).
  std::map<int, std::pair<int, PolyMap>> to_a;
  /// Per leaf of `tower`: (chart in b, rational map to it, whether polynomial).
  struct BMap {
    int chart = 0;
    RatMap map;
    bool polynomial = false;
  };
  std::map<int, BMap> to_b;
};

struct RefinementOutcome {
  std::optional<Refinement> refinement;
  std::string incomparable_reason;
  bool ok() const { return refinement.has_value(); }
};

/// The tower c ≥ a, b: a with b's centers replayed on top, each center lifted
/// into every leaf chart that contains its preimage.
inline RefinementOutcome common_refinement(const Tower& a, const Tower& b) {
  RefinementOutcome out;
  Tower c = a;
  // b chart -> c chart with identical map to the base.
  std::map<int, int> same{{0, 0}};
  for (const auto& step : b.steps()) {
    const auto [b_one, b_two] = *b.children_of(step.chart);
    auto it = same.find(step.chart);
    if (it != same.end()) {
      const Chart& cc = c.chart(it->second);
      if (cc.blown_at && *cc.blown_at == step.center) {
        const auto [c_one, c_two] = *c.children_of(it->second);
        same[b_one] = c_one;
        same[b_two] = c_two;
        continue;
      }
      if (cc.is_leaf()) {
        const int id = it->second;
        c = c.blowup_at(id, step.center);
        const auto [c_one, c_two] = *c.children_of(id);
        same[b_one] = c_one;
        same[b_two] = c_two;
        continue;
      }
    }
    // Lift the center through rational transitions into the current leaves.
    bool lifted = false;
    for (int leaf : c.leaves()) {
      const auto fwd = apply_map(transition(b, step.chart, c, leaf), step.center);
      if (!fwd) continue;
      const auto back = apply_map(transition(c, leaf, b, step.chart), *fwd);
      if (!back || *back != step.center) continue;
      c = c.blowup_at(leaf, *fwd);
      lifted = true;
    }
    if (!lifted) {
      out.incomparable_reason = "center (" + step.center[0].get_str() + ", " + step.center[1].get_str() +
                                ") of chart " + std::to_string(step.chart) + " has no rational lift";
      return out;
    }
  }

  Refinement r{c, {}, {}};
  const auto a_leaves = a.leaves();
  const auto b_leaves = b.leaves();
  for (int leaf : c.leaves()) {
    // c extends a, so a's charts keep their ids and every c leaf descends from one.
    int anc = leaf;
    while (static_cast<std::size_t>(anc) >= a.charts().size() || !a.chart(anc).is_leaf())
      anc = c.chart(anc).parent;
    r.to_a.emplace(leaf, std::make_pair(anc, c.map_to_ancestor(leaf, anc)));

    std::optional<Refinement::BMap> best;
    for (int bl : b_leaves) {
      RatMap m = transition(c, leaf, b, bl);
      const bool poly = is_polynomial(m);
      if (!best || (poly && !best->polynomial)) best = Refinement::BMap{bl, m, poly};
      if (poly) break;
    }
    r.to_b.emplace(leaf, *best);
  }
  out.refinement = std::move(r);
  return out;
}

/// Checks that the refinement maps commute with the maps to the base.
inline bool verify_refinement(const Tower& a, const Tower& b, const Refinement& r) {
  for (const auto& [leaf, am] : r.to_a) {
    const Chart& cl = r.tower.chart(leaf);
    const Chart& ca = a.chart(am.first);
    for (int i = 0; i < 2; ++i)
      if (!(compose(ca.to_base[i], am.second) == cl.to_base[i])) return false;
  }
  for (const auto& [leaf, bm] : r.to_b) {
    const Chart& cl = r.tower.chart(leaf);
    const Chart& cb = b.chart(bm.chart);
    for (int i = 0; i < 2; ++i)
      if (!(compose(RatFunc(cb.to_base[i]), bm.map) == RatFunc(cl.to_base[i]))) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// Sections of the direct limit.

/// A representative of a section over the limit: one value per leaf chart.
struct LimitSection {
  Tower tower;
  std::map<int, RatFunc> values;

  static LimitSection of(const Tower& t, const RatFunc& f) { return {t, pullback_function(t, f)}; }
};

enum class LimitComparison { Equal, NotEqual, Incomparable };

inline LimitComparison limit_eq(const LimitSection& s, const LimitSection& t) {
  const auto ref = common_refinement(s.tower, t.tower);
  if (!ref.ok()) return LimitComparison::Incomparable;
  const Refinement& r = *ref.refinement;
  for (int leaf : r.tower.leaves()) {
    const auto& [a_chart, a_map] = r.to_a.at(leaf);
    const auto& bm = r.to_b.at(leaf);
    const RatFunc lhs = compose(s.values.at(a_chart), a_map);
    RatFunc rhs;
    try {
      rhs = compose(t.values.at(bm.chart), bm.map);
    } catch (const DenominatorCollapse&) {
      return LimitComparison::Incomparable;
    }
    if (!(lhs == rhs)) return LimitComparison::NotEqual;
  }
  return LimitComparison::Equal;
}

// ---------------------------------------------------------------------------
// JSON.

inline Json to_json(const Tower& t) {
  Json steps = Json::array();
  for (const auto& s : t.steps()) steps.push_back({{"chart", s.chart}, {"center", to_json(s.center)}});
  return {{"base", {{"names", t.base_names()}}}, {"steps", steps}};
}

inline Tower tower_from_json(const Json& j, const std::string& ptr) {
  std::vector<std::string> names = {"x", "y"};
  if (j.contains("base") && j["base"].contains("names"))
    names = j["base"]["names"].get<std::vector<std::string>>();
  Tower t(names);
  const Json& steps = require(j, "steps", ptr);
  if (!steps.is_array()) throw SchemaError(ptr + "/steps", "expected array");
  for (std::size_t i = 0; i < steps.size(); ++i) {
    const std::string sp = ptr + "/steps/" + std::to_string(i);
    const int chart = require(steps[i], "chart", sp).get<int>();
    const Point center = point_from_json(require(steps[i], "center", sp), sp + "/center");
    try {
      t = t.blowup_at(chart, center);
    } catch (const Error& e) {
      throw SchemaError(sp, e.what());
    }
  }
  return t;
}

inline Json charts_to_json(const Tower& t) {
  Json out = Json::array();
  for (const auto& c : t.charts()) {
    Json j = {{"id", c.id},
              {"kind", kind_name(c.kind)},
              {"parent", c.parent},
              {"leaf", c.is_leaf()},
              {"to_base", {to_string(c.to_base[0], {"r", "s"}), to_string(c.to_base[1], {"r", "s"})}}};
    if (c.kind != ChartKind::Base) j["center"] = to_json(c.center);
    out.push_back(j);
  }
  return out;
}

}  // namespace cechblow
