#pragma once

// Čech cochains of a finite covering of a chart, the differential, pullback
// through towers, a bounded coboundary solver, extension by powers of Q, and
// the blow-up-and-assemble solver for 1-cocycles.
//
// Index tuples are non-decreasing and 0-based; JSON uses 1-based indices.
// The differential is the alternating sum over omitted positions, so
// (dh)_{i j} = h_j - h_i for a 0-cochain.

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "cechblow/geometry.hpp"
#include "cechblow/linalg.hpp"

namespace cechblow {

enum class SheafMode { Regular, Rational };

using Index = std::vector<std::size_t>;

class NotRegularValue : public Error {
 public:
  NotRegularValue(Index index, std::optional<Point> witness, const std::string& why)
      : Error("cochain value is not regular on its overlap: " + why), index_(std::move(index)),
        witness_(std::move(witness)) {}
  const Index& index() const { return index_; }
  const std::optional<Point>& witness() const { return witness_; }

 private:
  Index index_;
  std::optional<Point> witness_;
};

class Undecidable : public Error {
 public:
  explicit Undecidable(const std::string& why) : Error("undecidable: " + why) {}
};

/// Non-decreasing (q+1)-tuples over {0, ..., n-1}.
inline std::vector<Index> cochain_indices(std::size_t n, unsigned q) {
  std::vector<Index> out;
  Index cur(q + 1, 0);
  auto rec = [&](auto&& self, std::size_t pos, std::size_t from) -> void {
    if (pos == cur.size()) {
      out.push_back(cur);
      return;
    }
    for (std::size_t i = from; i < n; ++i) {
      cur[pos] = i;
      self(self, pos + 1, i);
    }
  };
  if (n > 0) rec(rec, 0, 0);
  return out;
}

inline std::set<std::size_t> distinct(const Index& I) { return {I.begin(), I.end()}; }

/// Q of U_{i0...iq}: the product of the distinct Q_i.
inline Poly overlap_q(const Covering& cov, const Index& I) {
  Poly q = Poly::constant(cov.sets.front().q.nvars(), 1);
  for (std::size_t i : distinct(I)) q *= cov.sets.at(i).q;
  return q;
}

inline Hints overlap_hints(const Covering& cov, const Index& I) {
  Hints h;
  for (std::size_t i : distinct(I)) h.insert(h.end(), cov.sets[i].hints.begin(), cov.sets[i].hints.end());
  return h;
}

inline Index omit(const Index& I, std::size_t j) {
  Index out;
  for (std::size_t p = 0; p < I.size(); ++p)
    if (p != j) out.push_back(I[p]);
  return out;
}

struct Cochain {
  Covering covering;
  unsigned degree = 0;
  SheafMode mode = SheafMode::Rational;
  std::map<Index, RatFunc> values;          ///< every index present
  std::map<Index, RegularityCert> certs;    ///< Regular mode only
  Hints hints;                              ///< extra decompositions valid on this chart

  std::size_t nvars() const { return covering.sets.front().q.nvars(); }
  const RatFunc& at(const Index& I) const { return values.at(I); }
  bool is_zero() const {
    return std::all_of(values.begin(), values.end(), [](const auto& kv) { return kv.second.is_zero(); });
  }
};

/// The decompositions a zero certificate was built from.
inline Hints cert_hints(const ZeroCert& c) {
  Hints h;
  for (const auto& p : c.pieces) h.push_back(p.sos);
  return h;
}

inline RegularityCert certify_value(const Covering& cov, const Index& I, const RatFunc& v,
                                    const Hints& extra = {}) {
  Hints hints = overlap_hints(cov, I);
  hints.insert(hints.end(), extra.begin(), extra.end());
  const RegularityOutcome r = certify_regular(v, overlap_q(cov, I), hints);
  if (r.status == RegularityOutcome::Status::NotRegular) throw NotRegularValue(I, r.witness, r.reason);
  if (!r.ok()) throw Undecidable(r.reason);
  return *r.cert;
}

/// Builds a cochain; absent indices are zero. Regular mode certifies every value.
inline Cochain make_cochain(const Covering& cov, unsigned q, SheafMode mode, const std::map<Index, RatFunc>& given,
                            const Hints& extra_hints = {}) {
  if (cov.sets.empty()) throw Error("cochain on an empty covering");
  Cochain c{cov, q, mode, {}, {}, extra_hints};
  for (const auto& [I, v] : given) {
    if (I.size() != q + 1 || !std::is_sorted(I.begin(), I.end()) || I.back() >= cov.size())
      throw Error("cochain index out of range or not non-decreasing");
  }
  for (const auto& I : cochain_indices(cov.size(), q)) {
    auto it = given.find(I);
    RatFunc v = it == given.end() ? RatFunc::constant(c.nvars(), 0) : it->second;
    if (mode == SheafMode::Regular) c.certs.emplace(I, certify_value(cov, I, v, extra_hints));
    c.values.emplace(I, std::move(v));
  }
  return c;
}

/// Replays every regularity certificate against the stored values.
inline bool verify_cochain(const Cochain& c, std::string* why = nullptr) {
  if (c.mode == SheafMode::Rational) return true;
  for (const auto& [I, v] : c.values) {
    auto it = c.certs.find(I);
    if (it == c.certs.end()) {
      if (why) *why = "missing certificate";
      return false;
    }
    if (!(it->second.function == v) || !(it->second.q == overlap_q(c.covering, I))) {
      if (why) *why = "certificate does not match value";
      return false;
    }
    if (!replay_regular(it->second, why)) return false;
  }
  return true;
}

inline Cochain differential(const Cochain& f) {
  std::map<Index, RatFunc> out;
  for (const auto& J : cochain_indices(f.covering.size(), f.degree + 1)) {
    RatFunc s = RatFunc::constant(f.nvars(), 0);
    for (std::size_t j = 0; j < J.size(); ++j) {
      const RatFunc& v = f.at(omit(J, j));
      s = j % 2 == 0 ? s + v : s - v;
    }
    out.emplace(J, std::move(s));
  }
  return make_cochain(f.covering, f.degree + 1, f.mode, out, f.hints);
}

inline Cochain operator-(const Cochain& a, const Cochain& b) {
  if (a.degree != b.degree || a.covering.size() != b.covering.size()) throw Error("cochain shapes differ");
  std::map<Index, RatFunc> out;
  for (const auto& [I, v] : a.values) out.emplace(I, v - b.at(I));
  return make_cochain(a.covering, a.degree, SheafMode::Rational, out);
}

inline bool is_cocycle(const Cochain& f) { return differential(f).is_zero(); }

/// Searches h_I = a_I / Q_I^m with deg a_I <= D and one global m <= N such
/// that dh = f, by exact coefficient matching; m is tried from 0 upward.
inline std::optional<Cochain> is_coboundary_bounded(const Cochain& f, unsigned D, unsigned N) {
  if (f.degree == 0) {
    if (f.is_zero()) return f;
    return std::nullopt;
  }
  const std::size_t nv = f.nvars();
  const auto lower = cochain_indices(f.covering.size(), f.degree - 1);
  const auto upper = cochain_indices(f.covering.size(), f.degree);
  const auto monos = monomials_up_to(nv, D);
  for (unsigned m = 0; m <= N; ++m) {
    CoefficientSystem sys(lower.size() * monos.size());
    auto unknown = [&](std::size_t li, std::size_t mi) { return li * monos.size() + mi; };
    for (std::size_t g = 0; g < upper.size(); ++g) {
      const Index& J = upper[g];
      const Poly qj = overlap_q(f.covering, J).pow(m);
      const RatFunc& v = f.at(J);
      // sum_j (-1)^j a_{J\j} (Q_J/Q_{J\j})^m den = num Q_J^m
      for (std::size_t j = 0; j < J.size(); ++j) {
        const Index I = omit(J, j);
        const std::size_t li = static_cast<std::size_t>(std::find(lower.begin(), lower.end(), I) - lower.begin());
        Poly mult = divide_exact(qj, overlap_q(f.covering, I).pow(m)) * v.den();
        if (j % 2 == 1) mult = -mult;
        for (std::size_t mi = 0; mi < monos.size(); ++mi)
          sys.add(g, unknown(li, mi), mult * Poly::monomial(monos[mi]));
      }
      sys.add_rhs(g, v.num() * qj);
    }
    const auto sol = sys.solve();
    if (!sol) continue;
    std::map<Index, RatFunc> h;
    for (std::size_t li = 0; li < lower.size(); ++li) {
      Poly a(nv);
      for (std::size_t mi = 0; mi < monos.size(); ++mi) a.add_term(monos[mi], (*sol)[unknown(li, mi)]);
      h.emplace(lower[li], RatFunc(a, overlap_q(f.covering, lower[li]).pow(m)));
    }
    Cochain pre = make_cochain(f.covering, f.degree - 1, f.mode, h, f.hints);
    if (!(differential(pre) - f).is_zero()) throw Error("coboundary solver produced a wrong preimage");
    return pre;
  }
  return std::nullopt;
}

/// Value-wise pullback to one leaf; Regular mode re-certifies on the leaf,
/// using the pulled-back decompositions behind the base certificates.
inline Cochain pullback_cochain(const Tower& t, int leaf, const Cochain& f) {
  const PolyMap& m = t.chart(leaf).to_base;
  const Covering cov = pullback_covering(t, leaf, f.covering);
  std::map<Index, RatFunc> vals;
  for (const auto& [I, v] : f.values) vals.emplace(I, compose(v, m));
  Hints hints = compose(f.hints, m);
  for (const auto& [I, c] : f.certs) {
    const Hints h = compose(cert_hints(c.residual_cert), m);
    hints.insert(hints.end(), h.begin(), h.end());
  }
  return make_cochain(cov, f.degree, f.mode, vals, hints);
}

inline std::map<int, Cochain> pullback_cochain(const Tower& t, const Cochain& f) {
  std::map<int, Cochain> out;
  for (int leaf : t.leaves()) out.emplace(leaf, pullback_cochain(t, leaf, f));
  return out;
}

// ---------------------------------------------------------------------------
// Extension by powers of Q.

struct ExtendOutcome {
  enum class Status { Extended, Obstructed };
  Status status = Status::Obstructed;
  unsigned power = 0;
  RatFunc g;                        ///< Q^power f, unit denominator
  std::optional<ZeroCert> unit_cert;
  std::vector<Point> points;        ///< blowup-center candidates
  std::string reason;
};

/// Smallest N <= Nmax with Q^N f having a certified unit denominator. When
/// the denominator keeps a factor prime to Q with real zeros, reports those
/// zeros: the ones outside V(Q) if there are any (f was not regular on the
/// set), otherwise all of them.
inline ExtendOutcome extend_with_power(const RatFunc& f, const Poly& q, const Hints& hints, unsigned nmax) {
  ExtendOutcome out;
  const auto [blocked, residual] = split_against(f.den(), q);
  const UnitOutcome ru = is_unit(residual, hints);
  if (ru.status == UnitOutcome::Status::Unknown) throw Undecidable("residual denominator " + to_string(residual));
  if (ru.status == UnitOutcome::Status::No) {
    std::vector<Point> pts;
    const ZeroOutcome z = zero_cert(residual, hints);
    if (z.ok()) pts = z.cert->points;
    if (pts.empty() && ru.witness) pts.push_back(*ru.witness);
    std::vector<Point> outside;
    for (const auto& p : pts)
      if (q.evaluate(p) != 0) outside.push_back(p);
    out.points = outside.empty() ? pts : outside;
    out.reason = "denominator factor " + to_string(residual) + " is prime to Q";
    return out;
  }
  Poly qn = Poly::constant(q.nvars(), 1);
  for (unsigned n = 0; n <= nmax; ++n, qn *= q) {
    const RatFunc g = RatFunc(qn) * f;
    const UnitOutcome u = is_unit(g.den(), hints);
    if (u.status == UnitOutcome::Status::Yes) {
      out.status = ExtendOutcome::Status::Extended;
      out.power = n;
      out.g = g;
      out.unit_cert = u.cert;
      return out;
    }
    if (u.status == UnitOutcome::Status::Unknown) throw Undecidable("denominator " + to_string(g.den()));
  }
  out.reason = "power bound exceeded";
  return out;
}

// ---------------------------------------------------------------------------
// Blow-up-and-assemble solver for 1-cocycles.

struct CocycleLimits {
  unsigned max_power = 4;
  unsigned max_depth = 4;
};

struct LeafAssembly {
  Cochain f;                          ///< the pulled-back cocycle
  std::map<Index, RatFunc> h;         ///< (Q_i Q_j)^N f_ij for i < j
  std::map<Index, ZeroCert> h_certs;  ///< unit denominators of h
  ZeroCert sum_cert;                  ///< sum_i Q_i^N has no real zeros
  RatFunc R;                          ///< 1 / sum_i Q_i^N
  Cochain k;                          ///< the 0-cochain, Regular mode
  Cochain residual;                   ///< dk - f, zero on success
};

struct CocycleReport {
  enum class Status { Solved, Failed };
  Status status = Status::Failed;
  Tower tower;
  unsigned power = 0;
  std::map<int, LeafAssembly> leaves;
  std::map<int, std::vector<Point>> obstructions;
  std::string reason;
};

namespace detail {

inline LeafAssembly assemble(const Cochain& f, unsigned N, const std::map<Index, ExtendOutcome>& ext) {
  const Covering& cov = f.covering;
  const std::size_t n = cov.size(), nv = f.nvars();
  LeafAssembly a{f, {}, {}, {}, {}, {}, {}};
  Hints hints = cov.all_hints();
  hints.insert(hints.end(), f.hints.begin(), f.hints.end());
  std::vector<Poly> qs;
  for (const auto& s : cov.sets) qs.push_back(s.q);
  auto sc = coverage_cert(qs, N / 2);
  if (!sc) throw Error("sum of Q_i^N not certified positive");
  a.sum_cert = *sc;
  const Hints sum_h = cert_hints(a.sum_cert);
  hints.insert(hints.end(), sum_h.begin(), sum_h.end());
  Poly sum(nv);
  for (const auto& q : qs) sum += q.pow(N);
  a.R = RatFunc(Poly::constant(nv, 1), sum);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const Index I{i, j};
      const RatFunc h = RatFunc((qs[i] * qs[j]).pow(N)) * f.at(I);
      const UnitOutcome u = is_unit(h.den(), cert_hints(*ext.at(I).unit_cert));
      if (u.status != UnitOutcome::Status::Yes) throw Error("h_ij lost its unit denominator");
      a.h.emplace(I, h);
      a.h_certs.emplace(I, *u.cert);
      const Hints hh = cert_hints(*u.cert);
      hints.insert(hints.end(), hh.begin(), hh.end());
    }
  }
  auto h_at = [&](std::size_t i, std::size_t j) {
    if (i == j) return RatFunc::constant(nv, 0);
    return i < j ? a.h.at({i, j}) : -a.h.at({j, i});
  };
  std::map<Index, RatFunc> k;
  for (std::size_t i0 = 0; i0 < n; ++i0) {
    RatFunc s = RatFunc::constant(nv, 0);
    for (std::size_t i = 0; i < n; ++i) s = s + h_at(i, i0);
    k.emplace(Index{i0}, a.R * s / RatFunc(qs[i0].pow(N)));
  }
  a.k = make_cochain(cov, 0, SheafMode::Regular, k, hints);
  a.residual = differential(a.k) - f;
  return a;
}

}  // namespace detail

inline CocycleReport solve_cocycle_blownup(const Cochain& f, const CocycleLimits& lim = {}) {
  if (f.degree != 1) throw Error("solve_cocycle_blownup expects a 1-cocycle");
  if (f.mode != SheafMode::Regular) throw Error("solve_cocycle_blownup expects a Regular cochain");
  if (!is_cocycle(f)) throw Error("input is not a cocycle");
  CocycleReport rep;
  const std::size_t n = f.covering.size();
  for (;;) {
    rep.obstructions.clear();
    std::map<int, Cochain> pulled;
    std::map<int, std::map<Index, ExtendOutcome>> ext;
    unsigned N = 0;
    for (int leaf : rep.tower.leaves()) {
      const Cochain fl = rep.tower.depth() == 0 ? f : pullback_cochain(rep.tower, leaf, f);
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
          const Index I{i, j};
          const Poly q = fl.covering.sets[i].q * fl.covering.sets[j].q;
          Hints hints = overlap_hints(fl.covering, I);
          hints.insert(hints.end(), fl.hints.begin(), fl.hints.end());
          ExtendOutcome e = extend_with_power(fl.at(I), q, hints, lim.max_power);
          if (e.status == ExtendOutcome::Status::Extended) {
            N = std::max(N, e.power);
          } else {
            if (e.points.empty()) {
              rep.reason = e.reason;
              return rep;
            }
            auto& pts = rep.obstructions[leaf];
            pts.insert(pts.end(), e.points.begin(), e.points.end());
          }
          ext[leaf].emplace(I, std::move(e));
        }
      }
      pulled.emplace(leaf, fl);
    }
    if (rep.obstructions.empty()) {
      N += N % 2;
      if (N > lim.max_power) {
        rep.reason = "even power exceeds the bound";
        return rep;
      }
      rep.power = N;
      for (const auto& [leaf, fl] : pulled) {
        LeafAssembly a = detail::assemble(fl, N, ext[leaf]);
        if (!a.residual.is_zero()) throw Error("assembled k does not solve the cocycle");
        rep.leaves.emplace(leaf, std::move(a));
      }
      rep.status = CocycleReport::Status::Solved;
      return rep;
    }
    if (rep.tower.depth() >= lim.max_depth) {
      rep.reason = "depth bound reached with obstructions left";
      return rep;
    }
    Tower next = rep.tower;
    for (auto& [leaf, pts] : rep.obstructions) {
      std::sort(pts.begin(), pts.end());
      pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
      if (next.depth() >= lim.max_depth) break;
      next = next.blowup_at(leaf, pts.front());
    }
    rep.tower = next;
  }
}

/// Independent replay of a solved report: certificates, dk = f^t per leaf.
inline bool verify_cocycle_report(const Cochain& f, const CocycleReport& rep, std::string* why = nullptr) {
  auto fail = [&](const std::string& m) {
    if (why) *why = m;
    return false;
  };
  if (rep.status != CocycleReport::Status::Solved) return fail("not solved");
  if (rep.power % 2 != 0) return fail("odd power");
  const auto leaves = rep.tower.leaves();
  if (leaves.size() != rep.leaves.size()) return fail("leaf count mismatch");
  for (int leaf : leaves) {
    const LeafAssembly& a = rep.leaves.at(leaf);
    const Cochain expect = pullback_cochain(rep.tower, leaf, f);
    for (const auto& [I, v] : expect.values)
      if (!(a.f.at(I) == v)) return fail("pulled-back cocycle differs");
    if (!replay(a.sum_cert, why)) return false;
    for (const auto& [I, c] : a.h_certs) {
      if (!(c.subject == a.h.at(I).den()) && !(normalize(c.subject) == normalize(a.h.at(I).den())))
        return fail("h certificate subject mismatch");
      if (!replay(c, why) || !c.points.empty()) return fail("h denominator not a unit");
    }
    if (!verify_cochain(a.k, why)) return false;
    if (!(differential(a.k) - expect).is_zero()) return fail("dk differs from f");
  }
  return true;
}

// ---------------------------------------------------------------------------
// JSON.

inline Json to_json(const OpenSet& u) {
  Json hints = Json::array();
  for (const auto& h : u.hints) hints.push_back(to_json(h));
  return {{"chart", u.chart}, {"q", to_json(u.q)}, {"hints", hints}};
}

inline Json to_json(const Covering& c) {
  Json sets = Json::array();
  for (const auto& s : c.sets) sets.push_back(to_json(s));
  return {{"chart", c.chart}, {"sets", sets}, {"coverage_cert", to_json(c.coverage_cert)}};
}

/// A base covering from an array of polynomials or {"q": poly, "hints": [...]}
/// objects; syntactic decompositions are added as hints.
inline Covering covering_from_json(const Json& j, const std::string& ptr) {
  if (!j.is_array() || j.empty()) throw SchemaError(ptr, "covering must be a nonempty array");
  std::vector<OpenSet> sets;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const std::string p = ptr + "/" + std::to_string(i);
    const Json& e = j[i];
    const bool wrapped = e.is_object() && e.contains("q");
    const Poly q = poly_from_json(wrapped ? e["q"] : e, wrapped ? p + "/q" : p, 2);
    if (q.is_zero()) throw SchemaError(p, "open set complement of V(0) is empty");
    Hints hints = syntactic_hints(q);
    if (wrapped && e.contains("hints")) {
      if (!e["hints"].is_array()) throw SchemaError(p + "/hints", "hints must be an array");
      for (std::size_t h = 0; h < e["hints"].size(); ++h) {
        SquareSum s = square_sum_from_json(e["hints"][h], p + "/hints/" + std::to_string(h), 2);
        hints.push_back(std::move(s));
      }
    }
    sets.push_back(make_open_set(0, q, std::move(hints)));
  }
  try {
    return make_covering(0, std::move(sets));
  } catch (const NotACovering& e) {
    throw SchemaError(ptr, e.what());
  }
}

inline Json index_to_json(const Index& I) {
  Json a = Json::array();
  for (auto i : I) a.push_back(i + 1);
  return a;
}

inline Json to_json(const Cochain& c) {
  Json vals = Json::array();
  for (const auto& [I, v] : c.values) {
    Json e = {{"index", index_to_json(I)}, {"value", to_json(v)}};
    if (c.mode == SheafMode::Regular) e["cert"] = to_json(c.certs.at(I));
    vals.push_back(std::move(e));
  }
  return {{"degree", c.degree}, {"mode", c.mode == SheafMode::Regular ? "regular" : "rational"}, {"values", vals}};
}

inline Json to_json(const CocycleReport& r) {
  Json leaves = Json::object(), obs = Json::object();
  for (const auto& [leaf, a] : r.leaves) {
    Json h = Json::array(), hc = Json::array();
    for (const auto& [I, v] : a.h) h.push_back({{"index", index_to_json(I)}, {"value", to_json(v)}});
    for (const auto& [I, c] : a.h_certs) hc.push_back({{"index", index_to_json(I)}, {"cert", to_json(c)}});
    leaves[std::to_string(leaf)] = {{"covering", to_json(a.f.covering)},
                                   {"cocycle", to_json(a.f)},
                                   {"h", h},
                                   {"h_certs", hc},
                                   {"sum_cert", to_json(a.sum_cert)},
                                   {"R", to_json(a.R)},
                                   {"k", to_json(a.k)},
                                   {"residual", to_json(a.residual)}};
  }
  for (const auto& [leaf, pts] : r.obstructions) obs[std::to_string(leaf)] = points_to_json(pts);
  return {{"status", r.status == CocycleReport::Status::Solved ? "Solved" : "Failed"},
          {"depth", r.tower.depth()},
          {"N", r.power},
          {"tower", to_json(r.tower)},
          {"charts", charts_to_json(r.tower)},
          {"leaves", leaves},
          {"obstructions", obs},
          {"reason", r.reason}};
}

}  // namespace cechblow
