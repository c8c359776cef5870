#pragma once

// The first (additive) Cousin problem on a covering of the base chart.
//
// Data: f_i on U_i with f_i - f_j regular on U_i ∩ U_j. A solution is one f
// per leaf chart with f - f_i regular on each pulled-back U_i. With the
// differential (dh)_{ij} = h_j - h_i, a preimage h of g_ij = f_i - f_j gives
// the solution f = f_i + h_i, i.e. h_i = f - f_i.

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "cechblow/cech.hpp"

namespace cechblow {

class InvalidData : public Error {
 public:
  InvalidData(std::pair<std::size_t, std::size_t> pair, std::optional<Point> witness, const std::string& why)
      : Error("Cousin data invalid on overlap (" + std::to_string(pair.first + 1) + "," +
              std::to_string(pair.second + 1) + "): " + why),
        pair_(pair), witness_(std::move(witness)) {}
  std::pair<std::size_t, std::size_t> pair() const { return pair_; }
  const std::optional<Point>& witness() const { return witness_; }

 private:
  std::pair<std::size_t, std::size_t> pair_;
  std::optional<Point> witness_;
};

struct CousinData {
  Covering covering;
  std::vector<RatFunc> parts;
};

/// One f per leaf, with f - f_i^t regular on U_i^t.
struct CousinSolution {
  Tower tower;
  std::map<int, RatFunc> f;
  std::map<int, Covering> coverings;
  std::map<int, std::vector<RegularityCert>> certs;  ///< per leaf, per set
};

/// The cocycle g_ij = f_i - f_j, certified regular on the overlaps.
inline Cochain validate(const CousinData& d) {
  if (d.parts.size() != d.covering.size()) throw Error("one part per covering set is required");
  Hints hints;
  for (const auto& f : d.parts) {
    // Decompositions of the parts' denominators help certify the differences.
    const auto z = zero_cert(f.den(), d.covering.all_hints());
    if (z.ok()) {
      const Hints h = cert_hints(*z.cert);
      hints.insert(hints.end(), h.begin(), h.end());
    }
  }
  std::map<Index, RatFunc> g;
  for (std::size_t i = 0; i < d.parts.size(); ++i)
    for (std::size_t j = i + 1; j < d.parts.size(); ++j) g.emplace(Index{i, j}, d.parts[i] - d.parts[j]);
  try {
    Cochain c = make_cochain(d.covering, 1, SheafMode::Regular, g, hints);
    if (!is_cocycle(c)) throw Error("differences do not form a cocycle");
    return c;
  } catch (const NotRegularValue& e) {
    throw InvalidData({e.index()[0], e.index()[1]}, e.witness(), e.what());
  }
}

namespace detail {

inline std::vector<RegularityCert> certify_parts(const RatFunc& f, const Covering& cov,
                                                 const std::vector<RatFunc>& parts, const Hints& extra) {
  std::vector<RegularityCert> out;
  for (std::size_t i = 0; i < parts.size(); ++i) out.push_back(certify_value(cov, {i}, f - parts[i], extra));
  return out;
}

}  // namespace detail

/// Solves without blowing up, through a bounded preimage of the cocycle.
inline std::optional<CousinSolution> solve_direct(const CousinData& d, unsigned D, unsigned N) {
  const Cochain g = validate(d);
  const auto h = is_coboundary_bounded(g, D, N);
  if (!h) return std::nullopt;
  const RatFunc f = d.parts[0] + h->at({0});
  for (std::size_t i = 1; i < d.parts.size(); ++i)
    if (!(d.parts[i] + h->at({i}) == f)) throw Error("glued function depends on the set");
  CousinSolution sol;
  sol.f.emplace(0, f);
  sol.coverings.emplace(0, d.covering);
  sol.certs.emplace(0, detail::certify_parts(f, d.covering, d.parts, g.hints));
  return sol;
}

struct CousinReport {
  enum class Status { Solved, Failed };
  Status status = Status::Failed;
  Cochain zeta;
  CocycleReport cocycle;
  std::optional<CousinSolution> solution;
};

/// Pulls the obstruction cocycle back along a tower that makes it a
/// coboundary of regular functions, and glues f = f_i + k_i per leaf.
inline CousinReport solve_blownup(const CousinData& d, const CocycleLimits& lim = {}) {
  CousinReport rep;
  rep.zeta = validate(d);
  rep.cocycle = solve_cocycle_blownup(rep.zeta, lim);
  if (rep.cocycle.status != CocycleReport::Status::Solved) return rep;
  CousinSolution sol;
  sol.tower = rep.cocycle.tower;
  for (const auto& [leaf, a] : rep.cocycle.leaves) {
    const PolyMap& m = sol.tower.chart(leaf).to_base;
    std::vector<RatFunc> parts;
    for (const auto& p : d.parts) parts.push_back(compose(p, m));
    const RatFunc f = parts[0] + a.k.at({0});
    for (std::size_t i = 1; i < parts.size(); ++i)
      if (!(parts[i] + a.k.at({i}) == f)) throw Error("glued function depends on the set");
    Hints hints = a.k.hints;
    for (const auto& [I, c] : a.k.certs) {
      const Hints h = cert_hints(c.residual_cert);
      hints.insert(hints.end(), h.begin(), h.end());
    }
    sol.f.emplace(leaf, f);
    sol.coverings.emplace(leaf, a.f.covering);
    sol.certs.emplace(leaf, detail::certify_parts(f, a.f.covering, parts, hints));
  }
  rep.solution = std::move(sol);
  rep.status = CousinReport::Status::Solved;
  return rep;
}

/// Replays a solution against the data: per leaf and set, the certificate is
/// for f - f_i^t on the pulled-back U_i and replays.
inline bool verify_solution(const CousinData& d, const CousinSolution& s, std::string* why = nullptr) {
  auto fail = [&](const std::string& m) {
    if (why) *why = m;
    return false;
  };
  const auto leaves = s.tower.leaves();
  if (leaves.size() != s.f.size()) return fail("leaf count mismatch");
  for (int leaf : leaves) {
    const PolyMap& m = s.tower.chart(leaf).to_base;
    const auto& certs = s.certs.at(leaf);
    if (certs.size() != d.parts.size()) return fail("certificate count mismatch");
    for (std::size_t i = 0; i < d.parts.size(); ++i) {
      const RatFunc diff = s.f.at(leaf) - compose(d.parts[i], m);
      if (!(certs[i].function == diff)) return fail("certificate is for another function");
      if (!(certs[i].q == compose(d.covering.sets[i].q, m))) return fail("certificate is for another set");
      if (!replay_regular(certs[i], why)) return false;
    }
  }
  return true;
}

/// Pulls a solution's f back along a tower refining its own.
inline CousinSolution pullback_solution(const CousinData& d, const CousinSolution& s, const Tower& t) {
  if (s.tower.depth() != 0) throw Error("pullback_solution expects a base solution");
  CousinSolution out;
  out.tower = t;
  for (int leaf : t.leaves()) {
    const PolyMap& m = t.chart(leaf).to_base;
    const Covering cov = pullback_covering(t, leaf, d.covering);
    std::vector<RatFunc> parts;
    for (const auto& p : d.parts) parts.push_back(compose(p, m));
    Hints hints;
    for (const auto& c : s.certs.at(0)) {
      const Hints h = compose(cert_hints(c.residual_cert), m);
      hints.insert(hints.end(), h.begin(), h.end());
    }
    const RatFunc f = compose(s.f.at(0), m);
    out.f.emplace(leaf, f);
    out.coverings.emplace(leaf, cov);
    out.certs.emplace(leaf, detail::certify_parts(f, cov, parts, hints));
  }
  return out;
}

/// f - g regular on U.
inline bool same_principal_part(const RatFunc& f, const RatFunc& g, const OpenSet& u) {
  const RegularityOutcome r = certify_regular(f - g, u.q, u.hints);
  if (r.status == RegularityOutcome::Status::Undecidable) throw Undecidable(r.reason);
  return r.ok();
}

// ---------------------------------------------------------------------------
// JSON.

inline CousinData cousin_data_from_json(const Json& j, const std::string& ptr) {
  require(j, "covering", ptr);
  require(j, "parts", ptr);
  CousinData d{covering_from_json(j["covering"], ptr + "/covering"), {}};
  const Json& parts = j["parts"];
  if (!parts.is_array()) throw SchemaError(ptr + "/parts", "parts must be an array");
  if (parts.size() != d.covering.size()) throw SchemaError(ptr + "/parts", "one part per covering set is required");
  for (std::size_t i = 0; i < parts.size(); ++i)
    d.parts.push_back(ratfunc_from_json(parts[i], ptr + "/parts/" + std::to_string(i), 2));
  return d;
}

inline Json to_json(const CousinSolution& s) {
  Json leaves = Json::object();
  for (const auto& [leaf, f] : s.f) {
    Json certs = Json::array();
    for (const auto& c : s.certs.at(leaf)) certs.push_back(to_json(c));
    leaves[std::to_string(leaf)] = {{"f", to_json(f)}, {"certs", certs}};
  }
  return {{"tower", to_json(s.tower)}, {"leaves", leaves}};
}

inline CousinSolution cousin_solution_from_json(const Json& j, const std::string& ptr, const CousinData& d) {
  require(j, "tower", ptr);
  require(j, "leaves", ptr);
  CousinSolution s;
  s.tower = tower_from_json(j["tower"], ptr + "/tower");
  for (int leaf : s.tower.leaves()) {
    const std::string lp = ptr + "/leaves/" + std::to_string(leaf);
    if (!j["leaves"].contains(std::to_string(leaf))) throw SchemaError(lp, "missing leaf");
    const Json& e = j["leaves"][std::to_string(leaf)];
    require(e, "f", lp);
    require(e, "certs", lp);
    s.f.emplace(leaf, ratfunc_from_json(e["f"], lp + "/f", 2));
    std::vector<RegularityCert> certs;
    for (std::size_t i = 0; i < e["certs"].size(); ++i)
      certs.push_back(regularity_cert_from_json(e["certs"][i], lp + "/certs/" + std::to_string(i)));
    s.certs.emplace(leaf, std::move(certs));
    s.coverings.emplace(leaf, pullback_covering(s.tower, leaf, d.covering));
  }
  return s;
}

}  // namespace cechblow
