#pragma once

// Batch front end: instance files in, JSON reports out.
//
// An instance is {"kind": ..., "payload": {...}, "limits": {...}, "seed": n}.
// Every report carries "schema": "cechblow/1", echoes the instance, and
// embeds the certificates behind its claims. Exit codes: 0 solved, 2 bounded
// negative or solver failure, 1 invalid input.

#include <atomic>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <functional>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "cechblow/bundle.hpp"
#include "cechblow/cousin.hpp"
#include "cechblow/snc.hpp"
#include "cechblow/verify.hpp"

namespace cechblow::cli {

inline constexpr const char* kSchema = "cechblow/1";

enum Exit : int { kOk = 0, kInvalid = 1, kNegative = 2 };

struct Options {
  std::optional<unsigned> max_depth;
  std::optional<unsigned> deg;
  std::optional<unsigned> power;
  std::uint64_t seed = 0;
  unsigned jobs = 1;
  bool timing = false;
};

struct Outcome {
  int exit = kOk;
  Json report;
};

struct Limits {
  unsigned deg;
  unsigned power;
  unsigned depth;
};

struct Instance {
  std::string kind;
  Json payload;
  Json limits = Json::object();
  std::uint64_t seed = 0;
  Json raw;
};

inline const std::vector<std::string>& kinds() {
  static const std::vector<std::string> k = {"cousin", "cech_solve", "snc", "order_by_division", "xi_experiment",
                                             "limit_eq"};
  return k;
}

inline Instance instance_from_json(const Json& j) {
  if (!j.is_object()) throw SchemaError("", "instance must be an object");
  Instance in;
  in.raw = j;
  const Json& kind = require(j, "kind", "");
  if (!kind.is_string() || std::find(kinds().begin(), kinds().end(), kind.get<std::string>()) == kinds().end())
    throw SchemaError("/kind", "unknown instance kind");
  in.kind = kind.get<std::string>();
  in.payload = require(j, "payload", "");
  if (!in.payload.is_object()) throw SchemaError("/payload", "payload must be an object");
  if (j.contains("limits")) {
    in.limits = j["limits"];
    if (!in.limits.is_object()) throw SchemaError("/limits", "limits must be an object");
    for (const char* key : {"deg", "power", "depth"}) {
      if (in.limits.contains(key) && !(in.limits[key].is_number_integer() && in.limits[key].get<long>() >= 0))
        throw SchemaError(std::string("/limits/") + key, "expected non-negative integer");
    }
  }
  if (j.contains("seed")) {
    if (!j["seed"].is_number_integer()) throw SchemaError("/seed", "expected integer");
    in.seed = j["seed"].get<std::uint64_t>();
  }
  return in;
}

/// Flags override the instance, which overrides the per-kind defaults.
inline Limits effective_limits(const Instance& in, const Options& o, Limits defaults) {
  auto pick = [&](const std::optional<unsigned>& flag, const char* key, unsigned def) {
    if (flag) return *flag;
    if (in.limits.contains(key)) return in.limits[key].get<unsigned>();
    return def;
  };
  return {pick(o.deg, "deg", defaults.deg), pick(o.power, "power", defaults.power),
          pick(o.max_depth, "depth", defaults.depth)};
}

inline Json limits_to_json(const Limits& l) { return {{"deg", l.deg}, {"power", l.power}, {"depth", l.depth}}; }

inline Json parse_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SchemaError("", "cannot read " + path);
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw SchemaError("", std::string("not JSON: ") + e.what());
  }
}

/// Writes through a temporary file and a rename, so readers never see a
/// partial report.
inline void write_atomically(const std::string& path, const std::string& text) {
  const std::filesystem::path p(path);
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  const std::filesystem::path tmp = p.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + tmp.string());
    out << text;
    if (!out) throw Error("cannot write " + tmp.string());
  }
  std::filesystem::rename(tmp, p);
}

inline std::string dump(const Json& j) { return j.dump(2) + "\n"; }

namespace detail {

inline Json envelope(const std::string& command, const Instance& in, const Limits& lim) {
  return {{"schema", kSchema}, {"command", command}, {"kind", in.kind}, {"instance", in.raw},
          {"limits", limits_to_json(lim)}};
}

inline Outcome finish(Json report, int exit, const std::string& status) {
  report["status"] = status;
  report["certificate_count"] = find_certificates(report).size();
  return {exit, std::move(report)};
}

inline Outcome invalid(const std::string& command, const SchemaError& e) {
  Json r = {{"schema", kSchema}, {"command", command}, {"status", "InvalidInput"}, {"pointer", e.pointer()},
            {"error", e.what()}};
  return {kInvalid, std::move(r)};
}

inline void expect_kind(const Instance& in, const std::string& kind) {
  if (in.kind != kind) throw SchemaError("/kind", "expected kind '" + kind + "'");
}

inline unsigned get_unsigned(const Json& j, const char* key, const std::string& ptr) {
  const Json& v = require(j, key, ptr);
  if (!v.is_number_integer() || v.get<long>() < 0) throw SchemaError(ptr + "/" + key, "expected non-negative integer");
  return v.get<unsigned>();
}

inline std::vector<Poly> polys_from_json(const Json& j, const std::string& ptr) {
  if (!j.is_array() || j.empty()) throw SchemaError(ptr, "expected nonempty array of polynomials");
  std::vector<Poly> out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    Poly p = poly_from_json(j[i], ptr + "/" + std::to_string(i), 2);
    if (p.is_zero()) throw SchemaError(ptr + "/" + std::to_string(i), "zero polynomial");
    out.push_back(std::move(p));
  }
  return out;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Commands on parsed instances.

inline Outcome run_cousin(const Instance& in, const Options& o) {
  const std::string cmd = "solve-cousin";
  detail::expect_kind(in, "cousin");
  const Limits lim = effective_limits(in, o, {4, 4, 4});
  Json rep = detail::envelope(cmd, in, lim);
  const CousinData d = cousin_data_from_json(in.payload, "/payload");
  const std::string method = in.payload.value("method", std::string("blowup"));
  if (method != "blowup" && method != "direct") throw SchemaError("/payload/method", "expected 'blowup' or 'direct'");
  rep["method"] = method;
  try {
    if (method == "direct") {
      const auto sol = solve_direct(d, lim.deg, lim.power);
      if (!sol) {
        rep["reason"] = "no bounded preimage at (deg, power)";
        return detail::finish(std::move(rep), kNegative, "NotFound");
      }
      std::string why;
      rep["verified"] = verify_solution(d, *sol, &why);
      rep["depth"] = 0;
      rep["solution"] = to_json(*sol);
      return detail::finish(std::move(rep), kOk, "Solved");
    }
    const CousinReport r = solve_blownup(d, {lim.power, lim.depth});
    rep["cocycle"] = to_json(r.cocycle);
    if (r.status != CousinReport::Status::Solved) {
      rep["reason"] = r.cocycle.reason;
      return detail::finish(std::move(rep), kNegative, "Failed");
    }
    std::string why;
    rep["verified"] = verify_solution(d, *r.solution, &why);
    rep["depth"] = r.solution->tower.depth();
    rep["solution"] = to_json(*r.solution);
    return detail::finish(std::move(rep), kOk, "Solved");
  } catch (const InvalidData& e) {
    Json bad = {{"schema", kSchema}, {"command", cmd}, {"status", "InvalidInput"}, {"pointer", "/payload/parts"},
                {"error", e.what()}};
    if (e.witness()) bad["witness"] = to_json(*e.witness());
    return {kInvalid, std::move(bad)};
  } catch (const Undecidable& e) {
    rep["reason"] = e.what();
    return detail::finish(std::move(rep), kNegative, "Undecidable");
  }
}

/// Payload: {"covering": [...], "values": [{"index": [i, j], "value": f}, ...]}
/// with 1-based indices; a regular 1-cocycle.
inline Cochain cocycle_from_json(const Json& p, const std::string& ptr) {
  const Covering cov = covering_from_json(require(p, "covering", ptr), ptr + "/covering");
  const Json& vals = require(p, "values", ptr);
  if (!vals.is_array()) throw SchemaError(ptr + "/values", "expected array");
  std::map<Index, RatFunc> given;
  std::vector<std::string> where;
  for (std::size_t i = 0; i < vals.size(); ++i) {
    const std::string vp = ptr + "/values/" + std::to_string(i);
    const Json& idx = require(vals[i], "index", vp);
    if (!idx.is_array() || idx.size() != 2) throw SchemaError(vp + "/index", "expected a pair of set indices");
    Index I;
    for (std::size_t k = 0; k < 2; ++k) {
      if (!idx[k].is_number_integer() || idx[k].get<long>() < 1 || idx[k].get<std::size_t>() > cov.size())
        throw SchemaError(vp + "/index/" + std::to_string(k), "set index out of range");
      I.push_back(idx[k].get<std::size_t>() - 1);
    }
    if (I[0] >= I[1]) throw SchemaError(vp + "/index", "expected i < j");
    if (given.count(I)) throw SchemaError(vp + "/index", "duplicate index");
    given.emplace(I, ratfunc_from_json(require(vals[i], "value", vp), vp + "/value", 2));
    where.push_back(vp);
  }
  try {
    Cochain c = make_cochain(cov, 1, SheafMode::Regular, given);
    if (!is_cocycle(c)) throw SchemaError(ptr + "/values", "not a cocycle");
    return c;
  } catch (const NotRegularValue& e) {
    std::size_t pos = 0;
    for (const auto& [I, v] : given) {
      if (I == e.index()) break;
      ++pos;
    }
    throw SchemaError(pos < where.size() ? where[pos] + "/value" : ptr + "/values", e.what());
  }
}

inline Outcome run_cocycle(const Instance& in, const Options& o) {
  detail::expect_kind(in, "cech_solve");
  const Limits lim = effective_limits(in, o, {0, 4, 4});
  Json rep = detail::envelope("solve-cocycle", in, lim);
  const Cochain f = cocycle_from_json(in.payload, "/payload");
  try {
    const CocycleReport r = solve_cocycle_blownup(f, {lim.power, lim.depth});
    rep["result"] = to_json(r);
    if (r.status != CocycleReport::Status::Solved) return detail::finish(std::move(rep), kNegative, "Failed");
    rep["depth"] = r.tower.depth();
    rep["N"] = r.power;
    std::string why;
    rep["verified"] = verify_cocycle_report(f, r, &why);
    if (!why.empty()) rep["verify_reason"] = why;
    return detail::finish(std::move(rep), kOk, "Solved");
  } catch (const Undecidable& e) {
    rep["reason"] = e.what();
    return detail::finish(std::move(rep), kNegative, "Undecidable");
  }
}

inline Outcome run_snc(const Instance& in, const Options& o) {
  detail::expect_kind(in, "snc");
  const Limits lim = effective_limits(in, o, {0, 0, 4});
  Json rep = detail::envelope("resolve-snc", in, lim);
  const Poly f = poly_from_json(require(in.payload, "f", "/payload"), "/payload/f", 2);
  if (f.is_zero()) throw SchemaError("/payload/f", "zero polynomial");
  try {
    const SncResult r = transform_to_snc(f, lim.depth);
    rep["result"] = to_json(r);
    if (r.status != SncResult::Status::Resolved) return detail::finish(std::move(rep), kNegative, "DepthExceeded");
    rep["verified"] = verify_snc(r);
    rep["depth"] = r.tower.depth();
    return detail::finish(std::move(rep), kOk, "Resolved");
  } catch (const NonRationalCritical& e) {
    rep["reason"] = e.what();
    return detail::finish(std::move(rep), kNegative, "NonRationalCritical");
  }
}

inline Outcome run_order(const Instance& in, const Options& o) {
  detail::expect_kind(in, "order_by_division");
  const Limits lim = effective_limits(in, o, {0, 0, 4});
  Json rep = detail::envelope("order-division", in, lim);
  const auto fs = detail::polys_from_json(require(in.payload, "functions", "/payload"), "/payload/functions");
  for (std::size_t i = 0; i < fs.size(); ++i)
    for (std::size_t j = i + 1; j < fs.size(); ++j)
      if (fs[i] == fs[j]) throw SchemaError("/payload/functions/" + std::to_string(j), "duplicate function");
  try {
    const OrderResult r = order_by_division(fs, lim.depth);
    rep["result"] = to_json(r.snc);
    rep["inputs"] = r.inputs;
    if (r.status != OrderResult::Status::Ordered) return detail::finish(std::move(rep), kNegative, "DepthExceeded");
    rep["depth"] = r.snc.tower.depth();
    return detail::finish(std::move(rep), kOk, "Ordered");
  } catch (const ChainViolation& e) {
    rep["reason"] = e.what();
    return detail::finish(std::move(rep), kNegative, "ChainViolation");
  } catch (const NonRationalCritical& e) {
    rep["reason"] = e.what();
    return detail::finish(std::move(rep), kNegative, "NonRationalCritical");
  }
}

/// Runs f(i) for i in [0, n) on up to `jobs` threads.
template <typename F>
void parallel_for(std::size_t n, unsigned jobs, F&& f) {
  if (jobs <= 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) f(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(n);
  for (unsigned t = 0; t < std::min<std::size_t>(jobs, n); ++t) {
    pool.emplace_back([&] {
      for (std::size_t i; (i = next.fetch_add(1)) < n;) {
        try {
          f(i);
        } catch (...) {
          errors[i] = std::current_exception();
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

/// Payload: {"k", "l", "experiments": subset of [search, sections,
/// generation, chains, sum]}; "sum_up_to": K for the truncated direct sum.
inline Outcome run_xi(const Instance& in, const Options& o) {
  detail::expect_kind(in, "xi_experiment");
  const Limits lim = effective_limits(in, o, {10, 4, 3});
  Json rep = detail::envelope("xi", in, lim);
  const unsigned k = detail::get_unsigned(in.payload, "k", "/payload");
  const unsigned l = detail::get_unsigned(in.payload, "l", "/payload");
  std::vector<std::string> exps = {"search"};
  if (in.payload.contains("experiments")) {
    const Json& e = in.payload["experiments"];
    if (!e.is_array()) throw SchemaError("/payload/experiments", "expected array");
    exps.clear();
    for (std::size_t i = 0; i < e.size(); ++i) {
      const std::string p = "/payload/experiments/" + std::to_string(i);
      if (!e[i].is_string()) throw SchemaError(p, "expected experiment name");
      const std::string name = e[i].get<std::string>();
      if (name != "search" && name != "sections" && name != "generation" && name != "chains" && name != "sum")
        throw SchemaError(p, "unknown experiment '" + name + "'");
      exps.push_back(name);
    }
  }
  const LineBundle b = make_xi(k, l);
  rep["bundle"] = to_json(b);
  int exit = kOk;
  Json results = Json::object();
  for (const auto& name : exps) {
    if (name == "search") {
      const SearchResult r = search_trivializing_tower(k, l, lim.depth, lim.deg, lim.power);
      results["search"] = to_json(r, k, l);
      if (!r.found) exit = kNegative;
    } else if (name == "sections") {
      const auto basis = global_sections_bounded(b, lim.deg, lim.power);
      Json secs = Json::array();
      bool all_vanish_c1 = true, all_vanish_c2 = true;
      for (const auto& s : basis) {
        secs.push_back(to_json(s));
        if (s.s2.num().evaluate(Point{0, 0}) != 0) all_vanish_c1 = false;
        if (s.s1.num().evaluate(Point{1, 0}) != 0) all_vanish_c2 = false;
      }
      results["sections"] = {{"dimension", basis.size()},
                             {"all_s2_vanish_at_c1", all_vanish_c1},
                             {"all_s1_vanish_at_c2", all_vanish_c2},
                             {"basis", secs}};
    } else if (name == "generation") {
      results["generation"] = {{"c1", generated_at(b, Point{0, 0}, lim.deg, lim.power)},
                               {"c2", generated_at(b, Point{1, 0}, lim.deg, lim.power)}};
    } else if (name == "chains") {
      Json r = Json::object();
      for (int which : {1, 2}) {
        if ((which == 1 ? k : l) == 0) continue;
        const TowerCheck c = chain_section(k, l, which);
        const std::string key = which == 1 ? "c1_chain" : "c2_chain";
        if (c.section) {
          r[key] = {{"found", true}, {"depth", c.section->tower.depth()}, {"section", to_json(*c.section)}};
        } else {
          r[key] = {{"found", false}, {"reason", c.reason}};
          exit = kNegative;
        }
      }
      results["chains"] = r;
    } else {
      // The truncated sum of the ξ_{j,j}, j <= K, trivializes on a tower only
      // if every summand does, so its restricted minimal depth is the maximum.
      const unsigned K = in.payload.contains("sum_up_to") ? detail::get_unsigned(in.payload, "sum_up_to", "/payload")
                                                          : std::max(k, l);
      std::vector<Json> parts(K);
      std::vector<std::optional<unsigned>> depths(K);
      parallel_for(K, o.jobs, [&](std::size_t i) {
        const unsigned j = static_cast<unsigned>(i) + 1;
        const SearchResult r = search_trivializing_tower(j, j, std::max(lim.depth, j), lim.deg, lim.power);
        parts[i] = to_json(r, j, j);
        if (r.found) depths[i] = r.depth;
      });
      Json sum = {{"K", K}, {"summands", parts}};
      bool all = true;
      unsigned need = 0;
      for (const auto& d : depths) {
        if (!d) all = false;
        else need = std::max(need, *d);
      }
      sum["min_depth"] = all ? Json(need) : Json(nullptr);
      if (!all) exit = kNegative;
      results["sum"] = sum;
    }
  }
  rep["results"] = results;
  return detail::finish(std::move(rep), exit, exit == kOk ? "Found" : "NotFound");
}

inline LimitSection limit_section_from_json(const Json& j, const std::string& ptr) {
  const Tower t = tower_from_json(require(j, "tower", ptr), ptr + "/tower");
  if (j.contains("f")) return LimitSection::of(t, ratfunc_from_json(j["f"], ptr + "/f", 2));
  const Json& vals = require(j, "values", ptr);
  if (!vals.is_object()) throw SchemaError(ptr + "/values", "expected object keyed by leaf chart");
  LimitSection s{t, {}};
  for (int leaf : t.leaves()) {
    const std::string key = std::to_string(leaf);
    if (!vals.contains(key)) throw SchemaError(ptr + "/values/" + key, "missing leaf");
    s.values.emplace(leaf, ratfunc_from_json(vals[key], ptr + "/values/" + key, 2));
  }
  return s;
}

inline Outcome run_limit_eq(const Instance& in, const Options& o) {
  detail::expect_kind(in, "limit_eq");
  const Limits lim = effective_limits(in, o, {0, 0, 0});
  Json rep = detail::envelope("limit-eq", in, lim);
  const LimitSection s = limit_section_from_json(require(in.payload, "s", "/payload"), "/payload/s");
  const LimitSection t = limit_section_from_json(require(in.payload, "t", "/payload"), "/payload/t");
  const LimitComparison c = limit_eq(s, t);
  const char* name = c == LimitComparison::Equal ? "Equal" : c == LimitComparison::NotEqual ? "NotEqual" : "Incomparable";
  rep["comparison"] = name;
  return detail::finish(std::move(rep), c == LimitComparison::Incomparable ? kNegative : kOk, name);
}

/// Replays every certificate embedded in a report.
inline Outcome run_verify(const Json& report) {
  if (!report.is_object() || report.value("schema", std::string()) != kSchema)
    throw SchemaError("/schema", std::string("expected schema '") + kSchema + "'");
  const ReplaySummary s = replay_report(report);
  Json rep = {{"schema", kSchema}, {"command", "verify"}, {"replay", to_json(s)}};
  rep["status"] = s.ok() ? "Verified" : "Rejected";
  return {s.ok() ? kOk : kNegative, std::move(rep)};
}

// ---------------------------------------------------------------------------
// Seeded property suites.

namespace detail {

inline Poly random_poly(std::mt19937_64& rng, unsigned max_degree, unsigned max_terms) {
  std::uniform_int_distribution<int> coef(-5, 5), deg(0, static_cast<int>(max_degree));
  std::uniform_int_distribution<unsigned> nterms(1, max_terms);
  Poly p(2);
  const unsigned n = nterms(rng);
  for (unsigned t = 0; t < n; ++t) {
    const int d = deg(rng);
    std::uniform_int_distribution<int> split(0, d);
    const int a = split(rng);
    const int c = coef(rng);
    if (c != 0) p += Poly::monomial(Exponents{static_cast<unsigned>(a), static_cast<unsigned>(d - a)}, c);
  }
  return p;
}

inline Poly random_nonzero_poly(std::mt19937_64& rng, unsigned max_degree, unsigned max_terms) {
  for (;;) {
    Poly p = random_poly(rng, max_degree, max_terms);
    if (!p.is_zero()) return p;
  }
}

inline RatFunc random_ratfunc(std::mt19937_64& rng) {
  return RatFunc(random_poly(rng, 3, 3), random_nonzero_poly(rng, 2, 2));
}

/// Coverings with certified coverage used by the property suites.
inline std::vector<Covering> sample_coverings() {
  const auto P = [](const char* s) { return parse_poly(s, {"x", "y"}); };
  auto cov = [&](std::vector<const char*> qs) {
    std::vector<OpenSet> sets;
    for (auto q : qs) sets.push_back(make_open_set(0, P(q), syntactic_hints(P(q))));
    return make_covering(0, std::move(sets));
  };
  return {cov({"x^2 + y^2", "(x-1)^2 + y^2"}), cov({"x", "1 - x"}), cov({"x", "y", "x + y - 1"}),
          cov({"x^2 + y^2", "(x-1)^2 + y^2", "y"})};
}

inline Cochain random_cochain(std::mt19937_64& rng, const Covering& cov, unsigned q) {
  std::map<Index, RatFunc> vals;
  for (const auto& I : cochain_indices(cov.size(), q)) vals.emplace(I, random_ratfunc(rng));
  return make_cochain(cov, q, SheafMode::Rational, vals);
}

inline Tower random_tower(std::mt19937_64& rng, unsigned depth) {
  std::uniform_int_distribution<int> c(-2, 2);
  Tower t;
  for (unsigned d = 0; d < depth; ++d) {
    const auto leaves = t.leaves();
    std::uniform_int_distribution<std::size_t> pick(0, leaves.size() - 1);
    t = t.blowup_at(leaves[pick(rng)], Point{Rational(c(rng)), Rational(c(rng))});
  }
  return t;
}

}  // namespace detail

struct SuiteResult {
  std::string name;
  std::size_t trials = 0;
  std::size_t failures = 0;
  std::string first_failure;
  bool ok() const { return failures == 0 && trials > 0; }
};

inline Json to_json(const SuiteResult& s) {
  return {{"name", s.name}, {"trials", s.trials}, {"failures", s.failures}, {"first_failure", s.first_failure}};
}

/// d∘d = 0 on random rational cochains of degree q, over every sample covering.
inline SuiteResult suite_dd(std::uint64_t seed, unsigned q, std::size_t per_covering) {
  SuiteResult s{"d_squared_zero_q" + std::to_string(q)};
  std::mt19937_64 rng(seed * 31 + q);
  for (const auto& cov : detail::sample_coverings()) {
    for (std::size_t i = 0; i < per_covering; ++i) {
      ++s.trials;
      const Cochain c = detail::random_cochain(rng, cov, q);
      if (!differential(differential(c)).is_zero()) {
        if (s.failures++ == 0) s.first_failure = "covering of size " + std::to_string(cov.size());
      }
    }
  }
  return s;
}

/// (α∘β)* = β*∘α* on functions, open sets and cochains: pulling back to a
/// leaf in one step equals pulling back to an intermediate chart and then on.
inline SuiteResult suite_functoriality(std::uint64_t seed, std::size_t trials) {
  SuiteResult s{"functoriality"};
  std::mt19937_64 rng(seed * 131 + 7);
  const auto covs = detail::sample_coverings();
  for (std::size_t i = 0; i < trials; ++i) {
    ++s.trials;
    const Tower t = detail::random_tower(rng, 2);
    const RatFunc f = detail::random_ratfunc(rng);
    const Covering& cov = covs[i % covs.size()];
    const Cochain c = detail::random_cochain(rng, cov, 1);
    std::string bad;
    for (int leaf : t.leaves()) {
      const Chart& ch = t.chart(leaf);
      for (int mid = ch.parent; mid >= 0; mid = t.chart(mid).parent) {
        const PolyMap& alpha = t.chart(mid).to_base;
        const PolyMap beta = t.map_to_ancestor(leaf, mid);
        if (!(compose(compose(f, alpha), beta) == compose(f, ch.to_base))) bad = "function";
        for (const auto& u : cov.sets)
          if (!(compose(compose(u.q, alpha), beta) == pullback_openset(t, leaf, u).q)) bad = "open set";
        const Cochain direct = pullback_cochain(t, leaf, c);
        for (const auto& [I, v] : c.values)
          if (!(compose(compose(v, alpha), beta) == direct.at(I))) bad = "cochain";
      }
    }
    if (!bad.empty() && s.failures++ == 0) s.first_failure = bad;
  }
  return s;
}

/// Pullback commutes with d on random cochains through random towers.
inline SuiteResult suite_chain_map(std::uint64_t seed, std::size_t trials) {
  SuiteResult s{"chain_map"};
  std::mt19937_64 rng(seed * 977 + 3);
  const auto covs = detail::sample_coverings();
  for (std::size_t i = 0; i < trials; ++i) {
    ++s.trials;
    const Tower t = detail::random_tower(rng, 2);
    const Cochain c = detail::random_cochain(rng, covs[i % covs.size()], i % 2);
    const Cochain dc = differential(c);
    for (int leaf : t.leaves()) {
      const Cochain lhs = differential(pullback_cochain(t, leaf, c));
      const Cochain rhs = pullback_cochain(t, leaf, dc);
      if (!(lhs - rhs).is_zero()) {
        if (s.failures++ == 0) s.first_failure = "leaf " + std::to_string(leaf);
        break;
      }
    }
  }
  return s;
}

inline Outcome run_selftest(const Options& o) {
  std::vector<std::function<SuiteResult()>> suites;
  for (unsigned q = 0; q <= 2; ++q) suites.push_back([&, q] { return suite_dd(o.seed, q, 25); });
  suites.push_back([&] { return suite_functoriality(o.seed, 50); });
  suites.push_back([&] { return suite_chain_map(o.seed, 30); });
  std::vector<SuiteResult> results(suites.size());
  parallel_for(suites.size(), o.jobs, [&](std::size_t i) { results[i] = suites[i](); });
  Json rep = {{"schema", kSchema}, {"command", "selftest"}, {"seed", o.seed}};
  Json rs = Json::array();
  bool ok = true;
  for (const auto& r : results) {
    rs.push_back(to_json(r));
    ok = ok && r.ok();
  }
  rep["suites"] = rs;
  rep["status"] = ok ? "Passed" : "Failed";
  return {ok ? kOk : kNegative, std::move(rep)};
}

// ---------------------------------------------------------------------------
// Dispatch.

inline const std::vector<std::string>& commands() {
  static const std::vector<std::string> c = {"solve-cousin", "solve-cocycle", "resolve-snc", "order-division",
                                             "xi",           "limit-eq",      "verify",      "selftest"};
  return c;
}

/// Runs one command on one parsed JSON document (an instance, or a report
/// for `verify`). Invalid input becomes an exit-1 report, never a throw.
inline Outcome run_json(const std::string& command, const Json& doc, const Options& o) {
  const auto start = std::chrono::steady_clock::now();
  Outcome out;
  try {
    if (command == "verify") {
      out = run_verify(doc);
    } else if (command == "selftest") {
      out = run_selftest(o);
    } else {
      const Instance in = instance_from_json(doc);
      if (command == "solve-cousin") out = run_cousin(in, o);
      else if (command == "solve-cocycle") out = run_cocycle(in, o);
      else if (command == "resolve-snc") out = run_snc(in, o);
      else if (command == "order-division") out = run_order(in, o);
      else if (command == "xi") out = run_xi(in, o);
      else if (command == "limit-eq") out = run_limit_eq(in, o);
      else throw SchemaError("", "unknown command " + command);
    }
  } catch (const SchemaError& e) {
    out = detail::invalid(command, e);
  } catch (const Error& e) {
    // Solver-side failures are reported, not crashed on.
    out = {kNegative, {{"schema", kSchema}, {"command", command}, {"status", "Error"}, {"error", e.what()}}};
  }
  if (o.timing) {
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    out.report["timing"] = {{"seconds", secs}};
  }
  return out;
}

inline Outcome run_file(const std::string& command, const std::string& path, const Options& o) {
  try {
    return run_json(command, parse_json_file(path), o);
  } catch (const SchemaError& e) {
    return detail::invalid(command, e);
  }
}

}  // namespace cechblow::cli
