#pragma once

// Simple normal crossings on planar charts, and the blowup loop that reaches
// them. Functions are tracked in factored form over a pairwise coprime basis
// of square-free polynomials; SNC at a point means at most two basis factors
// vanish there, each smooth, and with independent gradients when two do.

#include <algorithm>
#include <map>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "cechblow/geometry.hpp"

namespace cechblow {

class NotFactored : public Error {
 public:
  NotFactored() : Error("SNC test needs a SmoothFactors certificate") {}
};

class NonRationalCritical : public Error {
 public:
  explicit NonRationalCritical(Poly eliminant)
      : Error("critical point with irrational coordinates (eliminant " + to_string(eliminant) + ")"),
        eliminant_(std::move(eliminant)) {}
  const Poly& eliminant() const { return eliminant_; }

 private:
  Poly eliminant_;
};

class ChainViolation : public Error {
 public:
  explicit ChainViolation(const std::string& where) : Error("exponent vectors are not a chain at " + where) {}
};

using FactorList = std::vector<std::pair<Poly, unsigned>>;

struct SncDecomposition {
  std::vector<Poly> coords;     ///< the vanishing factors: local coordinates
  std::vector<unsigned> alpha;  ///< their multiplicities
  Poly unit;                    ///< the product of the other factors
};

struct SncVerdict {
  enum class Status { Unit, Snc, NotSnc };
  Status status = Status::Unit;
  SncDecomposition decomposition;
  std::string reason;
};

inline const char* status_name(SncVerdict::Status s) {
  switch (s) {
    case SncVerdict::Status::Unit:
      return "Unit";
    case SncVerdict::Status::Snc:
      return "SNC";
    case SncVerdict::Status::NotSnc:
      return "NotSNC";
  }
  return "?";
}

inline std::array<Rational, 2> gradient_at(const Poly& f, const Point& a) {
  return {f.derivative(0).evaluate(a), f.derivative(1).evaluate(a)};
}

/// SNC test of prod f_i^m_i at a.
inline SncVerdict snc_at_point(const FactorList& factors, const Point& a) {
  SncVerdict v;
  const std::size_t n = factors.empty() ? 2 : factors.front().first.nvars();
  v.decomposition.unit = Poly::constant(n, 1);
  for (const auto& [f, m] : factors) {
    if (f.evaluate(a) == 0) {
      v.decomposition.coords.push_back(f);
      v.decomposition.alpha.push_back(m);
    } else {
      v.decomposition.unit *= f.pow(m);
    }
  }
  const auto& coords = v.decomposition.coords;
  if (coords.empty()) return v;
  v.status = SncVerdict::Status::NotSnc;
  if (coords.size() > 2) {
    v.reason = std::to_string(coords.size()) + " factors meet";
    return v;
  }
  std::vector<std::array<Rational, 2>> grads;
  for (const auto& f : coords) {
    grads.push_back(gradient_at(f, a));
    if (grads.back()[0] == 0 && grads.back()[1] == 0) {
      v.reason = "singular factor " + to_string(f, {"r", "s"});
      return v;
    }
  }
  if (grads.size() == 2 && grads[0][0] * grads[1][1] - grads[0][1] * grads[1][0] == 0) {
    v.reason = "tangent factors";
    return v;
  }
  v.status = SncVerdict::Status::Snc;
  return v;
}

inline SncVerdict snc_at_point(const ZeroCert& cert, const Point& a) {
  if (cert.kind != ZeroCert::Kind::SmoothFactors) throw NotFactored();
  return snc_at_point(cert.factors, a);
}

/// prod coords^alpha * unit, for replaying a decomposition against p.
inline Poly recompose(const SncDecomposition& d) {
  Poly p = d.unit;
  for (std::size_t i = 0; i < d.coords.size(); ++i) p *= d.coords[i].pow(d.alpha[i]);
  return p;
}

// ---------------------------------------------------------------------------
// Factored functions on a chart.

/// f = scale * prod basis[i]^exps[i].
struct Factored {
  Rational scale = 1;
  std::vector<unsigned> exps;
};

struct ChartFactors {
  std::vector<Poly> basis;
  std::vector<Factored> funcs;

  /// Total multiplicity of each basis element over all tracked functions.
  FactorList total() const {
    FactorList out;
    for (std::size_t i = 0; i < basis.size(); ++i) {
      unsigned m = 0;
      for (const auto& f : funcs) m += f.exps[i];
      if (m > 0) out.emplace_back(basis[i], m);
    }
    return out;
  }

  Poly value(std::size_t fn) const {
    Poly p = Poly::constant(2, funcs[fn].scale);
    for (std::size_t i = 0; i < basis.size(); ++i) p *= basis[i].pow(funcs[fn].exps[i]);
    return p;
  }
};

/// Pairwise coprime square-free basis such that every input is a constant
/// times a product of basis powers.
inline std::vector<Poly> coprime_basis(const std::vector<Poly>& inputs) {
  std::vector<Poly> list;
  for (const auto& g : inputs) {
    const Exponents mc = g.monomial_content();
    for (std::size_t v = 0; v < mc.size(); ++v)
      if (mc[v] > 0) list.push_back(Poly::variable(g.nvars(), v));
    for (const auto& [f, m] : squarefree_decomposition(g)) list.push_back(f);
  }
  for (;;) {
    bool changed = false;
    for (std::size_t i = 0; i < list.size() && !changed; ++i) {
      for (std::size_t j = i + 1; j < list.size() && !changed; ++j) {
        const Poly d = gcd(list[i], list[j]);
        if (d.is_constant()) continue;
        std::vector<Poly> repl{d, divide_exact(list[i], d), divide_exact(list[j], d)};
        list.erase(list.begin() + static_cast<long>(j));
        list.erase(list.begin() + static_cast<long>(i));
        for (auto& r : repl)
          if (!r.is_constant()) list.push_back(normalize(r));
        changed = true;
      }
    }
    if (!changed) break;
  }
  for (auto& b : list) b = normalize(b);
  std::sort(list.begin(), list.end(), [](const Poly& a, const Poly& b) {
    return to_json(a).dump() < to_json(b).dump();
  });
  return list;
}

inline Factored factor_over(const Poly& g, const std::vector<Poly>& basis) {
  Factored f;
  f.exps.assign(basis.size(), 0);
  Poly rest = g;
  for (std::size_t i = 0; i < basis.size(); ++i) {
    while (auto q = try_divide(rest, basis[i])) {
      rest = *std::move(q);
      ++f.exps[i];
    }
  }
  if (!rest.is_constant()) throw Error("polynomial does not factor over the basis");
  f.scale = rest.constant_term();
  return f;
}

inline ChartFactors factor_functions(const std::vector<Poly>& fs) {
  ChartFactors cf;
  cf.basis = coprime_basis(fs);
  for (const auto& g : fs) cf.funcs.push_back(factor_over(g, cf.basis));
  return cf;
}

/// Factored functions on a child chart: each basis element pulls back to
/// E^k * b', and E becomes the first basis element.
inline ChartFactors pullback_factors(const ChartFactors& cf, const Chart& child) {
  const Poly e = child.exceptional();
  ChartFactors out;
  out.basis.push_back(e);
  std::vector<unsigned> e_power(cf.basis.size());
  std::vector<std::optional<std::size_t>> index(cf.basis.size());
  std::vector<Rational> unit(cf.basis.size(), 1);
  for (std::size_t i = 0; i < cf.basis.size(); ++i) {
    Poly b = compose(cf.basis[i], child.to_parent);
    unsigned k = 0;
    while (auto q = try_divide(b, e)) {
      b = *std::move(q);
      ++k;
    }
    e_power[i] = k;
    if (b.is_constant()) {
      unit[i] = b.constant_term();
    } else {
      const Rational lc = b.leading_coefficient();
      unit[i] = lc;
      index[i] = out.basis.size();
      out.basis.push_back(normalize(b));
    }
  }
  for (const auto& f : cf.funcs) {
    Factored g;
    g.scale = f.scale;
    g.exps.assign(out.basis.size(), 0);
    for (std::size_t i = 0; i < cf.basis.size(); ++i) {
      if (f.exps[i] == 0) continue;
      g.exps[0] += e_power[i] * f.exps[i];
      if (index[i]) g.exps[*index[i]] += f.exps[i];
      for (unsigned t = 0; t < f.exps[i]; ++t) g.scale *= unit[i];
    }
    out.funcs.push_back(std::move(g));
  }
  // Drop basis elements no function uses (e.g. E when nothing vanishes on it).
  std::vector<bool> used(out.basis.size(), false);
  for (const auto& f : out.funcs)
    for (std::size_t i = 0; i < f.exps.size(); ++i) used[i] = used[i] || f.exps[i] > 0;
  ChartFactors pruned;
  for (std::size_t i = 0; i < out.basis.size(); ++i)
    if (used[i]) pruned.basis.push_back(out.basis[i]);
  for (const auto& f : out.funcs) {
    Factored g{f.scale, {}};
    for (std::size_t i = 0; i < f.exps.size(); ++i)
      if (used[i]) g.exps.push_back(f.exps[i]);
    pruned.funcs.push_back(std::move(g));
  }
  return pruned;
}

/// Rational singular points of each factor and intersection points of pairs.
inline std::vector<Point> critical_points(const FactorList& factors) {
  std::vector<Point> pts;
  auto take = [&](std::vector<Poly> eqs) {
    const CommonZeros z = common_zeros(std::move(eqs));
    if (z.status == CommonZeros::Status::NonRational) throw NonRationalCritical(z.eliminant);
    if (!z.finite()) throw Error("critical locus is not finite: " + z.reason);
    pts.insert(pts.end(), z.points.begin(), z.points.end());
  };
  for (std::size_t i = 0; i < factors.size(); ++i) {
    const Poly& f = factors[i].first;
    take({f.derivative(0), f.derivative(1), f});
    for (std::size_t j = i + 1; j < factors.size(); ++j) take({f, factors[j].first});
  }
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  return pts;
}

struct PointReport {
  int chart = 0;
  Point point;
  SncVerdict verdict;
  /// Per tracked function: exponents of the local coordinates at the point.
  std::vector<std::vector<unsigned>> exponents;
};

struct SncResult {
  enum class Status { Resolved, DepthExceeded };
  Status status = Status::Resolved;
  Tower tower;
  std::map<int, ChartFactors> factors;  ///< per leaf
  std::vector<PointReport> reports;     ///< every critical point of every leaf
};

namespace detail {

inline std::vector<unsigned> local_exponents(const ChartFactors& cf, std::size_t fn, const SncDecomposition& d) {
  std::vector<unsigned> out;
  for (const auto& c : d.coords) {
    for (std::size_t i = 0; i < cf.basis.size(); ++i)
      if (cf.basis[i] == c) out.push_back(cf.funcs[fn].exps[i]);
  }
  return out;
}

inline std::vector<PointReport> survey(const std::map<int, ChartFactors>& factors) {
  std::vector<PointReport> out;
  for (const auto& [leaf, cf] : factors) {
    const FactorList total = cf.total();
    for (const auto& p : critical_points(total)) {
      PointReport r{leaf, p, snc_at_point(total, p), {}};
      for (std::size_t fn = 0; fn < cf.funcs.size(); ++fn)
        r.exponents.push_back(local_exponents(cf, fn, r.verdict.decomposition));
      out.push_back(std::move(r));
    }
  }
  return out;
}

}  // namespace detail

/// Blows up non-SNC critical points (lowest total multiplicity first, then
/// by chart id and coordinates) until every leaf is SNC.
inline SncResult transform_factored(const ChartFactors& base, unsigned max_depth) {
  SncResult res;
  res.factors.emplace(0, base);
  for (;;) {
    res.reports = detail::survey(res.factors);
    std::optional<std::tuple<unsigned, int, Point>> pick;
    for (const auto& r : res.reports) {
      if (r.verdict.status != SncVerdict::Status::NotSnc) continue;
      unsigned mult = 0;
      for (unsigned a : r.verdict.decomposition.alpha) mult += a;
      auto key = std::make_tuple(mult, r.chart, r.point);
      if (!pick || key < *pick) pick = key;
    }
    if (!pick) {
      res.status = SncResult::Status::Resolved;
      return res;
    }
    if (res.tower.depth() >= max_depth) {
      res.status = SncResult::Status::DepthExceeded;
      return res;
    }
    const int leaf = std::get<1>(*pick);
    res.tower = res.tower.blowup_at(leaf, std::get<2>(*pick));
    const ChartFactors parent = res.factors.at(leaf);
    res.factors.erase(leaf);
    for (int child : res.tower.chart(leaf).children)
      res.factors.emplace(child, pullback_factors(parent, res.tower.chart(child)));
  }
}

inline SncResult transform_to_snc(const Poly& p, unsigned max_depth) {
  if (p.is_zero()) throw Error("transform_to_snc of the zero polynomial");
  return transform_factored(factor_functions({p}), max_depth);
}

/// Replays a resolved result: every critical point of every leaf is SNC or a
/// unit, and decompositions multiply back to the chart's total function.
inline bool verify_snc(const SncResult& r) {
  if (r.status != SncResult::Status::Resolved) return false;
  for (const auto& rep : r.reports) {
    if (rep.verdict.status == SncVerdict::Status::NotSnc) return false;
    const ChartFactors& cf = r.factors.at(rep.chart);
    Poly total = Poly::constant(2, 1);
    for (const auto& [f, m] : cf.total()) total *= f.pow(m);
    if (!(recompose(rep.verdict.decomposition) == total)) return false;
    if (rep.verdict.decomposition.unit.evaluate(rep.point) == 0) return false;
    const SncVerdict again = snc_at_point(cf.total(), rep.point);
    if (again.status != rep.verdict.status) return false;
  }
  return true;
}

struct OrderResult {
  enum class Status { Ordered, DepthExceeded };
  Status status = Status::Ordered;
  SncResult snc;
  std::size_t inputs = 0;  ///< the first `inputs` tracked functions are the f_i
};

inline bool componentwise_le(const std::vector<unsigned>& a, const std::vector<unsigned>& b) {
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a[i] > b[i]) return false;
  return true;
}

/// Resolves prod f_i * prod_{i<j} (f_i - f_j) and checks that at every
/// critical point the exponent vectors of the f_i form a chain.
inline OrderResult order_by_division(const std::vector<Poly>& fs, unsigned max_depth) {
  std::vector<Poly> all = fs;
  for (std::size_t i = 0; i < fs.size(); ++i) {
    if (fs[i].is_zero()) throw Error("order_by_division needs nonzero functions");
    for (std::size_t j = i + 1; j < fs.size(); ++j) {
      const Poly d = fs[i] - fs[j];
      if (d.is_zero()) throw Error("order_by_division needs pairwise distinct functions");
      all.push_back(d);
    }
  }
  OrderResult out;
  out.inputs = fs.size();
  out.snc = transform_factored(factor_functions(all), max_depth);
  if (out.snc.status != SncResult::Status::Resolved) {
    out.status = OrderResult::Status::DepthExceeded;
    return out;
  }
  for (const auto& rep : out.snc.reports) {
    for (std::size_t i = 0; i < fs.size(); ++i) {
      for (std::size_t j = 0; j < fs.size(); ++j) {
        const auto& a = rep.exponents[i];
        const auto& b = rep.exponents[j];
        if (!componentwise_le(a, b) && !componentwise_le(b, a)) {
          throw ChainViolation("chart " + std::to_string(rep.chart) + " point (" + rep.point[0].get_str() + ", " +
                               rep.point[1].get_str() + ")");
        }
      }
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// JSON.

inline Json to_json(const ChartFactors& cf) {
  Json basis = Json::array(), funcs = Json::array();
  for (const auto& b : cf.basis) basis.push_back(to_string(b, {"r", "s"}));
  for (const auto& f : cf.funcs) funcs.push_back({{"scale", rational_to_string(f.scale)}, {"exps", f.exps}});
  return {{"basis", basis}, {"functions", funcs}};
}

inline Json to_json(const PointReport& r) {
  Json coords = Json::array();
  for (const auto& c : r.verdict.decomposition.coords) coords.push_back(to_string(c, {"r", "s"}));
  return {{"chart", r.chart},
          {"point", to_json(r.point)},
          {"verdict", status_name(r.verdict.status)},
          {"reason", r.verdict.reason},
          {"coords", coords},
          {"alpha", r.verdict.decomposition.alpha},
          {"unit", to_string(r.verdict.decomposition.unit, {"r", "s"})},
          {"exponents", r.exponents}};
}

inline Json to_json(const SncResult& r) {
  Json leaves = Json::object(), reports = Json::array();
  for (const auto& [leaf, cf] : r.factors) leaves[std::to_string(leaf)] = to_json(cf);
  for (const auto& rep : r.reports) reports.push_back(to_json(rep));
  return {{"status", r.status == SncResult::Status::Resolved ? "Resolved" : "DepthExceeded"},
          {"depth", r.tower.depth()},
          {"tower", to_json(r.tower)},
          {"charts", charts_to_json(r.tower)},
          {"leaf_factors", leaves},
          {"points", reports}};
}

}  // namespace cechblow
