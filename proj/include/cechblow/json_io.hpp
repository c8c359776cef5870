#pragma once

// JSON encoding of polynomials, rational functions and points.
//
//   Poly     {"n": nvars, "t": [{"c": "p/q", "e": [e1, ...]}, ...]}
//   RatFunc  {"num": Poly, "den": Poly}
//
// Terms are written leading term first. Decoding also accepts a plain
// string such as "x^2 + y^2" wherever a Poly is expected.

#include <json.hpp>

#include <string>
#include <vector>

#include "cechblow/ratfunc.hpp"

namespace cechblow {

using Json = nlohmann::json;

/// Malformed input, located by a JSON pointer.
class SchemaError : public Error {
 public:
  SchemaError(std::string pointer, const std::string& what)
      : Error(pointer + ": " + what), pointer_(std::move(pointer)) {}
  const std::string& pointer() const { return pointer_; }

 private:
  std::string pointer_;
};

inline std::string rational_to_string(const Rational& r) { return r.get_str(); }

inline Rational rational_from_json(const Json& j, const std::string& ptr) {
  try {
    if (j.is_number_integer()) return Rational(j.get<long>());
    if (!j.is_string()) throw SchemaError(ptr, "expected rational string");
    Rational r(j.get<std::string>());
    r.canonicalize();
    return r;
  } catch (const SchemaError&) {
    throw;
  } catch (const std::exception&) {
    throw SchemaError(ptr, "invalid rational");
  }
}

inline Json to_json(const Poly& p) {
  Json terms = Json::array();
  for (auto it = p.terms().rbegin(); it != p.terms().rend(); ++it)
    terms.push_back({{"c", rational_to_string(it->second)}, {"e", it->first}});
  return {{"n", p.nvars()}, {"t", std::move(terms)}};
}

inline Poly poly_from_json(const Json& j, const std::string& ptr,
                           std::size_t expected_vars = 0) {
  if (j.is_string()) {
    const std::size_t n = expected_vars == 0 ? 2 : expected_vars;
    try {
      return parse_poly(j.get<std::string>(), default_names(n));
    } catch (const Error& e) {
      throw SchemaError(ptr, e.what());
    }
  }
  if (!j.is_object()) throw SchemaError(ptr, "expected polynomial object");
  if (!j.contains("n") || !j["n"].is_number_integer() || j["n"].get<long>() < 0)
    throw SchemaError(ptr + "/n", "expected variable count");
  const std::size_t n = j["n"].get<std::size_t>();
  if (expected_vars != 0 && n != expected_vars)
    throw SchemaError(ptr + "/n", "unexpected variable count");
  if (!j.contains("t") || !j["t"].is_array())
    throw SchemaError(ptr + "/t", "expected term array");
  Poly p(n);
  const Json& t = j["t"];
  for (std::size_t i = 0; i < t.size(); ++i) {
    const std::string tp = ptr + "/t/" + std::to_string(i);
    if (!t[i].is_object() || !t[i].contains("c") || !t[i].contains("e"))
      throw SchemaError(tp, "expected {\"c\", \"e\"} term");
    const Rational c = rational_from_json(t[i]["c"], tp + "/c");
    if (c == 0) throw SchemaError(tp + "/c", "zero coefficient");
    const Json& e = t[i]["e"];
    if (!e.is_array() || e.size() != n)
      throw SchemaError(tp + "/e", "exponent vector has wrong length");
    Exponents ex(n);
    for (std::size_t k = 0; k < n; ++k) {
      if (!e[k].is_number_integer() || e[k].get<long>() < 0)
        throw SchemaError(tp + "/e/" + std::to_string(k), "expected non-negative integer");
      ex[k] = e[k].get<unsigned>();
    }
    if (p.coefficient(ex) != 0) throw SchemaError(tp + "/e", "duplicate exponent");
    p.add_term(ex, c);
  }
  return p;
}

inline Json to_json(const RatFunc& f) {
  return {{"num", to_json(f.num())}, {"den", to_json(f.den())}};
}

inline RatFunc ratfunc_from_json(const Json& j, const std::string& ptr,
                                 std::size_t expected_vars = 0) {
  if (j.is_string() || (j.is_object() && j.contains("t")))
    return RatFunc(poly_from_json(j, ptr, expected_vars));
  if (!j.is_object() || !j.contains("num"))
    throw SchemaError(ptr, "expected rational function");
  Poly num = poly_from_json(j["num"], ptr + "/num", expected_vars);
  Poly den = j.contains("den")
                 ? poly_from_json(j["den"], ptr + "/den", num.nvars())
                 : Poly::constant(num.nvars(), 1);
  if (den.is_zero()) throw SchemaError(ptr + "/den", "zero denominator");
  return RatFunc(num, den);
}

inline Json to_json(const Point& p) {
  Json a = Json::array();
  for (const auto& c : p) a.push_back(rational_to_string(c));
  return a;
}

inline Point point_from_json(const Json& j, const std::string& ptr) {
  if (!j.is_array()) throw SchemaError(ptr, "expected point array");
  Point p;
  for (std::size_t i = 0; i < j.size(); ++i)
    p.push_back(rational_from_json(j[i], ptr + "/" + std::to_string(i)));
  return p;
}

inline Json points_to_json(const std::vector<Point>& pts) {
  Json a = Json::array();
  for (const auto& p : pts) a.push_back(to_json(p));
  return a;
}

inline std::vector<Point> points_from_json(const Json& j, const std::string& ptr) {
  if (!j.is_array()) throw SchemaError(ptr, "expected point list");
  std::vector<Point> out;
  for (std::size_t i = 0; i < j.size(); ++i)
    out.push_back(point_from_json(j[i], ptr + "/" + std::to_string(i)));
  return out;
}

inline const Json& require(const Json& j, const char* key, const std::string& ptr) {
  if (!j.is_object() || !j.contains(key))
    throw SchemaError(ptr + "/" + key, "missing field");
  return j[key];
}

}  // namespace cechblow
