#pragma once

// Independent certificate replay for reports. Depends only on the polynomial
// layer and the zero-certificate layer: the solvers are not trusted.
//
// Certificates are found by shape. A regularity certificate is an object
// with "function", "Q", "blocked" and "residual_cert"; it certifies
// nonvanishing when the nearest enclosing key mentions "nonvanishing", and
// regularity otherwise. A bare zero certificate ("kind" + "subject") under
// coverage_cert, sum_cert, h_certs or unit_cert claims its subject has no
// real zeros; elsewhere it only has to replay.

#include <optional>
#include <string>
#include <vector>

#include "cechblow/realzero.hpp"

namespace cechblow {

enum class CertRole { Regular, Nonvanishing, Unit, Zero };

inline const char* role_name(CertRole r) {
  switch (r) {
    case CertRole::Regular: return "regular";
    case CertRole::Nonvanishing: return "nonvanishing";
    case CertRole::Unit: return "unit";
    case CertRole::Zero: return "zero";
  }
  return "?";
}

struct CertRef {
  CertRole role;
  std::string pointer;
};

namespace detail {

inline std::string escape_pointer_token(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '~') out += "~0";
    else if (c == '/') out += "~1";
    else out += c;
  }
  return out;
}

inline bool is_regularity_cert(const Json& j) {
  return j.is_object() && j.contains("function") && j.contains("Q") && j.contains("blocked") &&
         j.contains("residual_cert");
}

inline bool is_zero_cert(const Json& j) {
  return j.is_object() && j.contains("kind") && j.contains("subject") && j["kind"].is_string();
}

inline bool unit_slot(const std::string& key) {
  return key == "coverage_cert" || key == "sum_cert" || key == "h_certs" || key == "unit_cert";
}

inline void collect(const Json& j, const std::string& ptr, const std::string& key, bool unit_ctx,
                    std::vector<CertRef>& out) {
  if (is_regularity_cert(j)) {
    const bool nv = key.find("nonvanishing") != std::string::npos;
    out.push_back({nv ? CertRole::Nonvanishing : CertRole::Regular, ptr});
    return;
  }
  if (is_zero_cert(j)) {
    out.push_back({unit_ctx || unit_slot(key) ? CertRole::Unit : CertRole::Zero, ptr});
    return;
  }
  // Keys that hold a list or a wrapper keep naming the role of what is inside.
  if (j.is_object()) {
    for (const auto& [k, v] : j.items())
      collect(v, ptr + "/" + escape_pointer_token(k), k, unit_ctx || unit_slot(key), out);
  } else if (j.is_array()) {
    for (std::size_t i = 0; i < j.size(); ++i)
      collect(j[i], ptr + "/" + std::to_string(i), key, unit_ctx, out);
  }
}

}  // namespace detail

/// Every certificate embedded in a report, in document order.
inline std::vector<CertRef> find_certificates(const Json& report) {
  std::vector<CertRef> out;
  detail::collect(report, "", "", false, out);
  return out;
}

struct ReplayFailure {
  CertRef ref;
  std::string reason;
};

struct ReplaySummary {
  std::size_t checked = 0;
  std::vector<ReplayFailure> failures;
  bool ok() const { return failures.empty(); }
};

inline std::optional<std::string> replay_one(const Json& report, const CertRef& ref) {
  const Json& j = report.at(Json::json_pointer(ref.pointer));
  std::string why;
  try {
    switch (ref.role) {
      case CertRole::Regular:
        if (!replay_regular(regularity_cert_from_json(j, ref.pointer), &why)) return why;
        return std::nullopt;
      case CertRole::Nonvanishing:
        if (!replay_nonvanishing(regularity_cert_from_json(j, ref.pointer), &why)) return why;
        return std::nullopt;
      case CertRole::Unit: {
        const ZeroCert c = zero_cert_from_json(j, ref.pointer);
        if (!replay(c, &why)) return why;
        if (!c.points.empty()) return "unit certificate lists real zeros";
        return std::nullopt;
      }
      case CertRole::Zero:
        if (!replay(zero_cert_from_json(j, ref.pointer), &why)) return why;
        return std::nullopt;
    }
  } catch (const Error& e) {
    return std::string(e.what());
  }
  return std::nullopt;
}

/// Replays every certificate in a report.
inline ReplaySummary replay_report(const Json& report) {
  ReplaySummary s;
  for (const auto& ref : find_certificates(report)) {
    ++s.checked;
    if (auto why = replay_one(report, ref)) s.failures.push_back({ref, *why});
  }
  return s;
}

/// Grid search for a counterexample to one regularity or nonvanishing
/// certificate: a point off V(Q) where the denominator (resp. numerator)
/// vanishes. Only meaningful for two-variable certificates.
inline std::optional<Point> refute_one(const Json& report, const CertRef& ref, const Grid& grid = {}) {
  if (ref.role != CertRole::Regular && ref.role != CertRole::Nonvanishing) return std::nullopt;
  const RegularityCert c = regularity_cert_from_json(report.at(Json::json_pointer(ref.pointer)), ref.pointer);
  if (c.function.nvars() != 2) return std::nullopt;
  if (ref.role == CertRole::Regular) return sample_refute(c.function, c.q, grid);
  return sample_zero_outside(c.function.num(), c.q, grid);
}

inline Json to_json(const ReplaySummary& s) {
  Json f = Json::array();
  for (const auto& x : s.failures)
    f.push_back({{"pointer", x.ref.pointer}, {"role", role_name(x.ref.role)}, {"reason", x.reason}});
  return {{"checked", s.checked}, {"failures", f}, {"ok", s.ok()}};
}

}  // namespace cechblow
