#pragma once

// Exact linear algebra over Q for coefficient-matching systems: unknowns are
// coefficients of polynomial ansatz terms, equations are polynomial
// identities matched monomial by monomial.

#include <map>
#include <optional>
#include <utility>
#include <vector>

#include "cechblow/poly.hpp"

namespace cechblow {

using SparseRow = std::map<std::size_t, Rational>;

/// Reduced row echelon form of a sparse matrix with `ncols` columns.
struct Rref {
  std::vector<SparseRow> rows;       ///< nonzero rows, pivot entry 1
  std::vector<std::size_t> pivots;   ///< pivot column of each row
  std::size_t ncols = 0;
};

inline Rref rref(std::vector<SparseRow> rows, std::size_t ncols) {
  Rref out;
  out.ncols = ncols;
  // Forward elimination with a pivot per column, then back substitution.
  std::map<std::size_t, SparseRow> by_pivot;
  for (auto& row : rows) {
    for (;;) {
      while (!row.empty() && row.begin()->second == 0) row.erase(row.begin());
      if (row.empty()) break;
      const auto [col, lead] = *row.begin();
      auto it = by_pivot.find(col);
      if (it == by_pivot.end()) {
        const Rational inv = Rational(1) / lead;
        for (auto& [c, v] : row) v *= inv;
        by_pivot.emplace(col, std::move(row));
        break;
      }
      const Rational factor = lead;
      for (const auto& [c, v] : it->second) {
        Rational& slot = row[c];
        slot -= factor * v;
        if (slot == 0) row.erase(c);
      }
    }
  }
  // Back substitution, highest pivot first.
  for (auto it = by_pivot.rbegin(); it != by_pivot.rend(); ++it) {
    SparseRow& row = it->second;
    for (auto jt = std::next(it); jt != by_pivot.rend(); ++jt) {
      SparseRow& above = jt->second;
      auto hit = above.find(it->first);
      if (hit == above.end()) continue;
      const Rational factor = hit->second;
      for (const auto& [c, v] : row) {
        Rational& slot = above[c];
        slot -= factor * v;
        if (slot == 0) above.erase(c);
      }
    }
  }
  for (auto& [col, row] : by_pivot) {
    out.pivots.push_back(col);
    out.rows.push_back(std::move(row));
  }
  return out;
}

/// A system A u = b assembled from polynomial identities
///   sum_u coefficient(u) * poly_u  ==  rhs
/// per equation group.
class CoefficientSystem {
 public:
  explicit CoefficientSystem(std::size_t nunknowns) : n_(nunknowns) {}

  std::size_t unknowns() const { return n_; }

  void add(std::size_t group, std::size_t unknown, const Poly& p) {
    for (const auto& [e, c] : p.terms()) rows_[{group, e}][unknown] += c;
  }

  void add_rhs(std::size_t group, const Poly& p) {
    for (const auto& [e, c] : p.terms()) rows_[{group, e}][n_] += c;
  }

  /// One solution (free unknowns zero), or nothing when inconsistent.
  std::optional<std::vector<Rational>> solve() const {
    const Rref r = reduce();
    std::vector<Rational> u(n_, 0);
    for (std::size_t i = 0; i < r.rows.size(); ++i) {
      if (r.pivots[i] == n_) return std::nullopt;
      auto it = r.rows[i].find(n_);
      if (it != r.rows[i].end()) u[r.pivots[i]] = it->second;
    }
    return u;
  }

  /// A basis of the solutions of the homogeneous system.
  std::vector<std::vector<Rational>> nullspace() const {
    const Rref r = reduce();
    std::vector<bool> pivot(n_ + 1, false);
    for (auto p : r.pivots) pivot[p] = true;
    std::vector<std::vector<Rational>> basis;
    for (std::size_t free = 0; free < n_; ++free) {
      if (pivot[free]) continue;
      std::vector<Rational> v(n_, 0);
      v[free] = 1;
      for (std::size_t i = 0; i < r.rows.size(); ++i) {
        auto it = r.rows[i].find(free);
        if (it != r.rows[i].end() && r.pivots[i] < n_) v[r.pivots[i]] = -it->second;
      }
      basis.push_back(std::move(v));
    }
    return basis;
  }

 private:
  Rref reduce() const {
    std::vector<SparseRow> rows;
    rows.reserve(rows_.size());
    for (const auto& [key, row] : rows_) {
      SparseRow clean;
      for (const auto& [c, v] : row)
        if (v != 0) clean.emplace(c, v);
      if (!clean.empty()) rows.push_back(std::move(clean));
    }
    return rref(std::move(rows), n_ + 1);
  }

  std::size_t n_;
  std::map<std::pair<std::size_t, Exponents>, SparseRow> rows_;
};

/// All exponent vectors in n variables of total degree <= d, grlex order.
inline std::vector<Exponents> monomials_up_to(std::size_t n, unsigned d) {
  std::vector<Exponents> out;
  Exponents e(n, 0);
  auto rec = [&](auto&& self, std::size_t v, unsigned left) -> void {
    if (v + 1 == n) {
      for (unsigned k = 0; k <= left; ++k) {
        e[v] = k;
        out.push_back(e);
      }
      return;
    }
    for (unsigned k = 0; k <= left; ++k) {
      e[v] = k;
      self(self, v + 1, left - k);
    }
  };
  if (n == 0) return {e};
  rec(rec, 0, d);
  std::sort(out.begin(), out.end(), [](const Exponents& a, const Exponents& b) {
    const unsigned da = total_degree(a), db = total_degree(b);
    return da != db ? da < db : a < b;
  });
  return out;
}

}  // namespace cechblow
