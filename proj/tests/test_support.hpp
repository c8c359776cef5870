#pragma once

// Shared generators for the property suites.

#include <random>

#include "cechblow/ratfunc.hpp"

namespace cechblow::testing {

inline Rational random_coefficient(std::mt19937& rng) {
  std::uniform_int_distribution<int> num(-5, 5);
  std::uniform_int_distribution<int> den(1, 3);
  int n = 0;
  while (n == 0) n = num(rng);
  return make_rational(n, den(rng));
}

inline Poly random_poly(std::mt19937& rng, std::size_t nvars = 2,
                        unsigned max_degree = 3, int max_terms = 4) {
  std::uniform_int_distribution<int> count(1, max_terms);
  std::uniform_int_distribution<unsigned> exp(0, max_degree);
  Poly p(nvars);
  const int terms = count(rng);
  for (int t = 0; t < terms; ++t) {
    Exponents e(nvars, 0);
    unsigned budget = max_degree;
    for (std::size_t i = 0; i < nvars; ++i) {
      std::uniform_int_distribution<unsigned> pick(0, budget);
      e[i] = pick(rng);
      budget -= e[i];
    }
    p.add_term(e, random_coefficient(rng));
  }
  return p;
}

inline Poly random_nonzero_poly(std::mt19937& rng, std::size_t nvars = 2,
                                unsigned max_degree = 3) {
  Poly p(nvars);
  while (p.is_zero()) p = random_poly(rng, nvars, max_degree);
  return p;
}

inline RatFunc random_ratfunc(std::mt19937& rng, std::size_t nvars = 2,
                              unsigned max_degree = 2) {
  return RatFunc(random_poly(rng, nvars, max_degree),
                 random_nonzero_poly(rng, nvars, max_degree));
}

/// P_{k,l} = x^(2k) (x-1)^(2l) + y^2 built directly from its definition.
inline Poly p_kl(unsigned k, unsigned l) {
  const Poly x = Poly::variable(2, 0);
  const Poly y = Poly::variable(2, 1);
  const Poly one = Poly::constant(2, 1);
  return x.pow(2 * k) * (x - one).pow(2 * l) + y * y;
}

}  // namespace cechblow::testing
