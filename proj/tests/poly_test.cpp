#include <gtest/gtest.h>

#include "cechblow/json_io.hpp"
#include "cechblow/ratfunc.hpp"
#include "test_support.hpp"

using namespace cechblow;
using cechblow::testing::p_kl;

namespace {

const std::vector<std::string> kXY = {"x", "y"};
const std::vector<std::string> kRS = {"r", "s"};

Poly P(std::string_view s) { return parse_poly(s, kXY); }
Poly PRS(std::string_view s) { return parse_poly(s, kRS); }
RatFunc F(std::string_view n, std::string_view d = "1") {
  return parse_ratfunc(n, d, kXY);
}

// Sylvester determinant in y of two polynomials with x specialised to x0.
// Test-only oracle for coprimality, independent of the gcd code.
Rational sylvester_resultant_at(const Poly& a, const Poly& b, const Rational& x0) {
  auto coeffs = [&](const Poly& p) {
    const unsigned d = p.degree_in(1);
    std::vector<Rational> c(d + 1, 0);
    for (const auto& [e, k] : p.terms()) {
      Rational v = k;
      for (unsigned i = 0; i < e[0]; ++i) v *= x0;
      c[d - e[1]] += v;
    }
    return c;
  };
  const auto ca = coeffs(a);
  const auto cb = coeffs(b);
  const std::size_t m = ca.size() - 1, n = cb.size() - 1, sz = m + n;
  std::vector<std::vector<Rational>> M(sz, std::vector<Rational>(sz, 0));
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t i = 0; i <= m; ++i) M[r][r + i] = ca[i];
  for (std::size_t r = 0; r < m; ++r)
    for (std::size_t i = 0; i <= n; ++i) M[n + r][r + i] = cb[i];
  Rational det = 1;
  for (std::size_t c = 0; c < sz; ++c) {
    std::size_t piv = c;
    while (piv < sz && M[piv][c] == 0) ++piv;
    if (piv == sz) return 0;
    if (piv != c) {
      std::swap(M[piv], M[c]);
      det = -det;
    }
    det *= M[c][c];
    for (std::size_t r = c + 1; r < sz; ++r) {
      const Rational f = M[r][c] / M[c][c];
      for (std::size_t k = c; k < sz; ++k) M[r][k] -= f * M[c][k];
    }
  }
  return det;
}

}  // namespace

TEST(Arith, AdditiveInverseCancels) {
  RatFunc a = F("x", "y");
  RatFunc b = F("-x", "y");
  EXPECT_TRUE((a + b).is_zero());
  EXPECT_EQ(arith(a, b, ArithOp::add), RatFunc::constant(2, 0));
}

TEST(Arith, QuotientReducesToPolynomial) {
  RatFunc q = arith(F("x^2 - y^2"), F("x - y"), ArithOp::div);
  EXPECT_EQ(q, F("x + y"));
  EXPECT_TRUE(q.is_polynomial());
}

TEST(Arith, ExpandsP11) {
  EXPECT_EQ(p_kl(1, 1), P("x^4 - 2x^3 + x^2 + y^2"));
  EXPECT_EQ(P("x^2*(x-1)^2 + y^2"), P("x^4 - 2x^3 + x^2 + y^2"));
}

TEST(Arith, DivisionByZeroFunction) {
  EXPECT_THROW(F("x") / RatFunc::constant(2, 0), DivisionByZeroFunction);
  EXPECT_THROW(RatFunc(P("x"), Poly(2)), DivisionByZeroFunction);
}

TEST(Arith, PowRequiresNonNegativeIntegerConstant) {
  EXPECT_EQ(arith(F("x + 1"), RatFunc::constant(2, 2), ArithOp::pow), F("x^2 + 2x + 1"));
  EXPECT_THROW(arith(F("x"), RatFunc::constant(2, make_rational(1, 2)), ArithOp::pow), Error);
  EXPECT_THROW(arith(F("x"), F("y"), ArithOp::pow), Error);
}

TEST(DivideExact, MonomialFactor) {
  EXPECT_EQ(divide_exact(P("x^2*y + x*y^2"), P("x*y")), P("x + y"));
}

TEST(DivideExact, NotDivisible) {
  EXPECT_THROW(divide_exact(P("x^2 + y^2"), P("x")), NotDivisible);
}

TEST(DivideExact, PulledBackP21OnChartOne) {
  // P_{2,1}(r, rs) = r^4 (r-1)^2 + r^2 s^2
  const Poly pulled = PRS("r^4*(r-1)^2 + r^2*s^2");
  EXPECT_EQ(divide_exact(pulled, PRS("r^2")), PRS("r^2*(r-1)^2 + s^2"));
  EXPECT_EQ(divide_exact(pulled, PRS("r^2")), p_kl(1, 1));
}

TEST(Gcd, Difference) { EXPECT_EQ(gcd(P("x^2 - y^2"), P("x - y")), P("x - y")); }

TEST(Gcd, P11AndCircleAreCoprime) {
  const Poly a = p_kl(1, 1);
  const Poly b = P("x^2 + y^2");
  // Oracle: both are monic in y, so a nonzero specialised resultant proves
  // coprimality.
  EXPECT_NE(sylvester_resultant_at(a, b, Rational(3)), 0);
  EXPECT_EQ(gcd(a, b), Poly::constant(2, 1));
}

TEST(Gcd, WithZeroNormalizes) {
  EXPECT_EQ(gcd(P("3x + 6y"), Poly(2)), P("x + 2y"));
  EXPECT_EQ(gcd(Poly(2), P("-2y^2")), P("y^2"));
}

TEST(Gcd, SharedNontrivialFactor) {
  const Poly f = P("x^2 + y^2 + 1");
  const Poly g = gcd(f * P("x - 2y"), f * P("x*y - 1") * P("x"));
  EXPECT_EQ(g, f);
}

TEST(Gcd, ThreeVariables) {
  const auto n3 = std::vector<std::string>{"x", "y", "z"};
  const Poly f = parse_poly("x*z - y^2", n3);
  const Poly a = f * parse_poly("x + z + 1", n3);
  const Poly b = f * parse_poly("y*z - 3", n3);
  EXPECT_EQ(gcd(a, b), normalize(f));
}

TEST(Squarefree, Decomposition) {
  const Poly p = P("x^3*(x-y)^2*(y^2+1)");
  auto parts = squarefree_decomposition(p);
  ASSERT_EQ(parts.size(), 3u);
  Poly prod = Poly::constant(2, 1);
  for (const auto& [f, m] : parts) prod *= f.pow(m);
  EXPECT_EQ(normalize(prod), normalize(p));
  EXPECT_EQ(squarefree_part(p), normalize(P("x*(x-y)*(y^2+1)")));
}

TEST(Substitute, CircleOnChartOne) {
  const RatFunc r = RatFunc::variable(2, 0);
  const RatFunc s = RatFunc::variable(2, 1);
  const RatFunc out = substitute(F("x^2 + y^2"), {r, r * s});
  EXPECT_EQ(out, RatFunc(PRS("r^2*(1 + s^2)")));
}

TEST(Substitute, ChartOneIdentityForSmallKL) {
  const RatFunc r = RatFunc::variable(2, 0);
  const RatFunc s = RatFunc::variable(2, 1);
  for (unsigned k = 1; k <= 3; ++k) {
    for (unsigned l = 1; l <= 3; ++l) {
      const RatFunc pulled = substitute(RatFunc(p_kl(k, l)), {r, r * s});
      EXPECT_EQ(pulled, RatFunc(PRS("r^2") * p_kl(k - 1, l))) << k << "," << l;
    }
  }
}

TEST(Substitute, IdentityMap) {
  const RatFunc f = F("x^3 - y", "x^2 + y^2 + 1");
  EXPECT_EQ(substitute(f, {RatFunc::variable(2, 0), RatFunc::variable(2, 1)}), f);
}

TEST(Substitute, DenominatorCollapse) {
  const RatFunc f = F("1", "x - y");
  const RatFunc t = RatFunc::variable(2, 0);
  EXPECT_THROW(substitute(f, {t, t}), DenominatorCollapse);
}

TEST(Substitute, RationalImages) {
  // x -> 1/s, y -> r s : the chart transition of a point blowup.
  const RatFunc r = RatFunc::variable(2, 0);
  const RatFunc s = RatFunc::variable(2, 1);
  const RatFunc out = substitute(F("x*y"), {RatFunc::constant(2, 1) / s, r * s});
  EXPECT_EQ(out, r);
}

TEST(Evaluate, P11Zeros) {
  const RatFunc p(p_kl(1, 1));
  EXPECT_EQ(p.evaluate(Point{0, 0}), 0);
  EXPECT_EQ(p.evaluate(Point{1, 0}), 0);
  EXPECT_EQ(p.evaluate(Point{2, 0}), 4);
}

TEST(Evaluate, PoleAndIndeterminate) {
  EXPECT_THROW(F("1", "x^2 + y^2").evaluate(Point{0, 0}), PoleAtPoint);
  // x/y with y=0, x=0 reduces to nothing; use a reduced pair sharing a zero.
  EXPECT_THROW(F("x", "y").evaluate(Point{0, 0}), IndeterminateAtPoint);
}

TEST(Parse, RejectsUnknownVariable) {
  EXPECT_THROW(parse_poly("x + z", kXY), Error);
  EXPECT_EQ(P("2(x+1)^2"), P("2x^2 + 4x + 2"));
}

TEST(Json, RoundTripIsBitExact) {
  const RatFunc f = F("3/2 x^2*y - y + 7", "x^2 + 1/3");
  const Json j = to_json(f);
  const std::string text = j.dump();
  const RatFunc back = ratfunc_from_json(Json::parse(text), "");
  EXPECT_EQ(back, f);
  EXPECT_EQ(to_json(back).dump(), text);
  // Leading term first.
  EXPECT_EQ(j["num"]["t"][0]["e"], Json({2, 1}));
}

TEST(Json, MalformedTermReportsPointer) {
  Json bad = {{"n", 2}, {"t", {{{"c", "1"}, {"e", {1, 0}}}, {{"c", "1"}, {"e", {1}}}}}};
  try {
    poly_from_json(bad, "/payload");
    FAIL();
  } catch (const SchemaError& e) {
    EXPECT_EQ(e.pointer(), "/payload/t/1/e");
  }
}

// --- Properties -----------------------------------------------------------

class PolyProperties : public ::testing::Test {
 protected:
  std::mt19937 rng{20240611};
};

TEST_F(PolyProperties, RingAxioms) {
  for (int i = 0; i < 60; ++i) {
    const RatFunc a = cechblow::testing::random_ratfunc(rng);
    const RatFunc b = cechblow::testing::random_ratfunc(rng);
    const RatFunc c = cechblow::testing::random_ratfunc(rng);
    EXPECT_EQ((a + b) + c, a + (b + c));
    EXPECT_EQ((a * b) * c, a * (b * c));
    EXPECT_EQ(a * (b + c), a * b + a * c);
    EXPECT_EQ(a + b, b + a);
    EXPECT_TRUE((a - a).is_zero());
  }
}

TEST_F(PolyProperties, SubstituteIsHomomorphism) {
  for (int i = 0; i < 40; ++i) {
    const RatFunc a = cechblow::testing::random_ratfunc(rng);
    const RatFunc b = cechblow::testing::random_ratfunc(rng);
    const RatFunc c = cechblow::testing::random_ratfunc(rng);
    const std::vector<RatFunc> images = {
        RatFunc(cechblow::testing::random_nonzero_poly(rng, 2, 2)),
        RatFunc(cechblow::testing::random_nonzero_poly(rng, 2, 2))};
    try {
      const RatFunc lhs = substitute(a + b * c, images);
      EXPECT_EQ(lhs, substitute(a, images) + substitute(b, images) * substitute(c, images));
    } catch (const DenominatorCollapse&) {
    }
  }
}

TEST_F(PolyProperties, DivideExactInvertsProduct) {
  for (int i = 0; i < 60; ++i) {
    const Poly p = cechblow::testing::random_poly(rng);
    const Poly d = cechblow::testing::random_nonzero_poly(rng);
    EXPECT_EQ(divide_exact(p * d, d), p);
  }
}

TEST_F(PolyProperties, GcdDividesAndCofactorsCoprime) {
  for (int i = 0; i < 40; ++i) {
    const Poly common = cechblow::testing::random_nonzero_poly(rng, 2, 2);
    const Poly a = common * cechblow::testing::random_nonzero_poly(rng, 2, 2);
    const Poly b = common * cechblow::testing::random_nonzero_poly(rng, 2, 2);
    const Poly g = gcd(a, b);
    ASSERT_TRUE(divides(g, a));
    ASSERT_TRUE(divides(g, b));
    EXPECT_TRUE(divides(normalize(common), g) || common.is_constant());
    EXPECT_TRUE(gcd(divide_exact(a, g), divide_exact(b, g)).is_constant());
    EXPECT_EQ(g.leading_coefficient(), 1);
  }
}

TEST_F(PolyProperties, CanonicalFormIdempotentAndJsonStable) {
  for (int i = 0; i < 40; ++i) {
    const RatFunc a = cechblow::testing::random_ratfunc(rng);
    const RatFunc again(a.num(), a.den());
    EXPECT_EQ(again, a);
    const std::string text = to_json(a).dump();
    EXPECT_EQ(to_json(ratfunc_from_json(Json::parse(text), "")).dump(), text);
  }
}
