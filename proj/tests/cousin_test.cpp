#include <gtest/gtest.h>

#include "cechblow/cousin.hpp"
#include "test_support.hpp"

using namespace cechblow;
using cechblow::testing::p_kl;

namespace {

const std::vector<std::string> kXY = {"x", "y"};
Poly P(std::string_view s) { return parse_poly(s, kXY); }
Point pt(long a, long b) { return Point{Rational(a), Rational(b)}; }
RatFunc F(std::string_view num, std::string_view den = "1") { return parse_ratfunc(num, den, kXY); }

Covering covering_of(const std::vector<std::string>& qs) {
  std::vector<OpenSet> sets;
  for (const auto& q : qs) sets.push_back(make_open_set(0, P(q), syntactic_hints(P(q))));
  return make_covering(0, std::move(sets));
}

Covering two_points() { return covering_of({"x^2 + y^2", "(x-1)^2 + y^2"}); }

CousinData swapped_poles() {
  return {two_points(), {F("1", "(x-1)^2 + y^2"), F("1", "x^2 + y^2")}};
}

CousinData p11_data() { return {two_points(), {RatFunc(P("1"), p_kl(1, 1)), F("0")}}; }

}  // namespace

TEST(Validate, SwappedPolesAreValid) {
  const Cochain g = validate(swapped_poles());
  EXPECT_EQ(g.at({0, 1}), F("1", "(x-1)^2 + y^2") - F("1", "x^2 + y^2"));
  EXPECT_TRUE(verify_cochain(g));
}

TEST(Validate, EqualPartsGiveZeroCocycle) {
  const CousinData d{two_points(), {F("1", "x^2 + y^2"), F("1", "x^2 + y^2")}};
  EXPECT_TRUE(validate(d).is_zero());
}

TEST(Validate, PoleOnOverlapIsInvalid) {
  const CousinData d{covering_of({"y", "1"}), {F("1", "x"), F("0")}};
  try {
    validate(d);
    FAIL() << "expected InvalidData";
  } catch (const InvalidData& e) {
    EXPECT_EQ(e.pair(), std::make_pair(std::size_t{0}, std::size_t{1}));
    ASSERT_TRUE(e.witness());
    EXPECT_EQ(*e.witness(), pt(0, 1));
  }
}

TEST(SolveDirect, SwappedPoles) {
  const CousinData d = swapped_poles();
  const auto s = solve_direct(d, 2, 2);
  ASSERT_TRUE(s);
  EXPECT_EQ(s->f.at(0), F("1", "x^2 + y^2") + F("1", "(x-1)^2 + y^2"));
  EXPECT_TRUE(verify_solution(d, *s));
}

TEST(SolveDirect, RegularPartsAreSolvedByZero) {
  const CousinData d{two_points(), {F("x", "(x-1)^2 + y^2"), F("y^3", "x^2 + y^2")}};
  const auto s = solve_direct(d, 3, 2);
  ASSERT_TRUE(s);
  EXPECT_TRUE(verify_solution(d, *s));
}

TEST(SolveDirect, PartsDifferingByPolynomial) {
  const RatFunc f1 = F("1", "x^2 + y^2 + 1");
  const CousinData d{two_points(), {f1, f1 + F("x^2 - y")}};
  const auto s = solve_direct(d, 2, 1);
  ASSERT_TRUE(s);
  EXPECT_TRUE(verify_solution(d, *s));
  // f - f_1 is a polynomial.
  EXPECT_TRUE((s->f.at(0) - f1).is_polynomial());
}

TEST(SolveDirect, CoherenceWithCocycle) {
  // h_i = f - f_i satisfies dh = g.
  const CousinData d = swapped_poles();
  const auto s = solve_direct(d, 2, 2);
  ASSERT_TRUE(s);
  const Cochain h = make_cochain(d.covering, 0, SheafMode::Rational,
                                 {{{0}, s->f.at(0) - d.parts[0]}, {{1}, s->f.at(0) - d.parts[1]}});
  EXPECT_TRUE((differential(h) - validate(d)).is_zero());
}

TEST(SolveDirect, P11IsNotSolvableWithinBounds) { EXPECT_FALSE(solve_direct(p11_data(), 6, 6)); }

TEST(SolveBlownup, DirectInstanceAtDepthZero) {
  const CousinData d = swapped_poles();
  const CousinReport r = solve_blownup(d);
  ASSERT_EQ(r.status, CousinReport::Status::Solved);
  EXPECT_EQ(r.solution->tower.depth(), 0u);
  EXPECT_TRUE(verify_solution(d, *r.solution));
}

TEST(SolveBlownup, P11AfterTwoBlowups) {
  const CousinData d = p11_data();
  const CousinReport r = solve_blownup(d, {4, 4});
  ASSERT_EQ(r.status, CousinReport::Status::Solved) << r.cocycle.reason;
  EXPECT_EQ(r.solution->tower.depth(), 2u);
  std::string why;
  EXPECT_TRUE(verify_solution(d, *r.solution, &why)) << why;
  // Round trip through JSON.
  const Json j = Json::parse(to_json(*r.solution).dump());
  const CousinSolution back = cousin_solution_from_json(j, "", d);
  EXPECT_TRUE(verify_solution(d, back, &why)) << why;
}

TEST(SolveBlownup, TamperedSolutionFailsVerification) {
  const CousinData d = p11_data();
  CousinReport r = solve_blownup(d, {4, 4});
  ASSERT_EQ(r.status, CousinReport::Status::Solved);
  auto& f = r.solution->f.begin()->second;
  f = f + RatFunc::constant(2, 1);
  EXPECT_FALSE(verify_solution(d, *r.solution));
}

TEST(SolveBlownup, SingleSet) {
  const CousinData d{covering_of({"1"}), {F("1", "x^2 + y^2")}};
  const CousinReport r = solve_blownup(d);
  ASSERT_EQ(r.status, CousinReport::Status::Solved);
  EXPECT_EQ(r.solution->f.at(0), d.parts[0]);
}

TEST(PullbackStability, BaseSolutionSurvivesBlowups) {
  const CousinData d = swapped_poles();
  const auto s = solve_direct(d, 2, 2);
  ASSERT_TRUE(s);
  for (const Tower& t : {Tower().blowup_at(0, pt(0, 0)), Tower().blowup_at(0, pt(0, 0)).blowup_at(1, pt(1, 0)),
                         Tower().blowup_at(0, pt(1, 0)).blowup_at(2, pt(2, -1))}) {
    const CousinSolution pulled = pullback_solution(d, *s, t);
    std::string why;
    EXPECT_TRUE(verify_solution(d, pulled, &why)) << why;
  }
}

TEST(PrincipalPart, Examples) {
  const RatFunc f = F("1", "x^2 + y^2");
  const OpenSet u1 = make_open_set(0, P("x^2 + y^2"));
  const OpenSet u2 = make_open_set(0, P("(x-1)^2 + y^2"));
  EXPECT_TRUE(same_principal_part(f, f, u2));
  EXPECT_TRUE(same_principal_part(f, F("0"), u1));
  EXPECT_FALSE(same_principal_part(f, F("0"), u2));
}

TEST(Json, DataFromInstance) {
  const Json j = Json::parse(R"({"covering": ["x^2 + y^2", "(x-1)^2 + y^2"],
                                 "parts": [{"num": "1", "den": "(x-1)^2 + y^2"}, {"num": "1", "den": "x^2 + y^2"}]})");
  const CousinData d = cousin_data_from_json(j, "");
  EXPECT_EQ(d.parts[1], F("1", "x^2 + y^2"));
  Json bad = j;
  bad["parts"][1]["den"] = "x^^2";
  try {
    cousin_data_from_json(bad, "");
    FAIL();
  } catch (const SchemaError& e) {
    EXPECT_EQ(e.pointer(), "/parts/1/den");
  }
}
