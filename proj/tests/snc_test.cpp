#include <gtest/gtest.h>

#include "cechblow/snc.hpp"

using namespace cechblow;

namespace {

const std::vector<std::string> kXY = {"x", "y"};
const std::vector<std::string> kRS = {"r", "s"};
Poly P(std::string_view s) { return parse_poly(s, kXY); }
Poly PRS(std::string_view s) { return parse_poly(s, kRS); }
Point pt(long a, long b) { return Point{Rational(a), Rational(b)}; }

}  // namespace

TEST(SncAtPoint, ExceptionalTimesUnit) {
  const FactorList f = {{PRS("r"), 2}, {PRS("1 + s^2"), 1}};
  const SncVerdict v = snc_at_point(f, pt(0, 0));
  ASSERT_EQ(v.status, SncVerdict::Status::Snc);
  EXPECT_EQ(v.decomposition.alpha, (std::vector<unsigned>{2}));
  EXPECT_EQ(recompose(v.decomposition), PRS("r^2*(1 + s^2)"));
  EXPECT_NE(v.decomposition.unit.evaluate(pt(0, 0)), 0);
}

TEST(SncAtPoint, TangentFactorsAreNotSnc) {
  const FactorList f = {{PRS("r"), 2}, {PRS("s^2 - r"), 1}};
  EXPECT_EQ(snc_at_point(f, pt(0, 0)).status, SncVerdict::Status::NotSnc);
  EXPECT_EQ(snc_at_point(f, pt(1, 1)).status, SncVerdict::Status::Snc);
  EXPECT_EQ(snc_at_point(f, pt(2, 1)).status, SncVerdict::Status::Unit);
}

TEST(SncAtPoint, ThreeFactorsOrSingularFactor) {
  EXPECT_EQ(snc_at_point({{P("x"), 1}, {P("y"), 1}, {P("x - y"), 1}}, pt(0, 0)).status,
            SncVerdict::Status::NotSnc);
  EXPECT_EQ(snc_at_point({{P("y^2 - x^3"), 1}}, pt(0, 0)).status, SncVerdict::Status::NotSnc);
  EXPECT_EQ(snc_at_point({{P("x"), 3}, {P("y"), 1}}, pt(0, 0)).status, SncVerdict::Status::Snc);
}

TEST(SncAtPoint, RequiresSmoothFactorsCertificate) {
  const auto z = zero_cert(P("x^2 + y^2"));
  ASSERT_TRUE(z.ok());
  EXPECT_THROW(snc_at_point(*z.cert, pt(0, 0)), NotFactored);
  const ZeroCert sf = smooth_factors_cert({{P("x"), 3}, {P("y"), 1}});
  EXPECT_EQ(snc_at_point(sf, pt(0, 0)).status, SncVerdict::Status::Snc);
}

TEST(CoprimeBasis, SplitsSharedFactors) {
  const auto b = coprime_basis({P("x*y"), P("x^2*(x - 1)"), P("(x - 1)*(y + 1)")});
  EXPECT_EQ(b.size(), 4u);
  for (std::size_t i = 0; i < b.size(); ++i)
    for (std::size_t j = i + 1; j < b.size(); ++j) EXPECT_TRUE(gcd(b[i], b[j]).is_constant());
  const auto f = factor_over(P("-3*x^2*(x - 1)"), b);
  EXPECT_EQ(f.scale, -3);
}

TEST(TransformToSnc, AlreadySnc) {
  const SncResult r = transform_to_snc(P("x"), 4);
  EXPECT_EQ(r.status, SncResult::Status::Resolved);
  EXPECT_EQ(r.tower.depth(), 0u);
  EXPECT_TRUE(verify_snc(r));
}

TEST(TransformToSnc, NormalCrossingProductNeedsNoBlowup) {
  const SncResult r = transform_to_snc(P("x^2*y"), 4);
  EXPECT_EQ(r.tower.depth(), 0u);
  ASSERT_EQ(r.reports.size(), 1u);
  EXPECT_EQ(r.reports[0].verdict.status, SncVerdict::Status::Snc);
}

TEST(TransformToSnc, CircleResolvesAtDepthOne) {
  const SncResult r = transform_to_snc(P("x^2 + y^2"), 4);
  ASSERT_EQ(r.status, SncResult::Status::Resolved);
  EXPECT_EQ(r.tower.depth(), 1u);
  EXPECT_EQ(r.tower.steps()[0].center, pt(0, 0));
  EXPECT_TRUE(verify_snc(r));
  // Chart One carries r^2 (1 + s^2).
  const ChartFactors& one = r.factors.at(1);
  EXPECT_EQ(one.value(0), PRS("r^2*(1 + s^2)"));
}

TEST(TransformToSnc, CuspResolvesAtDepthThree) {
  const SncResult r = transform_to_snc(P("y^2 - x^3"), 6);
  ASSERT_EQ(r.status, SncResult::Status::Resolved);
  EXPECT_EQ(r.tower.depth(), 3u);
  EXPECT_TRUE(verify_snc(r));
  for (const auto& step : r.tower.steps()) EXPECT_EQ(step.center, pt(0, 0));
}

TEST(TransformToSnc, LeafFunctionsArePullbacks) {
  const Poly p = P("y^2 - x^3");
  const SncResult r = transform_to_snc(p, 6);
  for (const auto& [leaf, cf] : r.factors) EXPECT_EQ(cf.value(0), compose(p, r.tower.chart(leaf).to_base)) << leaf;
}

TEST(TransformToSnc, DepthExceeded) {
  const SncResult r = transform_to_snc(P("y^2 - x^3"), 2);
  EXPECT_EQ(r.status, SncResult::Status::DepthExceeded);
  EXPECT_EQ(r.tower.depth(), 2u);
}

TEST(TransformToSnc, IrrationalCriticalPoint) {
  // Two branches meeting at (±√2, 0).
  EXPECT_THROW(transform_to_snc(P("y*(y - x^2 + 2)"), 3), NonRationalCritical);
}

TEST(OrderByDivision, CoordinateAxesNeedOneBlowup) {
  const OrderResult r = order_by_division({P("x"), P("y")}, 4);
  ASSERT_EQ(r.status, OrderResult::Status::Ordered);
  EXPECT_EQ(r.snc.tower.depth(), 1u);
  // On chart One, x = r and y = r s: exponents (1,0) <= (1,1) at the origin.
  bool seen = false;
  for (const auto& rep : r.snc.reports) {
    if (rep.chart == 1 && rep.point == pt(0, 0)) {
      seen = true;
      EXPECT_EQ(rep.exponents[0], (std::vector<unsigned>{1, 0}));
      EXPECT_EQ(rep.exponents[1], (std::vector<unsigned>{1, 1}));
    }
  }
  EXPECT_TRUE(seen);
}

TEST(OrderByDivision, NestedPowersAreOrderedWithoutBlowup) {
  const OrderResult r = order_by_division({P("x"), P("x^2")}, 4);
  ASSERT_EQ(r.status, OrderResult::Status::Ordered);
  EXPECT_EQ(r.snc.tower.depth(), 0u);
}

TEST(OrderByDivision, ThreeCurves) {
  const OrderResult r = order_by_division({P("x"), P("y"), P("x - y^2")}, 6);
  ASSERT_EQ(r.status, OrderResult::Status::Ordered);
  EXPECT_TRUE(verify_snc(r.snc));
  // The origin blowup leaves three triple crossings of lines: (0,1) on chart
  // One, (0,0) and (1,0) on chart Two; each takes one more step.
  EXPECT_EQ(r.snc.tower.depth(), 4u);
}

TEST(OrderByDivision, RejectsEqualFunctions) {
  EXPECT_THROW(order_by_division({P("x"), P("x")}, 2), Error);
}
