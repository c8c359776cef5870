#include <gtest/gtest.h>

#include "cechblow/cech.hpp"
#include "test_support.hpp"

using namespace cechblow;
using cechblow::testing::p_kl;

namespace {

const std::vector<std::string> kXY = {"x", "y"};
const std::vector<std::string> kRS = {"r", "s"};
Poly P(std::string_view s) { return parse_poly(s, kXY); }
Poly PRS(std::string_view s) { return parse_poly(s, kRS); }
Point pt(long a, long b) { return Point{Rational(a), Rational(b)}; }
RatFunc F(std::string_view num, std::string_view den = "1") { return parse_ratfunc(num, den, kXY); }

Covering covering_of(const std::vector<std::string>& qs) {
  std::vector<OpenSet> sets;
  for (const auto& q : qs) sets.push_back(make_open_set(0, P(q), syntactic_hints(P(q))));
  return make_covering(0, std::move(sets));
}

Covering two_points() { return covering_of({"x^2 + y^2", "(x-1)^2 + y^2"}); }
Covering three_points() { return covering_of({"x^2 + y^2", "(x-1)^2 + y^2", "(x+1)^2 + y^2"}); }

Cochain random_cochain(std::mt19937& rng, const Covering& cov, unsigned q) {
  std::map<Index, RatFunc> vals;
  for (const auto& I : cochain_indices(cov.size(), q))
    vals.emplace(I, RatFunc(cechblow::testing::random_poly(rng, 2, 2, 3),
                            cechblow::testing::random_nonzero_poly(rng, 2, 1)));
  return make_cochain(cov, q, SheafMode::Rational, vals);
}

Cochain p11_cocycle() {
  return make_cochain(two_points(), 1, SheafMode::Regular, {{{0, 1}, RatFunc(P("1"), p_kl(1, 1))}});
}

}  // namespace

TEST(Indices, NonDecreasingTuples) {
  EXPECT_EQ(cochain_indices(2, 1), (std::vector<Index>{{0, 0}, {0, 1}, {1, 1}}));
  EXPECT_EQ(cochain_indices(3, 2).size(), 10u);  // C(5, 3)
}

TEST(Differential, DegreeZero) {
  const Cochain h = make_cochain(two_points(), 0, SheafMode::Rational, {{{0}, F("x")}, {{1}, F("y^2", "x")}});
  const Cochain d = differential(h);
  EXPECT_EQ(d.at({0, 1}), F("y^2", "x") - F("x"));
  EXPECT_TRUE(d.at({0, 0}).is_zero());
  const Cochain c = make_cochain(two_points(), 0, SheafMode::Rational, {{{0}, F("3")}, {{1}, F("3")}});
  EXPECT_TRUE(differential(c).is_zero());
}

TEST(Differential, DegreeOneMatchesHandFormula) {
  std::mt19937 rng(5);
  const Cochain f = random_cochain(rng, three_points(), 1);
  const Cochain d = differential(f);
  for (const auto& J : cochain_indices(3, 2)) {
    const RatFunc expect = f.at({J[1], J[2]}) - f.at({J[0], J[2]}) + f.at({J[0], J[1]});
    EXPECT_EQ(d.at(J), expect);
  }
}

TEST(Differential, SquaresToZero) {
  std::mt19937 rng(17);
  const Covering covs[] = {two_points(), three_points()};
  for (unsigned q = 0; q <= 2; ++q)
    for (int trial = 0; trial < 20; ++trial)
      EXPECT_TRUE(differential(differential(random_cochain(rng, covs[trial % 2], q))).is_zero());
}

TEST(Regular, ValueWithPoleOutsideIsRejected) {
  const Covering cov = covering_of({"y", "x^2 + y^2 + 1 - 1 + 1"});
  try {
    make_cochain(cov, 0, SheafMode::Regular, {{{0}, F("1", "x")}});
    FAIL() << "expected NotRegularValue";
  } catch (const NotRegularValue& e) {
    ASSERT_TRUE(e.witness());
    EXPECT_EQ(*e.witness(), pt(0, 1));
  }
}

TEST(Regular, CertificatesReplay) {
  const Cochain f = p11_cocycle();
  EXPECT_TRUE(verify_cochain(f));
  EXPECT_TRUE(is_cocycle(f));
  Cochain bad = f;
  bad.values.at({0, 1}) = RatFunc(P("1"), P("x^2 + y^2"));
  EXPECT_FALSE(verify_cochain(bad));
}

TEST(Pullback, P11OnChartOne) {
  const Tower t = Tower().blowup_at(0, pt(0, 0));
  const Cochain pulled = pullback_cochain(t, 1, p11_cocycle());
  EXPECT_EQ(pulled.at({0, 1}), RatFunc(PRS("1"), PRS("r^2*((r-1)^2 + s^2)")));
  EXPECT_TRUE(verify_cochain(pulled));
}

TEST(Pullback, IdentityTower) {
  const Cochain f = p11_cocycle();
  const auto pulled = pullback_cochain(Tower(), f);
  EXPECT_EQ(pulled.at(0).values, f.values);
}

TEST(Pullback, ChainMapLaw) {
  std::mt19937 rng(23);
  const Tower t = Tower().blowup_at(0, pt(0, 0)).blowup_at(1, pt(1, 0));
  for (int trial = 0; trial < 10; ++trial) {
    const Cochain h = random_cochain(rng, two_points(), static_cast<unsigned>(trial % 2));
    try {
      const auto d_then_pull = pullback_cochain(t, differential(h));
      const auto pull_then_d = pullback_cochain(t, h);
      for (const auto& [leaf, c] : pull_then_d) EXPECT_EQ(differential(c).values, d_then_pull.at(leaf).values);
    } catch (const DenominatorCollapse&) {
    }
  }
}

TEST(Coboundary, ZeroCocycle) {
  const Cochain z = make_cochain(two_points(), 1, SheafMode::Regular, {});
  const auto pre = is_coboundary_bounded(z, 2, 2);
  ASSERT_TRUE(pre);
  EXPECT_TRUE(pre->is_zero());
}

TEST(Coboundary, RoundTripOfBoundedPreimages) {
  std::mt19937 rng(31);
  const Covering cov = two_points();
  for (int trial = 0; trial < 5; ++trial) {
    const unsigned m = static_cast<unsigned>(trial % 3);
    std::map<Index, RatFunc> h;
    for (std::size_t i = 0; i < cov.size(); ++i)
      h.emplace(Index{i}, RatFunc(cechblow::testing::random_poly(rng, 2, 2, 3), cov.sets[i].q.pow(m)));
    const Cochain f = differential(make_cochain(cov, 0, SheafMode::Regular, h));
    const auto pre = is_coboundary_bounded(f, 2, 2);
    ASSERT_TRUE(pre) << trial;
    EXPECT_TRUE((differential(*pre) - f).is_zero());
    EXPECT_TRUE(verify_cochain(*pre));
  }
}

TEST(Coboundary, P11HasNoBoundedPreimage) {
  EXPECT_FALSE(is_coboundary_bounded(p11_cocycle(), 6, 6));
}

TEST(Extend, CancellingPower) {
  const auto e = extend_with_power(F("x^2 + y^2 + 1", "x^2 + y^2"), P("x^2 + y^2"), {}, 4);
  ASSERT_EQ(e.status, ExtendOutcome::Status::Extended);
  EXPECT_EQ(e.power, 1u);
  EXPECT_EQ(e.g, F("x^2 + y^2 + 1"));
}

TEST(Extend, PolynomialNeedsNoPower) {
  const auto e = extend_with_power(F("x*y - 3"), P("x^2 + y^2"), {}, 4);
  ASSERT_EQ(e.status, ExtendOutcome::Status::Extended);
  EXPECT_EQ(e.power, 0u);
}

TEST(Extend, PoleAwayFromQIsObstruction) {
  for (unsigned nmax : {1u, 4u, 8u}) {
    const auto e = extend_with_power(RatFunc(P("1"), p_kl(1, 1)), P("x^2 + y^2"), {}, nmax);
    ASSERT_EQ(e.status, ExtendOutcome::Status::Obstructed);
    EXPECT_EQ(e.points, (std::vector<Point>{pt(1, 0)}));
  }
}

TEST(SolveCocycle, P11NeedsTwoBlowups) {
  const Cochain f = p11_cocycle();
  const CocycleReport r = solve_cocycle_blownup(f, {4, 4});
  ASSERT_EQ(r.status, CocycleReport::Status::Solved) << r.reason;
  EXPECT_EQ(r.tower.depth(), 2u);
  EXPECT_EQ(r.tower.steps()[0].center, pt(0, 0));
  EXPECT_EQ(r.tower.steps()[1].chart, 1);
  EXPECT_EQ(r.tower.steps()[1].center, pt(1, 0));
  EXPECT_EQ(r.power, 2u);
  for (const auto& [leaf, a] : r.leaves) EXPECT_TRUE(a.residual.is_zero()) << leaf;
  std::string why;
  EXPECT_TRUE(verify_cocycle_report(f, r, &why)) << why;
}

TEST(SolveCocycle, DepthBoundGivesFailure) {
  const CocycleReport r = solve_cocycle_blownup(p11_cocycle(), {4, 1});
  EXPECT_EQ(r.status, CocycleReport::Status::Failed);
  EXPECT_FALSE(r.obstructions.empty());
}

TEST(SolveCocycle, GlobalCoboundaryAtDepthZero) {
  const Cochain f = make_cochain(two_points(), 1, SheafMode::Regular, {{{0, 1}, F("x*y - 2")}});
  const CocycleReport r = solve_cocycle_blownup(f);
  ASSERT_EQ(r.status, CocycleReport::Status::Solved);
  EXPECT_EQ(r.tower.depth(), 0u);
  EXPECT_TRUE(verify_cocycle_report(f, r));
}

TEST(SolveCocycle, SingleSetCovering) {
  const Covering cov = covering_of({"1"});
  const Cochain f = make_cochain(cov, 1, SheafMode::Regular, {});
  const CocycleReport r = solve_cocycle_blownup(f);
  ASSERT_EQ(r.status, CocycleReport::Status::Solved);
  EXPECT_TRUE(r.leaves.at(0).k.is_zero());
}

TEST(Json, ReportResidualSerializesAsZero) {
  const CocycleReport r = solve_cocycle_blownup(p11_cocycle(), {4, 4});
  const Json j = to_json(r);
  EXPECT_EQ(j["status"], "Solved");
  for (const auto& [leaf, a] : j["leaves"].items())
    for (const auto& v : a["residual"]["values"]) EXPECT_EQ(v["value"], to_json(RatFunc::constant(2, 0)));
}
