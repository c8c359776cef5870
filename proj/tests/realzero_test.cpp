#include <gtest/gtest.h>

#include "cechblow/realzero.hpp"
#include "test_support.hpp"

using namespace cechblow;
using cechblow::testing::p_kl;

namespace {

const std::vector<std::string> kXY = {"x", "y"};
const std::vector<std::string> kRS = {"r", "s"};
Poly P(std::string_view s) { return parse_poly(s, kXY); }
Poly PRS(std::string_view s) { return parse_poly(s, kRS); }
Point pt(long a, long b) { return Point{Rational(a), Rational(b)}; }

std::vector<Point> zeros_of(const Poly& p, const Hints& hints = {}) {
  auto z = zero_cert(p, hints);
  EXPECT_TRUE(z.ok()) << to_string(p) << ": " << z.reason;
  if (!z.ok()) return {};
  std::string why;
  EXPECT_TRUE(replay(*z.cert, &why)) << why;
  return z.cert->points;
}

}  // namespace

TEST(Univariate, RealRootsSeparateRationalAndIrrational) {
  // (x - 1/3)(x + 2)(x^2 - 2)
  const uni::UPoly p = uni::from_poly(P("(x - 1/3)*(x + 2)*(x^2 - 2)"), 0);
  const auto roots = uni::real_roots(p);
  EXPECT_EQ(roots.rational, (std::vector<Rational>{-2, make_rational(1, 3)}));
  EXPECT_EQ(roots.irrational.size(), 2u);
}

TEST(Univariate, MultipleAndZeroRoots) {
  const auto roots = uni::real_roots(uni::from_poly(P("x^3*(2x - 3)^2*(x^2 + 1)"), 0));
  EXPECT_EQ(roots.rational, (std::vector<Rational>{0, make_rational(3, 2)}));
  EXPECT_TRUE(roots.all_rational());
}

TEST(Univariate, ResultantMatchesHandComputation) {
  // res_y(y^2 + x^2 - 1, y - x) = 2x^2 - 1.
  EXPECT_EQ(resultant(P("y^2 + x^2 - 1"), P("y - x"), 1), P("2x^2 - 1"));
  EXPECT_EQ(resultant(P("x"), P("y"), 1), P("x"));
}

TEST(Sos, SyntacticDecompositionOfP11) {
  const auto cands = syntactic_sos(p_kl(1, 1));
  ASSERT_FALSE(cands.empty());
  for (const auto& s : cands) EXPECT_EQ(s.value(2), p_kl(1, 1));
}

TEST(Sos, SquareRoot) {
  auto r = square_root(P("3*(x^2 - x*y + 2)^2"));
  ASSERT_TRUE(r);
  EXPECT_EQ(r->first, 3);
  EXPECT_EQ(r->second, P("x^2 - x*y + 2"));
  EXPECT_FALSE(square_root(P("x^2 + y^2")));
}

TEST(IsUnit, ForcedPositivity) {
  const auto u = is_unit(P("x^2 + y^2 + 1"));
  ASSERT_EQ(u.status, UnitOutcome::Status::Yes);
  EXPECT_EQ(u.cert->kind, ZeroCert::Kind::EmptyByPositivity);
  EXPECT_TRUE(replay(*u.cert));
}

TEST(IsUnit, CircleIsNotAUnit) {
  const auto u = is_unit(P("x^2 + y^2"));
  ASSERT_EQ(u.status, UnitOutcome::Status::No);
  EXPECT_EQ(*u.witness, pt(0, 0));
}

TEST(IsUnit, StrippedChartUnit) {
  const auto u = is_unit(PRS("1 + s^2"));
  ASSERT_EQ(u.status, UnitOutcome::Status::Yes);
  ASSERT_EQ(u.cert->pieces.size(), 1u);
  EXPECT_EQ(u.cert->pieces[0].sos.constant, 1);
}

TEST(IsUnit, UnknownForIndefinite) {
  // x^2 - 2 vanishes only at irrational points.
  const auto u = is_unit(P("x^2 - 2"));
  EXPECT_EQ(u.status, UnitOutcome::Status::Unknown);
}

TEST(ZeroPoints, PklHasExactlyTwoZeros) {
  for (unsigned k = 1; k <= 3; ++k)
    for (unsigned l = 1; l <= 3; ++l) EXPECT_EQ(zeros_of(p_kl(k, l)), (std::vector<Point>{pt(0, 0), pt(1, 0)}));
}

TEST(ZeroPoints, WithExplicitDecomposition) {
  // P_{1,1} = (x(x-1))^2 + y^2 supplied as a hint.
  const SquareSum hint{{1, 1}, {P("x*(x-1)"), P("y")}, 0};
  auto z = zero_points(p_kl(1, 1), hint);
  ASSERT_TRUE(z.ok());
  EXPECT_EQ(z.cert->points, (std::vector<Point>{pt(0, 0), pt(1, 0)}));
}

TEST(ZeroPoints, Circles) {
  EXPECT_EQ(zeros_of(P("x^2 + y^2")), (std::vector<Point>{pt(0, 0)}));
  EXPECT_EQ(zeros_of(P("(x-1)^2 + y^2")), (std::vector<Point>{pt(1, 0)}));
}

TEST(ZeroPoints, ProductUsesHints) {
  const Poly q = P("(x^2 + y^2)*((x-1)^2 + y^2)");
  const Hints hints{SquareSum{{1, 1}, {P("x"), P("y")}, 0}, SquareSum{{1, 1}, {P("x - 1"), P("y")}, 0}};
  EXPECT_EQ(zeros_of(q, hints), (std::vector<Point>{pt(0, 0), pt(1, 0)}));
}

TEST(ZeroPoints, PulledBackHintCertifiesChartDenominator) {
  // P_{1,1}(rs, s) = s^2 (r^2 (rs - 1)^2 + 1); the residual is not syntactic,
  // but the pulled-back decomposition {x^2 - x, y} -> {r^2 s^2 - r s, s} is.
  const Poly residual = PRS("r^2*(r*s - 1)^2 + 1");
  EXPECT_TRUE(syntactic_sos(residual).empty());
  const Hints hints{SquareSum{{1, 1}, {PRS("r^2*s^2 - r*s"), PRS("s")}, 0}};
  const auto u = is_unit(residual, hints);
  ASSERT_EQ(u.status, UnitOutcome::Status::Yes);
  EXPECT_TRUE(replay(*u.cert));
}

TEST(ZeroPoints, NonRationalZerosAreReported) {
  // (x^2 - 2)^2 + y^2 vanishes at (±√2, 0).
  const auto z = zero_cert(P("(x^2 - 2)^2 + y^2"));
  EXPECT_EQ(z.status, ZeroOutcome::Status::NonRational);
  EXPECT_FALSE(z.eliminant.is_zero());
}

TEST(Contains, Examples) {
  const auto circle = *zero_cert(P("x^2 + y^2")).cert;
  const auto p11 = *zero_cert(p_kl(1, 1)).cert;
  const auto empty = *zero_cert(P("x^2 + 1")).cert;
  EXPECT_EQ(contains(circle, p11).status, ContainsOutcome::Status::Yes);
  const auto no = contains(p11, circle);
  ASSERT_EQ(no.status, ContainsOutcome::Status::No);
  EXPECT_EQ(*no.witness, pt(1, 0));
  EXPECT_EQ(contains(empty, circle).status, ContainsOutcome::Status::Yes);
}

TEST(Contains, PartialOrderOnFinitePoints) {
  const std::vector<Poly> polys = {P("x^2 + y^2"), P("(x-1)^2 + y^2"), p_kl(1, 1), p_kl(2, 1),
                                   P("x^2*(x-1)^2*(x+1)^2 + y^2"), P("x^2 + 1")};
  std::vector<ZeroCert> certs;
  for (const auto& p : polys) certs.push_back(*zero_cert(p).cert);
  auto le = [&](std::size_t a, std::size_t b) {
    return contains(certs[a], certs[b]).status == ContainsOutcome::Status::Yes;
  };
  for (std::size_t a = 0; a < certs.size(); ++a) {
    EXPECT_TRUE(le(a, a));
    for (std::size_t b = 0; b < certs.size(); ++b) {
      if (le(a, b) && le(b, a)) EXPECT_EQ(certs[a].points, certs[b].points);
      for (std::size_t c = 0; c < certs.size(); ++c)
        if (le(a, b) && le(b, c)) EXPECT_TRUE(le(a, c));
    }
  }
}

TEST(CertifyRegular, PoleInsideRemovedSet) {
  const RatFunc f(P("1"), P("x^2 + y^2"));
  const auto r = certify_regular(f, P("x^2 + y^2"));
  ASSERT_TRUE(r.ok());
  EXPECT_TRUE(replay_regular(*r.cert));
}

TEST(CertifyRegular, PoleOutsideRemovedSet) {
  const RatFunc f(P("1"), P("x^2 + y^2"));
  const auto r = certify_regular(f, P("(x-1)^2 + y^2"));
  ASSERT_EQ(r.status, RegularityOutcome::Status::NotRegular);
  EXPECT_EQ(*r.witness, pt(0, 0));
}

TEST(CertifyRegular, P11OnTwicePuncturedPlane) {
  const RatFunc f(P("1"), p_kl(1, 1));
  const auto r = certify_regular(f, P("(x^2 + y^2)*((x-1)^2 + y^2)"));
  ASSERT_TRUE(r.ok()) << r.reason;
  EXPECT_TRUE(replay_regular(*r.cert));
  EXPECT_EQ(r.cert->residual_cert.points, (std::vector<Point>{pt(0, 0), pt(1, 0)}));
}

TEST(CertifyRegular, LineWitness) {
  const auto r = certify_regular(RatFunc(P("1"), P("x")), P("y"));
  ASSERT_EQ(r.status, RegularityOutcome::Status::NotRegular);
  EXPECT_EQ(*r.witness, pt(0, 1));
}

TEST(SampleRefute, Examples) {
  const auto w = sample_refute(RatFunc(P("1"), P("x")), P("y"));
  ASSERT_TRUE(w);
  EXPECT_EQ((*w)[0], 0);
  EXPECT_NE((*w)[1], 0);
  const auto w2 = sample_refute(RatFunc(P("1"), p_kl(1, 1)), P("x^2 + y^2"));
  ASSERT_TRUE(w2);
  EXPECT_EQ(*w2, pt(1, 0));
  EXPECT_FALSE(sample_refute(RatFunc(P("1"), p_kl(1, 1)), P("(x^2 + y^2)*((x-1)^2 + y^2)")));
}

TEST(Json, ZeroCertRoundTrip) {
  const Hints hints{SquareSum{{1, 1}, {P("x"), P("y")}, 0}, SquareSum{{1, 1}, {P("x - 1"), P("y")}, 0}};
  const auto z = zero_cert(P("(x^2 + y^2)*((x-1)^2 + y^2)"), hints);
  ASSERT_TRUE(z.ok());
  const std::string text = to_json(*z.cert).dump();
  const ZeroCert back = zero_cert_from_json(Json::parse(text), "");
  EXPECT_TRUE(replay(back));
  EXPECT_EQ(to_json(back).dump(), text);
}

TEST(Json, DeclaredIsNotVerified) {
  const ZeroCert d = declared_cert(P("x^2 + y^2"), {pt(0, 0)});
  const Json j = to_json(d);
  EXPECT_EQ(j["verified"], false);
  EXPECT_FALSE(replay(zero_cert_from_json(j, "")));
}

TEST(Replay, TamperedCertificateFails) {
  auto z = zero_cert(p_kl(1, 1));
  ASSERT_TRUE(z.ok());
  ZeroCert bad = *z.cert;
  bad.points.pop_back();
  EXPECT_FALSE(replay(bad));
  ZeroCert bad2 = *z.cert;
  bad2.pieces[0].sos.weights[0] = -1;
  EXPECT_FALSE(replay(bad2));
}
