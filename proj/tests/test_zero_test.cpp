#include <gtest/gtest.h>

#include "confsym/zero_test.hpp"

using namespace confsym;

namespace {
Expr T() { return sym("t", SymbolKind::Coordinate); }
Expr X() { return sym("x", SymbolKind::Coordinate); }
}  // namespace

TEST(ZeroTest, Identities) {
  const Checker c;
  EXPECT_TRUE(c.zero(pow(cosh(T()), Expr(2)) - pow(sinh(T()), Expr(2)) - Expr(1), "pyth"));
  EXPECT_FALSE(c.zero(pow(X(), Expr(2)) - X(), "poly"));
  EXPECT_TRUE(c.zero(exp(ln(X())) - X(), "exp-ln"));
  EXPECT_FALSE(c.zero(Expr(Rational(1, 1000000)), "const"));
}

TEST(ZeroTest, ReportCarriesResidualAndTolerance) {
  const Checker c;
  const auto r = c.report(sin(X()) - X(), "sin");
  EXPECT_FALSE(r.zero);
  EXPECT_GT(r.max_residual, 1e-3);
  EXPECT_EQ(r.trials, 20);
  EXPECT_DOUBLE_EQ(r.tol, 1e-9);
}

TEST(ZeroTest, RelativeToleranceScalesWithTerms) {
  const Checker c;
  // 1e12 x - 1e12 x + 1e-6 is not zero, but a rounding-sized error on a huge sum is
  const Expr big = Expr(1000000000000) * X();
  EXPECT_FALSE(c.zero(big - big + Expr(Rational(1, 1000)), "small"));
  EXPECT_TRUE(c.zero(pow(X() + Expr(1000), Expr(4)) - expand(pow(X() + Expr(1000), Expr(4))), "expand"));
}

TEST(ZeroTest, SeedsAreDeterministicAndForked) {
  DomainSampler s(42);
  const DomainSampler a = s.fork("label", 1);
  const DomainSampler b = s.fork("label", 1);
  const DomainSampler d = s.fork("label", 2);
  EXPECT_EQ(a.seed(), b.seed());
  EXPECT_NE(a.seed(), d.seed());
  EXPECT_NE(s.fork("other").seed(), s.fork("label").seed());
  const Checker c;
  const auto r1 = c.report(sin(X()) - X(), "same");
  const auto r2 = c.report(sin(X()) - X(), "same");
  EXPECT_EQ(r1.max_residual, r2.max_residual);
}

TEST(ZeroTest, RangesRestrictSampling) {
  Checker c;
  c = c.with_ranges({{"x", Range{-2, -1}}});
  // ln(-x) is only defined on the negative range
  EXPECT_TRUE(c.zero(exp(ln(-X())) + X(), "neg"));
}

TEST(ZeroTest, DomainExhaustion) {
  const Checker c = Checker{}.with_ranges({{"x", Range{-2, -1}}});
  EXPECT_THROW((void)c.zero(ln(X()), "never"), SamplerExhausted);
}

TEST(ZeroTest, ConstantValue) {
  const Checker c;
  auto v = c.constant_value(Expr(3) * pow(cosh(T()), Expr(2)) - Expr(3) * pow(sinh(T()), Expr(2)) + Expr(Rational(1, 4)),
                            "cv");
  ASSERT_TRUE(v);
  EXPECT_EQ(*v, Rational(13, 4));
  EXPECT_FALSE(c.constant_value(T(), "nc"));
}

TEST(ZeroTest, Rationalize) {
  EXPECT_EQ(rationalize(0.75), Rational(3, 4));
  EXPECT_EQ(rationalize(-1.0 / 3.0), Rational(-1, 3));
  EXPECT_FALSE(rationalize(std::sqrt(2.0)));
}
