#include <gtest/gtest.h>

#include "confsym/catalog.hpp"

using namespace confsym;

namespace {
Checker on(const Chart& c) { return on_chart(Checker{}, c); }
}  // namespace

TEST(ConformalFactor, Examples) {
  const auto E = euclidean({"x", "y"});
  EXPECT_TRUE(conformal_factor(E.metric, VectorField::basis(E.chart(), 0)).is_zero());
  const auto M = minkowski(4);
  EXPECT_EQ(expand(conformal_factor(M.metric, M.generator("H").field)), Expr(1));
  const auto S = catalog_space("special_ckv3");
  EXPECT_TRUE(on(S.chart()).zero(conformal_factor(S.metric, S.generator("C_S").field) - S.chart().coord(0), "cs"));
}

TEST(Classify, RotationOnThePlane) {
  const auto E = euclidean({"x", "y"});
  const Expr x = E.chart().coord(0), y = E.chart().coord(1);
  const auto c = classify(E.metric, VectorField(E.chart(), {y, -x}));
  EXPECT_EQ(c.cls, ConformalClass::Killing);
  EXPECT_FALSE(c.gradient);
}

TEST(Classify, CanonicalGradientCkv) {
  // dx^2 + f(x)^2 h with h a round 2-metric: f d_x is a gradient CKV with psi = f'
  Chart c({"x", "a", "b"});
  c.set_range("a", 0.3, 1.3);
  const Expr x = c.coord(0), a = c.coord(1);
  for (const Expr& f : {cosh(x), x, Expr(3), x * x + Expr(1)}) {
    const Expr f2 = f * f;
    const Metric g(c, diagonal({Expr(1), f2, f2 * pow(sin(a), Expr(2))}));
    const auto r = classify(g, f * VectorField::basis(c, 0));
    EXPECT_NE(r.cls, ConformalClass::NotCKV) << to_string(f);
    EXPECT_TRUE(r.gradient);
    EXPECT_TRUE(on(c).zero(r.psi - diff(f, "x"), "psi"));
  }
}

TEST(Classify, QuadraticFieldOnEuclideanSpace) {
  // x^2 d_x: check each defining condition independently of classify
  const auto E = euclidean({"x", "y", "z"});
  const Expr x = E.chart().coord(0);
  const VectorField X(E.chart(), {x * x, Expr(0), Expr(0)});
  const auto r = classify(E.metric, X);
  // (L_X g)_xx = 4x while (L_X g)_yy = 0, so no psi makes L_X g = 2 psi g
  const Matrix L = lie_derivative_metric(E.metric, X);
  EXPECT_EQ(L[0][0], Expr(4) * x);
  EXPECT_TRUE(L[1][1].is_zero());
  EXPECT_EQ(r.cls, ConformalClass::NotCKV);
  EXPECT_TRUE(r.gradient);
  EXPECT_GT(r.residual, 1e-3);
  // on the line the same field is a (proper) CKV
  const auto line = euclidean({"x"});
  const auto r1 = classify(line.metric, VectorField(line.chart(), {line.chart().coord(0) * line.chart().coord(0)}));
  EXPECT_EQ(r1.cls, ConformalClass::SpecialCKV);
}

TEST(Classify, ConsistencyWithDefinitions) {
  for (const char* name : {"minkowski4", "special_ckv3", "hyperbolic_sphere2", "bianchi_slice_t_t"}) {
    const auto s = catalog_space(name);
    const Checker c = on(s.chart());
    for (const auto& g : s.generators) {
      const auto r = classify(s.metric, g.field);
      const Matrix L = lie_derivative_metric(s.metric, g.field);
      for (std::size_t i = 0; i < s.metric.dim(); ++i)
        for (std::size_t j = 0; j < s.metric.dim(); ++j)
          EXPECT_TRUE(c.zero(L[i][j] - Expr(2) * r.psi * s.metric(i, j), "def", i * 9 + j)) << name << " " << g.name;
      if (r.cls == ConformalClass::Killing) EXPECT_TRUE(c.zero(r.psi, "k"));
      if (r.cls == ConformalClass::Homothetic)
        for (std::size_t k = 0; k < s.metric.dim(); ++k) EXPECT_TRUE(c.zero(diff(r.psi, s.chart().name(k)), "h", k));
      if (r.cls == ConformalClass::SpecialCKV)
        for (const auto& row : covariant_hessian(s.metric, r.psi))
          for (const auto& e : row) EXPECT_TRUE(c.zero(e, "s"));
    }
  }
}

TEST(Gradient, Examples) {
  const auto M = minkowski(4);
  EXPECT_TRUE(is_gradient(M.metric, M.generator("K_G^z").field));
  EXPECT_FALSE(is_gradient(M.metric, M.generator("X_R^1z").field));
  const auto E = euclidean({"x", "y"});
  const Expr x = E.chart().coord(0), y = E.chart().coord(1);
  EXPECT_FALSE(is_gradient(E.metric, VectorField(E.chart(), {y, -x})));
}

TEST(Closure, CommutingTranslations) {
  const auto E = euclidean({"x", "y"});
  std::vector<ClassifiedVector> f{E.generators[0], E.generators[1]};
  const auto sc = closure_check(E.metric, f);
  EXPECT_TRUE(sc.closed);
  for (const auto& a : sc.c)
    for (const auto& b : a)
      for (const auto& k : b) EXPECT_TRUE(k.is_zero());
}

TEST(Closure, MinkowskiSpotCheck) {
  const auto M = minkowski(4);
  const auto sc = closure_check(M.metric, M.generators);
  ASSERT_TRUE(sc.closed);
  auto idx = [&](const std::string& n) {
    for (std::size_t i = 0; i < M.generators.size(); ++i)
      if (M.generators[i].name == n) return i;
    throw std::runtime_error(n);
  };
  // [K_G^z, X_C^y1] is the z-y1 rotation
  const auto& row = sc.c[idx("K_G^z")][idx("X_C^y1")];
  for (std::size_t k = 0; k < row.size(); ++k)
    EXPECT_EQ(row[k].is_zero(), k != idx("X_R^zy1")) << M.generators[k].name;
  EXPECT_EQ(std::abs(row[idx("X_R^zy1")].num()), 1);
}

TEST(Closure, FailsOutsideSpan) {
  const auto line = euclidean({"x"});
  const Expr x = line.chart().coord(0);
  std::vector<ClassifiedVector> f{line.generators[0], classify(line.metric, VectorField(line.chart(), {x * x}))};
  const auto sc = closure_check(line.metric, f);
  EXPECT_FALSE(sc.closed);
  ASSERT_EQ(sc.failures.size(), 1U);
}

TEST(Rescale, IdentityFactor) {
  const auto M = minkowski(4);
  for (const auto& g : M.generators) {
    const auto r = conformal_rescale(M.metric, Expr(1), g);
    EXPECT_EQ(r.cls, g.cls) << g.name;
  }
}

TEST(Rescale, ConeOverFibreKeepsKillingVectorsOfTheFibre) {
  // r^2 (dr^2/r^2 + h) = dr^2 + r^2 h: the KVs of h are CKVs of both
  const auto h = hyperbolic_sphere(2, "y");
  const auto cone = decomposable(1, h);
  const Chart& c = cone.chart();
  const Expr r = c.coord(0);
  Matrix base = cone.metric.components();
  base[0][0] = pow(r, Expr(-2));
  for (std::size_t i = 1; i < 3; ++i)
    for (std::size_t j = 1; j < 3; ++j) base[i][j] = h.metric(i - 1, j - 1);
  const Metric gb(c, base);
  for (const auto& g : cone.generators) {
    if (g.cls != ConformalClass::Killing) continue;
    const auto inner = classify(gb, g.field);
    EXPECT_EQ(inner.cls, ConformalClass::Killing) << g.name;
    const auto outer = conformal_rescale(gb, r, inner);
    EXPECT_EQ(outer.cls, ConformalClass::Killing) << g.name;
  }
}

TEST(Rescale, FactorRelation) {
  // psi_bar = psi + X(ln N), each side computed from its own definition
  const auto s = catalog_space("special_ckv3");
  const Chart& c = s.chart();
  const Expr N = exp(c.coord(0) / Expr(3));
  const Expr N2 = N * N;
  Matrix gb = s.metric.components();
  for (auto& row : gb)
    for (auto& e : row) e = N2 * e;
  const Metric bar(c, gb);
  for (const auto& g : s.generators) {
    const Expr psi = conformal_factor(s.metric, g.field);
    const Expr psib = conformal_factor(bar, g.field);
    EXPECT_TRUE(on(c).zero(psib - psi - g.field.apply_to(ln(N)), "rel")) << g.name;
    const auto r = conformal_rescale(s.metric, N, g);
    EXPECT_NE(r.cls, ConformalClass::NotCKV);
  }
}

TEST(Rescale, VanishingFactorRejected) {
  const auto M = minkowski(3);
  EXPECT_THROW((void)conformal_rescale(M.metric, Expr(0), M.generators[0]), DegenerateMetric);
}
