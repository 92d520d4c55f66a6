#include <gtest/gtest.h>

#include "confsym/catalog.hpp"

using namespace confsym;

namespace {
Checker on(const Chart& c) { return on_chart(Checker{}, c); }
}  // namespace

class SelfValidation : public ::testing::TestWithParam<std::string> {};

TEST_P(SelfValidation, EveryDeclaredGeneratorClassifiesAsDeclared) {
  const auto s = catalog_space(GetParam());
  ASSERT_FALSE(s.generators.empty());
  for (const auto& r : self_validate(s)) EXPECT_TRUE(r.ok) << GetParam() << " " << r.generator << ": " << r.message;
}

INSTANTIATE_TEST_SUITE_P(All, SelfValidation, ::testing::ValuesIn(catalog_names()),
                         [](const auto& info) { return info.param; });

TEST(Minkowski, GeneratorCounts) {
  for (int n : {3, 4, 5, 6}) {
    const auto M = minkowski(n);
    EXPECT_EQ(static_cast<int>(M.generators.size()), (n + 1) * (n + 2) / 2) << n;
    EXPECT_EQ(static_cast<int>(M.count(ConformalClass::Killing)), n * (n + 1) / 2);
    EXPECT_EQ(M.count(ConformalClass::Homothetic), 1U);
    EXPECT_EQ(static_cast<int>(M.count(ConformalClass::SpecialCKV)), n);
  }
  EXPECT_THROW((void)minkowski(2), InvalidArgument);
  EXPECT_THROW((void)minkowski(7), InvalidArgument);
}

TEST(Minkowski, TimeSpecialCkv) {
  const auto M = minkowski(4);
  const auto c = classify(M.metric, M.generator("X_C^1").field);
  EXPECT_EQ(c.cls, ConformalClass::SpecialCKV);
  EXPECT_EQ(c.psi, M.chart().coord(0));
}

TEST(Minkowski, SpecialCkvBracketWithTranslationIsTheHomothety) {
  const auto M = minkowski(4);
  for (const char* I : {"1", "z", "y1"}) {
    const std::string kg = std::string("K_G^") + I, xc = std::string("X_C^") + I;
    const VectorField b = commutator(M.generator(kg).field, M.generator(xc).field);
    const VectorField d = b - M.generator("H").field;
    for (std::size_t i = 0; i < 4; ++i) EXPECT_TRUE(expand(d[i]).is_zero()) << I;
  }
}

TEST(Minkowski, Closes) { EXPECT_TRUE(closure_check(minkowski(4).metric, minkowski(4).generators).closed); }

TEST(HyperbolicSphere, Inventory) {
  for (int d : {2, 3, 4}) {
    const auto h = hyperbolic_sphere(d);
    EXPECT_EQ(static_cast<int>(h.count(ConformalClass::Killing)), d * (d + 1) / 2);
    EXPECT_EQ(static_cast<int>(h.count(ConformalClass::ProperCKV)), d + 1);
  }
  EXPECT_THROW((void)hyperbolic_sphere(1), InvalidArgument);
  EXPECT_THROW((void)hyperbolic_sphere(5), InvalidArgument);
}

TEST(HyperbolicSphere, GradientCkvFactorIsAnEigenfunction) {
  // constant curvature: psi_;ij = -R/(d(d-1)) psi g_ij, hence Delta psi = -R psi/(d-1)
  for (int d : {2, 3}) {
    const auto h = hyperbolic_sphere(d);
    const Expr R = ricci_scalar(h.metric);
    for (const auto& g : h.generators) {
      if (g.cls != ConformalClass::ProperCKV) continue;
      const Expr lap = laplacian(h.metric, g.psi);
      EXPECT_TRUE(on(h.chart()).zero(lap + R * g.psi / Expr(d - 1), "eigen")) << d << " " << g.name;
    }
  }
}

TEST(Decomposable, RadialGenerators) {
  const auto h = hyperbolic_sphere(2, "y");
  const auto k0 = decomposable(0, h);
  const auto r0 = classify(k0.metric, k0.generator("K_r").field);
  EXPECT_EQ(r0.cls, ConformalClass::Killing);
  EXPECT_TRUE(r0.gradient);
  const auto k1 = decomposable(1, h);
  const auto r1 = classify(k1.metric, k1.generator("H_r").field);
  EXPECT_EQ(r1.cls, ConformalClass::Homothetic);
  EXPECT_EQ(r1.psi, Expr(1));
  EXPECT_TRUE(r1.gradient);
  EXPECT_THROW((void)decomposable(2, h), InvalidArgument);
}

TEST(Decomposable, FibreHomothetyLifts) {
  const auto s = decomposable(0, euclidean({"a", "b"}), "z");
  const auto& H = s.generator("H+r");
  EXPECT_EQ(H.field[0], s.chart().coord(0));
  const auto c = classify(s.metric, H.field);
  EXPECT_EQ(c.cls, ConformalClass::Homothetic);
  EXPECT_EQ(c.psi, Expr(1));
}

TEST(SpecialCkvChart, Generators) {
  const auto s = sp_ckv_canonical(3, euclidean({"a", "b"}).metric);
  const auto cs = classify(s.metric, s.generator("C_S").field);
  EXPECT_EQ(cs.cls, ConformalClass::SpecialCKV);
  EXPECT_EQ(cs.psi, s.chart().coord(0));
  const auto H = classify(s.metric, s.generator("H").field);
  EXPECT_EQ(H.cls, ConformalClass::Homothetic);
  EXPECT_TRUE(H.gradient);
  const auto& X1 = s.generator("K_G").field;
  const auto& X2 = s.generator("H").field;
  const auto& X3 = s.generator("C_S").field;
  EXPECT_TRUE((commutator(X1, X2) - X1).is_zero_field());
  const VectorField d = commutator(X2, X3) - X3;
  for (std::size_t i = 0; i < d.dim(); ++i) EXPECT_TRUE(expand(d[i]).is_zero());
  EXPECT_TRUE(closure_check(s.metric, s.generators).closed);
  EXPECT_THROW((void)sp_ckv_canonical(1, euclidean({"a"}).metric), InvalidArgument);
  EXPECT_THROW((void)sp_ckv_canonical(3, euclidean({"a"}).metric), InvalidArgument);
}

TEST(Bianchi, GenericTranslationsAreNotGradient) {
  const auto s = catalog_space("bianchi_I_generic");
  ASSERT_EQ(s.generators.size(), 3U);
  for (const auto& g : s.generators) {
    const auto c = classify(s.metric, g.field);
    EXPECT_EQ(c.cls, ConformalClass::Killing);
    EXPECT_FALSE(c.gradient) << g.name;
  }
}

TEST(Bianchi, UnitScaleFactorGivesGradientKv) {
  const auto s = catalog_space("bianchi_I_C1");
  EXPECT_TRUE(classify(s.metric, s.generator("K_z").field).gradient);
}

TEST(Bianchi, EqualScaleFactorsAddRotation) {
  const auto s = catalog_space("bianchi_I_axisym");
  const auto c = classify(s.metric, s.generator("X_I^3").field);
  EXPECT_EQ(c.cls, ConformalClass::Killing);
  EXPECT_FALSE(c.gradient);
}

TEST(Bianchi, LinearScaleFactorsAdmitHomothety) {
  const auto s = catalog_space("bianchi_slice_t_t");
  const auto c = classify(s.metric, s.generator("H").field);
  EXPECT_EQ(c.cls, ConformalClass::Homothetic);
  EXPECT_EQ(c.psi, Expr(1));
}

TEST(Bianchi, VanishingScaleFactorRejected) {
  EXPECT_THROW((void)bianchi_I(Expr(1), Expr(0), Expr(1)), DegenerateMetric);
}

TEST(Catalog, UnknownNames) {
  EXPECT_THROW((void)catalog_space("nowhere"), InvalidArgument);
  EXPECT_THROW((void)catalog_space("special_ckv9"), InvalidArgument);
  EXPECT_THROW((void)catalog_space("minkowski"), InvalidArgument);
}
