#include <gtest/gtest.h>

#include <random>

#include "confsym/catalog.hpp"
#include "confsym/symmetry.hpp"

using namespace confsym;

namespace {

Checker on(const Chart& c) { return on_chart(Checker{}, c); }

std::string jet3(const Chart& c, std::size_t i, std::size_t j, std::size_t k) {
  std::array<std::size_t, 3> a{i, j, k};
  std::sort(a.begin(), a.end());
  return "u3_" + c.name(a[0]) + "_" + c.name(a[1]) + "_" + c.name(a[2]);
}

// Total derivative on second-order jets, producing third-order jet symbols.
Expr total(const Chart& c, const Expr& F, std::size_t i) {
  const std::size_t n = c.dim();
  Expr out = diff(F, c.name(i)) + jet(c, "u", i) * diff(F, "u");
  for (std::size_t k = 0; k < n; ++k) {
    out = out + jet(c, "u", i, k) * diff(F, jet_name(c, "u", k));
    for (std::size_t l = k; l < n; ++l) out = out + sym(jet3(c, i, k, l)) * diff(F, jet_name(c, "u", k, l));
  }
  return out;
}

// eta_i = D_i Q + xi^k u_ik, eta_ij = D_i D_j Q + xi^k u_ijk with Q = eta - xi^k u_k.
Prolongation brute_force(const SymmetryVector& X) {
  const Chart& c = X.xi.chart();
  const std::size_t n = c.dim();
  Expr Q = X.eta;
  for (std::size_t k = 0; k < n; ++k) Q = Q - X.xi[k] * jet(c, "u", k);
  Prolongation p;
  p.eta_ij = zero_matrix(n);
  for (std::size_t i = 0; i < n; ++i) {
    Expr e = total(c, Q, i);
    for (std::size_t k = 0; k < n; ++k) e = e + X.xi[k] * jet(c, "u", i, k);
    p.eta_i.push_back(e);
    for (std::size_t j = 0; j < n; ++j) {
      Expr f = total(c, total(c, Q, j), i);
      for (std::size_t k = 0; k < n; ++k) f = f + X.xi[k] * sym(jet3(c, i, j, k));
      p.eta_ij[i][j] = f;
    }
  }
  return p;
}

void expect_same_prolongation(const SymmetryVector& X) {
  const auto a = prolong2(X);
  const auto b = brute_force(X);
  Checker c = on(X.xi.chart());
  c.sampler.set_default(-1.5, 1.5);
  for (std::size_t i = 0; i < a.eta_i.size(); ++i) {
    EXPECT_TRUE(c.zero(a.eta_i[i] - b.eta_i[i], "pr1", i)) << X.name;
    for (std::size_t j = 0; j < a.eta_i.size(); ++j)
      EXPECT_TRUE(c.zero(a.eta_ij[i][j] - b.eta_ij[i][j], "pr2", i * 8 + j)) << X.name << " " << i << j;
  }
}

GeneratedSymmetry laplace_vector(const CatalogSpace& s, const std::string& name) {
  return generate_laplace(s.metric, s.generator(name));
}

}  // namespace

TEST(Prolongation, Trivial) {
  const auto E = euclidean({"x", "y"});
  const auto t = prolong2(SymmetryVector::linear("dx", VectorField::basis(E.chart(), 0), Expr(0), Expr(0)));
  for (const auto& e : t.eta_i) EXPECT_TRUE(e.is_zero());
  const auto s = prolong2(SymmetryVector::linear("Xu", VectorField::zero(E.chart()), Expr(1), Expr(0)));
  EXPECT_EQ(s.eta_i[1], jet(E.chart(), "u", 1));
  EXPECT_EQ(s.eta_ij[0][1], jet(E.chart(), "u", 0, 1));
}

TEST(Prolongation, DilationOnTheLine) {
  const auto L = euclidean({"x"});
  const auto p = prolong2(SymmetryVector::linear("x dx", VectorField(L.chart(), {L.chart().coord(0)}), Expr(0), Expr(0)));
  EXPECT_EQ(p.eta_i[0], -jet(L.chart(), "u", 0));
  EXPECT_EQ(p.eta_ij[0][0], Expr(-2) * jet(L.chart(), "u", 0, 0));
  expect_same_prolongation(SymmetryVector::linear("x dx", VectorField(L.chart(), {L.chart().coord(0)}), Expr(0), Expr(0)));
}

TEST(Prolongation, GeneralPointTransformations) {
  Chart c({"x", "y"});
  const Expr x = c.coord(0), y = c.coord(1);
  const Expr u = sym("u", SymbolKind::Dependent);
  expect_same_prolongation(SymmetryVector::of("A", VectorField(c, {x * y, sin(x)}), x * u * u + exp(y)));
  expect_same_prolongation(SymmetryVector::of("B", VectorField(c, {u * x, u * u}), u * y));
  expect_same_prolongation(SymmetryVector::of("C", VectorField(c, {exp(u), x + u * y}), sin(u) * x));
}

TEST(Prolongation, CatalogueSymmetries) {
  const auto M = minkowski(3);
  for (const auto& g : M.generators) expect_same_prolongation(generate_laplace(M.metric, g).vector);
}

TEST(Verify, WaveEquationExamples) {
  const auto M = minkowski(4);
  const auto wave = laplace_pde(M.metric);
  EXPECT_TRUE(verify_symmetry(wave, laplace_vector(M, "K_G^z").vector).holds);
  const Expr t = M.chart().coord(0);
  const auto xc = SymmetryVector::linear("X_C^1 - t X_u", M.generator("X_C^1").field, -t, Expr(0));
  EXPECT_TRUE(verify_symmetry(wave, xc).holds);
  const auto bad = SymmetryVector::linear("X_C^1", M.generator("X_C^1").field, Expr(0), Expr(0));
  const auto r = verify_symmetry(wave, bad);
  EXPECT_FALSE(r.holds);
  EXPECT_GT(r.max_residual, 1e3 * r.tol);
}

TEST(Verify, EveryMinkowskiGeneratorIsALaplaceSymmetry) {
  for (int n : {3, 4, 5}) {
    const auto M = minkowski(n);
    const auto wave = laplace_pde(M.metric);
    for (const auto& g : M.generators) {
      const auto gs = generate_laplace(M.metric, g);
      EXPECT_TRUE(gs.admissible) << g.name;
      EXPECT_TRUE(expand(*gs.vector.a - Expr(Rational(2 - n, 2)) * g.psi).is_zero());
      EXPECT_TRUE(verify_symmetry(wave, gs.vector).holds) << n << " " << g.name;
    }
  }
}

TEST(LinearConditions, Lambda) {
  const auto M = minkowski(4);
  const auto wave = laplace_pde(M.metric);
  const auto H = SymmetryVector::linear("H", M.generator("H").field, Expr(0), Expr(0));
  const auto lc = linear_conditions_check(wave, H);
  EXPECT_TRUE(lc.all());
  EXPECT_EQ(expand(lc.lambda), Expr(-2));
  for (const auto& g : M.generators) {
    if (g.cls != ConformalClass::Killing) continue;
    const auto v = laplace_vector(M, g.name).vector;
    const auto r = linear_conditions_check(wave, v);
    EXPECT_TRUE(r.all()) << g.name;
    EXPECT_EQ(expand(r.lambda - *v.a), Expr(0));
  }
}

TEST(LinearConditions, WrongScalingOnProperCkvFails) {
  const auto h = hyperbolic_sphere(3);
  const auto pde = conformal_laplace_pde(h.metric);
  for (const auto& g : h.generators) {
    if (g.cls != ConformalClass::ProperCKV) continue;
    const auto good = generate_for(pde, g).vector;
    EXPECT_TRUE(linear_conditions_check(pde, good).all()) << g.name;
    const auto bad = SymmetryVector::linear(g.name, g.field, *good.a + g.psi / Expr(3), Expr(0));
    EXPECT_FALSE(linear_conditions_check(pde, bad).all()) << g.name;
    EXPECT_FALSE(verify_symmetry(pde, bad).holds);
  }
}

TEST(LinearConditions, AgreeWithVerifyOnRandomPairs) {
  std::mt19937_64 rng(1234);
  auto coef = [&] { return Expr(Rational(static_cast<std::int64_t>(rng() % 7) - 3, 2)); };
  const std::vector<std::string> spaces{"minkowski4", "hyperbolic_sphere3", "special_ckv3", "bianchi_slice_sin_cos",
                                        "decomposable_k1"};
  int agree = 0, holds = 0;
  for (int k = 0; k < 10; ++k) {
    const auto s = catalog_space(spaces[k % spaces.size()]);
    const auto pde = k % 2 ? conformal_laplace_pde(s.metric) : laplace_pde(s.metric);
    const auto& g1 = s.generators[rng() % s.generators.size()];
    const auto& g2 = s.generators[rng() % s.generators.size()];
    const auto v1 = generate_for(pde, g1).vector;
    const auto v2 = generate_for(pde, g2).vector;
    const Expr c1 = coef(), c2 = coef();
    Expr a = c1 * *v1.a + c2 * *v2.a;
    Expr b = Expr(0);
    const Expr x0 = s.chart().coord(0);
    switch (rng() % 3) {
      case 0: break;
      case 1: a = a + x0 / Expr(5); break;
      default: b = b + x0 * x0; break;
    }
    const auto X = SymmetryVector::linear("pair" + std::to_string(k), c1 * g1.field + c2 * g2.field, a, b);
    const bool v = verify_symmetry(pde, X).holds;
    const bool l = linear_conditions_check(pde, X).all();
    EXPECT_EQ(v, l) << s.name << " " << g1.name << " " << g2.name;
    agree += v == l ? 1 : 0;
    holds += v ? 1 : 0;
  }
  EXPECT_EQ(agree, 10);
  EXPECT_GT(holds, 0);
  EXPECT_LT(holds, 10);
}

TEST(Poisson, KillingVectorWithoutSource) {
  const auto M = minkowski(4);
  const auto r = generate_poisson(M.metric, Expr(0), M.generator("X_R^zy1"));
  EXPECT_TRUE(r.admissible);
  EXPECT_TRUE(expand(r.residual).is_zero());
}

TEST(Poisson, LinearSourceRecoversKleinGordonCondition) {
  const auto h = hyperbolic_sphere(3);
  const Expr u = sym("u", SymbolKind::Dependent);
  const Expr V = sinh(h.chart().coord(0)) + Expr(2);
  for (const auto& g : h.generators) {
    const auto p = generate_poisson(h.metric, -(V * u), g);
    const auto k = generate_klein_gordon(h.metric, V, g);
    Checker c = on(h.chart());
    c.sampler.set_range("u", -2, 2);
    EXPECT_TRUE(c.zero(p.residual - u * k.residual, "poisson-kg")) << g.name;
  }
}

TEST(Poisson, LiouvilleInThePlane) {
  const auto E = euclidean({"x", "y"});
  const Expr x = E.chart().coord(0), y = E.chart().coord(1);
  // Re(z^3) d_x + Im(z^3) d_y: psi = 3(x^2 - y^2) is harmonic but not linear
  const auto ckv = classify(E.metric, VectorField(E.chart(), {pow(x, Expr(3)) - Expr(3) * x * y * y,
                                                             Expr(3) * x * x * y - pow(y, Expr(3))}));
  ASSERT_EQ(ckv.cls, ConformalClass::ProperCKV);
  const Expr u = sym("u", SymbolKind::Dependent);
  const Expr f = exp(u);
  const Expr b = Expr(-2) * ckv.psi;
  const auto r = generate_poisson(E.metric, f, ckv, Expr(0), b);
  // n = 2: Delta b - xi(f) - b f_u - a0 u f_u + (a0 - 2 psi) f
  const Expr direct = laplacian(E.metric, b) - b * f - Expr(2) * ckv.psi * f;
  EXPECT_TRUE(on(E.chart()).zero(r.residual - direct, "liouville"));
  EXPECT_TRUE(r.admissible);
  EXPECT_TRUE(verify_symmetry(poisson_pde(E.metric, f), r.vector).holds);
  const auto wrong = generate_poisson(E.metric, f, ckv, Expr(0), Expr(0));
  EXPECT_FALSE(wrong.admissible);
  EXPECT_FALSE(verify_symmetry(poisson_pde(E.metric, f), wrong.vector).holds);
}

TEST(KleinGordon, HomothetyWithoutPotential) {
  const auto M = minkowski(5);
  const auto r = generate_klein_gordon(M.metric, Expr(0), M.generator("H"));
  EXPECT_TRUE(r.admissible);
}

TEST(KleinGordon, PerturbedPotentialFails) {
  const auto h = hyperbolic_sphere(3);
  const auto pde = conformal_laplace_pde(h.metric);
  for (const auto& g : h.generators) {
    EXPECT_TRUE(generate_for(pde, g).admissible) << g.name;
    const auto bad = generate_klein_gordon(h.metric, pde.potential + h.chart().coord(0), g);
    if (g.cls == ConformalClass::ProperCKV || !g.field[0].is_zero()) EXPECT_FALSE(bad.admissible) << g.name;
  }
}

TEST(KleinGordon, ConstraintSignAgreesWithProlongation) {
  const auto h = hyperbolic_sphere(3);
  const auto pde = conformal_laplace_pde(h.metric);
  for (const auto& g : h.generators) {
    if (g.cls != ConformalClass::ProperCKV) continue;
    const auto r = generate_for(pde, g);
    EXPECT_TRUE(r.admissible);
    EXPECT_TRUE(verify_symmetry(pde, r.vector).holds);
    EXPECT_FALSE(r.printed_agrees);
    EXPECT_FALSE(on(h.chart()).zero(r.printed_residual, "printed"));
  }
}

TEST(Laplace, NonHarmonicFactorIsInadmissible) {
  const auto h = hyperbolic_sphere(3);
  const auto pde = laplace_pde(h.metric);
  for (const auto& g : h.generators) {
    if (g.cls != ConformalClass::ProperCKV) continue;
    EXPECT_FALSE(on(h.chart()).zero(laplacian(h.metric, g.psi), "harmonic"));
    const auto r = generate_laplace(h.metric, g);
    EXPECT_FALSE(r.admissible) << g.name;
    EXPECT_FALSE(verify_symmetry(pde, r.vector).holds) << g.name;
  }
}

TEST(Laplace, EveryCkvInTwoDimensions) {
  const auto h = hyperbolic_sphere(2);
  const auto pde = laplace_pde(h.metric);
  for (const auto& g : h.generators) {
    const auto r = generate_laplace(h.metric, g);
    EXPECT_TRUE(r.admissible) << g.name;
    EXPECT_TRUE(verify_symmetry(pde, r.vector).holds) << g.name;
  }
}

TEST(Laplace, ConstantShiftStaysAdmissible) {
  const auto M = minkowski(4);
  const auto r = generate_laplace(M.metric, M.generator("X_C^z"), Expr(0), Expr(3));
  EXPECT_TRUE(r.admissible);
  EXPECT_TRUE(r.b_solves);
  EXPECT_TRUE(verify_symmetry(laplace_pde(M.metric), r.vector).holds);
}

TEST(Pde, ConformalLaplacianPotential) {
  const auto h = hyperbolic_sphere(3);
  const auto pde = conformal_laplace_pde(h.metric);
  const Expr expected = -(conformal_coupling(3) * ricci_scalar(h.metric));
  EXPECT_TRUE(on(h.chart()).zero(pde.potential - expected, "cl"));
  EXPECT_TRUE(on(h.chart()).zero(pde.f + expected * pde.dependent(), "cl-f"));
  EXPECT_EQ(conformal_coupling(4), Expr(Rational(1, 6)));
}

TEST(Pde, Validation) {
  Chart c({"x", "y"});
  EXPECT_THROW((void)generic_pde(c, zero_matrix(2), {Expr(0), Expr(0)}, Expr(0)), InvalidArgument);
  EXPECT_THROW((void)generic_pde(c, {{Expr(1), c.coord(0)}, {Expr(0), Expr(1)}}, {Expr(0), Expr(0)}, Expr(0)),
               InvalidArgument);
  EXPECT_THROW((void)generic_pde(c, diagonal({Expr(1), Expr(1)}), {Expr(0)}, Expr(0)), InvalidArgument);
  const auto M = minkowski(3);
  const auto not_ckv = classify(M.metric, VectorField(M.chart(), {Expr(0), pow(M.chart().coord(0), Expr(2)), Expr(0)}));
  EXPECT_THROW((void)generate_laplace(M.metric, not_ckv), InvalidArgument);
}

TEST(Bracket, SymmetryAlgebraCloses) {
  const auto M = minkowski(4);
  const auto wave = laplace_pde(M.metric);
  const auto a = laplace_vector(M, "K_G^1").vector;
  const auto b = laplace_vector(M, "X_C^1").vector;
  const auto br = bracket(a, b);
  EXPECT_TRUE(verify_symmetry(wave, br).holds);
  // [K_G^1, X_C^1 - t X_u] = H - X_u
  const VectorField d = br.xi - M.generator("H").field;
  EXPECT_TRUE(d.is_zero_field());
  EXPECT_EQ(expand(br.eta), -sym("u", SymbolKind::Dependent));
}
