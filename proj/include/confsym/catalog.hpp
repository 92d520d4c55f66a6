#pragma once

#include <string>
#include <vector>

#include "confsym/conformal.hpp"

namespace confsym {

/// A metric with its known conformal generators. Each generator carries the
/// declared class, conformal factor and gradient flag.
struct CatalogSpace {
  std::string name;
  Metric metric;
  std::vector<ClassifiedVector> generators;
  std::string notes;

  [[nodiscard]] const Chart& chart() const { return metric.chart(); }
  [[nodiscard]] const ClassifiedVector& generator(std::string_view n) const {
    for (const auto& g : generators)
      if (g.name == n) return g;
    throw InvalidArgument("no generator named '" + std::string(n) + "' in " + name);
  }
  [[nodiscard]] std::size_t count(ConformalClass c) const {
    std::size_t k = 0;
    for (const auto& g : generators) k += g.cls == c ? 1 : 0;
    return k;
  }
};

namespace detail {

inline ClassifiedVector declared(std::string name, VectorField X, Expr psi, ConformalClass cls, bool gradient) {
  ClassifiedVector v;
  v.name = std::move(name);
  v.field = std::move(X);
  v.psi = std::move(psi);
  v.cls = cls;
  v.gradient = gradient;
  return v;
}

inline Chart default_ranges(Chart c) {
  for (const auto& n : c.coordinates())
    if (!c.ranges().count(n)) c.set_range(n, 0.3, 1.7);
  return c;
}

}  // namespace detail

/// Flat M^n, -dt^2 + dz^2 + sum dy_A^2, with its (n+1)(n+2)/2 conformal generators.
inline CatalogSpace minkowski(int n, std::vector<std::string> names = {}) {
  if (n < 3 || n > 6) throw InvalidArgument("minkowski: n must be in [3, 6]");
  if (names.empty()) {
    names = {"t", "z"};
    for (int k = 1; k <= n - 2; ++k) names.push_back("y" + std::to_string(k));
  }
  if (names.size() != static_cast<std::size_t>(n)) throw InvalidArgument("minkowski: wrong number of names");
  const Chart c = detail::default_ranges(Chart(names));
  std::vector<Expr> d(n, Expr(1));
  d[0] = Expr(-1);
  CatalogSpace s;
  s.name = "minkowski" + std::to_string(n);
  s.metric = Metric(c, diagonal(d));
  const std::size_t N = c.dim();
  const Expr t = c.coord(0);
  auto field = [&](std::vector<Expr> comps) { return VectorField(c, std::move(comps)); };
  auto zeros = [&] { return std::vector<Expr>(N, Expr(0)); };
  using CC = ConformalClass;

  s.generators.push_back(detail::declared("K_G^1", VectorField::basis(c, 0), Expr(0), CC::Killing, true));
  for (std::size_t a = 1; a < N; ++a)
    s.generators.push_back(detail::declared("K_G^" + c.name(a), VectorField::basis(c, a), Expr(0), CC::Killing, true));
  for (std::size_t a = 1; a < N; ++a) {
    auto v = zeros();
    v[0] = c.coord(a);
    v[a] = t;
    s.generators.push_back(detail::declared("X_R^1" + c.name(a), field(v), Expr(0), CC::Killing, false));
  }
  for (std::size_t a = 1; a < N; ++a)
    for (std::size_t b = a + 1; b < N; ++b) {
      auto v = zeros();
      v[a] = c.coord(b);
      v[b] = -c.coord(a);
      s.generators.push_back(
          detail::declared("X_R^" + c.name(a) + c.name(b), field(v), Expr(0), CC::Killing, false));
    }
  {
    std::vector<Expr> v;
    for (std::size_t a = 0; a < N; ++a) v.push_back(c.coord(a));
    s.generators.push_back(detail::declared("H", field(v), Expr(1), CC::Homothetic, true));
  }
  {
    std::vector<Expr> sq{t * t};
    for (std::size_t a = 1; a < N; ++a) sq.push_back(c.coord(a) * c.coord(a));
    auto v = zeros();
    v[0] = Expr::rational(1, 2) * add(sq);
    for (std::size_t a = 1; a < N; ++a) v[a] = t * c.coord(a);
    s.generators.push_back(detail::declared("X_C^1", field(v), t, CC::SpecialCKV, false));
  }
  for (std::size_t a = 1; a < N; ++a) {
    const Expr Ya = c.coord(a);
    auto v = zeros();
    v[0] = t * Ya;
    std::vector<Expr> q{Ya * Ya, t * t};
    for (std::size_t b = 1; b < N; ++b)
      if (b != a) {
        q.push_back(-(c.coord(b) * c.coord(b)));
        v[b] = Ya * c.coord(b);
      }
    v[a] = Expr::rational(1, 2) * add(q);
    s.generators.push_back(detail::declared("X_C^" + c.name(a), field(v), Ya, CC::SpecialCKV, false));
  }
  s.notes = "flat space; translations, boosts, rotations, the gradient HV and the special CKVs";
  return s;
}

/// Killing vectors and gradient CKVs of a quadric X.X = eps in a flat ambient
/// space diag(eta), pulled back through the embedding X(x).
inline std::vector<ClassifiedVector> quadric_generators(const Metric& g, const std::vector<Expr>& X,
                                                        const std::vector<int>& eta, int eps) {
  const Chart& c = g.chart();
  const std::size_t N = X.size();
  const Matrix gi = inverse_metric(g);
  Matrix dX(N, std::vector<Expr>(c.dim()));
  for (std::size_t a = 0; a < N; ++a)
    for (std::size_t m = 0; m < c.dim(); ++m) dX[a][m] = diff(X[a], c.name(m));
  // tangent projection of an ambient vector V: xi^mu = g^{mu nu} <d_nu X, V>
  auto pull = [&](const std::vector<Expr>& V) {
    std::vector<Expr> low(c.dim());
    for (std::size_t m = 0; m < c.dim(); ++m) {
      std::vector<Expr> t;
      for (std::size_t a = 0; a < N; ++a)
        if (!V[a].is_zero()) t.push_back(Expr(eta[a]) * dX[a][m] * V[a]);
      low[m] = add(std::move(t));
    }
    std::vector<Expr> up(c.dim());
    for (std::size_t m = 0; m < c.dim(); ++m) {
      std::vector<Expr> t;
      for (std::size_t k = 0; k < c.dim(); ++k)
        if (!gi[m][k].is_zero()) t.push_back(gi[m][k] * low[k]);
      up[m] = tidy(add(std::move(t)), Checker{}, c);
    }
    return VectorField(c, std::move(up));
  };
  std::vector<ClassifiedVector> out;
  for (std::size_t a = 0; a < N; ++a)
    for (std::size_t b = a + 1; b < N; ++b) {
      // J_ab = X_a e_b - X_b e_a with X_a = eta_a X^a
      std::vector<Expr> V(N, Expr(0));
      V[b] = Expr(eta[a]) * X[a];
      V[a] = -(Expr(eta[b]) * X[b]);
      out.push_back(detail::declared("J_" + std::to_string(a) + std::to_string(b), pull(V), Expr(0),
                                     ConformalClass::Killing, false));
    }
  for (std::size_t a = 0; a < N; ++a) {
    std::vector<Expr> V(N, Expr(0));
    V[a] = Expr(eta[a]);  // ambient gradient of the linear function X^a
    out.push_back(detail::declared("C_" + std::to_string(a), pull(V), Expr(-eps) * X[a],
                                   ConformalClass::ProperCKV, true));
  }
  return out;
}

namespace detail {

/// Embedding of dth_1^2 + cosh^2 th_1 (...) as X.X = -1 in signature (+,..,+,-,+).
inline std::pair<std::vector<Expr>, std::vector<int>> hyperbolic_embedding(const Chart& c, std::size_t from) {
  const std::size_t d = c.dim() - from;
  const Expr th = c.coord(from);
  if (d == 1) return {{cosh(th), sinh(th)}, {-1, 1}};
  auto [P, eta] = hyperbolic_embedding(c, from + 1);
  std::vector<Expr> X{sinh(th)};
  for (const auto& p : P) X.push_back(cosh(th) * p);
  std::vector<int> e{1};
  e.insert(e.end(), eta.begin(), eta.end());
  return {X, e};
}

}  // namespace detail

/// ds^2 = dth_1^2 + cosh^2 th_1 (dth_2^2 + cosh^2 th_2 (...)), constant negative curvature.
inline CatalogSpace hyperbolic_sphere(int d, const std::string& prefix = "th") {
  if (d < 2 || d > 4) throw InvalidArgument("hyperbolic_sphere: d must be in [2, 4]");
  std::vector<std::string> names;
  for (int k = 1; k <= d; ++k) names.push_back(prefix + std::to_string(k));
  Chart c(names);
  for (const auto& n : names) c.set_range(n, -0.8, 0.8);
  std::vector<Expr> diag{Expr(1)};
  Expr f = Expr(1);
  for (int k = 1; k < d; ++k) {
    f = f * pow(cosh(c.coord(static_cast<std::size_t>(k - 1))), Expr(2));
    diag.push_back(f);
  }
  CatalogSpace s;
  s.name = "hyperbolic_sphere" + std::to_string(d);
  s.metric = Metric(c, diagonal(diag));
  auto [X, eta] = detail::hyperbolic_embedding(c, 0);
  s.generators = quadric_generators(s.metric, X, eta, -1);
  s.notes = "maximally symmetric; d(d+1)/2 KVs and d+1 proper gradient CKVs from the hyperboloid embedding";
  return s;
}

/// dr^2 + r^{2K} h with the gradient KV d_r (K = 0) or gradient HV r d_r (K = 1).
/// Killing vectors of h lift unchanged; for K = 0 an HV of h lifts to r d_r + H_h.
inline CatalogSpace decomposable(int K, const CatalogSpace& h, const std::string& r = "r") {
  if (K != 0 && K != 1) throw InvalidArgument("decomposable: K must be 0 or 1");
  const Chart& hc = h.chart();
  if (hc.has(r)) throw InvalidArgument("decomposable: coordinate name clash");
  std::vector<std::string> names{r};
  for (const auto& n : hc.coordinates()) names.push_back(n);
  auto ranges = hc.ranges();
  ranges[r] = Range{0.5, 1.7};
  Chart c(names, ranges);
  const std::size_t n = hc.dim();
  const Expr rr = c.coord(0);
  Matrix g = zero_matrix(n + 1);
  g[0][0] = Expr(1);
  const Expr w = K == 1 ? rr * rr : Expr(1);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) g[i + 1][j + 1] = w * h.metric(i, j);
  CatalogSpace s;
  s.name = "decomposable_K" + std::to_string(K) + "_" + h.name;
  s.metric = Metric(c, g);
  if (K == 0)
    s.generators.push_back(
        detail::declared("K_r", VectorField::basis(c, 0), Expr(0), ConformalClass::Killing, true));
  else {
    auto v = VectorField::basis(c, 0);
    s.generators.push_back(detail::declared("H_r", rr * v, Expr(1), ConformalClass::Homothetic, true));
  }
  auto lift = [&](const VectorField& X, const Expr& radial) {
    std::vector<Expr> comps{radial};
    for (const auto& x : X.components()) comps.push_back(x);
    return VectorField(c, std::move(comps));
  };
  for (const auto& gv : h.generators) {
    if (gv.cls == ConformalClass::Killing)
      s.generators.push_back(detail::declared(gv.name, lift(gv.field, Expr(0)), Expr(0), ConformalClass::Killing, false));
    else if (gv.cls == ConformalClass::Homothetic && K == 0)
      s.generators.push_back(
          detail::declared(gv.name + "+r", lift(gv.field, rr), gv.psi, ConformalClass::Homothetic, gv.gradient));
  }
  s.notes = K == 0 ? "gradient KV d_r" : "gradient HV r d_r";
  return s;
}

/// Flat space with its flat-chart generators, used as a fibre h.
inline CatalogSpace euclidean(std::vector<std::string> names) {
  Chart c = detail::default_ranges(Chart(names));
  CatalogSpace s;
  s.name = "euclidean" + std::to_string(names.size());
  s.metric = Metric(c, diagonal(std::vector<Expr>(names.size(), Expr(1))));
  for (std::size_t a = 0; a < c.dim(); ++a)
    s.generators.push_back(
        detail::declared("K_" + c.name(a), VectorField::basis(c, a), Expr(0), ConformalClass::Killing, true));
  std::vector<Expr> v;
  for (std::size_t a = 0; a < c.dim(); ++a) v.push_back(c.coord(a));
  s.generators.push_back(detail::declared("H", VectorField(c, v), Expr(1), ConformalClass::Homothetic, true));
  return s;
}

/// -dz^2 + dR^2 + R^2 f_AB dy^A dy^B with K_G, H and the special CKV C_S.
inline CatalogSpace sp_ckv_canonical(int m, const Metric& f) {
  if (m < 2) throw InvalidArgument("sp_ckv_canonical: m must be >= 2");
  if (f.dim() != static_cast<std::size_t>(m - 1)) throw InvalidArgument("sp_ckv_canonical: f must have dimension m - 1");
  std::vector<std::string> names{"z", "R"};
  for (const auto& n : f.chart().coordinates()) {
    if (n == "z" || n == "R" || n == "x") throw InvalidArgument("sp_ckv_canonical: fibre coordinate name clash");
    names.push_back(n);
  }
  auto ranges = f.chart().ranges();
  ranges["z"] = Range{-0.5, 0.5};
  ranges["R"] = Range{0.8, 1.7};
  Chart c(names, ranges);
  const std::size_t n = c.dim();
  const Expr z = c.coord(0);
  const Expr R = c.coord(1);
  Matrix g = zero_matrix(n);
  g[0][0] = Expr(-1);
  g[1][1] = Expr(1);
  for (std::size_t i = 2; i < n; ++i)
    for (std::size_t j = 2; j < n; ++j) g[i][j] = R * R * f(i - 2, j - 2);
  CatalogSpace s;
  s.name = "special_ckv" + std::to_string(m);
  s.metric = Metric(c, g);
  std::vector<Expr> h(n, Expr(0)), cs(n, Expr(0));
  h[0] = z;
  h[1] = R;
  cs[0] = Expr::rational(1, 2) * (z * z + R * R);
  cs[1] = z * R;
  s.generators.push_back(detail::declared("K_G", VectorField::basis(c, 0), Expr(0), ConformalClass::Killing, true));
  s.generators.push_back(detail::declared("H", VectorField(c, h), Expr(1), ConformalClass::Homothetic, true));
  s.generators.push_back(detail::declared("C_S", VectorField(c, cs), z, ConformalClass::SpecialCKV, false));
  s.notes = "gradient KV, gradient HV and one special CKV with psi = z";
  return s;
}

/// -dt^2 + A^2 dx^2 + B^2 dy^2 + C^2 dz^2 with the translations T^3, plus
/// y d_x - x d_y when A = B and the HV t d_t + z d_z when (A, B, C) = (t, t, 1).
inline CatalogSpace bianchi_I(const Expr& A, const Expr& B, const Expr& C, std::string name = "bianchi_I",
                              Range t_range = Range{0.3, 1.2}) {
  Chart c({"t", "x", "y", "z"});
  c.set_range("t", t_range.lo, t_range.hi);
  for (const char* n : {"x", "y", "z"}) c.set_range(n, -1, 1);
  for (const auto& e : {A, B, C})
    for (const auto& s : free_symbols(e))
      if (s != "t") throw InvalidArgument("bianchi_I: scale factors must depend on t only");
  const Checker chk = on_chart(Checker{}, c);
  for (const auto& e : {A, B, C})
    if (chk.zero(e, "bianchi-scale")) throw DegenerateMetric("bianchi_I: vanishing scale factor");
  const Expr t = c.coord(0);
  CatalogSpace s;
  s.name = std::move(name);
  s.metric = Metric(c, diagonal({Expr(-1), A * A, B * B, C * C}));
  auto is_const = [&](const Expr& e) { return chk.zero(diff(e, "t"), "bianchi-const"); };
  s.generators.push_back(detail::declared("K_x", VectorField::basis(c, 1), Expr(0), ConformalClass::Killing, is_const(A)));
  s.generators.push_back(detail::declared("K_y", VectorField::basis(c, 2), Expr(0), ConformalClass::Killing, is_const(B)));
  s.generators.push_back(detail::declared("K_z", VectorField::basis(c, 3), Expr(0), ConformalClass::Killing, is_const(C)));
  if (chk.zero(A * A - B * B, "bianchi-AB")) {
    std::vector<Expr> v(4, Expr(0));
    v[1] = c.coord(2);
    v[2] = -c.coord(1);
    s.generators.push_back(detail::declared("X_I^3", VectorField(c, v), Expr(0), ConformalClass::Killing, false));
  }
  if (chk.zero(A - t, "bianchi-t") && chk.zero(B - t, "bianchi-t") && chk.zero(C - Expr(1), "bianchi-1")) {
    std::vector<Expr> v(4, Expr(0));
    v[0] = t;
    v[3] = c.coord(3);
    s.generators.push_back(detail::declared("H", VectorField(c, v), Expr(1), ConformalClass::Homothetic, true));
  }
  s.notes = "Bianchi I";
  return s;
}

/// Three-dimensional slice -dt^2 + A^2 dx^2 + B^2 dy^2 with its declared generators.
/// (sin t, cos t) and (sinh t, cosh t) are maximally symmetric: 6 KVs and 4 gradient CKVs.
/// A = B = t carries the HV t d_t.
inline CatalogSpace bianchi_slice(const Expr& A, const Expr& B, std::string name = "bianchi_slice",
                                  Range t_range = Range{0.3, 1.2}) {
  Chart c({"t", "x", "y"});
  c.set_range("t", t_range.lo, t_range.hi);
  c.set_range("x", -1, 1);
  c.set_range("y", -1, 1);
  const Expr t = c.coord(0);
  const Expr x = c.coord(1);
  const Expr y = c.coord(2);
  CatalogSpace s;
  s.name = std::move(name);
  s.metric = Metric(c, diagonal({Expr(-1), A * A, B * B}));
  const Checker chk = on_chart(Checker{}, c);
  const bool trig = chk.zero(A - sin(t), "slice") && chk.zero(B - cos(t), "slice");
  const bool hyp = chk.zero(A - sinh(t), "slice") && chk.zero(B - cosh(t), "slice");
  if (trig) {
    s.generators = quadric_generators(
        s.metric, {sin(t) * cosh(x), sin(t) * sinh(x), cos(t) * cosh(y), cos(t) * sinh(y)}, {-1, 1, -1, 1}, -1);
    s.notes = "anti-de Sitter slice";
    return s;
  }
  if (hyp) {
    s.generators = quadric_generators(
        s.metric, {sinh(t) * cosh(x), sinh(t) * sinh(x), cosh(t) * cos(y), cosh(t) * sin(y)}, {-1, 1, 1, 1}, 1);
    s.notes = "de Sitter slice";
    return s;
  }
  s.generators.push_back(detail::declared("K_x", VectorField::basis(c, 1), Expr(0), ConformalClass::Killing,
                                          chk.zero(diff(A, "t"), "slice-const")));
  s.generators.push_back(detail::declared("K_y", VectorField::basis(c, 2), Expr(0), ConformalClass::Killing,
                                          chk.zero(diff(B, "t"), "slice-const")));
  if (chk.zero(A * A - B * B, "slice-AB"))
    s.generators.push_back(
        detail::declared("X_I^3", VectorField(c, {Expr(0), y, -x}), Expr(0), ConformalClass::Killing, false));
  if (chk.zero(A - t, "slice-t") && chk.zero(B - t, "slice-t"))
    s.generators.push_back(detail::declared("H", VectorField(c, {t, Expr(0), Expr(0)}), Expr(1), ConformalClass::Homothetic, true));
  s.notes = "Bianchi I slice";
  return s;
}

struct SelfCheck {
  std::string generator;
  bool ok = false;
  ClassifiedVector computed;
  std::string message;
};

/// Classify every declared generator and compare class, psi and gradient flag.
inline std::vector<SelfCheck> self_validate(const CatalogSpace& s, const Checker& checker = {}) {
  std::vector<SelfCheck> out;
  const Checker c = on_chart(checker, s.chart());
  for (const auto& g : s.generators) {
    SelfCheck r;
    r.generator = g.name;
    r.computed = classify(s.metric, g.field, checker, g.name);
    std::string msg;
    if (r.computed.cls != g.cls)
      msg += "class " + std::string(class_name(r.computed.cls)) + " != declared " + std::string(class_name(g.cls)) + "; ";
    if (!c.zero(r.computed.psi - g.psi, "self-psi/" + g.name)) msg += "psi mismatch; ";
    if (r.computed.gradient != g.gradient) msg += "gradient flag mismatch; ";
    r.ok = msg.empty();
    r.message = msg;
    out.push_back(std::move(r));
  }
  return out;
}

/// Catalogue lookup by CLI name.
inline CatalogSpace catalog_space(const std::string& name) {
  auto num = [&](const std::string& prefix) -> std::optional<int> {
    if (name.rfind(prefix, 0) != 0 || name.size() == prefix.size()) return std::nullopt;
    try {
      std::size_t pos = 0;
      const int v = std::stoi(name.substr(prefix.size()), &pos);
      if (pos != name.size() - prefix.size()) return std::nullopt;
      return v;
    } catch (...) {
      return std::nullopt;
    }
  };
  if (auto n = num("minkowski")) return minkowski(*n);
  if (auto d = num("hyperbolic_sphere")) return hyperbolic_sphere(*d);
  if (auto m = num("special_ckv")) {
    if (*m < 2 || *m > 5) throw InvalidArgument("special_ckv: m must be in [2, 5]");
    if (*m == 2) return sp_ckv_canonical(2, Metric(Chart({"y"}, {{"y", Range{-1, 1}}}), diagonal({Expr(1)})));
    return sp_ckv_canonical(*m, hyperbolic_sphere(*m - 1, "y").metric);
  }
  const Expr t = sym("t", SymbolKind::Coordinate);
  if (name == "bianchi_I_generic")
    return bianchi_I(Expr(1) + t * t, exp(t), cosh(t), name);
  if (name == "bianchi_I_axisym") return bianchi_I(exp(t), exp(t), cosh(t), name);
  if (name == "bianchi_I_C1") return bianchi_I(Expr(1) + t * t, exp(t), Expr(1), name);
  if (name == "bianchi_I_t_t_1") return bianchi_I(t, t, Expr(1), name);
  if (name == "bianchi_I_sin_cos_1") return bianchi_I(sin(t), cos(t), Expr(1), name);
  if (name == "bianchi_I_sinh_cosh_1") return bianchi_I(sinh(t), cosh(t), Expr(1), name);
  if (name == "bianchi_slice_sin_cos") return bianchi_slice(sin(t), cos(t), name);
  if (name == "bianchi_slice_sinh_cosh") return bianchi_slice(sinh(t), cosh(t), name);
  if (name == "bianchi_slice_t_t") return bianchi_slice(t, t, name);
  if (name == "decomposable_k0") return decomposable(0, hyperbolic_sphere(2, "y"), "r");
  if (name == "decomposable_k1") return decomposable(1, hyperbolic_sphere(2, "y"), "r");
  throw InvalidArgument("unknown catalogue space '" + name + "'");
}

inline std::vector<std::string> catalog_names() {
  return {"minkowski3",        "minkowski4",          "minkowski5",          "minkowski6",
          "hyperbolic_sphere2", "hyperbolic_sphere3", "hyperbolic_sphere4", "special_ckv2",
          "special_ckv3",            "special_ckv4",              "special_ckv5",              "bianchi_I_generic",
          "bianchi_I_axisym",  "bianchi_I_C1",        "bianchi_I_t_t_1",     "bianchi_I_sin_cos_1",
          "bianchi_I_sinh_cosh_1", "bianchi_slice_sin_cos",
          "bianchi_slice_sinh_cosh", "bianchi_slice_t_t", "decomposable_k0",       "decomposable_k1"};
}

}  // namespace confsym
