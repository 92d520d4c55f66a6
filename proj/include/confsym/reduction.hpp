#pragma once

#include <optional>
#include <string>
#include <vector>

#include "confsym/symmetry.hpp"

namespace confsym {

/// u = profile(reduction coordinate) * w(retained coordinates).
struct InvariantAnsatz {
  std::string reduction_coordinate;
  std::vector<std::string> retained;
  Expr profile = Expr(1);
  std::string u = "u";
  std::string w = "w";
};

/// Closed-form zero-order invariants for xi = d_r or r d_r with eta = mu u.
inline InvariantAnsatz invariants_for(const SymmetryVector& X, const Checker& checker = {},
                                      std::string_view u = "u", std::string_view w = "w") {
  const Chart& c = X.xi.chart();
  std::optional<std::size_t> k;
  for (std::size_t i = 0; i < c.dim(); ++i)
    if (!X.xi[i].is_zero()) {
      if (k) throw InvalidArgument("invariants_for: symmetry moves more than one coordinate");
      k = i;
    }
  if (!k) throw InvalidArgument("invariants_for: symmetry has no spatial part");
  const Expr r = c.coord(*k);
  const Expr uu = sym(std::string(u), SymbolKind::Dependent);
  const Expr mu = diff(X.eta, u);
  if (depends_on(mu, u) || !substitute(X.eta, std::string(u), Expr(0)).is_zero())
    throw InvalidArgument("invariants_for: eta must be mu*u");
  for (const auto& s : free_symbols(mu))
    if (c.has(s)) throw InvalidArgument("invariants_for: mu must be constant");

  InvariantAnsatz a;
  a.reduction_coordinate = c.name(*k);
  for (std::size_t i = 0; i < c.dim(); ++i)
    if (i != *k) a.retained.push_back(c.name(i));
  a.u = std::string(u);
  a.w = std::string(w);
  if (X.xi[*k].is_one())
    a.profile = exp(mu * r);
  else if (structurally_equal(X.xi[*k], r))
    a.profile = pow(r, mu);
  else
    throw InvalidArgument("invariants_for: unsupported shape, expected d_r or r d_r");

  // X annihilates u / profile
  const Expr inv = uu / a.profile;
  const Expr annihilated = X.xi.apply_to(inv) + X.eta * diff(inv, u);
  Checker ch = on_chart(checker, c);
  ch.sampler.set_range(std::string(u), -2, 2);
  if (!ch.zero(annihilated, "ansatz-invariance"))
    throw ComputationFailed("invariants_for: ansatz is not invariant");
  return a;
}

/// Coordinates x' = forward(x) with inverse x = inverse(x').
struct CoordinateChange {
  Chart from;
  Chart to;
  Bindings forward;  // new coordinate name -> expression in old coordinates
  Bindings inverse;  // old coordinate name -> expression in new coordinates
};

/// A'^{kl} = A^{ab} J^k_a J^l_b, B'^k = B^a J^k_a - A^{ab} d_a d_b x'^k, then x -> x(x').
inline PdeSpec change_coordinates(const PdeSpec& pde, const CoordinateChange& cc) {
  if (!(pde.chart == cc.from)) throw ChartMismatch("coordinate change does not start from the PDE chart");
  const std::size_t n = cc.to.dim();
  const std::size_t m = cc.from.dim();
  std::vector<Expr> xn(n);
  for (std::size_t k = 0; k < n; ++k) {
    auto it = cc.forward.find(cc.to.name(k));
    if (it == cc.forward.end()) throw InvalidArgument("missing forward map for " + cc.to.name(k));
    xn[k] = it->second;
  }
  Matrix J(n, std::vector<Expr>(m));
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t a = 0; a < m; ++a) J[k][a] = diff(xn[k], cc.from.name(a));
  auto back = [&](const Expr& e) { return substitute(e, cc.inverse); };
  PdeSpec out;
  out.chart = cc.to;
  out.u = pde.u;
  out.A = zero_matrix(n);
  out.B.assign(n, Expr(0));
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t l = k; l < n; ++l) {
      std::vector<Expr> t;
      for (std::size_t a = 0; a < m; ++a)
        for (std::size_t b = 0; b < m; ++b)
          if (!pde.A[a][b].is_zero()) t.push_back(pde.A[a][b] * J[k][a] * J[l][b]);
      out.A[k][l] = back(add(std::move(t)));
      out.A[l][k] = out.A[k][l];
    }
    std::vector<Expr> t;
    for (std::size_t a = 0; a < m; ++a) {
      if (!pde.B[a].is_zero()) t.push_back(pde.B[a] * J[k][a]);
      for (std::size_t b = 0; b < m; ++b)
        if (!pde.A[a][b].is_zero()) t.push_back(-(pde.A[a][b] * diff(J[k][a], cc.from.name(b))));
    }
    out.B[k] = back(add(std::move(t)));
  }
  out.f = back(pde.f);
  return out;
}

inline VectorField change_coordinates(const VectorField& X, const CoordinateChange& cc) {
  std::vector<Expr> c;
  for (std::size_t k = 0; k < cc.to.dim(); ++k)
    c.push_back(substitute(X.apply_to(cc.forward.at(cc.to.name(k))), cc.inverse));
  return {cc.to, std::move(c)};
}

inline SymmetryVector change_coordinates(const SymmetryVector& X, const CoordinateChange& cc) {
  SymmetryVector out = X;
  out.xi = change_coordinates(X.xi, cc);
  out.eta = substitute(X.eta, cc.inverse);
  if (X.a) out.a = substitute(*X.a, cc.inverse);
  if (X.b) out.b = substitute(*X.b, cc.inverse);
  return out;
}

/// Tags a PDE as laplace / klein_gordon when A is the inverse of a metric h,
/// B^k = Gamma^k(h) and f = -V u with V free of u. Otherwise generic.
inline void identify(PdeSpec& p, const Checker& checker = {}) {
  const std::size_t n = p.dim();
  p.kind = PdeKind::Generic;
  p.metric.reset();
  for (std::size_t i = 0; i < n; ++i) {
    if (depends_on(p.B[i], p.u)) return;
    for (std::size_t j = 0; j < n; ++j)
      if (depends_on(p.A[i][j], p.u)) return;
  }
  if (n > 6) return;
  Checker c = on_chart(checker, p.chart);
  c.sampler.set_range(p.u, -2, 2);
  if (!c.zero(substitute(p.f, p.u, Expr(0)), "identify-homogeneous") ||
      !c.zero(diff(diff(p.f, p.u), p.u), "identify-linear"))
    return;
  Matrix h;
  try {
    h = inverse(p.A);
  } catch (const DegenerateMetric&) {
    return;
  }
  for (auto& row : h)
    for (auto& e : row) e = tidy(e, checker, p.chart);
  Metric g(p.chart, h);
  MetricGeometry geo(g);
  const auto& G = geo.contracted_christoffel();
  for (std::size_t k = 0; k < n; ++k)
    if (!c.zero(p.B[k] - G[k], "identify-christoffel", k)) return;
  const Expr V = tidy(-diff(p.f, p.u), checker, p.chart);
  p.metric = g;
  p.potential = V;
  p.source = p.f;
  p.kind = c.zero(V, "identify-potential") ? PdeKind::Laplace : PdeKind::KleinGordon;
  if (p.kind == PdeKind::Laplace) p.potential = Expr(0);
}

/// Scale s with (A, B, f) = s * (h^{-1}, Gamma(h), V u) for the target metric h,
/// returning s and V, or nothing when the PDE is not such a multiple.
struct MetricMatch {
  Expr scale;
  Expr potential;
};

inline std::optional<MetricMatch> match_metric(const PdeSpec& p, const Metric& target,
                                               const Checker& checker = {}) {
  if (!(p.chart == target.chart())) throw ChartMismatch("target metric lives on another chart");
  MetricGeometry geo(target);
  const Matrix& gi = geo.inverse();
  Checker c = on_chart(checker, p.chart);
  c.sampler.set_range(p.u, -2, 2);
  std::optional<std::size_t> k;
  for (std::size_t i = 0; i < p.dim() && !k; ++i)
    if (!gi[i][i].is_zero()) k = i;
  if (!k) return std::nullopt;
  const Expr s = tidy(p.A[*k][*k] / gi[*k][*k], checker, p.chart);
  for (std::size_t i = 0; i < p.dim(); ++i)
    for (std::size_t j = i; j < p.dim(); ++j)
      if (!c.zero(p.A[i][j] - s * gi[i][j], "match-principal", i * p.dim() + j)) return std::nullopt;
  const auto& G = geo.contracted_christoffel();
  for (std::size_t i = 0; i < p.dim(); ++i)
    if (!c.zero(p.B[i] - s * G[i], "match-first-order", i)) return std::nullopt;
  const Expr uu = p.dependent();
  if (!c.zero(substitute(p.f, p.u, Expr(0)), "match-homogeneous") ||
      !c.zero(diff(diff(p.f, p.u), p.u), "match-linear"))
    return std::nullopt;
  const Expr V = tidy(-diff(p.f, p.u) / s, checker, p.chart);
  return MetricMatch{s, V};
}

/// Re-express a PDE as Delta_h u + V u = 0 on the given metric, dividing out the scale.
inline std::optional<PdeSpec> as_metric_pde(const PdeSpec& p, const Metric& target, const Checker& checker = {}) {
  auto m = match_metric(p, target, checker);
  if (!m) return std::nullopt;
  PdeSpec out = klein_gordon_pde(target, m->potential, p.u);
  Checker c = on_chart(checker, p.chart);
  if (c.zero(m->potential, "as-metric-potential")) {
    out = laplace_pde(target, p.u);
  }
  return out;
}

struct ReducedSymmetry {
  SymmetryVector vector;
  VerifyResult verification;
  std::string origin;  // name of the original symmetry, empty for extras
};

struct GovinderPrediction {
  std::string name;
  bool predicted = false;  // [used, Y] = c used with constant c
  std::optional<Rational> c;
  bool verified = false;   // restriction verified on the reduced PDE
};

struct ReducedPde {
  PdeSpec pde;
  InvariantAnsatz ansatz;
  std::optional<SymmetryVector> provenance;
  Expr scale = Expr(1);   // common factor divided out of the reduced coefficients
  double absence_residual = 0.0;
  std::vector<ReducedSymmetry> inherited;
  std::vector<ReducedSymmetry> hidden;    // type II
  std::vector<ReducedSymmetry> broken;    // restrictions that fail verification
  std::vector<std::string> lost;          // originals that do not restrict
  std::vector<ReducedSymmetry> rejected;  // extras that fail verification
  std::vector<GovinderPrediction> govinder;
};

namespace detail {

inline Expr reference_value(const Chart& chart, const std::string& r) {
  Range range = chart.ranges().count(r) ? chart.ranges().at(r) : Range{};
  if (range.lo <= 1.0 && 1.0 <= range.hi) return Expr(1);
  const double mid = 0.5 * (range.lo + range.hi);
  if (auto q = rationalize(std::round(mid * 8.0) / 8.0, 64)) return Expr(*q);
  return Expr(1);
}

inline Bindings ansatz_bindings(const PdeSpec& pde, const InvariantAnsatz& a, const Chart& reduced) {
  const Chart& c = pde.chart;
  const std::size_t n = c.dim();
  const Expr& phi = a.profile;
  const Expr w = sym(a.w, SymbolKind::Dependent);
  std::vector<Expr> dphi(n), wi(n);
  for (std::size_t i = 0; i < n; ++i) {
    dphi[i] = diff(phi, c.name(i));
    const auto ri = reduced.index_of(c.name(i));
    wi[i] = ri ? jet(reduced, a.w, *ri) : Expr(0);
  }
  auto wij = [&](std::size_t i, std::size_t j) {
    const auto ri = reduced.index_of(c.name(i));
    const auto rj = reduced.index_of(c.name(j));
    return ri && rj ? jet(reduced, a.w, *ri, *rj) : Expr(0);
  };
  Bindings b;
  b[pde.u] = phi * w;
  for (std::size_t i = 0; i < n; ++i) {
    b[jet_name(c, pde.u, i)] = dphi[i] * w + phi * wi[i];
    for (std::size_t j = i; j < n; ++j)
      b[jet_name(c, pde.u, i, j)] =
          diff(dphi[i], c.name(j)) * w + dphi[i] * wi[j] + dphi[j] * wi[i] + phi * wij(i, j);
  }
  return b;
}

}  // namespace detail

/// Substitute the ansatz, divide by the profile and read off the reduced
/// coefficients. A common factor in the reduction coordinate is divided out.
inline ReducedPde reduce(const PdeSpec& pde, const InvariantAnsatz& a, const Checker& checker = {},
                         std::optional<SymmetryVector> provenance = std::nullopt) {
  const Chart& c = pde.chart;
  if (!c.has(a.reduction_coordinate)) throw ChartMismatch("reduction coordinate not in chart");
  for (const auto& r : a.retained)
    if (!c.has(r)) throw ChartMismatch("retained coordinate '" + r + "' not in chart");
  if (provenance) {
    const auto v = verify_symmetry(pde, *provenance, checker);
    if (!v.holds) throw InvalidArgument("reduce: generating symmetry '" + provenance->name + "' fails verification");
  }
  std::map<std::string, Range, std::less<>> ranges;
  for (const auto& r : a.retained)
    if (auto it = c.ranges().find(r); it != c.ranges().end()) ranges[r] = it->second;
  const Chart rc(a.retained, ranges);
  const std::size_t m = rc.dim();
  const std::string& r = a.reduction_coordinate;

  const Expr E = substitute(pde.lhs(), detail::ansatz_bindings(pde, a, rc)) / a.profile;
  Matrix A = zero_matrix(m);
  std::vector<Expr> B(m);
  Bindings zero_jets;
  for (std::size_t i = 0; i < m; ++i) {
    zero_jets[jet_name(rc, a.w, i)] = Expr(0);
    for (std::size_t j = i; j < m; ++j) zero_jets[jet_name(rc, a.w, i, j)] = Expr(0);
  }
  for (std::size_t i = 0; i < m; ++i) {
    B[i] = -diff(E, jet_name(rc, a.w, i));
    for (std::size_t j = i; j < m; ++j) {
      Expr d = diff(E, jet_name(rc, a.w, i, j));
      if (i != j) d = Expr::rational(1, 2) * d;
      A[i][j] = A[j][i] = d;
    }
  }
  Expr f = -substitute(E, zero_jets);

  Checker ch = on_chart(checker, c);
  ch.sampler.set_range(a.w, -2, 2);
  auto absent = [&](double* worst) {
    bool ok = true;
    std::size_t idx = 0;
    auto test = [&](const Expr& e) {
      const auto rep = ch.report(diff(e, r), "reduction-absence", idx++);
      if (worst) *worst = std::max(*worst, rep.max_residual);
      ok = ok && rep.zero;
    };
    for (std::size_t i = 0; i < m; ++i) {
      test(B[i]);
      for (std::size_t j = i; j < m; ++j) test(A[i][j]);
    }
    test(f);
    return ok;
  };

  ReducedPde out;
  out.ansatz = a;
  out.provenance = provenance;
  const Expr ref = detail::reference_value(c, r);
  if (!absent(nullptr)) {
    std::optional<std::size_t> k;
    for (std::size_t i = 0; i < m && !k; ++i)
      if (!ch.zero(A[i][i], "reduction-diagonal", i)) k = i;
    if (!k) throw ComputationFailed("reduced principal symbol vanishes");
    const Expr s = A[*k][*k] / substitute(A[*k][*k], r, ref);
    for (std::size_t i = 0; i < m; ++i) {
      B[i] = B[i] / s;
      for (std::size_t j = 0; j < m; ++j) A[i][j] = A[i][j] / s;
    }
    f = f / s;
    out.scale = tidy(s, checker, c);
  }
  if (!absent(&out.absence_residual))
    throw ComputationFailed("reduction coordinate '" + r + "' does not eliminate; symmetry and ansatz mismatch");

  auto clean = [&](const Expr& e) { return tidy(substitute(e, r, ref), checker, rc); };
  PdeSpec p;
  p.chart = rc;
  p.u = a.w;
  p.A = zero_matrix(m);
  p.B.resize(m);
  for (std::size_t i = 0; i < m; ++i) {
    p.B[i] = clean(B[i]);
    for (std::size_t j = i; j < m; ++j) p.A[i][j] = p.A[j][i] = clean(A[i][j]);
  }
  p.f = clean(f);
  validate(p);
  identify(p, checker);
  out.pde = std::move(p);
  return out;
}

/// Jet-level residual of the original PDE after the ansatz, minus
/// profile * scale * (reduced PDE); vanishes identically for a correct reduction.
inline Expr round_trip_residual(const PdeSpec& original, const ReducedPde& red) {
  const Expr lhs = substitute(original.lhs(), detail::ansatz_bindings(original, red.ansatz, red.pde.chart));
  return lhs - red.ansatz.profile * red.scale * red.pde.lhs();
}

inline double round_trip_check(const PdeSpec& original, const ReducedPde& red, const Checker& checker = {}) {
  Checker c = on_chart(checker, original.chart);
  c.sampler.set_range(red.ansatz.w, -2, 2);
  for (std::size_t i = 0; i < red.pde.dim(); ++i) {
    c.sampler.set_range(jet_name(red.pde.chart, red.ansatz.w, i), -2, 2);
    for (std::size_t j = i; j < red.pde.dim(); ++j)
      c.sampler.set_range(jet_name(red.pde.chart, red.ansatz.w, i, j), -2, 2);
  }
  const auto rep = c.report(round_trip_residual(original, red), "round-trip");
  return rep.zero ? rep.max_residual : -rep.max_residual - 1.0;
}

/// The special-CKV chart (z, R, y...) re-expressed in (x, R, y...) with
/// x = R / (R^2 - z^2), z = sqrt(R (R - 1/x)).
inline CoordinateChange sp_ckv_coordinates(const Chart& chart) {
  if (chart.dim() < 3 || chart.name(0) != "z" || chart.name(1) != "R")
    throw InvalidArgument("special CKV reduction expects the chart (z, R, y...)");
  std::vector<std::string> names{"x", "R"};
  for (std::size_t i = 2; i < chart.dim(); ++i) names.push_back(chart.name(i));
  std::map<std::string, Range, std::less<>> ranges = chart.ranges();
  ranges.erase("z");
  ranges["x"] = Range{1.5, 3.0};
  ranges["R"] = Range{0.8, 1.7};
  CoordinateChange cc;
  cc.from = chart;
  cc.to = Chart(names, ranges);
  const Expr z = sym("z", SymbolKind::Coordinate);
  const Expr R = sym("R", SymbolKind::Coordinate);
  const Expr x = sym("x", SymbolKind::Coordinate);
  cc.forward["x"] = R / (R * R - z * z);
  cc.forward["R"] = R;
  cc.inverse["z"] = sqrt(R * (R - Expr(1) / x));
  cc.inverse["R"] = R;
  for (std::size_t i = 2; i < chart.dim(); ++i) {
    cc.forward[chart.name(i)] = chart.coord(i);
    cc.inverse[chart.name(i)] = chart.coord(i);
  }
  return cc;
}

namespace detail {

/// (a b)^q -> a^q b^q and (a^p)^q -> a^(pq) for rational q. Only valid where
/// every base is positive, so callers certify the result on their chart.
inline Expr positive_powers(const Expr& e) {
  if (e.args().empty()) return e;
  std::vector<Expr> args;
  for (const auto& a : e.args()) args.push_back(positive_powers(a));
  if (e.is(Kind::Power) && args[1].is_constant()) {
    const Expr& b = args[0];
    if (b.is(Kind::Power)) return pow(b.base(), mul({b.exponent(), args[1]}));
    if (b.is(Kind::Product)) {
      std::vector<Expr> f;
      for (const auto& g : b.args()) f.push_back(positive_powers(pow(g, args[1])));
      return mul(std::move(f));
    }
  }
  return rebuild(e, std::move(args));
}

inline Expr certified_positive(const Expr& e, const Checker& checker, const Chart& chart) {
  const Expr s = positive_powers(e);
  if (s == e) return e;
  return on_chart(checker, chart).zero(s - e, "positive-powers") ? tidy(s, checker, chart) : e;
}

}  // namespace detail

struct SpCkvReduction {
  ReducedPde reduced;          // first reduction, in (x, y...)
  Rational coefficient;        // -2p(2p+1)
  std::optional<PdeSpec> metric_form;  // m = 3: Laplace on x^-4 dx^2 + x^-2 f; m >= 4: Klein-Gordon in phi
  std::optional<CoordinateChange> phi_change;  // m >= 4: x -> phi
};

/// Reduction of the Laplace equation on -dz^2 + dR^2 + R^2 f by the special CKV
/// C_S + 2p z u d_u with 2p = (1 - m)/2.
inline SpCkvReduction sp_ckv_reduce(const PdeSpec& pde, int m, const Checker& checker = {}) {
  if (m < 2) throw InvalidArgument("sp_ckv_reduce: m must be >= 2");
  if (pde.dim() != static_cast<std::size_t>(m) + 1)
    throw InvalidArgument("sp_ckv_reduce: chart dimension must be m + 1");
  const CoordinateChange cc = sp_ckv_coordinates(pde.chart);
  PdeSpec moved = change_coordinates(pde, cc);
  const Rational two_p(1 - m, 2);
  InvariantAnsatz a;
  a.reduction_coordinate = "R";
  for (const auto& n : cc.to.coordinates())
    if (n != "R") a.retained.push_back(n);
  a.u = pde.u;
  a.w = "w";
  a.profile = pow(sym("R", SymbolKind::Coordinate), Expr(two_p));

  SpCkvReduction out;
  out.reduced = reduce(moved, a, checker);
  out.coefficient = -(two_p * (two_p + Rational(1)));
  const Chart& rc = out.reduced.pde.chart;
  const std::size_t fdim = rc.dim() - 1;
  const Expr x = sym("x", SymbolKind::Coordinate);

  // f_AB is read back from the reduced principal symbol: A^{AB} = f^{AB}
  Matrix fup(fdim, std::vector<Expr>(fdim));
  for (std::size_t i = 0; i < fdim; ++i)
    for (std::size_t j = 0; j < fdim; ++j) fup[i][j] = out.reduced.pde.A[i + 1][j + 1];
  const Matrix fdown = inverse(fup);

  if (m == 3) {
    Matrix g = zero_matrix(rc.dim());
    g[0][0] = pow(x, Expr(-4));
    for (std::size_t i = 0; i < fdim; ++i)
      for (std::size_t j = 0; j < fdim; ++j) g[i + 1][j + 1] = tidy(pow(x, Expr(-2)) * fdown[i][j], checker, rc);
    out.metric_form = as_metric_pde(out.reduced.pde, Metric(rc, g), checker);
  } else if (m >= 4) {
    // d phi = dx / (x sqrt(V)), V = (m-2)^2 / phi^2  =>  x = (phi / (m-2))^-(m-2)
    const auto k = static_cast<std::int64_t>(m - 2);
    std::vector<std::string> names{"phi"};
    for (std::size_t i = 1; i < rc.dim(); ++i) names.push_back(rc.name(i));
    auto ranges = rc.ranges();
    ranges.erase("x");
    const double lo = static_cast<double>(k) * std::pow(3.0, -1.0 / static_cast<double>(k));
    const double hi = static_cast<double>(k) * std::pow(1.5, -1.0 / static_cast<double>(k));
    ranges["phi"] = Range{lo, hi};
    CoordinateChange pc;
    pc.from = rc;
    pc.to = Chart(names, ranges);
    const Expr phi = sym("phi", SymbolKind::Coordinate);
    pc.forward["phi"] = Expr(k) * pow(x, Expr(Rational(-1, k)));
    pc.inverse["x"] = pow(phi / Expr(k), Expr(-k));
    for (std::size_t i = 1; i < rc.dim(); ++i) {
      pc.forward[rc.name(i)] = rc.coord(i);
      pc.inverse[rc.name(i)] = rc.coord(i);
    }
    PdeSpec inphi = change_coordinates(out.reduced.pde, pc);
    for (auto& row : inphi.A)
      for (auto& e : row) e = detail::certified_positive(e, checker, pc.to);
    for (auto& e : inphi.B) e = detail::certified_positive(e, checker, pc.to);
    {
      Checker c = on_chart(checker, pc.to);
      c.sampler.set_range(inphi.u, -2, 2);
      const Expr f = detail::positive_powers(inphi.f);
      if (c.zero(f - inphi.f, "positive-powers-f")) inphi.f = f;
    }
    Matrix g = zero_matrix(pc.to.dim());
    g[0][0] = Expr(1);
    for (std::size_t i = 0; i < fdim; ++i)
      for (std::size_t j = 0; j < fdim; ++j)
        g[i + 1][j + 1] = tidy(substitute(fdown[i][j], pc.inverse) * phi * phi / Expr(k * k), checker, pc.to);
    out.metric_form = as_metric_pde(inphi, Metric(pc.to, g), checker);
    out.phi_change = pc;
  }
  return out;
}

/// Drop the reduction coordinate's component; empty when the remaining
/// components still depend on it.
inline std::optional<SymmetryVector> restrict_symmetry(const SymmetryVector& Y, const ReducedPde& red,
                                                       const Chart& original, const Checker& checker = {}) {
  const auto& a = red.ansatz;
  const Chart& rc = red.pde.chart;
  Checker c = on_chart(checker, original);
  c.sampler.set_range(a.u, -2, 2);
  c.sampler.set_range(a.w, -2, 2);
  std::vector<Expr> xi;
  for (const auto& name : rc.coordinates()) {
    const Expr comp = Y.xi[*original.index_of(name)];
    if (depends_on(comp, a.reduction_coordinate) &&
        !c.zero(diff(comp, a.reduction_coordinate), "restrict/" + Y.name))
      return std::nullopt;
    xi.push_back(substitute(comp, a.reduction_coordinate, detail::reference_value(original, a.reduction_coordinate)));
  }
  SymmetryVector out;
  out.name = Y.name;
  out.xi = VectorField(rc, std::move(xi));
  // induced action on w = u / profile
  const Expr w = sym(a.w, SymbolKind::Dependent);
  const Expr phi = a.profile;
  const std::size_t r = *original.index_of(a.reduction_coordinate);
  Expr eta_w = substitute((Y.eta - w * Y.xi[r] * diff(phi, a.reduction_coordinate)) / phi, a.u, phi * w);
  if (depends_on(eta_w, a.reduction_coordinate)) {
    if (!c.zero(diff(eta_w, a.reduction_coordinate), "restrict-eta/" + Y.name)) return std::nullopt;
    eta_w = substitute(eta_w, a.reduction_coordinate, detail::reference_value(original, a.reduction_coordinate));
  }
  out.eta = tidy(eta_w, checker, rc);
  out.a = diff(out.eta, a.w);
  out.b = substitute(out.eta, a.w, Expr(0));
  return out;
}

/// Inherited / type II partition of candidate symmetries of the reduced PDE.
/// For metric-kind reduced equations the w-part of each restriction is rebuilt
/// by the theorem generators; pure u-scalings map to w d_w.
inline void classify_reduced(const std::vector<SymmetryVector>& original, const SymmetryVector& used,
                             ReducedPde& red, const Chart& original_chart,
                             const std::vector<SymmetryVector>& extras = {}, const Checker& checker = {}) {
  red.inherited.clear();
  red.hidden.clear();
  red.broken.clear();
  red.lost.clear();
  red.rejected.clear();
  red.govinder.clear();
  const PdeSpec& p = red.pde;
  const Chart& rc = p.chart;
  std::vector<SymmetryVector> restricted;

  auto rebuild_eta = [&](const SymmetryVector& s) -> SymmetryVector {
    if (!p.metric || s.xi.is_zero_field()) return s;
    const ClassifiedVector cv = classify(*p.metric, s.xi, checker, s.name);
    if (cv.cls == ConformalClass::NotCKV) return s;
    return generate_for(p, cv, Expr(0), Expr(0), checker).vector;
  };

  for (const auto& Y : original) {
    if (Y.name == used.name) continue;
    auto r = restrict_symmetry(Y, red, original_chart, checker);
    GovinderPrediction gp;
    gp.name = Y.name;
    {
      const SymmetryVector br = bracket(used, Y, red.ansatz.u);
      Checker c = on_chart(checker, original_chart);
      c.sampler.set_range(red.ansatz.u, -2, 2);
      std::vector<Expr> bc(br.xi.components());
      bc.push_back(br.eta);
      std::vector<Expr> uc(used.xi.components());
      uc.push_back(used.eta);
      for (std::size_t i = 0; i < uc.size() && !gp.c; ++i)
        if (!uc[i].is_zero()) gp.c = c.constant_value(bc[i] / uc[i], "govinder/" + Y.name);
      if (gp.c) {
        bool ok = true;
        for (std::size_t i = 0; i < uc.size() && ok; ++i)
          ok = c.zero(bc[i] - Expr(*gp.c) * uc[i], "govinder-check/" + Y.name, i);
        gp.predicted = ok;
        if (!ok) gp.c.reset();
      }
    }
    if (!r) {
      red.lost.push_back(Y.name);
      red.govinder.push_back(gp);
      continue;
    }
    SymmetryVector cand = rebuild_eta(*r);
    cand.name = Y.name;
    ReducedSymmetry rs{cand, verify_symmetry(p, cand, checker), Y.name};
    gp.verified = rs.verification.holds;
    red.govinder.push_back(gp);
    restricted.push_back(cand);
    (rs.verification.holds ? red.inherited : red.broken).push_back(std::move(rs));
  }

  Checker c = on_chart(checker, rc);
  auto same_xi = [&](const SymmetryVector& a, const SymmetryVector& b) {
    for (std::size_t i = 0; i < rc.dim(); ++i)
      if (!c.zero(a.xi[i] - b.xi[i], "same-xi", i)) return false;
    return true;
  };
  for (const auto& X : extras) {
    if (!(X.xi.chart() == rc)) throw ChartMismatch("extra symmetry '" + X.name + "' is not on the reduced chart");
    ReducedSymmetry rs{X, verify_symmetry(p, X, checker), {}};
    if (!rs.verification.holds) {
      red.rejected.push_back(std::move(rs));
      continue;
    }
    bool known = false;
    for (const auto& R : restricted) {
      if (!X.xi.is_zero_field() && same_xi(X, R)) {
        known = true;
        break;
      }
      if (X.xi.is_zero_field() && R.xi.is_zero_field()) {
        known = true;
        break;
      }
    }
    if (!known) red.hidden.push_back(std::move(rs));
  }
}

}  // namespace confsym
