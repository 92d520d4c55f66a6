#pragma once

#include <Eigen/Dense>

#include <string>
#include <string_view>
#include <vector>

#include "confsym/geometry.hpp"
#include "confsym/print.hpp"

namespace confsym {

enum class ConformalClass { NotCKV, ProperCKV, SpecialCKV, Homothetic, Killing };

inline std::string_view class_name(ConformalClass c) {
  switch (c) {
    case ConformalClass::NotCKV: return "NotCKV";
    case ConformalClass::ProperCKV: return "ProperCKV";
    case ConformalClass::SpecialCKV: return "SpecialCKV";
    case ConformalClass::Homothetic: return "Homothetic";
    case ConformalClass::Killing: return "Killing";
  }
  return "?";
}

inline std::optional<ConformalClass> class_from_name(std::string_view s) {
  for (auto c : {ConformalClass::NotCKV, ConformalClass::ProperCKV, ConformalClass::SpecialCKV,
                 ConformalClass::Homothetic, ConformalClass::Killing})
    if (class_name(c) == s) return c;
  return std::nullopt;
}

struct ClassifiedVector {
  std::string name;
  VectorField field;
  Expr psi;
  ConformalClass cls = ConformalClass::NotCKV;
  bool gradient = false;
  double residual = 0.0;  // largest relative residual of L_X g - 2 psi g
};

namespace detail {

/// sin^2 -> 1 - cos^2 and sinh^2 -> cosh^2 - 1 in even positive powers.
inline Expr pythagorean(const Expr& e) {
  if (e.args().empty()) return e;
  std::vector<Expr> args;
  for (const auto& a : e.args()) args.push_back(pythagorean(a));
  if (e.is(Kind::Power) && args[1].is_constant() && args[1].value().is_integer() && args[1].value().num() >= 2 &&
      args[1].value().num() % 2 == 0) {
    const Expr& b = args[0];
    const Expr half(args[1].value().num() / 2);
    if (b.is_function(Function::Sin)) return pow(Expr(1) - pow(cos(b.arg()), Expr(2)), half);
    if (b.is_function(Function::Sinh)) return pow(pow(cosh(b.arg()), Expr(2)) - Expr(1), half);
  }
  return rebuild(e, std::move(args));
}

}  // namespace detail

/// Shortest of e, its expansion and its expansion after the Pythagorean
/// rewrite; constants are reduced to exact rationals.
inline Expr tidy(const Expr& e, const Checker& checker, const Chart& chart) {
  const Expr x = expand(e);
  Expr best = to_string(x).size() < to_string(e).size() ? x : e;
  const Checker c = on_chart(checker, chart);
  if (const Expr p = expand(detail::pythagorean(e)); p != x && to_string(p).size() < to_string(best).size())
    best = p;
  bool constant = true;
  for (const auto& s : free_symbols(best))
    if (chart.has(s) && !c.zero(diff(best, s), "tidy-gradient")) {
      constant = false;
      break;
    }
  if (constant && !best.is_constant())
    if (auto r = c.constant_value(best, "tidy-constant")) return Expr(*r);
  return best;
}

/// psi = (1/(2n)) g^{ij} (L_X g)_ij.
inline Expr conformal_factor(const Metric& g, const VectorField& X) {
  const Matrix gi = inverse_metric(g);
  const Matrix L = lie_derivative_metric(g, X);
  std::vector<Expr> t;
  for (std::size_t i = 0; i < g.dim(); ++i)
    for (std::size_t j = 0; j < g.dim(); ++j)
      if (!gi[i][j].is_zero() && !L[i][j].is_zero()) t.push_back(gi[i][j] * L[i][j]);
  return Expr::rational(1, static_cast<std::int64_t>(2 * g.dim())) * add(std::move(t));
}

/// Curl of the lowered field vanishes.
inline bool is_gradient(const Metric& g, const VectorField& X, const Checker& checker = {}) {
  const Checker c = on_chart(checker, g.chart());
  const auto low = lower(g, X);
  for (std::size_t i = 0; i < g.dim(); ++i)
    for (std::size_t j = i + 1; j < g.dim(); ++j) {
      const Expr curl = diff(low[i], g.chart().name(j)) - diff(low[j], g.chart().name(i));
      if (!c.zero(curl, "gradient", i * g.dim() + j)) return false;
    }
  return true;
}

inline ClassifiedVector classify(const Metric& g, const VectorField& X, const Checker& checker = {},
                                 std::string name = {}) {
  const Checker c = on_chart(checker, g.chart());
  ClassifiedVector out;
  out.name = std::move(name);
  out.field = X;
  MetricGeometry geo(g);
  const Matrix L = lie_derivative_metric(g, X);
  const Expr psi = conformal_factor(g, X);
  bool ckv = true;
  for (std::size_t i = 0; i < g.dim(); ++i)
    for (std::size_t j = i; j < g.dim(); ++j) {
      const auto r = c.report(L[i][j] - Expr(2) * psi * g(i, j), "ckv-condition", i * g.dim() + j);
      out.residual = std::max(out.residual, r.max_residual);
      ckv = ckv && r.zero;
    }
  out.gradient = is_gradient(g, X, checker);
  if (!ckv) {
    out.psi = psi;
    out.cls = ConformalClass::NotCKV;
    return out;
  }
  if (c.zero(psi, "psi")) {
    out.psi = Expr(0);
    out.cls = ConformalClass::Killing;
    return out;
  }
  out.psi = tidy(psi, checker, g.chart());
  bool constant = true;
  for (std::size_t k = 0; k < g.dim() && constant; ++k)
    constant = c.zero(diff(out.psi, g.chart().name(k)), "psi-gradient", k);
  if (constant) {
    out.cls = ConformalClass::Homothetic;
    return out;
  }
  const Matrix H = geo.covariant_hessian(out.psi);
  bool special = true;
  for (std::size_t i = 0; i < g.dim() && special; ++i)
    for (std::size_t j = i; j < g.dim() && special; ++j)
      special = c.zero(H[i][j], "psi-hessian", i * g.dim() + j);
  out.cls = special ? ConformalClass::SpecialCKV : ConformalClass::ProperCKV;
  return out;
}

/// Re-classify X against N^2 g, computing the new factor from its own Lie derivative.
inline ClassifiedVector conformal_rescale(const Metric& g, const Expr& N, const ClassifiedVector& X,
                                          const Checker& checker = {}) {
  const Checker c = on_chart(checker, g.chart());
  if (c.zero(N, "rescale-factor")) throw DegenerateMetric("conformal factor N vanishes identically");
  Matrix gb = g.components();
  const Expr N2 = pow(N, Expr(2));
  for (auto& row : gb)
    for (auto& e : row) e = N2 * e;
  Metric bar(g.chart(), std::move(gb));
  require_nondegenerate(bar, checker);
  return classify(bar, X.field, checker, X.name);
}

struct StructureConstants {
  bool closed = true;
  // c[a][b][k]: [X_a, X_b] = sum_k c[a][b][k] X_k
  std::vector<std::vector<std::vector<Rational>>> c;
  std::vector<std::pair<std::size_t, std::size_t>> failures;
  double max_residual = 0.0;
};

/// Express every bracket in the span of the given fields: least squares at
/// 2*dim sample points, rationalized, then certified by the zero test.
inline StructureConstants closure_check(const Metric& g, const std::vector<ClassifiedVector>& fields,
                                        const Checker& checker = {}) {
  if (fields.size() < 2) throw InvalidArgument("closure_check needs at least two fields");
  for (const auto& f : fields)
    if (!(f.field.chart() == g.chart())) throw ChartMismatch("closure_check: field on another chart");
  const Checker c = on_chart(checker, g.chart());
  const std::size_t N = fields.size();
  const std::size_t n = g.dim();
  const std::size_t points = 2 * N;

  std::set<std::string, std::less<>> symbols;
  for (const auto& f : fields)
    for (const auto& x : f.field.components())
      for (const auto& s : free_symbols(x)) symbols.insert(s);
  for (const auto& name : g.chart().coordinates()) symbols.insert(name);

  std::vector<Point> pts;
  DomainSampler sampler = c.sampler.fork("closure-points");
  Rng rng(sampler.seed());
  for (std::size_t p = 0; p < points; ++p)
    pts.push_back(*sample_admissible(sampler, symbols, rng, [&](const Point& q) -> std::optional<Point> {
      for (const auto& f : fields)
        for (const auto& x : f.field.components())
          if (!std::isfinite(eval_num(x, q))) return std::nullopt;
      return q;
    }));

  Eigen::MatrixXd basis(points * n, N);
  for (std::size_t k = 0; k < N; ++k)
    for (std::size_t p = 0; p < points; ++p)
      for (std::size_t i = 0; i < n; ++i) basis(p * n + i, k) = eval_num(fields[k].field[i], pts[p]);
  const Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(basis);

  StructureConstants out;
  out.c.assign(N, std::vector<std::vector<Rational>>(N, std::vector<Rational>(N, Rational(0))));
  for (std::size_t a = 0; a < N; ++a)
    for (std::size_t b = a + 1; b < N; ++b) {
      const VectorField br = commutator(fields[a].field, fields[b].field);
      if (br.is_zero_field()) continue;
      Eigen::VectorXd rhs(points * n);
      for (std::size_t p = 0; p < points; ++p)
        for (std::size_t i = 0; i < n; ++i) rhs(p * n + i) = eval_num(br[i], pts[p]);
      const Eigen::VectorXd sol = qr.solve(rhs);
      std::vector<Rational> coeffs(N, Rational(0));
      bool ok = true;
      for (std::size_t k = 0; k < N && ok; ++k) {
        auto r = rationalize(sol(k), 1000, 1e-7);
        if (!r) ok = false;
        else coeffs[k] = *r;
      }
      if (ok) {
        VectorField residual = br;
        for (std::size_t k = 0; k < N; ++k)
          if (!coeffs[k].is_zero()) residual = residual - Expr(coeffs[k]) * fields[k].field;
        for (std::size_t i = 0; i < n; ++i) {
          const auto rep = c.report(residual[i], "closure", (a * N + b) * n + i);
          out.max_residual = std::max(out.max_residual, rep.max_residual);
          ok = ok && rep.zero;
        }
      }
      if (!ok) {
        out.closed = false;
        out.failures.emplace_back(a, b);
        continue;
      }
      for (std::size_t k = 0; k < N; ++k) {
        out.c[a][b][k] = coeffs[k];
        out.c[b][a][k] = -coeffs[k];
      }
    }
  return out;
}

}  // namespace confsym
