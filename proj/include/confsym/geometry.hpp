#pragma once

#include <map>
#include <memory>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "confsym/calculus.hpp"
#include "confsym/eval.hpp"
#include "confsym/zero_test.hpp"

namespace confsym {

using Matrix = std::vector<std::vector<Expr>>;

inline Matrix zero_matrix(std::size_t n) { return Matrix(n, std::vector<Expr>(n, Expr(0))); }

inline Matrix diagonal(const std::vector<Expr>& d) {
  Matrix m = zero_matrix(d.size());
  for (std::size_t i = 0; i < d.size(); ++i) m[i][i] = d[i];
  return m;
}

/// Ordered coordinate names plus the sampling box used by zero tests.
class Chart {
 public:
  Chart() = default;
  explicit Chart(std::vector<std::string> coordinates,
                 std::map<std::string, Range, std::less<>> ranges = {})
      : coords_(std::move(coordinates)), ranges_(std::move(ranges)) {
    if (coords_.empty()) throw InvalidArgument("chart needs at least one coordinate");
    std::set<std::string> seen;
    for (const auto& c : coords_)
      if (!seen.insert(c).second) throw InvalidArgument("duplicate coordinate '" + c + "'");
  }

  [[nodiscard]] std::size_t dim() const { return coords_.size(); }
  [[nodiscard]] const std::vector<std::string>& coordinates() const { return coords_; }
  [[nodiscard]] const std::string& name(std::size_t i) const { return coords_.at(i); }
  [[nodiscard]] Expr coord(std::size_t i) const { return sym(coords_.at(i), SymbolKind::Coordinate); }
  [[nodiscard]] std::optional<std::size_t> index_of(std::string_view n) const {
    for (std::size_t i = 0; i < coords_.size(); ++i)
      if (coords_[i] == n) return i;
    return std::nullopt;
  }
  [[nodiscard]] bool has(std::string_view n) const { return index_of(n).has_value(); }
  [[nodiscard]] const std::map<std::string, Range, std::less<>>& ranges() const { return ranges_; }
  Chart& set_range(const std::string& n, double lo, double hi) {
    ranges_[n] = Range{lo, hi};
    return *this;
  }

  friend bool operator==(const Chart& a, const Chart& b) { return a.coords_ == b.coords_; }

 private:
  std::vector<std::string> coords_;
  std::map<std::string, Range, std::less<>> ranges_;
};

/// Checker restricted to the chart's sampling box.
inline Checker on_chart(const Checker& c, const Chart& chart) { return c.with_ranges(chart.ranges()); }

class Metric {
 public:
  Metric() = default;
  Metric(Chart chart, Matrix g) : chart_(std::move(chart)), g_(std::move(g)) {
    const std::size_t n = chart_.dim();
    if (g_.size() != n) throw InvalidArgument("metric size does not match chart dimension");
    for (const auto& row : g_)
      if (row.size() != n) throw InvalidArgument("metric must be square");
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j)
        if (!structurally_equal(g_[i][j], g_[j][i]))
          throw InvalidArgument("metric is not symmetric at (" + std::to_string(i) + "," +
                                std::to_string(j) + ")");
  }

  [[nodiscard]] const Chart& chart() const { return chart_; }
  [[nodiscard]] std::size_t dim() const { return chart_.dim(); }
  [[nodiscard]] const Matrix& components() const { return g_; }
  [[nodiscard]] const Expr& operator()(std::size_t i, std::size_t j) const { return g_[i][j]; }
  [[nodiscard]] bool is_diagonal() const {
    for (std::size_t i = 0; i < dim(); ++i)
      for (std::size_t j = 0; j < dim(); ++j)
        if (i != j && !g_[i][j].is_zero()) return false;
    return true;
  }

 private:
  Chart chart_;
  Matrix g_;
};

class VectorField {
 public:
  VectorField() = default;
  VectorField(Chart chart, std::vector<Expr> components)
      : chart_(std::move(chart)), xi_(std::move(components)) {
    if (xi_.size() != chart_.dim()) throw InvalidArgument("vector field size does not match chart");
  }

  static VectorField zero(const Chart& chart) {
    return VectorField(chart, std::vector<Expr>(chart.dim(), Expr(0)));
  }
  /// Coordinate basis field d/dx^i.
  static VectorField basis(const Chart& chart, std::size_t i) {
    auto v = zero(chart);
    v.xi_.at(i) = Expr(1);
    return v;
  }

  [[nodiscard]] const Chart& chart() const { return chart_; }
  [[nodiscard]] std::size_t dim() const { return xi_.size(); }
  [[nodiscard]] const std::vector<Expr>& components() const { return xi_; }
  [[nodiscard]] const Expr& operator[](std::size_t i) const { return xi_[i]; }

  /// Directional derivative X(f) = xi^i f_,i.
  [[nodiscard]] Expr apply_to(const Expr& f) const {
    std::vector<Expr> t;
    for (std::size_t i = 0; i < dim(); ++i)
      if (!xi_[i].is_zero()) t.push_back(xi_[i] * diff(f, chart_.name(i)));
    return add(std::move(t));
  }

  [[nodiscard]] bool is_zero_field() const {
    for (const auto& c : xi_)
      if (!c.is_zero()) return false;
    return true;
  }

  friend VectorField operator+(const VectorField& a, const VectorField& b) {
    require_same(a, b);
    std::vector<Expr> c;
    for (std::size_t i = 0; i < a.dim(); ++i) c.push_back(a.xi_[i] + b.xi_[i]);
    return {a.chart_, std::move(c)};
  }
  friend VectorField operator-(const VectorField& a, const VectorField& b) {
    require_same(a, b);
    std::vector<Expr> c;
    for (std::size_t i = 0; i < a.dim(); ++i) c.push_back(a.xi_[i] - b.xi_[i]);
    return {a.chart_, std::move(c)};
  }
  friend VectorField operator*(const Expr& s, const VectorField& a) {
    std::vector<Expr> c;
    for (const auto& x : a.xi_) c.push_back(s * x);
    return {a.chart_, std::move(c)};
  }

  static void require_same(const VectorField& a, const VectorField& b) {
    if (!(a.chart_ == b.chart_)) throw ChartMismatch("vector fields live on different charts");
  }

 private:
  Chart chart_;
  std::vector<Expr> xi_;
};

namespace detail {

inline Expr determinant_impl(const Matrix& m, std::vector<std::size_t>& rows, std::size_t col,
                             std::map<std::pair<std::vector<std::size_t>, std::size_t>, Expr>& memo) {
  if (rows.size() == 1) return m[rows[0]][col];
  auto key = std::make_pair(rows, col);
  if (auto it = memo.find(key); it != memo.end()) return it->second;
  std::vector<Expr> terms;
  for (std::size_t k = 0; k < rows.size(); ++k) {
    const Expr& a = m[rows[k]][col];
    if (a.is_zero()) continue;
    std::vector<std::size_t> rest;
    for (std::size_t j = 0; j < rows.size(); ++j)
      if (j != k) rest.push_back(rows[j]);
    Expr minor = determinant_impl(m, rest, col + 1, memo);
    terms.push_back(k % 2 == 0 ? a * minor : -(a * minor));
  }
  Expr r = add(std::move(terms));
  memo.emplace(std::move(key), r);
  return r;
}

}  // namespace detail

/// Laplace expansion along columns with memoized minors.
inline Expr determinant(const Matrix& m) {
  const std::size_t n = m.size();
  if (n == 0) return Expr(1);
  bool diag = true;
  for (std::size_t i = 0; i < n && diag; ++i)
    for (std::size_t j = 0; j < n && diag; ++j) diag = i == j || m[i][j].is_zero();
  if (diag) {
    std::vector<Expr> f;
    for (std::size_t i = 0; i < n; ++i) f.push_back(m[i][i]);
    return mul(std::move(f));
  }
  std::vector<std::size_t> rows(n);
  for (std::size_t i = 0; i < n; ++i) rows[i] = i;
  std::map<std::pair<std::vector<std::size_t>, std::size_t>, Expr> memo;
  return detail::determinant_impl(m, rows, 0, memo);
}

inline Expr determinant(const Metric& g) { return determinant(g.components()); }

/// Cofactor inverse; n <= 6.
inline Matrix inverse(const Matrix& m) {
  const std::size_t n = m.size();
  if (n > 6) throw InvalidArgument("matrix inverse is limited to dimension 6");
  const Expr det = determinant(m);
  if (det.is_zero()) throw DegenerateMetric("matrix is singular");
  Matrix inv = zero_matrix(n);
  bool diag = true;
  for (std::size_t i = 0; i < n && diag; ++i)
    for (std::size_t j = 0; j < n && diag; ++j) diag = i == j || m[i][j].is_zero();
  if (diag) {
    for (std::size_t i = 0; i < n; ++i) inv[i][i] = pow(m[i][i], Expr(-1));
    return inv;
  }
  const Expr inv_det = pow(det, Expr(-1));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      Matrix minor;
      for (std::size_t r = 0; r < n; ++r) {
        if (r == j) continue;
        std::vector<Expr> row;
        for (std::size_t c = 0; c < n; ++c)
          if (c != i) row.push_back(m[r][c]);
        minor.push_back(std::move(row));
      }
      Expr cof = determinant(minor);
      if ((i + j) % 2 == 1) cof = -cof;
      inv[i][j] = cof * inv_det;
    }
  return inv;
}

inline Matrix inverse_metric(const Metric& g) { return inverse(g.components()); }

/// Sign of det g at the centre of the chart's sampling box. Used to form
/// sqrt|g| for metrics whose determinant keeps one sign on the domain.
inline int determinant_sign(const Metric& g) {
  const Expr det = determinant(g);
  Point p;
  for (const auto& s : free_symbols(det)) {
    auto it = g.chart().ranges().find(s);
    const Range r = it == g.chart().ranges().end() ? Range{} : it->second;
    p[s] = 0.5 * (r.lo + r.hi);
  }
  const double v = eval_num(det, p);
  if (v == 0.0) throw DegenerateMetric("metric determinant vanishes at the chart centre");
  return v > 0 ? 1 : -1;
}

/// Throws DegenerateMetric when det g passes the zero test.
inline void require_nondegenerate(const Metric& g, const Checker& checker) {
  if (on_chart(checker, g.chart()).zero(determinant(g), "metric-determinant"))
    throw DegenerateMetric("metric determinant vanishes identically");
}

using Christoffel = std::vector<Matrix>;  // gamma[i][j][k] = Gamma^i_{jk}

/// Cached derived quantities of one metric.
class MetricGeometry {
 public:
  explicit MetricGeometry(Metric g) : g_(std::move(g)) {}

  [[nodiscard]] const Metric& metric() const { return g_; }
  [[nodiscard]] const Chart& chart() const { return g_.chart(); }
  [[nodiscard]] std::size_t dim() const { return g_.dim(); }

  const Matrix& inverse() {
    if (!inv_) inv_ = confsym::inverse_metric(g_);
    return *inv_;
  }

  const Expr& sqrt_abs_det() {
    if (!sqrt_det_) {
      const Expr det = determinant(g_);
      sqrt_det_ = sqrt(Expr(determinant_sign(g_)) * det);
    }
    return *sqrt_det_;
  }

  /// Gamma^i_{jk} = 1/2 g^{il}(g_{lj,k} + g_{lk,j} - g_{jk,l}).
  const Christoffel& christoffel() {
    if (gamma_) return *gamma_;
    const std::size_t n = dim();
    const Matrix& gi = inverse();
    std::vector<Matrix> dg(n);  // dg[k][i][j] = g_ij,k
    for (std::size_t k = 0; k < n; ++k) {
      dg[k] = zero_matrix(n);
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) dg[k][i][j] = diff(g_(i, j), chart().name(k));
    }
    Christoffel G(n, zero_matrix(n));
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        for (std::size_t k = j; k < n; ++k) {
          std::vector<Expr> t;
          for (std::size_t l = 0; l < n; ++l) {
            if (gi[i][l].is_zero()) continue;
            Expr s = dg[k][l][j] + dg[j][l][k] - dg[l][j][k];
            if (!s.is_zero()) t.push_back(gi[i][l] * s);
          }
          G[i][j][k] = Expr::rational(1, 2) * add(std::move(t));
          G[i][k][j] = G[i][j][k];
        }
    gamma_ = std::move(G);
    return *gamma_;
  }

  /// Gamma^k = g^{ij} Gamma^k_{ij}.
  const std::vector<Expr>& contracted_christoffel() {
    if (contracted_) return *contracted_;
    const auto& G = christoffel();
    const Matrix& gi = inverse();
    const std::size_t n = dim();
    std::vector<Expr> out(n);
    for (std::size_t k = 0; k < n; ++k) {
      std::vector<Expr> t;
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
          if (!gi[i][j].is_zero() && !G[k][i][j].is_zero()) t.push_back(gi[i][j] * G[k][i][j]);
      out[k] = add(std::move(t));
    }
    contracted_ = std::move(out);
    return *contracted_;
  }

  /// R_jl = R^i_{jil} with R^i_{jkl} = G^i_{jl,k} - G^i_{jk,l} + G^i_{mk}G^m_{jl} - G^i_{ml}G^m_{jk}.
  const Matrix& ricci_tensor() {
    if (ricci_) return *ricci_;
    const auto& G = christoffel();
    const std::size_t n = dim();
    Matrix R = zero_matrix(n);
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t l = j; l < n; ++l) {
        std::vector<Expr> t;
        for (std::size_t i = 0; i < n; ++i) {
          t.push_back(diff(G[i][j][l], chart().name(i)));
          t.push_back(-diff(G[i][j][i], chart().name(l)));
          for (std::size_t m = 0; m < n; ++m) {
            if (!G[i][m][i].is_zero() && !G[m][j][l].is_zero()) t.push_back(G[i][m][i] * G[m][j][l]);
            if (!G[i][m][l].is_zero() && !G[m][j][i].is_zero()) t.push_back(-(G[i][m][l] * G[m][j][i]));
          }
        }
        R[j][l] = add(std::move(t));
        R[l][j] = R[j][l];
      }
    ricci_ = std::move(R);
    return *ricci_;
  }

  const Expr& ricci_scalar() {
    if (scalar_) return *scalar_;
    const Matrix& R = ricci_tensor();
    const Matrix& gi = inverse();
    std::vector<Expr> t;
    for (std::size_t j = 0; j < dim(); ++j)
      for (std::size_t l = 0; l < dim(); ++l)
        if (!gi[j][l].is_zero() && !R[j][l].is_zero()) t.push_back(gi[j][l] * R[j][l]);
    scalar_ = add(std::move(t));
    return *scalar_;
  }

  /// Divergence form (1/sqrt|g|) d_i(sqrt|g| g^{ij} d_j u).
  Expr laplacian(const Expr& u) {
    const Matrix& gi = inverse();
    const Expr& s = sqrt_abs_det();
    const std::size_t n = dim();
    std::vector<Expr> du(n);
    for (std::size_t j = 0; j < n; ++j) du[j] = diff(u, chart().name(j));
    std::vector<Expr> t;
    for (std::size_t i = 0; i < n; ++i) {
      std::vector<Expr> flux;
      for (std::size_t j = 0; j < n; ++j)
        if (!gi[i][j].is_zero() && !du[j].is_zero()) flux.push_back(gi[i][j] * du[j]);
      if (flux.empty()) continue;
      t.push_back(diff(s * add(std::move(flux)), chart().name(i)));
    }
    return add(std::move(t)) / s;
  }

  /// g^{ij} u_,ij - Gamma^k u_,k.
  Expr laplacian_christoffel(const Expr& u) {
    const Matrix& gi = inverse();
    const auto& Gk = contracted_christoffel();
    const std::size_t n = dim();
    std::vector<Expr> t;
    for (std::size_t k = 0; k < n; ++k) {
      const Expr dk = diff(u, chart().name(k));
      if (dk.is_zero()) continue;
      if (!Gk[k].is_zero()) t.push_back(-(Gk[k] * dk));
      for (std::size_t i = 0; i < n; ++i)
        if (!gi[i][k].is_zero()) t.push_back(gi[i][k] * diff(dk, chart().name(i)));
    }
    return add(std::move(t));
  }

  /// phi_;ij = phi_,ij - Gamma^k_ij phi_,k.
  Matrix covariant_hessian(const Expr& phi) {
    const auto& G = christoffel();
    const std::size_t n = dim();
    std::vector<Expr> d(n);
    for (std::size_t k = 0; k < n; ++k) d[k] = diff(phi, chart().name(k));
    Matrix H = zero_matrix(n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i; j < n; ++j) {
        std::vector<Expr> t{diff(d[i], chart().name(j))};
        for (std::size_t k = 0; k < n; ++k)
          if (!G[k][i][j].is_zero() && !d[k].is_zero()) t.push_back(-(G[k][i][j] * d[k]));
        H[i][j] = add(std::move(t));
        H[j][i] = H[i][j];
      }
    return H;
  }

 private:
  Metric g_;
  std::optional<Matrix> inv_;
  std::optional<Expr> sqrt_det_;
  std::optional<Christoffel> gamma_;
  std::optional<std::vector<Expr>> contracted_;
  std::optional<Matrix> ricci_;
  std::optional<Expr> scalar_;
};

inline Christoffel christoffel(const Metric& g) { return MetricGeometry(g).christoffel(); }
inline std::vector<Expr> contracted_christoffel(const Metric& g) {
  return MetricGeometry(g).contracted_christoffel();
}
inline Expr ricci_scalar(const Metric& g) { return MetricGeometry(g).ricci_scalar(); }
inline Expr laplacian(const Metric& g, const Expr& u) { return MetricGeometry(g).laplacian(u); }
inline Expr laplacian_christoffel(const Metric& g, const Expr& u) {
  return MetricGeometry(g).laplacian_christoffel(u);
}
inline Matrix covariant_hessian(const Metric& g, const Expr& phi) {
  return MetricGeometry(g).covariant_hessian(phi);
}

/// (L_X g)_ij = X^k g_ij,k + g_kj X^k_,i + g_ik X^k_,j.
inline Matrix lie_derivative_metric(const Metric& g, const VectorField& X) {
  if (!(g.chart() == X.chart())) throw ChartMismatch("vector field and metric charts differ");
  const std::size_t n = g.dim();
  const Chart& c = g.chart();
  Matrix dX = zero_matrix(n);  // dX[k][i] = X^k_,i
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t i = 0; i < n; ++i) dX[k][i] = diff(X[k], c.name(i));
  Matrix L = zero_matrix(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j) {
      std::vector<Expr> t;
      for (std::size_t k = 0; k < n; ++k) {
        if (!X[k].is_zero()) t.push_back(X[k] * diff(g(i, j), c.name(k)));
        if (!g(k, j).is_zero()) t.push_back(g(k, j) * dX[k][i]);
        if (!g(i, k).is_zero()) t.push_back(g(i, k) * dX[k][j]);
      }
      L[i][j] = add(std::move(t));
      L[j][i] = L[i][j];
    }
  return L;
}

/// Lowered components X_i = g_ik X^k.
inline std::vector<Expr> lower(const Metric& g, const VectorField& X) {
  std::vector<Expr> out;
  for (std::size_t i = 0; i < g.dim(); ++i) {
    std::vector<Expr> t;
    for (std::size_t k = 0; k < g.dim(); ++k)
      if (!g(i, k).is_zero()) t.push_back(g(i, k) * X[k]);
    out.push_back(add(std::move(t)));
  }
  return out;
}

/// Raised gradient g^{ij} phi_,j as a vector field.
inline VectorField gradient(const Metric& g, const Expr& phi) {
  const Matrix gi = inverse_metric(g);
  std::vector<Expr> out;
  for (std::size_t i = 0; i < g.dim(); ++i) {
    std::vector<Expr> t;
    for (std::size_t j = 0; j < g.dim(); ++j)
      if (!gi[i][j].is_zero()) t.push_back(gi[i][j] * diff(phi, g.chart().name(j)));
    out.push_back(add(std::move(t)));
  }
  return {g.chart(), std::move(out)};
}

/// [X,Y]^i = X^k Y^i_,k - Y^k X^i_,k.
inline VectorField commutator(const VectorField& X, const VectorField& Y) {
  VectorField::require_same(X, Y);
  std::vector<Expr> out;
  for (std::size_t i = 0; i < X.dim(); ++i) out.push_back(X.apply_to(Y[i]) - Y.apply_to(X[i]));
  return {X.chart(), std::move(out)};
}

}  // namespace confsym
