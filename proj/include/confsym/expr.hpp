#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "confsym/error.hpp"
#include "confsym/rational.hpp"

namespace confsym {

// Declaration order doubles as the canonical ordering rank of node kinds.
enum class Kind : std::uint8_t { Constant, Symbol, Apply, Power, Product, Sum };

enum class Function : std::uint8_t { Sin, Cos, Tan, Sinh, Cosh, Tanh, Exp, Ln, Sqrt };

enum class SymbolKind : std::uint8_t { Coordinate, Parameter, Dependent };

inline std::string_view function_name(Function f) {
  switch (f) {
    case Function::Sin: return "sin";
    case Function::Cos: return "cos";
    case Function::Tan: return "tan";
    case Function::Sinh: return "sinh";
    case Function::Cosh: return "cosh";
    case Function::Tanh: return "tanh";
    case Function::Exp: return "exp";
    case Function::Ln: return "ln";
    case Function::Sqrt: return "sqrt";
  }
  return "?";
}

inline std::optional<Function> function_from_name(std::string_view name) {
  static constexpr std::pair<std::string_view, Function> table[] = {
      {"sin", Function::Sin},   {"cos", Function::Cos},   {"tan", Function::Tan},
      {"sinh", Function::Sinh}, {"cosh", Function::Cosh}, {"tanh", Function::Tanh},
      {"exp", Function::Exp},   {"ln", Function::Ln},     {"sqrt", Function::Sqrt}};
  for (const auto& [n, f] : table)
    if (n == name) return f;
  return std::nullopt;
}

class Expr;

namespace detail {
struct Node;
}

/// Immutable symbolic expression. Every value is kept in canonical form: sums
/// and products are flat, rational constants are folded, like terms and like
/// bases are collected, and children appear in a deterministic total order.
class Expr {
 public:
  Expr();
  Expr(std::int64_t v);  // NOLINT
  Expr(int v) : Expr(static_cast<std::int64_t>(v)) {}  // NOLINT
  Expr(const Rational& v);  // NOLINT

  static Expr symbol(std::string name, SymbolKind kind = SymbolKind::Parameter);
  static Expr rational(std::int64_t num, std::int64_t den) { return Expr(Rational(num, den)); }

  [[nodiscard]] Kind kind() const;
  [[nodiscard]] const Rational& value() const;
  [[nodiscard]] const std::string& name() const;
  [[nodiscard]] SymbolKind symbol_kind() const;
  [[nodiscard]] Function function() const;
  [[nodiscard]] std::span<const Expr> args() const;
  [[nodiscard]] const Expr& base() const { return args()[0]; }
  [[nodiscard]] const Expr& exponent() const { return args()[1]; }
  [[nodiscard]] const Expr& arg() const { return args()[0]; }
  [[nodiscard]] std::size_t hash() const;

  [[nodiscard]] bool is(Kind k) const { return kind() == k; }
  [[nodiscard]] bool is_constant() const { return kind() == Kind::Constant; }
  [[nodiscard]] bool is_zero() const { return is_constant() && value().is_zero(); }
  [[nodiscard]] bool is_one() const { return is_constant() && value().is_one(); }
  [[nodiscard]] bool is_symbol(std::string_view n) const {
    return kind() == Kind::Symbol && name() == n;
  }
  [[nodiscard]] bool is_function(Function f) const {
    return kind() == Kind::Apply && function() == f;
  }
  [[nodiscard]] std::optional<Rational> as_rational() const {
    if (is_constant()) return value();
    return std::nullopt;
  }

  [[nodiscard]] const detail::Node* node() const { return node_.get(); }

 private:
  friend struct detail::Node;
  explicit Expr(std::shared_ptr<const detail::Node> n) : node_(std::move(n)) {}
  friend Expr make_node(Kind, Rational, std::string, SymbolKind, Function, std::vector<Expr>);

  std::shared_ptr<const detail::Node> node_;
};

namespace detail {

struct Node {
  Kind kind = Kind::Constant;
  Rational value;
  std::string name;
  SymbolKind symbol_kind = SymbolKind::Parameter;
  Function fn = Function::Exp;
  std::vector<Expr> args;
  std::size_t hash = 0;
};

inline std::size_t mix(std::size_t seed, std::size_t v) {
  return seed ^ (v + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2));
}

}  // namespace detail

inline Expr make_node(Kind kind, Rational value, std::string name, SymbolKind skind, Function fn,
                      std::vector<Expr> args) {
  auto n = std::make_shared<detail::Node>();
  n->kind = kind;
  n->value = value;
  n->name = std::move(name);
  n->symbol_kind = skind;
  n->fn = fn;
  n->args = std::move(args);
  std::size_t h = static_cast<std::size_t>(kind) * 1000003u;
  switch (kind) {
    case Kind::Constant:
      h = detail::mix(h, std::hash<std::int64_t>{}(value.num()));
      h = detail::mix(h, std::hash<std::int64_t>{}(value.den()));
      break;
    case Kind::Symbol: h = detail::mix(h, std::hash<std::string>{}(n->name)); break;
    case Kind::Apply: h = detail::mix(h, static_cast<std::size_t>(fn)); [[fallthrough]];
    default:
      for (const auto& a : n->args) h = detail::mix(h, a.hash());
  }
  n->hash = h;
  return Expr(std::shared_ptr<const detail::Node>(std::move(n)));
}

namespace detail {
inline const Expr& zero_constant() {
  static const Expr z = make_node(Kind::Constant, Rational(0), {}, SymbolKind::Parameter,
                                  Function::Exp, {});
  return z;
}
}  // namespace detail

inline Expr::Expr() : node_(detail::zero_constant().node_) {}
inline Expr::Expr(std::int64_t v) : Expr(Rational(v)) {}
inline Expr::Expr(const Rational& v)
    : node_(make_node(Kind::Constant, v, {}, SymbolKind::Parameter, Function::Exp, {}).node_) {}

inline Expr Expr::symbol(std::string name, SymbolKind kind) {
  return make_node(Kind::Symbol, Rational(0), std::move(name), kind, Function::Exp, {});
}

inline Kind Expr::kind() const { return node_->kind; }
inline const Rational& Expr::value() const { return node_->value; }
inline const std::string& Expr::name() const { return node_->name; }
inline SymbolKind Expr::symbol_kind() const { return node_->symbol_kind; }
inline Function Expr::function() const { return node_->fn; }
inline std::span<const Expr> Expr::args() const { return node_->args; }
inline std::size_t Expr::hash() const { return node_->hash; }

/// Three-way structural comparison defining the canonical order.
/// Symbols compare by name only; their kind is metadata.
inline int compare(const Expr& a, const Expr& b) {
  if (a.node() == b.node()) return 0;
  if (a.kind() != b.kind()) return a.kind() < b.kind() ? -1 : 1;
  switch (a.kind()) {
    case Kind::Constant: {
      const auto c = a.value() <=> b.value();
      return c < 0 ? -1 : (c > 0 ? 1 : 0);
    }
    case Kind::Symbol: {
      const int c = a.name().compare(b.name());
      return c < 0 ? -1 : (c > 0 ? 1 : 0);
    }
    case Kind::Apply:
      if (a.function() != b.function()) return a.function() < b.function() ? -1 : 1;
      return compare(a.arg(), b.arg());
    default: {
      if (a.hash() == b.hash() && a.args().size() == b.args().size()) {
        bool same = true;
        for (std::size_t i = 0; i < a.args().size() && same; ++i)
          same = compare(a.args()[i], b.args()[i]) == 0;
        if (same) return 0;
      }
      const auto aa = a.args();
      const auto bb = b.args();
      const std::size_t n = std::min(aa.size(), bb.size());
      for (std::size_t i = 0; i < n; ++i)
        if (const int c = compare(aa[i], bb[i]); c != 0) return c;
      if (aa.size() != bb.size()) return aa.size() < bb.size() ? -1 : 1;
      return 0;
    }
  }
}

inline bool operator==(const Expr& a, const Expr& b) {
  if (a.node() == b.node()) return true;
  if (a.hash() != b.hash()) return false;
  return compare(a, b) == 0;
}
inline bool operator!=(const Expr& a, const Expr& b) { return !(a == b); }

struct ExprLess {
  bool operator()(const Expr& a, const Expr& b) const { return compare(a, b) < 0; }
};

struct ExprHash {
  std::size_t operator()(const Expr& e) const { return e.hash(); }
};

Expr add(std::vector<Expr> terms);
Expr mul(std::vector<Expr> factors);
Expr pow(const Expr& base, const Expr& exponent);
Expr apply(Function fn, const Expr& arg);

namespace detail {

inline Expr raw(Kind k, std::vector<Expr> args) {
  return make_node(k, Rational(0), {}, SymbolKind::Parameter, Function::Exp, std::move(args));
}

/// Split a non-sum term into (rational coefficient, remaining monomial).
inline std::pair<Rational, Expr> split_coefficient(const Expr& t) {
  if (t.is(Kind::Product) && t.args().front().is_constant()) {
    const auto a = t.args();
    if (a.size() == 2) return {a[0].value(), a[1]};
    return {a[0].value(), raw(Kind::Product, std::vector<Expr>(a.begin() + 1, a.end()))};
  }
  return {Rational(1), t};
}

inline Expr make_term(const Rational& c, const Expr& rest) {
  if (c.is_one()) return rest;
  std::vector<Expr> f;
  f.emplace_back(c);
  if (rest.is(Kind::Product))
    f.insert(f.end(), rest.args().begin(), rest.args().end());
  else
    f.push_back(rest);
  return raw(Kind::Product, std::move(f));
}

/// Exact q-th root of a non-negative integer, if one exists.
inline std::optional<std::int64_t> exact_root(std::int64_t v, std::int64_t q) {
  if (v < 0) return std::nullopt;
  if (v <= 1) return v;
  const auto guess = static_cast<std::int64_t>(std::llround(std::pow(static_cast<double>(v), 1.0 / q)));
  for (std::int64_t c = std::max<std::int64_t>(0, guess - 1); c <= guess + 1; ++c) {
    __int128 p = 1;
    for (std::int64_t i = 0; i < q && p <= v; ++i) p *= c;
    if (p == v) return c;
  }
  return std::nullopt;
}

inline bool is_negative_term(const Expr& e) {
  if (e.is_constant()) return e.value().is_negative();
  return e.is(Kind::Product) && e.args().front().is_constant() && e.args().front().value().is_negative();
}

}  // namespace detail

inline Expr add(std::vector<Expr> terms) {
  Rational constant(0);
  std::map<Expr, Rational, ExprLess> coeffs;
  std::vector<Expr> pending = std::move(terms);
  std::vector<Expr> flat;
  flat.reserve(pending.size());
  for (auto& t : pending) {
    if (t.is(Kind::Sum))
      flat.insert(flat.end(), t.args().begin(), t.args().end());
    else
      flat.push_back(std::move(t));
  }
  for (const auto& t : flat) {
    if (t.is_constant()) {
      constant += t.value();
      continue;
    }
    auto [c, rest] = detail::split_coefficient(t);
    auto [it, inserted] = coeffs.try_emplace(rest, c);
    if (!inserted) it->second += c;
  }
  std::vector<Expr> out;
  if (!constant.is_zero()) out.emplace_back(constant);
  for (const auto& [rest, c] : coeffs)
    if (!c.is_zero()) out.push_back(detail::make_term(c, rest));
  if (out.empty()) return Expr(0);
  if (out.size() == 1) return out.front();
  return detail::raw(Kind::Sum, std::move(out));
}

inline Expr mul(std::vector<Expr> factors) {
  Rational coeff(1);
  std::map<Expr, std::vector<Expr>, ExprLess> exponents;
  std::vector<Expr> exp_args;
  std::vector<Expr> flat;
  flat.reserve(factors.size());
  for (auto& f : factors) {
    if (f.is(Kind::Product))
      flat.insert(flat.end(), f.args().begin(), f.args().end());
    else
      flat.push_back(std::move(f));
  }
  for (const auto& f : flat) {
    if (f.is_constant()) {
      if (f.value().is_zero()) return Expr(0);
      coeff *= f.value();
    } else if (f.is_function(Function::Exp)) {
      exp_args.push_back(f.arg());
    } else if (f.is(Kind::Power)) {
      exponents[f.base()].push_back(f.exponent());
    } else {
      exponents[f].push_back(Expr(1));
    }
  }
  std::vector<Expr> out;
  auto absorb = [&](const Expr& f) {
    if (f.is_constant())
      coeff *= f.value();
    else if (f.is(Kind::Product))
      for (const auto& g : f.args()) {
        if (g.is_constant())
          coeff *= g.value();
        else
          out.push_back(g);
      }
    else
      out.push_back(f);
  };
  for (auto& [b, es] : exponents) {
    Expr e = es.size() == 1 ? es.front() : add(es);
    if (e.is_zero()) continue;
    absorb(pow(b, e));
  }
  if (!exp_args.empty()) absorb(apply(Function::Exp, add(std::move(exp_args))));
  if (coeff.is_zero()) return Expr(0);
  std::sort(out.begin(), out.end(), ExprLess{});
  if (out.empty()) return Expr(coeff);
  if (out.size() == 1 && coeff.is_one()) return out.front();
  if (!coeff.is_one()) out.insert(out.begin(), Expr(coeff));
  return detail::raw(Kind::Product, std::move(out));
}

inline Expr pow(const Expr& base, const Expr& exponent) {
  if (exponent.is_constant()) {
    const Rational& e = exponent.value();
    if (e.is_zero()) return Expr(1);
    if (e.is_one()) return base;
    if (base.is_constant()) {
      const Rational& b = base.value();
      if (b.is_zero()) {
        if (e.is_negative()) throw DomainError("division by zero", "0^" + e.str());
        return Expr(0);
      }
      if (e.is_integer()) return Expr(b.pow(e.num()));
      if (!b.is_negative()) {
        auto rn = detail::exact_root(b.num(), e.den());
        auto rd = detail::exact_root(b.den(), e.den());
        if (rn && rd) return Expr(Rational(*rn, *rd).pow(e.num()));
      }
    } else if (e.is_integer()) {
      if (base.is(Kind::Power)) return pow(base.base(), mul({base.exponent(), exponent}));
      if (base.is(Kind::Product)) {
        std::vector<Expr> f;
        for (const auto& g : base.args()) f.push_back(pow(g, exponent));
        return mul(std::move(f));
      }
    }
  }
  if (base.is_one()) return Expr(1);
  if (base.is_function(Function::Exp)) return apply(Function::Exp, mul({base.arg(), exponent}));
  return detail::raw(Kind::Power, {base, exponent});
}

inline Expr apply(Function fn, const Expr& a) {
  if (fn == Function::Sqrt) return pow(a, Expr::rational(1, 2));
  if (a.is_zero()) {
    switch (fn) {
      case Function::Sin:
      case Function::Tan:
      case Function::Sinh:
      case Function::Tanh: return Expr(0);
      case Function::Cos:
      case Function::Cosh:
      case Function::Exp: return Expr(1);
      case Function::Ln: throw DomainError("logarithm of zero", "ln(0)");
      default: break;
    }
  }
  if (fn == Function::Ln) {
    if (a.is_one()) return Expr(0);
    if (a.is_function(Function::Exp)) return a.arg();
  }
  if (fn == Function::Exp && a.is_function(Function::Ln)) return a.arg();
  if (detail::is_negative_term(a) && fn != Function::Exp && fn != Function::Ln) {
    const Expr neg = mul({Expr(-1), a});
    switch (fn) {
      case Function::Cos:
      case Function::Cosh: return apply(fn, neg);
      default: return mul({Expr(-1), apply(fn, neg)});
    }
  }
  return make_node(Kind::Apply, Rational(0), {}, SymbolKind::Parameter, fn, {a});
}

inline Expr operator+(const Expr& a, const Expr& b) { return add({a, b}); }
inline Expr operator-(const Expr& a) { return mul({Expr(-1), a}); }
inline Expr operator-(const Expr& a, const Expr& b) { return add({a, mul({Expr(-1), b})}); }
inline Expr operator*(const Expr& a, const Expr& b) { return mul({a, b}); }
inline Expr operator/(const Expr& a, const Expr& b) { return mul({a, pow(b, Expr(-1))}); }
inline Expr& operator+=(Expr& a, const Expr& b) { return a = a + b; }
inline Expr& operator-=(Expr& a, const Expr& b) { return a = a - b; }
inline Expr& operator*=(Expr& a, const Expr& b) { return a = a * b; }

inline Expr sym(std::string name, SymbolKind kind = SymbolKind::Parameter) {
  return Expr::symbol(std::move(name), kind);
}
inline Expr sin(const Expr& a) { return apply(Function::Sin, a); }
inline Expr cos(const Expr& a) { return apply(Function::Cos, a); }
inline Expr tan(const Expr& a) { return apply(Function::Tan, a); }
inline Expr sinh(const Expr& a) { return apply(Function::Sinh, a); }
inline Expr cosh(const Expr& a) { return apply(Function::Cosh, a); }
inline Expr tanh(const Expr& a) { return apply(Function::Tanh, a); }
inline Expr exp(const Expr& a) { return apply(Function::Exp, a); }
inline Expr ln(const Expr& a) { return apply(Function::Ln, a); }
inline Expr sqrt(const Expr& a) { return apply(Function::Sqrt, a); }

/// Rebuild a node from new children through the canonicalizing constructors.
inline Expr rebuild(const Expr& e, std::vector<Expr> args) {
  switch (e.kind()) {
    case Kind::Sum: return add(std::move(args));
    case Kind::Product: return mul(std::move(args));
    case Kind::Power: return pow(args[0], args[1]);
    case Kind::Apply: return apply(e.function(), args[0]);
    default: return e;
  }
}

/// Re-run canonicalization over the whole tree; a fixed point for canonical input.
inline Expr canonicalize(const Expr& e) {
  if (e.args().empty()) return e;
  std::vector<Expr> args;
  args.reserve(e.args().size());
  for (const auto& a : e.args()) args.push_back(canonicalize(a));
  return rebuild(e, std::move(args));
}

}  // namespace confsym

template <>
struct std::hash<confsym::Expr> {
  std::size_t operator()(const confsym::Expr& e) const noexcept { return e.hash(); }
};
