#pragma once

#include <map>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "confsym/expr.hpp"

namespace confsym {

using Bindings = std::map<std::string, Expr, std::less<>>;

inline void collect_symbols(const Expr& e, std::set<std::string, std::less<>>& out) {
  if (e.is(Kind::Symbol)) {
    out.insert(e.name());
    return;
  }
  for (const auto& a : e.args()) collect_symbols(a, out);
}

inline std::set<std::string, std::less<>> free_symbols(const Expr& e) {
  std::set<std::string, std::less<>> out;
  collect_symbols(e, out);
  return out;
}

inline bool depends_on(const Expr& e, std::string_view var) {
  if (e.is(Kind::Symbol)) return e.name() == var;
  for (const auto& a : e.args())
    if (depends_on(a, var)) return true;
  return false;
}

namespace detail {

inline Expr diff_impl(const Expr& e, std::string_view var,
                      std::unordered_map<const Node*, Expr>& memo) {
  if (auto it = memo.find(e.node()); it != memo.end()) return it->second;
  Expr result;
  switch (e.kind()) {
    case Kind::Constant: result = Expr(0); break;
    case Kind::Symbol: result = Expr(e.name() == var ? 1 : 0); break;
    case Kind::Sum: {
      std::vector<Expr> terms;
      for (const auto& t : e.args()) terms.push_back(diff_impl(t, var, memo));
      result = add(std::move(terms));
      break;
    }
    case Kind::Product: {
      const auto f = e.args();
      std::vector<Expr> terms;
      for (std::size_t i = 0; i < f.size(); ++i) {
        Expr d = diff_impl(f[i], var, memo);
        if (d.is_zero()) continue;
        std::vector<Expr> parts(f.begin(), f.end());
        parts[i] = d;
        terms.push_back(mul(std::move(parts)));
      }
      result = add(std::move(terms));
      break;
    }
    case Kind::Power: {
      const Expr& b = e.base();
      const Expr& x = e.exponent();
      const Expr db = diff_impl(b, var, memo);
      if (!depends_on(x, var)) {
        result = db.is_zero() ? Expr(0) : mul({x, pow(b, x - Expr(1)), db});
      } else {
        const Expr dx = diff_impl(x, var, memo);
        // d(b^x) = b^x (x' ln b + x b'/b)
        result = mul({e, add({mul({dx, ln(b)}), mul({x, db, pow(b, Expr(-1))})})});
      }
      break;
    }
    case Kind::Apply: {
      const Expr& a = e.arg();
      const Expr da = diff_impl(a, var, memo);
      if (da.is_zero()) {
        result = Expr(0);
        break;
      }
      Expr outer;
      switch (e.function()) {
        case Function::Sin: outer = cos(a); break;
        case Function::Cos: outer = -sin(a); break;
        case Function::Tan: outer = Expr(1) + pow(tan(a), Expr(2)); break;
        case Function::Sinh: outer = cosh(a); break;
        case Function::Cosh: outer = sinh(a); break;
        case Function::Tanh: outer = Expr(1) - pow(tanh(a), Expr(2)); break;
        case Function::Exp: outer = e; break;
        case Function::Ln: outer = pow(a, Expr(-1)); break;
        case Function::Sqrt: outer = Expr::rational(1, 2) * pow(a, Expr::rational(-1, 2)); break;
      }
      result = mul({outer, da});
      break;
    }
  }
  memo.emplace(e.node(), result);
  return result;
}

}  // namespace detail

/// Partial derivative with respect to the symbol named `var`.
inline Expr diff(const Expr& e, std::string_view var) {
  std::unordered_map<const detail::Node*, Expr> memo;
  return detail::diff_impl(e, var, memo);
}

inline Expr diff(const Expr& e, const Expr& var) {
  if (!var.is(Kind::Symbol)) throw InvalidArgument("diff: variable must be a symbol");
  return diff(e, var.name());
}

/// Simultaneous substitution of symbols, followed by canonicalization.
inline Expr substitute(const Expr& e, const Bindings& bindings) {
  if (e.is(Kind::Symbol)) {
    if (auto it = bindings.find(e.name()); it != bindings.end()) return it->second;
    return e;
  }
  if (e.args().empty()) return e;
  std::vector<Expr> args;
  args.reserve(e.args().size());
  bool changed = false;
  for (const auto& a : e.args()) {
    args.push_back(substitute(a, bindings));
    changed = changed || args.back().node() != a.node();
  }
  return changed ? rebuild(e, std::move(args)) : e;
}

inline Expr substitute(const Expr& e, std::string_view var, const Expr& value) {
  return substitute(e, Bindings{{std::string(var), value}});
}

namespace detail {

inline Expr multiply_out(const std::vector<Expr>& factors) {
  // distribute over every sum factor
  std::vector<Expr> acc{Expr(1)};
  for (const auto& f : factors) {
    std::vector<Expr> next;
    if (f.is(Kind::Sum)) {
      for (const auto& a : acc)
        for (const auto& t : f.args()) next.push_back(mul({a, t}));
    } else {
      for (const auto& a : acc) next.push_back(mul({a, f}));
    }
    acc = std::move(next);
  }
  return add(std::move(acc));
}

}  // namespace detail

/// Distribute products over sums and multiply out positive integer powers of
/// sums. Denominators that are sums are left as negative powers.
inline Expr expand(const Expr& e) {
  switch (e.kind()) {
    case Kind::Constant:
    case Kind::Symbol: return e;
    case Kind::Apply: return apply(e.function(), expand(e.arg()));
    case Kind::Sum: {
      std::vector<Expr> terms;
      for (const auto& t : e.args()) terms.push_back(expand(t));
      return add(std::move(terms));
    }
    case Kind::Product: {
      std::vector<Expr> factors;
      for (const auto& f : e.args()) factors.push_back(expand(f));
      return detail::multiply_out(factors);
    }
    case Kind::Power: {
      const Expr b = expand(e.base());
      const Expr x = expand(e.exponent());
      Expr p = pow(b, x);
      if (p.is(Kind::Power) && p.base().is(Kind::Sum) && p.exponent().is_constant()) {
        const Rational& r = p.exponent().value();
        if (r.is_integer() && r.num() > 1 && r.num() <= 12) {
          std::vector<Expr> factors(static_cast<std::size_t>(r.num()), p.base());
          return detail::multiply_out(factors);
        }
      }
      if (p.is(Kind::Product)) return expand(p);
      return p;
    }
  }
  return e;
}

/// True when the two expressions agree after expansion and canonicalization.
inline bool structurally_equal(const Expr& a, const Expr& b) { return expand(a - b).is_zero(); }

}  // namespace confsym
