#pragma once

#include <cmath>
#include <map>
#include <string>

#include "confsym/expr.hpp"
#include "confsym/print.hpp"

namespace confsym {

/// Numeric bindings for free symbols.
using Point = std::map<std::string, double, std::less<>>;

namespace detail {

inline double eval_impl(const Expr& e, const Point& p) {
  switch (e.kind()) {
    case Kind::Constant: return e.value().to_double();
    case Kind::Symbol: {
      auto it = p.find(e.name());
      if (it == p.end()) throw UnboundSymbolError(e.name());
      return it->second;
    }
    case Kind::Sum: {
      double s = 0.0;
      for (const auto& t : e.args()) s += eval_impl(t, p);
      return s;
    }
    case Kind::Product: {
      double s = 1.0;
      for (const auto& t : e.args()) s *= eval_impl(t, p);
      return s;
    }
    case Kind::Power: {
      const double b = eval_impl(e.base(), p);
      if (e.exponent().is_constant() && e.exponent().value().is_integer()) {
        const auto n = e.exponent().value().num();
        if (b == 0.0 && n < 0) throw DomainError("division by zero", to_string(e));
        return std::pow(b, static_cast<double>(n));
      }
      const double x = eval_impl(e.exponent(), p);
      if (b < 0.0) throw DomainError("non-integer power of a negative number", to_string(e));
      if (b == 0.0) {
        if (x <= 0.0) throw DomainError("non-positive power of zero", to_string(e));
        return 0.0;
      }
      return std::exp(x * std::log(b));
    }
    case Kind::Apply: {
      const double a = eval_impl(e.arg(), p);
      switch (e.function()) {
        case Function::Sin: return std::sin(a);
        case Function::Cos: return std::cos(a);
        case Function::Tan: return std::tan(a);
        case Function::Sinh: return std::sinh(a);
        case Function::Cosh: return std::cosh(a);
        case Function::Tanh: return std::tanh(a);
        case Function::Exp: return std::exp(a);
        case Function::Ln:
          if (a <= 0.0) throw DomainError("logarithm of a non-positive number", to_string(e));
          return std::log(a);
        case Function::Sqrt:
          if (a < 0.0) throw DomainError("square root of a negative number", to_string(e));
          return std::sqrt(a);
      }
    }
  }
  return 0.0;
}

}  // namespace detail

/// Evaluate in IEEE double precision. Throws UnboundSymbolError or DomainError.
inline double eval_num(const Expr& e, const Point& p) { return detail::eval_impl(e, p); }

}  // namespace confsym
