#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "confsym/expr.hpp"

namespace confsym {

namespace detail {

enum Precedence : int { kSum = 1, kProduct = 2, kPower = 3 };

std::string print_impl(const Expr& e, int context);

inline bool is_atom_for_power(const Expr& e) {
  if (e.is(Kind::Symbol) || e.is(Kind::Apply)) return true;
  return e.is_constant() && e.value().is_integer() && !e.value().is_negative();
}

inline std::string print_power(const Expr& base, const Expr& exponent) {
  std::string b = print_impl(base, 0);
  if (!is_atom_for_power(base)) b = "(" + b + ")";
  std::string x = print_impl(exponent, 0);
  if (!is_atom_for_power(exponent)) x = "(" + x + ")";
  return b + "^" + x;
}

inline std::string print_product(const Expr& e) {
  Rational c(1);
  std::vector<Expr> num;
  std::vector<Expr> den;
  for (const auto& f : e.args()) {
    if (f.is_constant()) {
      c *= f.value();
    } else if (f.is(Kind::Power) && f.exponent().is_constant() && f.exponent().value().is_negative()) {
      den.push_back(pow(f.base(), Expr(-f.exponent().value())));
    } else {
      num.push_back(f);
    }
  }
  const bool negative = c.is_negative();
  const Rational mag = negative ? -c : c;
  auto factor_str = [](const Expr& f) {
    std::string s = print_impl(f, 0);
    if (f.is(Kind::Sum) || f.is(Kind::Product)) s = "(" + s + ")";
    return s;
  };
  std::string out;
  auto append = [&](const std::string& s) {
    if (!out.empty()) out += "*";
    out += s;
  };
  if (mag.num() != 1 || num.empty()) append(std::to_string(mag.num()));
  for (const auto& f : num) append(factor_str(f));
  std::vector<std::string> d;
  if (mag.den() != 1) d.push_back(std::to_string(mag.den()));
  for (const auto& f : den) d.push_back(factor_str(f));
  if (!d.empty()) {
    out += "/";
    if (d.size() == 1) {
      out += d.front();
    } else {
      out += "(";
      for (std::size_t i = 0; i < d.size(); ++i) out += (i ? "*" : "") + d[i];
      out += ")";
    }
  }
  return negative ? "-" + out : out;
}

inline std::string print_impl(const Expr& e, int context) {
  switch (e.kind()) {
    case Kind::Constant: {
      std::string s = e.value().str();
      if (context >= kProduct && (e.value().is_negative() || !e.value().is_integer()))
        return "(" + s + ")";
      return s;
    }
    case Kind::Symbol: return e.name();
    case Kind::Apply: return std::string(function_name(e.function())) + "(" + print_impl(e.arg(), 0) + ")";
    case Kind::Power:
      if (e.exponent().is_constant() && e.exponent().value().is_negative()) {
        std::string s = print_product(raw(Kind::Product, {Expr(1), e}));
        return context >= kPower ? "(" + s + ")" : s;
      }
      return print_power(e.base(), e.exponent());
    case Kind::Product: {
      std::string s = print_product(e);
      return context >= kPower ? "(" + s + ")" : s;
    }
    case Kind::Sum: {
      std::vector<Expr> terms;
      Expr constant;
      bool has_constant = false;
      for (const auto& t : e.args()) {
        if (t.is_constant()) {
          constant = t;
          has_constant = true;
        } else {
          terms.push_back(t);
        }
      }
      if (has_constant) terms.push_back(constant);
      std::string out;
      for (std::size_t i = 0; i < terms.size(); ++i) {
        std::string s = print_impl(terms[i], kSum);
        if (i == 0) {
          out = s;
        } else if (!s.empty() && s[0] == '-') {
          out += " - " + s.substr(1);
        } else {
          out += " + " + s;
        }
      }
      return context > kSum ? "(" + out + ")" : out;
    }
  }
  return "?";
}

}  // namespace detail

/// Deterministic infix rendering in the same grammar `parse` accepts.
inline std::string to_string(const Expr& e) { return detail::print_impl(e, 0); }

inline std::ostream& operator<<(std::ostream& os, const Expr& e) { return os << to_string(e); }

}  // namespace confsym
