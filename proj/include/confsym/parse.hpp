#pragma once

#include <cctype>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "confsym/expr.hpp"

namespace confsym {

/// Symbol declarations seen by the parser. Identifiers listed in
/// `coordinates` or `dependent` get that kind; everything else is a
/// parameter, unless `strict` is set, in which case it must be listed in
/// `parameters`.
struct ParseOptions {
  std::vector<std::string> coordinates;
  std::vector<std::string> dependent;
  std::vector<std::string> parameters;
  bool strict = false;
  std::size_t line = 1;          // reported in diagnostics
  std::size_t column_offset = 0; // added to reported columns
};

namespace detail {

// Grammar:
//   expr    := term (('+' | '-') term)*
//   term    := unary (('*' | '/') unary)*
//   unary   := ('-' | '+') unary | power
//   power   := primary ('^' unary)?
//   primary := number | ident | ident '(' expr ')' | '(' expr ')'
class ExprParser {
 public:
  ExprParser(std::string_view text, const ParseOptions& opts) : text_(text), opts_(opts) {}

  Expr parse() {
    skip_ws();
    if (at_end()) fail("empty expression");
    Expr e = parse_expr();
    skip_ws();
    if (!at_end()) fail(std::string("unexpected '") + text_[pos_] + "'");
    return e;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const {
    throw ParseError(msg, opts_.line, opts_.column_offset + pos_ + 1);
  }
  [[nodiscard]] bool at_end() const { return pos_ >= text_.size(); }
  void skip_ws() {
    while (!at_end() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }
  bool accept(char c) {
    skip_ws();
    if (!at_end() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  Expr parse_expr() {
    std::vector<Expr> terms{parse_term()};
    for (;;) {
      if (accept('+'))
        terms.push_back(parse_term());
      else if (accept('-'))
        terms.push_back(-parse_term());
      else
        break;
    }
    return add(std::move(terms));
  }

  Expr parse_term() {
    std::vector<Expr> factors{parse_unary()};
    for (;;) {
      if (accept('*')) {
        factors.push_back(parse_unary());
      } else if (accept('/')) {
        const std::size_t at = pos_;
        Expr d = parse_unary();
        if (d.is_zero()) {
          pos_ = at;
          fail("division by zero");
        }
        factors.push_back(pow(d, Expr(-1)));
      } else {
        break;
      }
    }
    return mul(std::move(factors));
  }

  Expr parse_unary() {
    if (accept('-')) return -parse_unary();
    if (accept('+')) return parse_unary();
    return parse_power();
  }

  Expr parse_power() {
    Expr base = parse_primary();
    if (accept('^')) {
      const std::size_t at = pos_;
      Expr x = parse_unary();
      try {
        return pow(base, x);
      } catch (const DomainError& err) {
        pos_ = at;
        fail(err.what());
      }
    }
    return base;
  }

  Expr parse_primary() {
    skip_ws();
    if (at_end()) fail("unexpected end of input");
    const char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      Expr e = parse_expr();
      if (!accept(')')) fail("expected ')'");
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      const std::size_t start = pos_;
      while (!at_end() && (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
        ++pos_;
      const std::string name(text_.substr(start, pos_ - start));
      skip_ws();
      if (!at_end() && text_[pos_] == '(') {
        auto fn = function_from_name(name);
        if (!fn) {
          pos_ = start;
          fail("unknown function '" + name + "'");
        }
        ++pos_;
        Expr arg = parse_expr();
        if (!accept(')')) fail("expected ')' after function argument");
        try {
          return apply(*fn, arg);
        } catch (const DomainError& err) {
          pos_ = start;
          fail(err.what());
        }
      }
      return make_symbol(name, start);
    }
    fail(std::string("unexpected '") + c + "'");
  }

  Expr make_symbol(const std::string& name, std::size_t at) {
    for (const auto& c : opts_.coordinates)
      if (c == name) return Expr::symbol(name, SymbolKind::Coordinate);
    for (const auto& d : opts_.dependent)
      if (d == name) return Expr::symbol(name, SymbolKind::Dependent);
    if (opts_.strict) {
      bool known = false;
      for (const auto& p : opts_.parameters) known = known || p == name;
      if (!known) {
        pos_ = at;
        fail("undeclared symbol '" + name + "'");
      }
    }
    return Expr::symbol(name, SymbolKind::Parameter);
  }

  Expr parse_number() {
    const std::size_t start = pos_;
    Rational mantissa(0);
    std::int64_t scale = 0;
    bool any_digit = false;
    bool after_point = false;
    while (!at_end()) {
      const char c = text_[pos_];
      if (std::isdigit(static_cast<unsigned char>(c))) {
        mantissa = mantissa * Rational(10) + Rational(c - '0');
        if (after_point) ++scale;
        any_digit = true;
      } else if (c == '.' && !after_point) {
        after_point = true;
      } else {
        break;
      }
      ++pos_;
    }
    if (!any_digit) {
      pos_ = start;
      fail("malformed number");
    }
    std::int64_t exponent = 0;
    if (!at_end() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
      std::size_t save = pos_++;
      bool neg = false;
      if (!at_end() && (text_[pos_] == '+' || text_[pos_] == '-')) neg = text_[pos_++] == '-';
      if (at_end() || !std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
        pos_ = save;
        fail("malformed exponent");
      }
      while (!at_end() && std::isdigit(static_cast<unsigned char>(text_[pos_])))
        exponent = exponent * 10 + (text_[pos_++] - '0');
      if (neg) exponent = -exponent;
    }
    return Expr(mantissa * Rational(10).pow(exponent - scale));
  }

  std::string_view text_;
  const ParseOptions& opts_;
  std::size_t pos_ = 0;
};

}  // namespace detail

inline Expr parse(std::string_view text, const ParseOptions& opts) {
  return detail::ExprParser(text, opts).parse();
}

/// Parse with the given names declared as chart coordinates; any other
/// identifier becomes a parameter symbol.
inline Expr parse(std::string_view text, const std::vector<std::string>& chart_symbols = {}) {
  ParseOptions opts;
  opts.coordinates = chart_symbols;
  return parse(text, opts);
}

}  // namespace confsym
