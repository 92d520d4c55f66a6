#pragma once

#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "confsym/catalog.hpp"
#include "confsym/parse.hpp"
#include "confsym/symmetry.hpp"

namespace confsym::cli {

struct FieldDecl {
  std::string name;
  std::vector<Expr> components;
  std::size_t line = 0;
};

struct SymmetryDecl {
  std::string name;
  std::vector<Expr> xi;
  Expr eta;
  std::size_t line = 0;
};

/// Parsed problem file. Sections are optional; commands check what they need.
struct Problem {
  std::optional<Chart> chart;
  std::optional<Metric> metric;
  std::vector<FieldDecl> fields;
  std::optional<PdeSpec> pde;
  std::string pde_kind;
  std::vector<SymmetryDecl> symmetries;
  std::map<std::string, std::string, std::less<>> run;  // raw [run] options
  Bindings params;
};

namespace detail {

inline std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

/// Split on `sep` at parenthesis depth zero; each piece keeps its column.
inline std::vector<std::pair<std::string, std::size_t>> split_top(std::string_view s, char sep, std::size_t col0) {
  std::vector<std::pair<std::string, std::size_t>> out;
  int depth = 0;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= s.size(); ++i) {
    if (i == s.size() || (s[i] == sep && depth == 0)) {
      const std::string_view piece = s.substr(start, i - start);
      const auto lead = piece.find_first_not_of(" \t");
      out.emplace_back(trim(piece), col0 + start + (lead == std::string_view::npos ? 0 : lead));
      start = i + 1;
      continue;
    }
    if (s[i] == '(') ++depth;
    if (s[i] == ')') --depth;
  }
  return out;
}

class ProblemParser {
 public:
  explicit ProblemParser(std::string_view text) : text_(text) {}

  Problem parse() {
    std::size_t line_no = 0;
    std::istringstream in{std::string(text_)};
    std::string raw;
    std::vector<std::pair<std::size_t, std::string>> pde_lines;
    std::string section;
    while (std::getline(in, raw)) {
      ++line_no;
      line_ = line_no;
      const auto hash = raw.find('#');
      const std::string content = raw.substr(0, hash);
      const std::string t = trim(content);
      if (t.empty()) continue;
      if (t.front() == '[') {
        if (t.back() != ']') fail("unterminated section header", raw.find('[') + 1);
        section = trim(t.substr(1, t.size() - 2));
        static const std::vector<std::string> known{"chart", "metric", "fields", "pde", "symmetries", "run"};
        if (std::find(known.begin(), known.end(), section) == known.end())
          fail("unknown section '" + section + "'", raw.find('[') + 1);
        continue;
      }
      if (section.empty()) fail("entry outside of any section", raw.find_first_not_of(" \t") + 1);
      const auto eq = content.find('=');
      if (eq == std::string::npos) fail("expected 'key = value'", raw.find_first_not_of(" \t") + 1);
      const std::string key = trim(content.substr(0, eq));
      const std::string_view value(content.data() + eq + 1, content.size() - eq - 1);
      const std::size_t vcol = eq + 2;
      if (key.empty()) fail("missing key", 1);
      if (section == "chart") chart_entry(key, value, vcol);
      else if (section == "metric") metric_entry(key, value, vcol);
      else if (section == "fields") field_entry(key, value, vcol);
      else if (section == "pde") pde_lines.emplace_back(line_no, content);
      else if (section == "symmetries") symmetry_entry(key, value, vcol);
      else problem_.run[key] = trim(value);
    }
    finish_chart();
    finish_metric();
    for (const auto& [ln, content] : pde_lines) {
      line_ = ln;
      const auto eq = content.find('=');
      pde_entry(trim(content.substr(0, eq)), std::string_view(content).substr(eq + 1), eq + 2);
    }
    line_ = line_no;
    finish_pde();
    return std::move(problem_);
  }

 private:
  [[noreturn]] void fail(const std::string& msg, std::size_t col) const { throw ParseError(msg, line_, col); }

  Expr expr(const std::string& text, std::size_t col, bool allow_u = false) {
    if (text.empty()) fail("missing expression", col);
    ParseOptions o;
    o.coordinates = coords_;
    if (allow_u) o.dependent = {u_};
    for (const auto& [p, v] : problem_.params) o.parameters.push_back(p);
    o.strict = true;
    o.line = line_;
    o.column_offset = col - 1;
    const Expr e = confsym::parse(text, o);
    return problem_.params.empty() ? e : substitute(e, problem_.params);
  }

  std::vector<Expr> expr_list(std::string_view value, std::size_t col, bool allow_u = false) {
    std::vector<Expr> out;
    for (const auto& [piece, c] : split_top(value, ',', col)) out.push_back(expr(piece, c, allow_u));
    return out;
  }

  // key "name(a, b)" -> name and argument list
  std::pair<std::string, std::vector<std::string>> indexed(const std::string& key) const {
    const auto open = key.find('(');
    if (open == std::string::npos) return {key, {}};
    if (key.back() != ')') fail("malformed index list in '" + key + "'", 1);
    std::vector<std::string> args;
    for (const auto& [a, c] : split_top(std::string_view(key).substr(open + 1, key.size() - open - 2), ',', 0))
      args.push_back(a);
    return {trim(key.substr(0, open)), args};
  }

  std::size_t coord_index(const std::string& n) const {
    for (std::size_t i = 0; i < coords_.size(); ++i)
      if (coords_[i] == n) return i;
    fail("unknown coordinate '" + n + "'", 1);
  }

  void chart_entry(const std::string& key, std::string_view value, std::size_t col) {
    if (key == "coordinates") {
      if (!coords_.empty()) fail("coordinates declared twice", 1);
      for (const auto& [n, c] : split_top(value, ',', col)) {
        if (n.empty()) fail("empty coordinate name", c);
        coords_.push_back(n);
      }
      return;
    }
    const auto sp = key.find_first_of(" \t");
    const std::string head = key.substr(0, sp);
    const std::string name = sp == std::string::npos ? std::string() : trim(key.substr(sp));
    if (head == "range") {
      if (coords_.empty()) fail("range before coordinates", 1);
      coord_index(name);
      auto parts = split_top(value, ',', col);
      if (parts.size() != 2) fail("range needs 'lo, hi'", col);
      const double lo = eval_num(expr(parts[0].first, parts[0].second), {});
      const double hi = eval_num(expr(parts[1].first, parts[1].second), {});
      if (!(lo < hi)) fail("empty range", col);
      ranges_[name] = Range{lo, hi};
      return;
    }
    if (head == "param") {
      if (name.empty()) fail("param needs a name", 1);
      const Expr v = expr(trim(value), col);
      if (!free_symbols(v).empty()) fail("param value must be a constant expression", col);
      problem_.params[name] = v;
      return;
    }
    fail("unknown chart entry '" + key + "'", 1);
  }

  void finish_chart() {
    if (coords_.empty()) return;
    try {
      problem_.chart = Chart(coords_, ranges_);
    } catch (const Error& e) {
      fail(e.what(), 1);
    }
  }

  void metric_entry(const std::string& key, std::string_view value, std::size_t col) {
    if (coords_.empty()) fail("[metric] needs [chart] coordinates first", 1);
    const std::size_t n = coords_.size();
    if (g_.empty()) g_ = zero_matrix(n);
    if (key == "diag") {
      auto d = expr_list(value, col);
      if (d.size() != n) fail("diag needs " + std::to_string(n) + " entries", col);
      for (std::size_t i = 0; i < n; ++i) g_[i][i] = d[i];
      return;
    }
    auto [name, args] = indexed(key);
    if (name != "g" || args.size() != 2) fail("expected 'diag' or 'g(a, b)'", 1);
    const std::size_t i = coord_index(args[0]);
    const std::size_t j = coord_index(args[1]);
    g_[i][j] = g_[j][i] = expr(trim(value), col);
  }

  void finish_metric() {
    if (g_.empty()) return;
    problem_.metric = Metric(*problem_.chart, g_);
  }

  void field_entry(const std::string& key, std::string_view value, std::size_t col) {
    if (coords_.empty()) fail("[fields] needs [chart] coordinates first", 1);
    auto comps = expr_list(value, col);
    if (comps.size() != coords_.size()) fail("field needs " + std::to_string(coords_.size()) + " components", col);
    problem_.fields.push_back({key, std::move(comps), line_});
  }

  void symmetry_entry(const std::string& key, std::string_view value, std::size_t col) {
    if (coords_.empty()) fail("[symmetries] needs [chart] coordinates first", 1);
    auto parts = split_top(value, ';', col);
    if (parts.size() != 2) fail("symmetry needs 'xi components ; eta'", col);
    SymmetryDecl s;
    s.name = key;
    s.line = line_;
    const std::size_t xcol = parts[0].second;
    s.xi = expr_list(parts[0].first, xcol, true);
    if (s.xi.size() != coords_.size()) fail("xi needs " + std::to_string(coords_.size()) + " components", xcol);
    s.eta = expr(parts[1].first, parts[1].second, true);
    symmetry_lines_.push_back(std::move(s));
  }

  void pde_entry(const std::string& key, std::string_view value, std::size_t col) {
    if (coords_.empty()) fail("[pde] needs [chart] coordinates first", 1);
    if (key == "kind") {
      kind_ = trim(value);
      static const std::vector<std::string> kinds{"laplace", "klein_gordon", "conformal_laplace", "poisson", "generic"};
      if (std::find(kinds.begin(), kinds.end(), kind_) == kinds.end()) fail("unknown pde kind '" + kind_ + "'", col);
      return;
    }
    if (key == "u") return;  // handled in the pre-scan
    const std::size_t n = coords_.size();
    if (pA_.empty()) {
      pA_ = zero_matrix(n);
      pB_.assign(n, Expr(0));
    }
    if (key == "V") {
      V_ = expr(trim(value), col);
      return;
    }
    if (key == "f") {
      f_ = expr(trim(value), col, true);
      return;
    }
    auto [name, args] = indexed(key);
    if (name == "A" && args.size() == 2) {
      const std::size_t i = coord_index(args[0]);
      const std::size_t j = coord_index(args[1]);
      pA_[i][j] = pA_[j][i] = expr(trim(value), col);
      generic_coeffs_ = true;
      return;
    }
    if (name == "B" && args.size() == 1) {
      pB_[coord_index(args[0])] = expr(trim(value), col);
      generic_coeffs_ = true;
      return;
    }
    fail("unknown pde entry '" + key + "'", 1);
  }

  void finish_pde() {
    for (auto& s : symmetry_lines_) problem_.symmetries.push_back(std::move(s));
    if (kind_.empty()) {
      if (V_ || f_ || generic_coeffs_) fail("[pde] needs 'kind = ...'", 1);
      return;
    }
    problem_.pde_kind = kind_;
    if (kind_ == "generic") {
      if (!f_) f_ = Expr(0);
      problem_.pde = generic_pde(*problem_.chart, pA_, pB_, *f_, u_);
      return;
    }
    if (generic_coeffs_) fail("A(..)/B(..) entries are only allowed for kind = generic", 1);
    if (!problem_.metric) fail("pde kind '" + kind_ + "' needs a [metric]", 1);
    const Metric& g = *problem_.metric;
    if (kind_ == "laplace") problem_.pde = laplace_pde(g, u_);
    else if (kind_ == "conformal_laplace") problem_.pde = conformal_laplace_pde(g, u_);
    else if (kind_ == "klein_gordon") {
      if (!V_) fail("klein_gordon needs 'V = ...'", 1);
      problem_.pde = klein_gordon_pde(g, *V_, u_);
    } else {
      if (!f_) fail("poisson needs 'f = ...'", 1);
      problem_.pde = poisson_pde(g, *f_, u_);
    }
  }

 public:
  void set_dependent(std::string u) { u_ = std::move(u); }

 private:
  std::string_view text_;
  std::size_t line_ = 0;
  Problem problem_;
  std::vector<std::string> coords_;
  std::map<std::string, Range, std::less<>> ranges_;
  Matrix g_;
  std::string kind_;
  std::string u_ = "u";
  std::optional<Expr> V_, f_;
  Matrix pA_;
  std::vector<Expr> pB_;
  bool generic_coeffs_ = false;
  std::vector<SymmetryDecl> symmetry_lines_;
};

/// The dependent-variable name must be known before any expression is parsed.
inline std::string scan_dependent(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string raw, section;
  while (std::getline(in, raw)) {
    const std::string t = trim(raw.substr(0, raw.find('#')));
    if (t.empty()) continue;
    if (t.front() == '[' && t.back() == ']') {
      section = trim(t.substr(1, t.size() - 2));
      continue;
    }
    const auto eq = t.find('=');
    if (section == "pde" && eq != std::string::npos && trim(t.substr(0, eq)) == "u") return trim(t.substr(eq + 1));
  }
  return "u";
}

}  // namespace detail

inline Problem parse_problem(std::string_view text) {
  detail::ProblemParser p(text);
  p.set_dependent(detail::scan_dependent(text));
  return p.parse();
}

inline VectorField field_of(const Problem& p, const FieldDecl& f) { return VectorField(*p.chart, f.components); }

inline SymmetryVector symmetry_of(const Problem& p, const SymmetryDecl& s) {
  return SymmetryVector::of(s.name, VectorField(*p.chart, s.xi), s.eta);
}

/// Problem-file text for a catalogue space: chart, metric and declared fields.
inline std::string to_problem_text(const CatalogSpace& s) {
  std::ostringstream o;
  const Chart& c = s.chart();
  o << "# " << s.name << ": " << s.notes << "\n[chart]\ncoordinates = ";
  for (std::size_t i = 0; i < c.dim(); ++i) o << (i ? ", " : "") << c.name(i);
  o << "\n";
  for (const auto& n : c.coordinates())
    if (auto it = c.ranges().find(n); it != c.ranges().end())
      o << "range " << n << " = " << it->second.lo << ", " << it->second.hi << "\n";
  o << "\n[metric]\n";
  if (s.metric.is_diagonal()) {
    o << "diag = ";
    for (std::size_t i = 0; i < c.dim(); ++i) o << (i ? ", " : "") << to_string(s.metric(i, i));
    o << "\n";
  } else {
    for (std::size_t i = 0; i < c.dim(); ++i)
      for (std::size_t j = i; j < c.dim(); ++j)
        if (!s.metric(i, j).is_zero()) o << "g(" << c.name(i) << ", " << c.name(j) << ") = " << to_string(s.metric(i, j)) << "\n";
  }
  o << "\n[fields]\n";
  for (const auto& g : s.generators) {
    o << g.name << " = ";
    for (std::size_t i = 0; i < c.dim(); ++i) o << (i ? ", " : "") << to_string(g.field[i]);
    o << "  # " << class_name(g.cls) << ", psi = " << to_string(g.psi) << (g.gradient ? ", gradient" : "") << "\n";
  }
  return o.str();
}

}  // namespace confsym::cli
