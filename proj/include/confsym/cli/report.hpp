#pragma once

#include <json.hpp>

#include <sstream>
#include <string>

#include "confsym/catalog.hpp"
#include "confsym/reduction.hpp"

namespace confsym::cli {

using json = nlohmann::ordered_json;

inline constexpr const char* kSchema = "confsym-report/1";

inline std::string str(const Expr& e) { return to_string(e); }

inline json to_json(const Matrix& m) {
  json out = json::array();
  for (const auto& row : m) {
    json r = json::array();
    for (const auto& e : row) r.push_back(str(e));
    out.push_back(std::move(r));
  }
  return out;
}

inline json to_json(const VectorField& X) {
  json out = json::array();
  for (const auto& e : X.components()) out.push_back(str(e));
  return out;
}

inline json to_json(const ZeroReport& r) {
  return {{"zero", r.zero}, {"max_residual", r.max_residual}, {"trials", r.trials}, {"tol", r.tol}};
}

inline json to_json(const VerifyResult& v) {
  return {{"holds", v.holds}, {"max_residual", v.max_residual}, {"trials", v.trials}, {"tol", v.tol},
          {"eliminated", v.eliminated}};
}

inline json to_json(const SymmetryVector& s) {
  json out{{"name", s.name}, {"xi", to_json(s.xi)}, {"eta", str(s.eta)}};
  return out;
}

inline json to_json(const PdeSpec& p) {
  json B = json::array();
  for (const auto& e : p.B) B.push_back(str(e));
  json out{{"kind", std::string(kind_name(p.kind))},
           {"coordinates", p.chart.coordinates()},
           {"u", p.u},
           {"A", to_json(p.A)},
           {"B", B},
           {"f", str(p.f)},
           {"canonical", str(p.lhs()) + " = 0"}};
  if (p.metric) out["metric"] = to_json(p.metric->components());
  if (p.kind == PdeKind::KleinGordon || p.kind == PdeKind::ConformalLaplace) out["potential"] = str(p.potential);
  if (p.kind == PdeKind::Poisson) out["source"] = str(p.source);
  return out;
}

inline json to_json(const ClassifiedVector& c) {
  return {{"name", c.name},         {"components", to_json(c.field)}, {"class", std::string(class_name(c.cls))},
          {"psi", str(c.psi)},      {"gradient", c.gradient},         {"residual", c.residual}};
}

inline json to_json(const StructureConstants& sc, const std::vector<ClassifiedVector>& fields) {
  json br = json::array();
  for (std::size_t a = 0; a < fields.size(); ++a)
    for (std::size_t b = a + 1; b < fields.size(); ++b) {
      json terms = json::object();
      for (std::size_t k = 0; k < fields.size(); ++k)
        if (!sc.c[a][b][k].is_zero()) terms[fields[k].name] = sc.c[a][b][k].str();
      if (!terms.empty()) br.push_back({{"a", fields[a].name}, {"b", fields[b].name}, {"bracket", terms}});
    }
  json fails = json::array();
  for (auto [a, b] : sc.failures) fails.push_back({fields[a].name, fields[b].name});
  return {{"closed", sc.closed}, {"max_residual", sc.max_residual}, {"nonzero_brackets", br}, {"failures", fails}};
}

// ---- text rendering -------------------------------------------------------

namespace detail {

inline std::string num(double v) {
  std::ostringstream o;
  o.precision(3);
  o << std::scientific << v;
  return o.str();
}

inline std::string vec(const json& a) {
  std::string s = "(";
  for (std::size_t i = 0; i < a.size(); ++i) s += (i ? ", " : "") + a[i].get<std::string>();
  return s + ")";
}

inline void pde_text(std::ostream& o, const json& p, const std::string& indent) {
  o << indent << "kind: " << p["kind"].get<std::string>() << " on " << vec(p["coordinates"]) << "\n";
  o << indent << p["canonical"].get<std::string>() << "\n";
  if (p.contains("potential")) o << indent << "potential: " << p["potential"].get<std::string>() << "\n";
}

inline void sym_list(std::ostream& o, const char* title, const json& list) {
  o << title << " (" << list.size() << ")\n";
  for (const auto& s : list) {
    o << "  " << s["name"].get<std::string>() << ": xi = " << vec(s["xi"]) << ", eta = " << s["eta"].get<std::string>();
    if (s.contains("verification"))
      o << "  [" << (s["verification"]["holds"].get<bool>() ? "holds" : "FAILS")
        << ", residual " << num(s["verification"]["max_residual"].get<double>()) << "]";
    o << "\n";
  }
}

}  // namespace detail

/// Human-readable rendering of a report; JSON is the canonical form.
inline std::string render_text(const json& r) {
  std::ostringstream o;
  using detail::num;
  o << "confsym " << r["command"].get<std::string>();
  if (r["input"].contains("space")) o << " --space " << r["input"]["space"].get<std::string>();
  if (r["input"].contains("file")) o << " --input " << r["input"]["file"].get<std::string>();
  o << "\nstatus: " << r["status"].get<std::string>() << " (exit " << r["exit_code"].get<int>() << ")\n";
  const auto& st = r["settings"];
  o << "tol " << num(st["tol"].get<double>()) << ", trials " << st["trials"].get<int>() << ", seed "
    << st["seed"].get<std::uint64_t>() << "\n";
  if (r.contains("error")) {
    const auto& e = r["error"];
    o << "error: " << e["message"].get<std::string>();
    if (e.contains("line")) o << " (line " << e["line"].get<std::size_t>() << ", column " << e["column"].get<std::size_t>() << ")";
    o << "\n";
  }
  if (r.contains("catalog")) {
    for (const auto& s : r["catalog"])
      o << "  " << s["name"].get<std::string>() << "  dim " << s["dim"].get<int>() << ", " << s["generators"].get<int>()
        << " generators\n";
  }
  if (r.contains("problem_text")) o << r["problem_text"].get<std::string>();
  if (r.contains("classifications")) {
    o << "classifications\n";
    for (const auto& c : r["classifications"]) {
      o << "  " << c["name"].get<std::string>() << ": " << c["class"].get<std::string>() << ", psi = "
        << c["psi"].get<std::string>() << (c["gradient"].get<bool>() ? ", gradient" : "") << ", residual "
        << num(c["residual"].get<double>());
      if (c.contains("matches_declared")) o << (c["matches_declared"].get<bool>() ? "" : "  [DECLARED MISMATCH]");
      o << "\n";
    }
  }
  if (r.contains("summary")) {
    o << "summary:";
    for (const auto& [k, v] : r["summary"].items()) o << " " << k << "=" << v.get<int>();
    o << "\n";
  }
  if (r.contains("closure")) {
    const auto& c = r["closure"];
    o << "closure: " << (c["closed"].get<bool>() ? "closed" : "NOT CLOSED") << ", residual "
      << num(c["max_residual"].get<double>()) << "\n";
    for (const auto& b : c["nonzero_brackets"]) {
      o << "  [" << b["a"].get<std::string>() << ", " << b["b"].get<std::string>() << "] =";
      bool first = true;
      for (const auto& [k, v] : b["bracket"].items()) {
        o << (first ? " " : " + ") << v.get<std::string>() << " " << k;
        first = false;
      }
      o << "\n";
    }
  }
  if (r.contains("pde")) {
    o << "pde\n";
    detail::pde_text(o, r["pde"], "  ");
  }
  if (r.contains("symmetries")) {
    o << "symmetries\n";
    for (const auto& s : r["symmetries"]) {
      o << "  " << s["name"].get<std::string>() << ": " << (s["admissible"].get<bool>() ? "admissible" : "inadmissible")
        << ", constraint residual " << num(s["constraint_residual"].get<double>());
      if (s.contains("verification"))
        o << ", verify " << (s["verification"]["holds"].get<bool>() ? "holds" : "FAILS") << " ("
          << num(s["verification"]["max_residual"].get<double>()) << ")";
      o << "\n    xi = " << detail::vec(s["xi"]) << ", eta = " << s["eta"].get<std::string>() << "\n";
    }
  }
  if (r.contains("verifications")) {
    o << "verifications\n";
    for (const auto& v : r["verifications"]) {
      o << "  " << v["name"].get<std::string>() << ": " << (v["holds"].get<bool>() ? "holds" : "FAILS") << ", residual "
        << num(v["max_residual"].get<double>()) << " (tol " << num(v["tol"].get<double>()) << ", " << v["trials"].get<int>()
        << " points)\n";
      if (v.contains("linear_conditions"))
        for (const auto& c : v["linear_conditions"])
          o << "    " << c["name"].get<std::string>() << ": " << (c["holds"].get<bool>() ? "ok" : "violated") << " ("
            << num(c["max_residual"].get<double>()) << ")\n";
    }
  }
  if (r.contains("reduction")) {
    const auto& red = r["reduction"];
    o << "reduction by " << red["by"].get<std::string>() << "\n";
    if (red.contains("generator"))
      o << "  generator: xi = " << detail::vec(red["generator"]["xi"]) << ", eta = " << red["generator"]["eta"].get<std::string>()
        << " (" << (red["generator_verification"]["holds"].get<bool>() ? "verified" : "NOT a symmetry") << ")\n";
    if (red.contains("ansatz"))
      o << "  ansatz: " << red["ansatz"]["u"].get<std::string>() << " = " << red["ansatz"]["profile"].get<std::string>() << " * "
        << red["ansatz"]["w"].get<std::string>() << detail::vec(red["ansatz"]["retained"]) << "\n";
    if (red.contains("coefficient")) o << "  coefficient -2p(2p+1) = " << red["coefficient"].get<std::string>() << "\n";
    if (red.contains("reduced_pde")) {
      o << "  reduced pde\n";
      detail::pde_text(o, red["reduced_pde"], "    ");
    }
    if (red.contains("metric_form")) {
      o << "  metric form\n";
      detail::pde_text(o, red["metric_form"], "    ");
    }
    if (red.contains("round_trip")) o << "  round trip: " << (red["round_trip"]["zero"].get<bool>() ? "ok" : "FAILED") << ", residual "
                                      << num(red["round_trip"]["max_residual"].get<double>()) << "\n";
    if (red.contains("inherited")) {
      detail::sym_list(o, "inherited", red["inherited"]);
      detail::sym_list(o, "type II", red["type_ii"]);
      detail::sym_list(o, "broken", red["broken"]);
      detail::sym_list(o, "rejected candidates", red["rejected"]);
      o << "lost:";
      for (const auto& n : red["lost"]) o << " " << n.get<std::string>();
      o << "\ngovinder predictions\n";
      for (const auto& g : red["govinder"])
        if (g["predicted"].get<bool>())
          o << "  " << g["name"].get<std::string>() << ": c = " << g["c"].get<std::string>() << ", "
            << (g["verified"].get<bool>() ? "verified" : "NOT VERIFIED") << "\n";
    }
  }
  return o.str();
}

}  // namespace confsym::cli
