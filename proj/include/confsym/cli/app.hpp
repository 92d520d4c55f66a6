#pragma once

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "confsym/catalog.hpp"
#include "confsym/cli/problem.hpp"
#include "confsym/cli/report.hpp"
#include "confsym/reduction.hpp"

namespace confsym::cli {

enum ExitCode : int { kOk = 0, kVerificationFailure = 1, kInputError = 2 };

struct Options {
  std::string command;
  std::string input;
  std::string space;
  std::optional<double> tol;
  std::optional<int> trials;
  std::optional<std::uint64_t> seed;
  std::string output = "text";
  std::string pde;           // catalogue runs: laplace | conformal_laplace | klein_gordon | poisson
  std::string potential;     // V or f for catalogue runs
  std::string by;
  std::string mu;
  std::string a0;
};

/// Input problems that are reported with exit code 2.
class InputError : public Error {
 public:
  using Error::Error;
};

/// Candidate hidden symmetries for a catalogue reduction: the conformal
/// generators of the reduced space, when it is itself in the catalogue.
inline std::optional<CatalogSpace> reduction_companion(const std::string& space, const std::string& by,
                                                       const Chart& reduced) {
  const auto& names = reduced.coordinates();
  if (space.rfind("minkowski", 0) == 0 && by.rfind("K_G^", 0) == 0 && names.front() == "t" && names.size() >= 3)
    return minkowski(static_cast<int>(names.size()), names);
  if ((space == "decomposable_k0" && by == "K_r") || (space == "decomposable_k1" && by == "H_r")) return hyperbolic_sphere(2, "y");
  if (by == "K_z") {
    if (space == "bianchi_I_sin_cos_1") return catalog_space("bianchi_slice_sin_cos");
    if (space == "bianchi_I_sinh_cosh_1") return catalog_space("bianchi_slice_sinh_cosh");
    if (space == "bianchi_I_t_t_1") return catalog_space("bianchi_slice_t_t");
  }
  return std::nullopt;
}

namespace detail {

inline Checker make_checker(const Options& o, const Problem* p) {
  auto from_run = [&](const char* key) -> std::optional<std::string> {
    if (!p) return std::nullopt;
    auto it = p->run.find(key);
    if (it == p->run.end()) return std::nullopt;
    return it->second;
  };
  Checker c;
  try {
    if (o.tol) c.tol = *o.tol;
    else if (auto v = from_run("tol")) c.tol = std::stod(*v);
    if (o.trials) c.trials = *o.trials;
    else if (auto v = from_run("trials")) c.trials = std::stoi(*v);
    std::uint64_t seed = 42;
    if (o.seed) seed = *o.seed;
    else if (auto v = from_run("seed")) seed = std::stoull(*v);
    c.sampler.set_seed(seed);
  } catch (const std::exception&) {
    throw InputError("malformed numeric option in [run]");
  }
  if (!(c.tol > 0)) throw InputError("tol must be positive");
  if (c.trials < 1) throw InputError("trials must be at least 1");
  return c;
}

inline std::string option(const Problem* p, const std::string& flag, const char* key,
                          const std::string& fallback) {
  if (!flag.empty()) return flag;
  if (p)
    if (auto it = p->run.find(key); it != p->run.end()) return it->second;
  return fallback;
}

inline Expr constant(const std::string& text, const char* what) {
  Expr e;
  try {
    e = parse(text);
  } catch (const ParseError& err) {
    throw InputError(std::string(what) + ": " + err.what());
  }
  if (!free_symbols(e).empty()) throw InputError(std::string(what) + " must be a constant expression");
  return e;
}

inline Expr on_chart_expr(const std::string& text, const Chart& c, const char* what, bool allow_u) {
  ParseOptions po;
  po.coordinates = c.coordinates();
  if (allow_u) po.dependent = {"u"};
  po.strict = true;
  try {
    return parse(text, po);
  } catch (const ParseError& err) {
    throw InputError(std::string(what) + ": " + err.what());
  }
}

inline PdeSpec catalogue_pde(const Options& o, const CatalogSpace& s) {
  const std::string kind = o.pde.empty() ? "laplace" : o.pde;
  if (kind == "laplace") return laplace_pde(s.metric);
  if (kind == "conformal_laplace") return conformal_laplace_pde(s.metric);
  if (kind == "klein_gordon") {
    if (o.potential.empty()) throw InputError("--pde klein_gordon needs --potential");
    return klein_gordon_pde(s.metric, on_chart_expr(o.potential, s.chart(), "--potential", false));
  }
  if (kind == "poisson") {
    if (o.potential.empty()) throw InputError("--pde poisson needs --potential (the source f)");
    return poisson_pde(s.metric, on_chart_expr(o.potential, s.chart(), "--potential", true));
  }
  throw InputError("unknown --pde '" + kind + "'");
}

inline std::vector<ClassifiedVector> classify_fields(const Problem& p, const Checker& c) {
  if (!p.metric) throw InputError("the problem file has no [metric]");
  std::vector<ClassifiedVector> out;
  for (const auto& f : p.fields) out.push_back(classify(*p.metric, field_of(p, f), c, f.name));
  return out;
}

inline json symmetry_entry(const SymmetryVector& s, const VerifyResult* v) {
  json j = to_json(s);
  if (v) j["verification"] = to_json(*v);
  return j;
}

inline SymmetryVector scaling(const Chart& c, const std::string& u, const std::string& name = "X_u") {
  return SymmetryVector::linear(name, VectorField::zero(c), Expr(1), Expr(0), u);
}

/// Theorem-generated point symmetries of a metric-kind PDE from a list of CKVs.
inline json generated_symmetries(const PdeSpec& pde, const std::vector<ClassifiedVector>& ckvs, const Expr& a0,
                                 const Checker& c, bool& failure, std::vector<SymmetryVector>* admissible = nullptr) {
  json list = json::array();
  for (const auto& v : ckvs) {
    if (v.cls == ConformalClass::NotCKV) continue;
    const GeneratedSymmetry g = generate_for(pde, v, a0, Expr(0), c);
    json j = to_json(g.vector);
    j["ckv_class"] = std::string(class_name(v.cls));
    j["psi"] = str(v.psi);
    j["constraint"] = str(g.residual);
    j["admissible"] = g.admissible;
    j["constraint_residual"] = g.max_residual;
    j["printed_form_agrees"] = g.printed_agrees;
    if (g.admissible) {
      const VerifyResult r = verify_symmetry(pde, g.vector, c);
      j["verification"] = to_json(r);
      failure = failure || !r.holds;
      if (admissible) admissible->push_back(g.vector);
    }
    list.push_back(std::move(j));
  }
  return list;
}

}  // namespace detail

class App {
 public:
  explicit App(Options o) : o_(std::move(o)) {}

  /// Fills the report and returns the exit code.
  int run(json& report) {
    report = json::object();
    report["schema"] = kSchema;
    report["command"] = o_.command;
    report["input"] = json::object();
    if (!o_.space.empty()) report["input"]["space"] = o_.space;
    if (!o_.input.empty()) report["input"]["file"] = o_.input;
    int code = kOk;
    try {
      load();
      checker_ = detail::make_checker(o_, problem_ ? &*problem_ : nullptr);
      settings(report);
      if (o_.command == "classify") code = classify_cmd(report);
      else if (o_.command == "symmetries") code = symmetries_cmd(report);
      else if (o_.command == "verify") code = verify_cmd(report);
      else if (o_.command == "reduce") code = reduce_cmd(report);
      else if (o_.command == "catalog") code = catalog_cmd(report);
      else throw InputError("unknown command '" + o_.command + "'");
    } catch (const ParseError& e) {
      code = kInputError;
      report["error"] = {{"message", e.message()}, {"line", e.line()}, {"column", e.column()}};
    } catch (const InputError& e) {
      code = kInputError;
      report["error"] = {{"message", e.what()}};
    } catch (const InvalidArgument& e) {
      code = kInputError;
      report["error"] = {{"message", e.what()}};
    } catch (const ChartMismatch& e) {
      code = kInputError;
      report["error"] = {{"message", e.what()}};
    } catch (const DegenerateMetric& e) {
      code = kInputError;
      report["error"] = {{"message", e.what()}};
    } catch (const Error& e) {
      code = kVerificationFailure;
      report["error"] = {{"message", e.what()}};
    }
    if (!report.contains("settings")) settings(report);
    report["status"] = code == kOk ? "ok" : code == kVerificationFailure ? "verification_failure" : "input_error";
    report["exit_code"] = code;
    return code;
  }

 private:
  void load() {
    if (!o_.input.empty() && !o_.space.empty()) throw InputError("--input and --space are mutually exclusive");
    if (o_.input.empty()) {
      if (!o_.space.empty()) space_ = catalog_space(o_.space);
      return;
    }
    std::ifstream in(o_.input);
    if (!in) throw InputError("cannot read '" + o_.input + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    problem_ = parse_problem(buf.str());
  }

  void settings(json& report) const {
    report["settings"] = {{"tol", checker_.tol}, {"trials", checker_.trials}, {"seed", checker_.sampler.seed()}};
  }

  [[nodiscard]] const Problem& problem() const {
    if (!problem_) throw InputError("this command needs --input or --space");
    return *problem_;
  }

  PdeSpec pde_from_problem() const {
    const Problem& p = problem();
    if (!p.pde) throw InputError("the problem file has no [pde]");
    return *p.pde;
  }

  Expr a0() const {
    return detail::constant(detail::option(problem_ ? &*problem_ : nullptr, o_.a0, "a0", "0"), "a0");
  }

  int classify_cmd(json& report) {
    std::vector<ClassifiedVector> fields;
    bool mismatch = false;
    json list = json::array();
    if (space_) {
      for (const auto& g : space_->generators) {
        ClassifiedVector c = classify(space_->metric, g.field, checker_, g.name);
        json j = to_json(c);
        const bool psi_ok = on_chart(checker_, space_->chart()).zero(c.psi - g.psi, "declared-psi/" + g.name);
        const bool ok = c.cls == g.cls && c.gradient == g.gradient && psi_ok;
        j["declared"] = {{"class", std::string(class_name(g.cls))}, {"psi", str(g.psi)}, {"gradient", g.gradient}};
        j["matches_declared"] = ok;
        mismatch = mismatch || !ok;
        list.push_back(std::move(j));
        fields.push_back(std::move(c));
      }
    } else {
      fields = detail::classify_fields(problem(), checker_);
      for (const auto& c : fields) list.push_back(to_json(c));
    }
    report["classifications"] = list;
    json summary = json::object();
    for (auto k : {ConformalClass::Killing, ConformalClass::Homothetic, ConformalClass::SpecialCKV,
                   ConformalClass::ProperCKV, ConformalClass::NotCKV}) {
      int n = 0;
      for (const auto& f : fields) n += f.cls == k ? 1 : 0;
      summary[std::string(class_name(k))] = n;
    }
    int g = 0;
    for (const auto& f : fields) g += f.gradient ? 1 : 0;
    summary["gradient"] = g;
    report["summary"] = summary;
    std::vector<ClassifiedVector> ckvs;
    for (const auto& f : fields)
      if (f.cls != ConformalClass::NotCKV) ckvs.push_back(f);
    bool open = false;
    if (ckvs.size() >= 2) {
      const Metric& g0 = space_ ? space_->metric : *problem().metric;
      const StructureConstants sc = closure_check(g0, ckvs, checker_);
      report["closure"] = to_json(sc, ckvs);
      open = !sc.closed;
    }
    // an open algebra is only a failure for catalogue spaces, whose inventories are complete
    return mismatch || (space_ && open) ? kVerificationFailure : kOk;
  }

  int symmetries_cmd(json& report) {
    PdeSpec pde;
    std::vector<ClassifiedVector> ckvs;
    if (space_) {
      pde = detail::catalogue_pde(o_, *space_);
      ckvs = space_->generators;
    } else {
      pde = pde_from_problem();
      ckvs = detail::classify_fields(problem(), checker_);
    }
    if (!pde.metric) throw InputError("theorem generators need a metric-kind PDE (laplace, klein_gordon, poisson, ...)");
    report["pde"] = to_json(pde);
    bool failure = false;
    json list = detail::generated_symmetries(pde, ckvs, a0(), checker_, failure);
    if (pde.is_homogeneous_linear(checker_)) {
      const SymmetryVector xu = detail::scaling(pde.chart, pde.u);
      const VerifyResult r = verify_symmetry(pde, xu, checker_);
      json j = detail::symmetry_entry(xu, &r);
      j["admissible"] = true;
      j["constraint_residual"] = 0.0;
      list.push_back(std::move(j));
      failure = failure || !r.holds;
    }
    report["symmetries"] = list;
    return failure ? kVerificationFailure : kOk;
  }

  int verify_cmd(json& report) {
    if (space_) return symmetries_cmd(report);
    const PdeSpec pde = pde_from_problem();
    const Problem& p = problem();
    if (p.symmetries.empty()) throw InputError("the problem file has no [symmetries]");
    report["pde"] = to_json(pde);
    json list = json::array();
    bool failure = false;
    for (const auto& d : p.symmetries) {
      SymmetryVector s = symmetry_of(p, d);
      const VerifyResult r = verify_symmetry(pde, s, checker_);
      json j{{"name", s.name}, {"xi", to_json(s.xi)}, {"eta", str(s.eta)}};
      j.update(to_json(r));
      Checker lc_check = on_chart(checker_, pde.chart);
      lc_check.sampler.set_range(pde.u, -2, 2);
      if (lc_check.zero(diff(diff(s.eta, pde.u), pde.u), "eta-linear")) {
        s.a = diff(s.eta, pde.u);
        s.b = substitute(s.eta, pde.u, Expr(0));
        const LinearConditionsReport lc = linear_conditions_check(pde, s, std::nullopt, checker_);
        json conds = json::array();
        for (const auto& c : lc.conditions)
          conds.push_back({{"name", c.name}, {"holds", c.holds}, {"max_residual", c.max_residual}});
        j["linear_conditions"] = conds;
        j["lambda"] = str(lc.lambda);
      }
      failure = failure || !r.holds;
      list.push_back(std::move(j));
    }
    report["verifications"] = list;
    return failure ? kVerificationFailure : kOk;
  }

  int reduce_cmd(json& report) {
    const std::string by = detail::option(problem_ ? &*problem_ : nullptr, o_.by, "by", "");
    if (by.empty()) throw InputError("reduce needs --by NAME");
    const Expr mu = detail::constant(detail::option(problem_ ? &*problem_ : nullptr, o_.mu, "mu", "0"), "mu");
    json red = json::object();
    red["by"] = by;
    red["mu"] = str(mu);
    if (space_ && o_.space.rfind("special_ckv", 0) == 0 && by == "C_S") return sp_ckv_cmd(report, red);

    PdeSpec pde;
    std::vector<SymmetryVector> originals;
    std::optional<SymmetryVector> used;
    bool failure = false;
    if (space_) {
      pde = detail::catalogue_pde(o_, *space_);
      if (!pde.metric) throw InputError("catalogue reductions need a metric-kind PDE");
      detail::generated_symmetries(pde, space_->generators, Expr(0), checker_, failure, &originals);
      if (pde.is_homogeneous_linear(checker_)) originals.push_back(detail::scaling(pde.chart, pde.u));
      const ClassifiedVector& g = space_->generator(by);
      used = SymmetryVector::linear(by, g.field, mu, Expr(0), pde.u);
    } else {
      pde = pde_from_problem();
      const Problem& p = problem();
      for (const auto& d : p.symmetries) {
        originals.push_back(symmetry_of(p, d));
        if (d.name == by) used = originals.back();
      }
      if (!used) throw InputError("--by names no entry of [symmetries]");
    }
    const VerifyResult uv = verify_symmetry(pde, *used, checker_);
    red["generator"] = to_json(*used);
    red["generator_verification"] = to_json(uv);
    report["pde"] = to_json(pde);
    if (!uv.holds) {
      report["reduction"] = red;
      return kVerificationFailure;
    }
    const InvariantAnsatz ans = invariants_for(*used, checker_, pde.u);
    red["ansatz"] = {{"reduction_coordinate", ans.reduction_coordinate}, {"retained", ans.retained},
                     {"profile", str(ans.profile)}, {"u", ans.u}, {"w", ans.w}};
    ReducedPde r = reduce(pde, ans, checker_, *used);
    red["reduced_pde"] = to_json(r.pde);
    red["scale"] = str(r.scale);
    red["absence_residual"] = r.absence_residual;
    {
      Checker c = on_chart(checker_, pde.chart);
      c.sampler.set_range(ans.w, -2, 2);
      for (std::size_t i = 0; i < r.pde.dim(); ++i) {
        c.sampler.set_range(jet_name(r.pde.chart, ans.w, i), -2, 2);
        for (std::size_t j = i; j < r.pde.dim(); ++j) c.sampler.set_range(jet_name(r.pde.chart, ans.w, i, j), -2, 2);
      }
      const ZeroReport rt = c.report(round_trip_residual(pde, r), "round-trip");
      red["round_trip"] = to_json(rt);
      failure = failure || !rt.zero;
    }
    std::vector<SymmetryVector> extras;
    if (space_)
      if (auto comp = reduction_companion(o_.space, by, r.pde.chart); comp && r.pde.metric)
        for (const auto& g : comp->generators)
          if (g.cls != ConformalClass::Killing && g.cls != ConformalClass::NotCKV)
          {
            SymmetryVector x = generate_laplace(*r.pde.metric, g, Expr(0), Expr(0), checker_, ans.w).vector;
            x.name = "bar(" + g.name + ")";
            extras.push_back(std::move(x));
          }
    classify_reduced(originals, *used, r, pde.chart, extras, checker_);
    auto list = [](const std::vector<ReducedSymmetry>& v) {
      json a = json::array();
      for (const auto& s : v) {
        json j = detail::symmetry_entry(s.vector, &s.verification);
        if (!s.origin.empty()) j["origin"] = s.origin;
        a.push_back(std::move(j));
      }
      return a;
    };
    red["inherited"] = list(r.inherited);
    red["type_ii"] = list(r.hidden);
    red["broken"] = list(r.broken);
    red["rejected"] = list(r.rejected);
    red["lost"] = r.lost;
    json gov = json::array();
    for (const auto& g : r.govinder) {
      gov.push_back({{"name", g.name}, {"predicted", g.predicted}, {"c", g.c ? g.c->str() : std::string()},
                     {"verified", g.verified}});
      failure = failure || (g.predicted && !g.verified);
    }
    red["govinder"] = gov;
    report["reduction"] = red;
    return failure ? kVerificationFailure : kOk;
  }

  int sp_ckv_cmd(json& report, json& red) {
    const int m = static_cast<int>(space_->chart().dim()) - 1;
    const PdeSpec pde = laplace_pde(space_->metric);
    report["pde"] = to_json(pde);
    const SpCkvReduction r = sp_ckv_reduce(pde, m, checker_);
    red["coefficient"] = r.coefficient.str();
    red["ansatz"] = {{"reduction_coordinate", r.reduced.ansatz.reduction_coordinate},
                     {"retained", r.reduced.ansatz.retained},
                     {"profile", str(r.reduced.ansatz.profile)},
                     {"u", r.reduced.ansatz.u},
                     {"w", r.reduced.ansatz.w}};
    red["reduced_pde"] = to_json(r.reduced.pde);
    red["absence_residual"] = r.reduced.absence_residual;
    bool failure = false;
    if (r.metric_form) red["metric_form"] = to_json(*r.metric_form);
    else if (m >= 3) failure = true;
    report["reduction"] = red;
    return failure ? kVerificationFailure : kOk;
  }

  int catalog_cmd(json& report) {
    if (!space_) {
      json list = json::array();
      for (const auto& n : catalog_names()) {
        const CatalogSpace s = catalog_space(n);
        list.push_back({{"name", n}, {"dim", s.chart().dim()}, {"generators", s.generators.size()}, {"notes", s.notes}});
      }
      report["catalog"] = list;
      return kOk;
    }
    const CatalogSpace& s = *space_;
    report["space"] = {{"name", s.name}, {"coordinates", s.chart().coordinates()},
                       {"metric", to_json(s.metric.components())}, {"notes", s.notes}};
    json gens = json::array();
    bool ok = true;
    for (const auto& r : self_validate(s, checker_)) {
      json j = to_json(r.computed);
      j["matches_declared"] = r.ok;
      if (!r.ok) j["message"] = r.message;
      ok = ok && r.ok;
      gens.push_back(std::move(j));
    }
    report["classifications"] = gens;
    report["problem_text"] = to_problem_text(s);
    return ok ? kOk : kVerificationFailure;
  }

  Options o_;
  std::optional<Problem> problem_;
  std::optional<CatalogSpace> space_;
  Checker checker_;
};

/// Parse argv, run the command and write the report. Returns the exit code.
inline int run(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  CLI::App app{"conformal symmetries of second-order PDEs on curved spaces", "confsym"};
  app.require_subcommand(1);
  Options o;
  std::string tol, trials, seed;
  auto common = [&](CLI::App* sub) {
    sub->add_option("--input", o.input, "problem file");
    sub->add_option("--space", o.space, "catalogue space");
    sub->add_option("--tol", tol, "zero-test tolerance (default 1e-9)");
    sub->add_option("--trials", trials, "zero-test sample points (default 20)");
    sub->add_option("--seed", seed, "root seed (default 42)");
    sub->add_option("--output", o.output, "json or text")->check(CLI::IsMember({"json", "text"}));
  };
  auto* classify = app.add_subcommand("classify", "classify vector fields against a metric");
  auto* symmetries = app.add_subcommand("symmetries", "point symmetries generated from conformal Killing vectors");
  auto* verify = app.add_subcommand("verify", "verify candidate symmetries of a PDE");
  auto* reduce = app.add_subcommand("reduce", "reduce a PDE by a symmetry and partition the reduced symmetries");
  auto* catalog = app.add_subcommand("catalog", "list or export catalogue spaces");
  for (auto* s : {classify, symmetries, verify, reduce, catalog}) common(s);
  for (auto* s : {symmetries, verify, reduce}) {
    s->add_option("--pde", o.pde, "PDE kind for catalogue spaces");
    s->add_option("--potential", o.potential, "V (klein_gordon) or f (poisson) for catalogue spaces");
    s->add_option("--a0", o.a0, "constant part of the u-coefficient");
  }
  reduce->add_option("--by", o.by, "generator to reduce by");
  reduce->add_option("--mu", o.mu, "weight of u d_u added to the generator");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      out << app.help();
      return kOk;
    }
    err << "confsym: " << e.what() << "\n";
    return kInputError;
  }
  for (auto* s : {classify, symmetries, verify, reduce, catalog})
    if (s->parsed()) o.command = s->get_name();

  json report;
  int code = kOk;
  try {
    if (!tol.empty()) o.tol = std::stod(tol);
    if (!trials.empty()) o.trials = std::stoi(trials);
    if (!seed.empty()) o.seed = std::stoull(seed);
  } catch (const std::exception&) {
    err << "confsym: malformed numeric flag\n";
    return kInputError;
  }
  App runner(o);
  code = runner.run(report);
  if (report.contains("error")) {
    const auto& e = report["error"];
    err << "confsym: ";
    if (!o.input.empty()) err << o.input << ":";
    if (e.contains("line")) err << e["line"].get<std::size_t>() << ":" << e["column"].get<std::size_t>() << ": ";
    else if (!o.input.empty()) err << " ";
    err << e["message"].get<std::string>() << "\n";
  }
  if (o.output == "json") out << report.dump(2) << "\n";
  else out << render_text(report);
  return code;
}

}  // namespace confsym::cli
