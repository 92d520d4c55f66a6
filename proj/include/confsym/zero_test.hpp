#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <string_view>
#include <utility>

#include "confsym/calculus.hpp"
#include "confsym/eval.hpp"

namespace confsym {

struct Range {
  double lo = 0.3;
  double hi = 1.7;
};

/// Derive an independent stream seed from a root seed, a check label and an
/// index, so adding a new check never perturbs the points of existing ones.
inline std::uint64_t derive_seed(std::uint64_t root, std::string_view label, std::uint64_t index = 0) {
  std::uint64_t h = 0xcbf29ce484222325ULL;  // FNV-1a
  for (const char c : label) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  auto splitmix = [](std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
  };
  return splitmix(splitmix(root ^ h) + index);
}

/// Deterministic uniform generator; mt19937_64 output is fixed by the standard,
/// and the mapping to [lo, hi) is done here so results do not depend on the
/// standard library's distribution implementation.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  double uniform(double lo, double hi) {
    const double u = static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    return lo + (hi - lo) * u;
  }
  double uniform(const Range& r) { return uniform(r.lo, r.hi); }

 private:
  std::mt19937_64 engine_;
};

/// Produces random evaluation points. Every symbol is drawn from its own
/// range if one is set, otherwise from the default range [0.3, 1.7], which
/// stays clear of the singular loci at 0 used by most catalogue charts.
class DomainSampler {
 public:
  explicit DomainSampler(std::uint64_t seed = 42) : seed_(seed) {}

  DomainSampler& set_range(const std::string& name, double lo, double hi) {
    ranges_[name] = Range{lo, hi};
    return *this;
  }
  DomainSampler& set_ranges(const std::map<std::string, Range, std::less<>>& ranges) {
    for (const auto& [k, v] : ranges) ranges_[k] = v;
    return *this;
  }
  DomainSampler& set_default(double lo, double hi) {
    default_ = Range{lo, hi};
    return *this;
  }
  DomainSampler& set_seed(std::uint64_t seed) {
    seed_ = seed;
    return *this;
  }
  DomainSampler& set_max_retries(int n) {
    max_retries_ = n;
    return *this;
  }

  [[nodiscard]] DomainSampler fork(std::string_view label, std::uint64_t index = 0) const {
    DomainSampler s = *this;
    s.seed_ = derive_seed(seed_, label, index);
    return s;
  }

  [[nodiscard]] std::uint64_t seed() const { return seed_; }
  [[nodiscard]] int max_retries() const { return max_retries_; }
  [[nodiscard]] Range range_for(std::string_view name) const {
    if (auto it = ranges_.find(name); it != ranges_.end()) return it->second;
    return default_;
  }
  [[nodiscard]] const std::map<std::string, Range, std::less<>>& ranges() const { return ranges_; }

  template <typename Names>
  Point sample(const Names& names, Rng& rng) const {
    Point p;
    for (const auto& n : names) p[std::string(n)] = rng.uniform(range_for(n));
    return p;
  }

 private:
  std::uint64_t seed_;
  Range default_{};
  std::map<std::string, Range, std::less<>> ranges_;
  int max_retries_ = 200;
};

/// Value of an expression at a point together with the largest magnitude of
/// any of its additive terms, used as the scale of the relative residual.
struct TermEvaluation {
  double value = 0.0;
  double scale = 0.0;
};

inline TermEvaluation evaluate_terms(const Expr& e, const Point& p) {
  TermEvaluation r;
  if (e.is(Kind::Sum)) {
    for (const auto& t : e.args()) {
      const double v = eval_num(t, p);
      r.value += v;
      r.scale = std::max(r.scale, std::abs(v));
    }
  } else {
    r.value = eval_num(e, p);
    r.scale = std::abs(r.value);
  }
  return r;
}

inline double relative_residual(const TermEvaluation& t) {
  return std::abs(t.value) / (1.0 + t.scale);
}

struct ZeroReport {
  bool zero = true;
  double max_residual = 0.0;
  int trials = 0;
  double tol = 0.0;
};

/// Draw an admissible point (every term finite, no domain error) for the
/// given symbols, retrying within the sampler's budget.
template <typename Fn>
auto sample_admissible(const DomainSampler& sampler, const std::set<std::string, std::less<>>& symbols,
                       Rng& rng, Fn&& fn) -> decltype(fn(std::declval<const Point&>())) {
  for (int attempt = 0; attempt < sampler.max_retries(); ++attempt) {
    const Point p = sampler.sample(symbols, rng);
    try {
      auto r = fn(p);
      if (r) return r;
    } catch (const DomainError&) {
    }
  }
  throw SamplerExhausted("no admissible sample point after " + std::to_string(sampler.max_retries()) +
                         " attempts");
}

/// Probabilistic identity test: every sampled point must satisfy
/// |e(p)| <= tol * (1 + scale(e, p)).
inline ZeroReport zero_report(const Expr& e, const DomainSampler& sampler, int trials = 20,
                              double tol = 1e-9) {
  if (trials < 1) throw InvalidArgument("is_zero: trials must be >= 1");
  ZeroReport report;
  report.trials = trials;
  report.tol = tol;
  if (e.is_zero()) return report;
  if (e.is_constant()) {
    report.zero = false;
    report.max_residual = std::abs(e.value().to_double());
    return report;
  }
  const auto symbols = free_symbols(e);
  Rng rng(sampler.seed());
  for (int i = 0; i < trials; ++i) {
    const auto eval = sample_admissible(sampler, symbols, rng, [&](const Point& p) -> std::optional<TermEvaluation> {
      auto t = evaluate_terms(e, p);
      if (!std::isfinite(t.value) || !std::isfinite(t.scale)) return std::nullopt;
      return t;
    });
    const double r = relative_residual(*eval);
    report.max_residual = std::max(report.max_residual, r);
    if (r > tol) report.zero = false;
  }
  return report;
}

inline bool is_zero(const Expr& e, const DomainSampler& sampler, int trials = 20, double tol = 1e-9) {
  return zero_report(e, sampler, trials, tol).zero;
}


/// Best rational approximation with denominator <= max_den, if it matches x
/// to within tol relative.
inline std::optional<Rational> rationalize(double x, std::int64_t max_den = 1000, double tol = 1e-9) {
  if (!std::isfinite(x) || std::abs(x) > 1e12) return std::nullopt;
  // continued fraction convergents
  std::int64_t p0 = 0, q0 = 1, p1 = 1, q1 = 0;
  double r = x;
  for (int it = 0; it < 40; ++it) {
    const double a = std::floor(r);
    const auto ai = static_cast<std::int64_t>(a);
    const std::int64_t p2 = ai * p1 + p0;
    const std::int64_t q2 = ai * q1 + q0;
    if (q2 > max_den) break;
    p0 = p1, q0 = q1, p1 = p2, q1 = q2;
    if (std::abs(x - static_cast<double>(p1) / static_cast<double>(q1)) <= tol * (1.0 + std::abs(x)))
      return Rational(p1, q1);
    const double frac = r - a;
    if (frac < 1e-15) break;
    r = 1.0 / frac;
  }
  return std::nullopt;
}

/// Zero-testing policy carried through every verification routine: the
/// sampler (root seed and symbol ranges), the number of trials and the
/// relative tolerance. Each check forks its own stream from a label.
struct Checker {
  DomainSampler sampler{42};
  int trials = 20;
  double tol = 1e-9;

  [[nodiscard]] ZeroReport report(const Expr& e, std::string_view label, std::uint64_t index = 0) const {
    return zero_report(e, sampler.fork(label, index), trials, tol);
  }
  [[nodiscard]] bool zero(const Expr& e, std::string_view label, std::uint64_t index = 0) const {
    return report(e, label, index).zero;
  }
  [[nodiscard]] Checker with_ranges(const std::map<std::string, Range, std::less<>>& ranges) const {
    Checker c = *this;
    c.sampler.set_ranges(ranges);
    return c;
  }
  [[nodiscard]] Checker with_seed(std::uint64_t seed) const {
    Checker c = *this;
    c.sampler.set_seed(seed);
    return c;
  }

  /// Value of an expression that is constant on the domain, as an exact
  /// rational when it is one (certified by the zero test).
  [[nodiscard]] std::optional<Rational> constant_value(const Expr& e, std::string_view label) const {
    if (e.is_constant()) return e.value();
    const auto symbols = free_symbols(e);
    const DomainSampler s = sampler.fork(label, 7);
    Rng rng(s.seed());
    const double v = *sample_admissible(s, symbols, rng, [&](const Point& p) -> std::optional<double> {
      const double x = eval_num(e, p);
      if (!std::isfinite(x)) return std::nullopt;
      return x;
    });
    auto r = rationalize(v);
    if (!r) return std::nullopt;
    if (!zero(e - Expr(*r), label, 8)) return std::nullopt;
    return r;
  }
};

}  // namespace confsym
