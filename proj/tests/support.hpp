#pragma once

#include <cmath>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include "confsym/calculus.hpp"
#include "confsym/eval.hpp"

namespace confsym::props {

// Random expressions in x, y that stay finite on [0.3, 1.7]^2: logs, roots
// and negative powers only ever see arguments bounded away from zero.
class TreeGen {
 public:
  explicit TreeGen(std::uint64_t seed) : rng_(seed) {}

  Expr tree(int depth) {
    if (depth <= 0 || pick(4) == 0) return leaf();
    const Expr a = tree(depth - 1);
    switch (pick(9)) {
      case 0: return a + tree(depth - 1);
      case 1: return a * tree(depth - 1);
      case 2: return a - tree(depth - 1);
      case 3: return pow(a, Expr(static_cast<std::int64_t>(pick(3) + 2)));
      case 4: return sin(a);
      case 5: return cos(a);
      case 6: return exp(Expr(Rational(1, 2)) * sin(a));
      case 7: return ln(Expr(2) + a * a);
      default: return Expr(1) / (Expr(1) + a * a);
    }
  }

  Expr leaf() {
    switch (pick(4)) {
      case 0: return sym("x", SymbolKind::Coordinate);
      case 1: return sym("y", SymbolKind::Coordinate);
      case 2: return Expr(Rational(static_cast<std::int64_t>(pick(7)) - 3, static_cast<std::int64_t>(pick(3)) + 1));
      default: return sqrt(Expr(1) + sym("x", SymbolKind::Coordinate) * sym("y", SymbolKind::Coordinate));
    }
  }

  Point point() {
    std::uniform_real_distribution<double> d(0.3, 1.7);
    return {{"x", d(rng_)}, {"y", d(rng_)}};
  }

 private:
  std::size_t pick(std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng_); }
  std::mt19937_64 rng_;
};

// Fourth-order central difference, taken at the step where successive
// halvings agree best.
inline double finite_difference(const Expr& e, Point p, const std::string& var) {
  const double x0 = p.at(var);
  auto at = [&](double dx) {
    p[var] = x0 + dx;
    return eval_num(e, p);
  };
  auto fd = [&](double h) { return (-at(2 * h) + 8 * at(h) - 8 * at(-h) + at(-2 * h)) / (12 * h); };
  double h = 1e-2;
  double prev = fd(h);
  double best = prev;
  double gap = std::numeric_limits<double>::infinity();
  for (int k = 0; k < 10; ++k) {
    h /= 2;
    const double cur = fd(h);
    if (std::abs(cur - prev) < gap) {
      gap = std::abs(cur - prev);
      best = cur;
    }
    prev = cur;
  }
  return best;
}

}  // namespace confsym::props
