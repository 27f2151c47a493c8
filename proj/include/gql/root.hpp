#pragma once

#include <cmath>
#include <string>

#include "errors.hpp"

namespace gql {

struct RootSolveReport {
  double root = 0.0;
  int iterations = 0;
  double residual = 0.0;
  double lo = 0.0;
  double hi = 0.0;
};

// Positive root of f by doubling from `start` until f changes sign, then
// Newton safeguarded by the bracket. f must be negative just above zero.
// `df` may return a non-finite value, in which case a bisection step is taken.
template <class F, class DF>
RootSolveReport positive_root(F&& f, DF&& df, double start, double residual_tol,
                              int max_doublings = 200, int max_iter = 200) {
  double lo = 0.0;
  double hi = start;
  double fhi = f(hi);
  int k = 0;
  while (!(fhi > 0.0)) {
    if (++k > max_doublings) throw NumericError("root bracketing failed");
    lo = hi;
    hi *= 2.0;
    fhi = f(hi);
  }
  // A second sign change further out means the root is not unique.
  {
    double probe = hi;
    for (int j = 0; j < 4; ++j) {
      probe *= 2.0;
      if (!(f(probe) > 0.0)) throw NumericError("multiple positive roots");
    }
  }
  RootSolveReport rep;
  rep.lo = lo;
  rep.hi = hi;
  double x = lo > 0.0 ? 0.5 * (lo + hi) : hi;
  double fx = f(x);
  double a = lo, b = hi;
  int it = 0;
  for (; it < max_iter; ++it) {
    if (fx == 0.0) break;
    if (fx > 0.0)
      b = x;
    else
      a = x;
    double d = df(x);
    double xn = x - fx / d;
    if (!std::isfinite(xn) || !(xn > a && xn < b)) xn = 0.5 * (a + b);
    double step = std::abs(xn - x);
    x = xn;
    fx = f(x);
    if (step <= 1e-15 * std::abs(x) || b - a <= 1e-15 * std::abs(x)) break;
  }
  rep.root = x;
  rep.iterations = it + 1;
  rep.residual = std::abs(fx);
  if (!(rep.residual <= residual_tol))
    throw NumericError("root residual " + std::to_string(rep.residual) + " above tolerance");
  return rep;
}

}  // namespace gql
