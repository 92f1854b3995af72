#pragma once

#include <cmath>
#include <limits>

#include "cranopt/types.hpp"

namespace cranopt::detail {

// Finds x > 0 such that usage(x) == budget for a non-increasing, continuous
// usage function, by bracket doubling plus geometric bisection. Returns the
// feasible-side endpoint (usage <= budget). Used for every power/fronthaul
// dual variable in this project: resource usage always shrinks as the dual
// price grows.
template <class F>
double bisect_dual_to_budget(F&& usage, double budget, double rel_tol = 1e-12,
                             int max_iter = 240) {
  double hi = 1.0;
  int guard = 0;
  while (usage(hi) > budget) {
    hi *= 2.0;
    if (++guard > 4200) throw SolveError("dual bisection: no upper bracket");
  }
  double lo = hi;
  while (usage(lo) < budget) {
    lo *= 0.5;
    if (lo < 1e-300) break;  // usage saturates below budget even at ~zero price
  }
  if (usage(lo) < budget) return lo;

  double x = hi;
  for (int i = 0; i < max_iter; ++i) {
    const double mid = std::sqrt(lo * hi);
    const double used = usage(mid);
    if (used > budget) {
      lo = mid;
    } else {
      hi = mid;
      x = mid;
      if (budget - used <= rel_tol * std::abs(budget)) break;
    }
    if (hi - lo <= 1e-16 * hi) break;
  }
  return x;
}

// Linear bisection of a non-increasing usage over the open interval
// (lo, hi); same feasible-side convention as above.
template <class F>
double bisect_dual_on_interval(F&& usage, double budget, double lo, double hi,
                               double rel_tol = 1e-12, int max_iter = 240) {
  double x = hi;
  for (int i = 0; i < max_iter; ++i) {
    const double mid = 0.5 * (lo + hi);
    const double used = usage(mid);
    if (used > budget) {
      lo = mid;
    } else {
      hi = mid;
      x = mid;
      if (budget - used <= rel_tol * std::abs(budget)) break;
    }
  }
  return x;
}

// Root of a strictly decreasing function on [lo, hi] with f(lo) > 0 > f(hi),
// used for inner stationarity conditions (derivative minus price).
template <class F>
double bisect_root_decreasing(F&& f, double lo, double hi, int max_iter = 120) {
  for (int i = 0; i < max_iter; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (f(mid) > 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace cranopt::detail
