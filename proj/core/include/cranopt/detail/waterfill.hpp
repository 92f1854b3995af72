#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <vector>

#include "cranopt/types.hpp"

namespace cranopt::detail {

// Classical water-filling: p_i = max(level - floor_i, 0) with the water
// level bisected so the allocations sum to `budget`. Floors are
// noise-to-gain ratios; infinite floors (zero gain) never receive power.
// Throws SolveError when no channel can carry power.
inline std::vector<double> water_fill_levels(std::span<const double> floors, double budget,
                                             double rel_tol = 1e-12) {
  double min_floor = std::numeric_limits<double>::infinity();
  for (double f : floors) min_floor = std::min(min_floor, f);
  if (!std::isfinite(min_floor)) throw SolveError("water-filling: all channel gains are zero");

  std::vector<double> p(floors.size(), 0.0);
  if (budget <= 0.0) return p;

  auto fill = [&](double level) {
    double total = 0.0;
    for (std::size_t i = 0; i < floors.size(); ++i) {
      p[i] = std::isfinite(floors[i]) ? std::max(level - floors[i], 0.0) : 0.0;
      total += p[i];
    }
    return total;
  };

  double lo = min_floor;
  double hi = min_floor + budget;  // a single channel at min_floor absorbs it all
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    const double used = fill(mid);
    if (used < budget) {
      lo = mid;
    } else {
      hi = mid;
    }
    if (std::abs(used - budget) <= rel_tol * budget) break;
  }
  fill(hi);
  return p;
}

}  // namespace cranopt::detail
