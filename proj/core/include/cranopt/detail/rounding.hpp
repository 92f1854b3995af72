#pragma once

#include <cmath>
#include <span>
#include <vector>

namespace cranopt::detail {

// Thresholded floor/ceil rounding of continuous bit counts x onto integers,
// with the threshold alpha bisected to the smallest value whose result still
// fits the capacity. alpha = 1 (all floors) is always feasible because the
// input is pre-shrunk onto the capacity. Fractional parts equal to alpha
// round down.
inline std::vector<int> round_bits_row(std::span<const double> x_in, double grid_bps,
                                       double cap_bps, double* alpha_out = nullptr) {
  std::vector<double> x(x_in.begin(), x_in.end());
  double total = 0.0;
  for (double v : x) total += v * grid_bps;
  if (total > cap_bps && total > 0.0) {
    const double shrink = cap_bps / total;
    for (double& v : x) v *= shrink;
  }

  std::vector<int> bits(x.size(), 0);
  auto round_at = [&](double alpha) {
    long long total_bits = 0;
    for (std::size_t n = 0; n < x.size(); ++n) {
      const double fl = std::floor(x[n]);
      bits[n] = static_cast<int>(fl) + ((x[n] - fl <= alpha) ? 0 : 1);
      total_bits += bits[n];
    }
    return static_cast<double>(total_bits) * grid_bps;
  };

  double lo = 0.0, hi = 1.0;
  for (int i = 0; i < 100; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (round_at(mid) <= cap_bps) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  round_at(hi);
  if (alpha_out) *alpha_out = hi;
  return bits;
}

}  // namespace cranopt::detail
