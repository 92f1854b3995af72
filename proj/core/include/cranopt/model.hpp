#pragma once

#include <span>
#include <vector>

#include "cranopt/types.hpp"

// Analytic rate, SNR and fronthaul-load expressions shared by every solver
// and benchmark. All functions are pure and safe to call concurrently.
namespace cranopt::model {

struct RateBreakdown {
  std::vector<double> per_sc_bps;  // [n]
  double total_bps = 0.0;
};

// MRC combining weights for subcarrier n given per-RRH quantization noise
// variances q[m][n]: w_m = h_m / (sigma_m^2 + q_m), with real h = sqrt(gain).
std::vector<double> mrc_weights(const Scenario& sc,
                                const std::vector<std::vector<double>>& noise_q,
                                int n);

// Post-combining SNR for arbitrary weights (the generic quadratic form);
// exposed so tests can confirm the MRC weights are the maximizer.
double snr_with_weights(const Scenario& sc, const PowerAllocation& power,
                        const std::vector<std::vector<double>>& noise_q, int n,
                        std::span<const double> weights);

// Post-MRC SNR: sum_m gain*p / (sigma^2 + q).
double snr_post_mrc(const Scenario& sc, const PowerAllocation& power,
                    const std::vector<std::vector<double>>& noise_q, int n);

// End-to-end rates under the Gaussian test-channel quantization law.
// An RRH with t[m][n] == 0 contributes nothing on that SC (it does not
// forward the signal at all).
RateBreakdown gaussian_sum_rate(const Scenario& sc, const PowerAllocation& power,
                                const FronthaulAllocation& fronthaul);

// Fronthaul rate each RRH needs to carry its quantized stream with noise
// levels q. Throws std::domain_error when some q is zero with a nonzero
// received signal (the required rate would be infinite).
std::vector<double> gaussian_fronthaul_load(
    const Scenario& sc, const PowerAllocation& power,
    const std::vector<std::vector<double>>& noise_q);

// Quantization noise level that makes the Gaussian law consume exactly
// t_bps on one SC: q = (gain*p + sigma^2) / (2^(N t / B) - 1).
double gaussian_noise_for_rate(double signal_power_w, double t_bps, double bandwidth_hz,
                               int num_subcarriers);

// End-to-end rates under uniform scalar quantization,
// q = 3 (gain*p + sigma^2) 2^(-N t / B). With integer bit counts, a SC
// quantized with zero bits contributes zero rate; continuous allocations
// evaluate the formula as-is (the relaxation used by the solvers).
RateBreakdown uniform_sum_rate(const Scenario& sc, const PowerAllocation& power,
                               const FronthaulAllocation& fronthaul);

// Uniform-quantizer fronthaul load: sum_n 2 B d / N per RRH. Requires
// integer_bits.
std::vector<double> uniform_fronthaul_load(const FronthaulAllocation& fronthaul);

// Empty result iff all budgets, capacities, nonnegativity and (uniform
// model) integer-grid constraints hold within relative tolerance tol.
std::vector<Violation> check_feasible(const Scenario& sc, const PowerAllocation& power,
                                      const FronthaulAllocation& fronthaul,
                                      QuantModel model, double tol = 1e-9);

}  // namespace cranopt::model
