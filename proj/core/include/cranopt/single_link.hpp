#pragma once

#include <optional>
#include <span>
#include <vector>

#include "cranopt/types.hpp"

// Solvers for the single-user single-RRH special case: closed-form KKT
// allocations with dual bisection, the alternating algorithm for the
// Gaussian model, its uniform-quantizer counterpart, integer bit rounding,
// the cut-set bound and the constructive gap-to-capacity solutions.
// Every function requires K == M == 1 and throws std::invalid_argument
// otherwise.
namespace cranopt::single_link {

// Dual variables and per-SC intermediates of the closed-form solvers,
// exposed so the threshold structure can be inspected directly.
struct DualState {
  double lambda = 0.0;  // power dual
  double lambda_lo = 0.0, lambda_hi = 0.0;
  double beta = 0.0;  // fronthaul dual, in (0, 1/B)
  double beta_lo = 0.0, beta_hi = 0.0;
  std::vector<double> alpha;      // quadratic linear coefficient per SC
  std::vector<double> eta;        // quadratic constant per SC
  std::vector<double> threshold;  // gain/noise activation threshold f_n
  std::vector<double> snr;        // nu_n = gain p / sigma^2
  bool degenerate = false;        // solver returned the all-zero allocation
};

// Classical water-filling: p_n = max(1/(lambda N ln2) - sigma^2/gain, 0)
// with the dual bisected until the budget is met to 1e-10 relative.
// Throws SolveError when every channel gain is zero.
std::vector<double> water_filling(const Scenario& sc);

// Optimal power for fixed per-SC fronthaul rates t_hat (Gaussian model):
// positive root of the per-SC quadratic above a gain threshold, zero below.
// SCs with t_hat == 0 never receive power. Throws SolveError when no SC can
// be activated at any dual price.
std::vector<double> power_given_fronthaul(const Scenario& sc, std::span<const double> t_hat,
                                          DualState* dual = nullptr);

// Optimal fronthaul split for fixed power (Gaussian model): active SCs get
// (B/N) log2((1-beta B) nu / (beta B)); all-zero power yields the zero
// allocation with `degenerate` set in the dual state (beta left at 0).
std::vector<double> fronthaul_given_power(const Scenario& sc, std::span<const double> p_hat,
                                          DualState* dual = nullptr);

// Alternating optimization of power and fronthaul under the Gaussian model,
// starting from the equal fronthaul split. Trace is monotone non-decreasing.
SolveReport algorithm_one(const Scenario& sc, const SolverOptions& opts = {});

// min(water-filling spectral efficiency, fronthaul cap / B), in bit/s/Hz.
double cutset_bound(const Scenario& sc);

struct GapReferences {
  SolveReport gaussian_ref;  // objective/B >= C - 1
  SolveReport uniform_ref;   // objective/B >= C - 2, feasible for the uniform model
};

// Constructive solutions with provable distance to the cut-set bound: power
// from modified water-filling on halved gains under a rate budget, fronthaul
// chosen so the Gaussian-model quantization noise equals sigma^2 exactly
// (gaussian_ref) or 3 sigma^2 (uniform_ref).
GapReferences gap_reference_solutions(const Scenario& sc);

// Alternating optimization of the uniform-quantizer problem without integer
// bit constraints. The fronthaul step works on psi = 2^(N t / B), where the
// objective is concave, with the capacity constraint linearized around the
// previous iterate; this keeps every iterate feasible and the trace
// monotone. Default warm start is gap_reference_solutions().uniform_ref,
// which carries the worst-case gap guarantee.
SolveReport solve_p2_noint_single(const Scenario& sc, const SolverOptions& opts = {},
                                  const SolveReport* warm_start = nullptr);

// Rounds a continuous fronthaul allocation onto the 2B/N bit grid with the
// thresholded floor/ceil rule, bisecting the threshold so the result stays
// within capacity while rounding up as much as possible. Power is fixed.
FronthaulAllocation round_bits(const FronthaulAllocation& continuous, const Scenario& sc,
                               const PowerAllocation& power, double* alpha_star = nullptr);

// Two-stage uniform-quantizer solve: relaxed alternation, then bit rounding.
SolveReport solve_p2_single(const Scenario& sc, const SolverOptions& opts = {});

}  // namespace cranopt::single_link
