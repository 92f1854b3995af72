#pragma once

#include <vector>

#include "cranopt/types.hpp"

// General multi-user multi-RRH solvers. The fronthaul variables are
// expressed as psi = 2^(N t / B) - 1 (Gaussian model) or psi = 2^(N t / B)
// (uniform model), which makes the sum rate concave in psi for fixed power;
// the capacity constraint, concave in psi, is handled by successive convex
// approximation around the previous iterate.
namespace cranopt::multi {

struct PsiAllocation {
  std::vector<std::vector<double>> psi;  // [m][n]

  static PsiAllocation filled(int num_rrhs, int num_subcarriers, double value);
};

double psi_from_rate(double t_bps, double bandwidth_hz, int num_subcarriers,
                     QuantModel model);
double rate_from_psi(double psi, double bandwidth_hz, int num_subcarriers,
                     QuantModel model);
FronthaulAllocation psi_to_fronthaul(const PsiAllocation& psi, const Scenario& sc,
                                     QuantModel model);
PsiAllocation fronthaul_to_psi(const FronthaulAllocation& fronthaul, const Scenario& sc,
                               QuantModel model);

// Sum rate at (power, psi) for the given model, in bit/s.
double objective_bps(const Scenario& sc, const PowerAllocation& power,
                     const PsiAllocation& psi, QuantModel model);

// Concave power subproblem for fixed psi: per-user Lagrangian dual
// bisection, per-SC stationarity solved by bisection on the derivative.
// Users whose gains are all zero get zero power. KKT residuals of the
// returned point are below kkt_tol (relative).
PowerAllocation power_subproblem(const Scenario& sc, const PsiAllocation& psi_hat,
                                 QuantModel model = QuantModel::GaussianTestChannel,
                                 double kkt_tol = 1e-8);

// One SCA step for the fronthaul variables with power fixed: maximizes the
// (concave) sum rate subject to the capacity constraints linearized at
// psi_tilde. The returned point is feasible for the true constraints and
// never decreases the objective; both are checked at runtime. psi_tilde
// must itself satisfy the true constraints.
PsiAllocation fronthaul_sca_subproblem(const Scenario& sc, const PowerAllocation& p_hat,
                                       const PsiAllocation& psi_tilde,
                                       QuantModel model = QuantModel::GaussianTestChannel);

// Alternating power / SCA-fronthaul optimization of the Gaussian-model
// problem, initialized at the equal split psi = 2^(Tbar_m / B) - 1.
SolveReport algorithm_three(const Scenario& sc, const SolverOptions& opts = {});

// Uniform-model two-stage solve: relaxed alternation in psi = 2^(N t / B)
// (psi >= 1), then per-RRH rounding of log2(psi)/2 onto integer bit counts,
// each RRH with its own bisected rounding threshold, in index order.
SolveReport solve_p2_multi(const Scenario& sc, const SolverOptions& opts = {});

// Stage 1 of solve_p2_multi alone (no integer constraints).
SolveReport solve_p2_noint_multi(const Scenario& sc, const SolverOptions& opts = {});

}  // namespace cranopt::multi
