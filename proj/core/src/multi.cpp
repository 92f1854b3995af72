#include "cranopt/multi.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "cranopt/detail/bisect.hpp"
#include "cranopt/detail/rounding.hpp"
#include "cranopt/model.hpp"

namespace cranopt::multi {
namespace {

constexpr double kLn2 = std::numbers::ln2;

// Both rate laws share the per-(m, n) fractional form
//   phi(psi; p) = gain p psi / (sigma^2 psi + d(p))
// with d = gain p + sigma^2 for the Gaussian test channel and
// d = 3 (gain p + sigma^2) for uniform scalar quantization, and likewise
//   phi(p; psi) = num p / (den0 + denp p)
// in the power direction. psi has lower bound 0 (Gaussian) or 1 (uniform).
double quant_offset(QuantModel model) {
  return model == QuantModel::GaussianTestChannel ? 1.0 : 3.0;
}
double psi_lower_bound(QuantModel model) {
  return model == QuantModel::GaussianTestChannel ? 0.0 : 1.0;
}

// Exponents above ~1e308 would turn psi into inf; clamp the init instead.
double initial_psi(double cap_bps, double bandwidth_hz, QuantModel model) {
  const double shift = model == QuantModel::GaussianTestChannel ? -1.0 : 0.0;
  return std::exp2(std::min(cap_bps / bandwidth_hz, 960.0)) + shift;
}

struct Problem {
  const Scenario& sc;
  QuantModel model;
  double sc_bw;
  double offset;  // 1 or 3
  double lower;   // psi lower bound

  Problem(const Scenario& s, QuantModel mod)
      : sc(s), model(mod), sc_bw(s.sc_bandwidth_hz()), offset(quant_offset(mod)),
        lower(psi_lower_bound(mod)) {}

  double gain(int m, int n) const { return sc.channel_gain_sq[m][sc.sc_owner[n]][n]; }
  double noise(int m, int n) const { return sc.noise_var[m][n]; }
};

double sc_snr(const Problem& pb, const PowerAllocation& power,
              const std::vector<std::vector<double>>& psi, int n) {
  const int k = pb.sc.sc_owner[n];
  const double p = power.p[k][n];
  double snr = 0.0;
  for (int m = 0; m < pb.sc.num_rrhs; ++m) {
    const double gp = pb.gain(m, n) * p;
    const double denom = pb.noise(m, n) * psi[m][n] + pb.offset * (gp + pb.noise(m, n));
    if (denom > 0.0 && psi[m][n] > 0.0) snr += gp * psi[m][n] / denom;
  }
  return snr;
}

double total_objective(const Problem& pb, const PowerAllocation& power,
                       const std::vector<std::vector<double>>& psi) {
  double total = 0.0;
  for (int n = 0; n < pb.sc.num_subcarriers; ++n) {
    total += pb.sc_bw * std::log2(1.0 + sc_snr(pb, power, psi, n));
  }
  return total;
}

// ---- power subproblem -----------------------------------------------------

PowerAllocation solve_power(const Problem& pb, const PsiAllocation& psi_hat, double kkt_tol,
                            std::string* notes) {
  const Scenario& sc = pb.sc;
  PowerAllocation power = PowerAllocation::zeros(sc.num_users, sc.num_subcarriers);

  for (int k = 0; k < sc.num_users; ++k) {
    const std::vector<int> owned = sc.owned_scs(k);
    if (owned.empty() || !(sc.power_budget[k] > 0.0)) continue;

    // phi_m(p) = num p / (den0 + denp p) per (m, SC); zero rows drop out.
    struct Coef {
      double num, den0, denp;
    };
    std::vector<std::vector<Coef>> coefs(owned.size());
    bool any_signal = false;
    for (std::size_t i = 0; i < owned.size(); ++i) {
      const int n = owned[i];
      for (int m = 0; m < sc.num_rrhs; ++m) {
        const double g = pb.gain(m, n);
        const double psi = psi_hat.psi[m][n];
        if (g <= 0.0 || psi <= 0.0) continue;
        coefs[i].push_back({g * psi, pb.noise(m, n) * (psi + pb.offset), pb.offset * g});
        any_signal = true;
      }
    }
    if (!any_signal) {
      if (notes) {
        if (!notes->empty()) *notes += "; ";
        *notes += "user " + std::to_string(k) + " has no usable channel, zero power";
      }
      continue;
    }

    auto rate_deriv = [&](std::size_t i, double p) {
      double phi_sum = 0.0;
      double dphi_sum = 0.0;
      for (const Coef& c : coefs[i]) {
        const double den = c.den0 + c.denp * p;
        phi_sum += c.num * p / den;
        // factored to stay in range when psi_hat (hence num, den0) is huge
        dphi_sum += (c.num / den) * (c.den0 / den);
      }
      return (pb.sc_bw / kLn2) * dphi_sum / (1.0 + phi_sum);
    };

    std::vector<double> p_user(owned.size(), 0.0);
    auto allocate = [&](double lambda) {
      double total = 0.0;
      for (std::size_t i = 0; i < owned.size(); ++i) {
        p_user[i] = 0.0;
        if (coefs[i].empty() || rate_deriv(i, 0.0) <= lambda) continue;
        double hi = 1.0;
        while (rate_deriv(i, hi) > lambda) hi *= 2.0;
        p_user[i] = detail::bisect_root_decreasing(
            [&](double x) { return rate_deriv(i, x) - lambda; }, 0.0, hi);
        total += p_user[i];
      }
      return total;
    };

    const double budget = sc.power_budget[k];
    const double lambda =
        detail::bisect_dual_to_budget([&](double lam) { return allocate(lam); }, budget, 1e-11);
    const double used = allocate(lambda);

    if (std::abs(used - budget) > kkt_tol * budget) {
      throw SolveError("power subproblem: budget residual above tolerance for user " +
                       std::to_string(k));
    }
    for (std::size_t i = 0; i < owned.size(); ++i) power.p[k][owned[i]] = p_user[i];
  }
  return power;
}

// ---- fronthaul SCA subproblem ---------------------------------------------

// Maximizes sum_n (B/N) log2(1 + sum_m a psi/(b psi + d)) over psi >= lower
// subject to the linearized per-RRH constraints sum_n c[m][n] psi <= budget[m].
// Per-RRH dual prices are adjusted by Gauss-Seidel bisection sweeps; for
// fixed prices the per-SC optimality system is solved exactly through the
// scalar fixed point Z = 1 + sum_m phi_m(psi_m(Z)).
struct ScaWorkspace {
  std::vector<std::vector<double>> psi;
  std::vector<double> mu;
};

void solve_sca(const Problem& pb, const PowerAllocation& p_hat,
               const std::vector<std::vector<double>>& lin_coef,
               const std::vector<double>& lin_budget, ScaWorkspace& ws) {
  const Scenario& sc = pb.sc;
  const int n_rrh = sc.num_rrhs;
  const int n_sc = sc.num_subcarriers;

  // a, b, d per (m, n); K = (B/N / ln2) a d is the stationarity numerator.
  std::vector<std::vector<double>> a(n_rrh, std::vector<double>(n_sc, 0.0));
  std::vector<std::vector<double>> d(n_rrh, std::vector<double>(n_sc, 0.0));
  std::vector<char> rrh_active(n_rrh, 0);
  for (int m = 0; m < n_rrh; ++m) {
    for (int n = 0; n < n_sc; ++n) {
      const int k = sc.sc_owner[n];
      a[m][n] = pb.gain(m, n) * p_hat.p[k][n];
      d[m][n] = pb.offset * (a[m][n] + pb.noise(m, n));
      if (a[m][n] > 0.0) rrh_active[m] = 1;
    }
  }

  ws.psi.assign(n_rrh, std::vector<double>(n_sc, pb.lower));
  ws.mu.assign(n_rrh, 0.0);

  // Per-SC solve for the current dual prices. Returns psi column for SC n.
  std::vector<double> col(n_rrh);
  auto solve_sc = [&](int n, const std::vector<double>& mu) -> const std::vector<double>& {
    double z_max = 1.0;
    for (int m = 0; m < n_rrh; ++m) {
      col[m] = pb.lower;
      if (a[m][n] > 0.0 && rrh_active[m]) z_max += a[m][n] / pb.noise(m, n);
    }
    if (z_max == 1.0) return col;  // nothing received on this SC

    auto psi_at = [&](int m, double z) {
      const double price = mu[m] * lin_coef[m][n];
      if (price <= 0.0) return std::numeric_limits<double>::infinity();
      const double k_num = (pb.sc_bw / kLn2) * a[m][n] * d[m][n];
      const double root = std::sqrt(k_num / (price * z));
      return std::max((root - d[m][n]) / pb.noise(m, n), pb.lower);
    };
    auto excess = [&](double z) {
      double phi_sum = 0.0;
      for (int m = 0; m < n_rrh; ++m) {
        if (a[m][n] <= 0.0 || !rrh_active[m]) continue;
        const double psi = psi_at(m, z);
        if (std::isinf(psi)) {
          phi_sum += a[m][n] / pb.noise(m, n);
        } else if (psi > 0.0) {
          phi_sum += a[m][n] * psi / (pb.noise(m, n) * psi + d[m][n]);
        }
      }
      return 1.0 + phi_sum - z;
    };

    double lo = 1.0, hi = z_max;
    if (excess(hi) >= 0.0) {
      lo = hi;
    } else {
      for (int it = 0; it < 90; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (excess(mid) > 0.0) {
          lo = mid;
        } else {
          hi = mid;
        }
        if (hi - lo <= 1e-12 * hi) break;
      }
    }
    const double z = 0.5 * (lo + hi);
    for (int m = 0; m < n_rrh; ++m) {
      if (a[m][n] > 0.0 && rrh_active[m]) {
        const double psi = psi_at(m, z);
        col[m] = std::isinf(psi) ? z_max * 1e30 : psi;  // inf only while bracketing mu
      }
    }
    return col;
  };

  auto rrh_usage = [&](int m) {
    double used = 0.0;
    for (int n = 0; n < n_sc; ++n) used += lin_coef[m][n] * ws.psi[m][n];
    return used;
  };

  // Gauss-Seidel over the per-RRH prices. Inactive RRHs keep psi at the
  // lower bound and price zero.
  std::vector<double> mu = ws.mu;
  auto refresh_all = [&](const std::vector<double>& prices) {
    for (int n = 0; n < n_sc; ++n) {
      const auto& column = solve_sc(n, prices);
      for (int m = 0; m < n_rrh; ++m) ws.psi[m][n] = column[m];
    }
  };

  for (int sweep = 0; sweep < 200; ++sweep) {
    for (int m = 0; m < n_rrh; ++m) {
      if (!rrh_active[m]) continue;
      mu[m] = detail::bisect_dual_to_budget(
          [&](double price) {
            std::vector<double> trial = mu;
            trial[m] = price;
            double used = 0.0;
            for (int n = 0; n < n_sc; ++n) {
              if (a[m][n] <= 0.0) {
                used += lin_coef[m][n] * pb.lower;
              } else {
                used += lin_coef[m][n] * solve_sc(n, trial)[m];
              }
            }
            return used;
          },
          lin_budget[m], 1e-11, 200);
    }
    // residuals measured only after the full sweep: every dual update
    // shifts the usage of the RRHs already visited
    refresh_all(mu);
    double worst = 0.0;
    for (int m = 0; m < n_rrh; ++m) {
      if (!rrh_active[m]) continue;
      worst = std::max(worst, std::abs(rrh_usage(m) - lin_budget[m]) /
                                  std::max(lin_budget[m], 1e-300));
    }
    if (worst <= 1e-9) break;
  }
  ws.mu = mu;

  // Row-local feasibility repair: shrink any row still above its linearized
  // budget toward the lower bound (the budget is affine in psi, so the
  // scaled row meets it exactly; feasibility for the true constraint then
  // follows from the linearization being an upper bound).
  for (int m = 0; m < n_rrh; ++m) {
    if (!rrh_active[m]) continue;
    double base = 0.0;
    for (int n = 0; n < n_sc; ++n) base += lin_coef[m][n] * pb.lower;
    const double used = rrh_usage(m);
    if (used > lin_budget[m] && used > base) {
      const double scale = std::max((lin_budget[m] - base) / (used - base), 0.0);
      for (int n = 0; n < n_sc; ++n) {
        ws.psi[m][n] = pb.lower + scale * (ws.psi[m][n] - pb.lower);
      }
    }
  }
}

PsiAllocation sca_step(const Problem& pb, const PowerAllocation& p_hat,
                       const PsiAllocation& psi_tilde) {
  const Scenario& sc = pb.sc;
  const int n_rrh = sc.num_rrhs;
  const int n_sc = sc.num_subcarriers;
  const bool gaussian = pb.model == QuantModel::GaussianTestChannel;

  std::vector<std::vector<double>> lin_coef(n_rrh, std::vector<double>(n_sc));
  std::vector<double> lin_budget(sc.fronthaul_cap);
  for (int m = 0; m < n_rrh; ++m) {
    for (int n = 0; n < n_sc; ++n) {
      const double ref = psi_tilde.psi[m][n];
      if (gaussian) {
        lin_coef[m][n] = pb.sc_bw / ((1.0 + ref) * kLn2);
        lin_budget[m] -= pb.sc_bw * (std::log2(1.0 + ref) - ref / ((1.0 + ref) * kLn2));
      } else {
        lin_coef[m][n] = pb.sc_bw / (ref * kLn2);
        lin_budget[m] -= pb.sc_bw * (std::log2(ref) - 1.0 / kLn2);
      }
    }
  }

  ScaWorkspace ws;
  solve_sca(pb, p_hat, lin_coef, lin_budget, ws);

  // Feasibility for the true constraints is implied by the linearization
  // being an upper bound on the true load; verify anyway.
  for (int m = 0; m < n_rrh; ++m) {
    double true_load = 0.0;
    for (int n = 0; n < n_sc; ++n) {
      true_load += pb.sc_bw * (gaussian ? std::log2(1.0 + ws.psi[m][n])
                                        : std::log2(ws.psi[m][n]));
    }
    if (true_load > sc.fronthaul_cap[m] * (1.0 + 1e-7) + 1e-9) {
      throw SolveError("fronthaul SCA step violated a true capacity constraint");
    }
  }
  const double before = total_objective(pb, p_hat, psi_tilde.psi);
  PsiAllocation out;
  out.psi = std::move(ws.psi);
  const double after = total_objective(pb, p_hat, out.psi);
  if (after < before * (1.0 - 1e-7) - 1e-9) {
    throw SolveError("fronthaul SCA step decreased the objective");
  }
  return out;
}

SolveReport alternate(const Problem& pb, const SolverOptions& opts) {
  const Scenario& sc = pb.sc;
  PsiAllocation psi;
  psi.psi.assign(sc.num_rrhs, std::vector<double>(sc.num_subcarriers, 0.0));
  for (int m = 0; m < sc.num_rrhs; ++m) {
    const double init = initial_psi(sc.fronthaul_cap[m], sc.bandwidth_hz, pb.model);
    std::fill(psi.psi[m].begin(), psi.psi[m].end(), std::max(init, pb.lower));
  }

  SolveReport report;
  std::string notes;
  PowerAllocation power = PowerAllocation::zeros(sc.num_users, sc.num_subcarriers);
  double prev = 0.0;
  const double inner_tol = std::max(opts.eps_rel * 0.1, 1e-10);
  for (int iter = 1; iter <= opts.max_iter; ++iter) {
    power = solve_power(pb, psi, 1e-8, &notes);
    // The convexified fronthaul subproblem is re-linearized until it
    // reaches its own fixed point; a single pass can stall the outer
    // alternation at a visibly inferior block-stationary point.
    double inner_prev = total_objective(pb, power, psi.psi);
    for (int inner = 0; inner < 200; ++inner) {
      psi = sca_step(pb, power, psi);
      const double inner_obj = total_objective(pb, power, psi.psi);
      if (inner_obj - inner_prev <= inner_tol * std::max(inner_obj, 1e-300)) break;
      inner_prev = inner_obj;
    }
    const double objective = total_objective(pb, power, psi.psi);
    report.objective_trace.push_back(objective);
    report.iterations = iter;
    if (objective - prev <= opts.eps_rel * std::max(objective, 1e-300)) {
      report.converged = true;
      break;
    }
    prev = objective;
  }

  report.power = std::move(power);
  report.fronthaul = psi_to_fronthaul(psi, sc, pb.model);
  report.objective_bps = report.objective_trace.back();
  report.notes = std::move(notes);
  return report;
}

}  // namespace

PsiAllocation PsiAllocation::filled(int num_rrhs, int num_subcarriers, double value) {
  PsiAllocation out;
  out.psi.assign(num_rrhs, std::vector<double>(num_subcarriers, value));
  return out;
}

double psi_from_rate(double t_bps, double bandwidth_hz, int num_subcarriers, QuantModel model) {
  const double e = std::exp2(std::min(num_subcarriers * t_bps / bandwidth_hz, 960.0));
  return model == QuantModel::GaussianTestChannel ? e - 1.0 : e;
}

double rate_from_psi(double psi, double bandwidth_hz, int num_subcarriers, QuantModel model) {
  const double e = model == QuantModel::GaussianTestChannel ? psi + 1.0 : psi;
  return bandwidth_hz / num_subcarriers * std::log2(e);
}

FronthaulAllocation psi_to_fronthaul(const PsiAllocation& psi, const Scenario& sc,
                                     QuantModel model) {
  FronthaulAllocation out = FronthaulAllocation::zeros(sc.num_rrhs, sc.num_subcarriers);
  for (int m = 0; m < sc.num_rrhs; ++m) {
    for (int n = 0; n < sc.num_subcarriers; ++n) {
      out.t[m][n] = rate_from_psi(psi.psi[m][n], sc.bandwidth_hz, sc.num_subcarriers, model);
    }
  }
  return out;
}

PsiAllocation fronthaul_to_psi(const FronthaulAllocation& fronthaul, const Scenario& sc,
                               QuantModel model) {
  PsiAllocation out;
  out.psi.assign(sc.num_rrhs, std::vector<double>(sc.num_subcarriers, 0.0));
  for (int m = 0; m < sc.num_rrhs; ++m) {
    for (int n = 0; n < sc.num_subcarriers; ++n) {
      out.psi[m][n] =
          psi_from_rate(fronthaul.t[m][n], sc.bandwidth_hz, sc.num_subcarriers, model);
    }
  }
  return out;
}

double objective_bps(const Scenario& sc, const PowerAllocation& power, const PsiAllocation& psi,
                     QuantModel model) {
  Problem pb(sc, model);
  return total_objective(pb, power, psi.psi);
}

PowerAllocation power_subproblem(const Scenario& sc, const PsiAllocation& psi_hat,
                                 QuantModel model, double kkt_tol) {
  sc.validate();
  Problem pb(sc, model);
  return solve_power(pb, psi_hat, kkt_tol, nullptr);
}

PsiAllocation fronthaul_sca_subproblem(const Scenario& sc, const PowerAllocation& p_hat,
                                       const PsiAllocation& psi_tilde, QuantModel model) {
  sc.validate();
  Problem pb(sc, model);
  const bool gaussian = model == QuantModel::GaussianTestChannel;
  for (int m = 0; m < sc.num_rrhs; ++m) {
    double load = 0.0;
    for (int n = 0; n < sc.num_subcarriers; ++n) {
      const double psi = psi_tilde.psi[m][n];
      if (psi < pb.lower) throw std::invalid_argument("psi_tilde below the model lower bound");
      load += pb.sc_bw * (gaussian ? std::log2(1.0 + psi) : std::log2(psi));
    }
    if (load > sc.fronthaul_cap[m] * (1.0 + 1e-9) + 1e-9) {
      throw std::invalid_argument("psi_tilde is infeasible for the true fronthaul constraints");
    }
  }
  return sca_step(pb, p_hat, psi_tilde);
}

SolveReport algorithm_three(const Scenario& sc, const SolverOptions& opts) {
  sc.validate();
  Problem pb(sc, QuantModel::GaussianTestChannel);
  return alternate(pb, opts);
}

SolveReport solve_p2_noint_multi(const Scenario& sc, const SolverOptions& opts) {
  sc.validate();
  Problem pb(sc, QuantModel::UniformScalar);
  return alternate(pb, opts);
}

SolveReport solve_p2_multi(const Scenario& sc, const SolverOptions& opts) {
  SolveReport relaxed = solve_p2_noint_multi(sc, opts);

  const double grid = sc.bit_grid_bps();
  std::vector<std::vector<int>> bits(sc.num_rrhs);
  std::ostringstream alphas;
  for (int m = 0; m < sc.num_rrhs; ++m) {
    std::vector<double> x(sc.num_subcarriers);
    for (int n = 0; n < sc.num_subcarriers; ++n) {
      // N t / (2B) = log2(psi) / 2 continuous bit count
      x[n] = sc.num_subcarriers * relaxed.fronthaul.t[m][n] / (2.0 * sc.bandwidth_hz);
    }
    double alpha = 1.0;
    bits[m] = detail::round_bits_row(x, grid, sc.fronthaul_cap[m], &alpha);
    alphas << (m ? ", " : "") << alpha;
  }

  SolveReport report = relaxed;
  report.fronthaul = FronthaulAllocation::from_bits(bits, grid);
  report.objective_bps = model::uniform_sum_rate(sc, report.power, report.fronthaul).total_bps;
  report.objective_trace.push_back(report.objective_bps);
  std::ostringstream notes;
  if (!relaxed.notes.empty()) notes << relaxed.notes << "; ";
  notes << "relaxed objective " << relaxed.objective_bps << " bit/s; per-RRH rounding alpha* = ["
        << alphas.str() << "]";
  report.notes = notes.str();
  return report;
}

}  // namespace cranopt::multi
