#include "cranopt/benchmarks.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "cranopt/detail/rounding.hpp"
#include "cranopt/detail/waterfill.hpp"
#include "cranopt/model.hpp"
#include "cranopt/multi.hpp"

namespace cranopt::benchmarks {
namespace {

PowerAllocation equal_power(const Scenario& sc) {
  PowerAllocation power = PowerAllocation::zeros(sc.num_users, sc.num_subcarriers);
  for (int k = 0; k < sc.num_users; ++k) {
    const auto owned = sc.owned_scs(k);
    if (owned.empty()) continue;
    const double share = sc.power_budget[k] / static_cast<double>(owned.size());
    for (int n : owned) power.p[k][n] = share;
  }
  return power;
}

// Water-filling per user against the combined no-quantization channel
// sum_m gain/sigma^2 (for M = 1 this is the classical solution).
PowerAllocation waterfilling_power(const Scenario& sc) {
  PowerAllocation power = PowerAllocation::zeros(sc.num_users, sc.num_subcarriers);
  for (int k = 0; k < sc.num_users; ++k) {
    const auto owned = sc.owned_scs(k);
    if (owned.empty() || !(sc.power_budget[k] > 0.0)) continue;
    std::vector<double> floors(owned.size());
    for (std::size_t i = 0; i < owned.size(); ++i) {
      double combined = 0.0;
      for (int m = 0; m < sc.num_rrhs; ++m) {
        combined += sc.channel_gain_sq[m][k][owned[i]] / sc.noise_var[m][owned[i]];
      }
      floors[i] = combined > 0.0 ? 1.0 / combined : std::numeric_limits<double>::infinity();
    }
    bool usable = std::any_of(floors.begin(), floors.end(),
                              [](double f) { return std::isfinite(f); });
    if (!usable) continue;
    const auto p = detail::water_fill_levels(floors, sc.power_budget[k], 1e-12);
    for (std::size_t i = 0; i < owned.size(); ++i) power.p[k][owned[i]] = p[i];
  }
  return power;
}

// Equal fronthaul split; under the uniform model the per-SC rate is snapped
// down to the nearest feasible integer bit count.
FronthaulAllocation equal_fronthaul(const Scenario& sc, QuantModel model) {
  if (model == QuantModel::UniformScalar) {
    std::vector<std::vector<int>> bits(sc.num_rrhs);
    for (int m = 0; m < sc.num_rrhs; ++m) {
      const int per_sc = static_cast<int>(std::floor(sc.fronthaul_cap[m] /
                                                     (2.0 * sc.bandwidth_hz)));
      bits[m].assign(sc.num_subcarriers, per_sc);
    }
    return FronthaulAllocation::from_bits(bits, sc.bit_grid_bps());
  }
  FronthaulAllocation fh = FronthaulAllocation::zeros(sc.num_rrhs, sc.num_subcarriers);
  for (int m = 0; m < sc.num_rrhs; ++m) {
    std::fill(fh.t[m].begin(), fh.t[m].end(), sc.fronthaul_cap[m] / sc.num_subcarriers);
  }
  return fh;
}

double evaluate(const Scenario& sc, const PowerAllocation& power,
                const FronthaulAllocation& fh, QuantModel model) {
  return model == QuantModel::GaussianTestChannel
             ? model::gaussian_sum_rate(sc, power, fh).total_bps
             : model::uniform_sum_rate(sc, power, fh).total_bps;
}

// psi view of an integer-bit allocation for the power optimizer: SCs carried
// with zero bits are dead, which psi = 0 encodes.
multi::PsiAllocation psi_for_power_opt(const Scenario& sc, const FronthaulAllocation& fh,
                                       QuantModel model) {
  multi::PsiAllocation psi = multi::fronthaul_to_psi(fh, sc, model);
  if (model == QuantModel::UniformScalar && fh.integer_bits) {
    for (int m = 0; m < sc.num_rrhs; ++m) {
      for (int n = 0; n < sc.num_subcarriers; ++n) {
        if (fh.d[m][n] == 0) psi.psi[m][n] = 0.0;
      }
    }
  }
  return psi;
}

// Optimizes fronthaul for fixed power by iterating the SCA step to a fixed
// point; uniform-model results are rounded onto the bit grid afterwards.
SolveReport optimize_fronthaul(const Scenario& sc, PowerAllocation power, QuantModel model,
                               const SolverOptions& opts) {
  SolveReport report;
  multi::PsiAllocation psi;
  psi.psi.assign(sc.num_rrhs, std::vector<double>(sc.num_subcarriers, 0.0));
  const double lower = model == QuantModel::GaussianTestChannel ? 0.0 : 1.0;
  for (int m = 0; m < sc.num_rrhs; ++m) {
    const double shift = model == QuantModel::GaussianTestChannel ? -1.0 : 0.0;
    const double init =
        std::max(std::exp2(std::min(sc.fronthaul_cap[m] / sc.bandwidth_hz, 960.0)) + shift, lower);
    std::fill(psi.psi[m].begin(), psi.psi[m].end(), init);
  }

  double prev = multi::objective_bps(sc, power, psi, model);
  for (int iter = 1; iter <= opts.max_iter; ++iter) {
    psi = multi::fronthaul_sca_subproblem(sc, power, psi, model);
    const double objective = multi::objective_bps(sc, power, psi, model);
    report.objective_trace.push_back(objective);
    report.iterations = iter;
    if (objective - prev <= opts.eps_rel * std::max(objective, 1e-300)) {
      report.converged = true;
      break;
    }
    prev = objective;
  }

  report.fronthaul = multi::psi_to_fronthaul(psi, sc, model);
  if (model == QuantModel::UniformScalar) {
    std::vector<std::vector<int>> bits(sc.num_rrhs);
    for (int m = 0; m < sc.num_rrhs; ++m) {
      std::vector<double> x(sc.num_subcarriers);
      for (int n = 0; n < sc.num_subcarriers; ++n) {
        x[n] = sc.num_subcarriers * report.fronthaul.t[m][n] / (2.0 * sc.bandwidth_hz);
      }
      bits[m] = detail::round_bits_row(x, sc.bit_grid_bps(), sc.fronthaul_cap[m]);
    }
    report.fronthaul = FronthaulAllocation::from_bits(bits, sc.bit_grid_bps());
    report.notes = "fronthaul optimized continuously, then rounded onto the bit grid";
  }
  report.objective_bps = evaluate(sc, power, report.fronthaul, model);
  if (!report.objective_trace.empty()) report.objective_trace.push_back(report.objective_bps);
  else report.objective_trace = {report.objective_bps};
  report.power = std::move(power);
  return report;
}

std::vector<int> nearest_by_mean_gain(const Scenario& sc) {
  std::vector<int> serving(sc.num_users, 0);
  for (int k = 0; k < sc.num_users; ++k) {
    const auto owned = sc.owned_scs(k);
    double best = -1.0;
    for (int m = 0; m < sc.num_rrhs; ++m) {
      double mean = 0.0;
      for (int n : owned) mean += sc.channel_gain_sq[m][k][n];
      if (!owned.empty()) mean /= static_cast<double>(owned.size());
      if (mean > best) {
        best = mean;
        serving[k] = m;
      }
    }
  }
  return serving;
}

SolveReport conventional_ofdma(const Scenario& sc, const std::vector<int>* nearest_rrh) {
  const std::vector<int> serving = nearest_rrh ? *nearest_rrh : nearest_by_mean_gain(sc);
  if (static_cast<int>(serving.size()) != sc.num_users) {
    throw std::invalid_argument("nearest-RRH map size mismatch");
  }

  SolveReport report;
  report.power = PowerAllocation::zeros(sc.num_users, sc.num_subcarriers);
  report.fronthaul = FronthaulAllocation::zeros(sc.num_rrhs, sc.num_subcarriers);
  const double sc_bw = sc.sc_bandwidth_hz();

  for (int k = 0; k < sc.num_users; ++k) {
    const int m = serving[k];
    const auto owned = sc.owned_scs(k);
    if (owned.empty() || !(sc.power_budget[k] > 0.0)) continue;
    std::vector<double> floors(owned.size());
    bool usable = false;
    for (std::size_t i = 0; i < owned.size(); ++i) {
      const double g = sc.channel_gain_sq[m][k][owned[i]];
      floors[i] = g > 0.0 ? sc.noise_var[m][owned[i]] / g
                          : std::numeric_limits<double>::infinity();
      usable = usable || g > 0.0;
    }
    if (!usable) continue;
    const auto p = detail::water_fill_levels(floors, sc.power_budget[k], 1e-12);
    for (std::size_t i = 0; i < owned.size(); ++i) {
      const int n = owned[i];
      report.power.p[k][n] = p[i];
      report.objective_bps +=
          sc_bw * std::log2(1.0 + sc.channel_gain_sq[m][k][n] * p[i] / sc.noise_var[m][n]);
    }
  }
  report.objective_trace = {report.objective_bps};
  report.iterations = 0;
  report.converged = true;
  report.notes = "local decoding at the serving RRH; rate independent of fronthaul capacity";
  return report;
}

}  // namespace

std::string to_string(Scheme scheme) {
  switch (scheme) {
    case Scheme::EqualPower: return "equal-power";
    case Scheme::WaterFillingPower: return "wf-power";
    case Scheme::EqualFronthaul: return "equal-fronthaul";
    case Scheme::EqualBoth: return "equal-both";
    case Scheme::ConventionalOFDMA: return "conventional-ofdma";
  }
  return "unknown";
}

std::vector<Scheme> all_schemes() {
  return {Scheme::EqualPower, Scheme::WaterFillingPower, Scheme::EqualFronthaul,
          Scheme::EqualBoth, Scheme::ConventionalOFDMA};
}

SolveReport run_benchmark(Scheme scheme, const Scenario& sc, QuantModel model,
                          const SolverOptions& opts, const std::vector<int>* nearest_rrh) {
  sc.validate();
  switch (scheme) {
    case Scheme::EqualPower:
      return optimize_fronthaul(sc, equal_power(sc), model, opts);

    case Scheme::WaterFillingPower:
      return optimize_fronthaul(sc, waterfilling_power(sc), model, opts);

    case Scheme::EqualFronthaul: {
      SolveReport report;
      report.fronthaul = equal_fronthaul(sc, model);
      report.power = multi::power_subproblem(sc, psi_for_power_opt(sc, report.fronthaul, model),
                                             model);
      report.objective_bps = evaluate(sc, report.power, report.fronthaul, model);
      report.objective_trace = {report.objective_bps};
      report.iterations = 1;
      report.converged = true;
      if (model == QuantModel::UniformScalar) {
        report.notes = "equal split snapped down to the bit grid";
      }
      return report;
    }

    case Scheme::EqualBoth: {
      SolveReport report;
      report.power = equal_power(sc);
      report.fronthaul = equal_fronthaul(sc, model);
      report.objective_bps = evaluate(sc, report.power, report.fronthaul, model);
      report.objective_trace = {report.objective_bps};
      report.iterations = 0;
      report.converged = true;
      return report;
    }

    case Scheme::ConventionalOFDMA:
      return conventional_ofdma(sc, nearest_rrh);
  }
  throw std::invalid_argument("unknown benchmark scheme");
}

}  // namespace cranopt::benchmarks
