#include "cranopt/single_link.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "cranopt/detail/bisect.hpp"
#include "cranopt/detail/rounding.hpp"
#include "cranopt/detail/waterfill.hpp"
#include "cranopt/model.hpp"

namespace cranopt::single_link {
namespace {

constexpr double kLn2 = std::numbers::ln2;

void require_1x1(const Scenario& sc) {
  sc.validate();
  if (sc.num_users != 1 || sc.num_rrhs != 1) {
    throw std::invalid_argument("single_link solvers require K = 1 and M = 1");
  }
}

struct Link {
  int n_sc;
  double bandwidth;
  double sc_bw;
  double budget;     // watts
  double capacity;   // bit/s
  std::vector<double> gain;    // |h_n|^2
  std::vector<double> noise;   // sigma_n^2
};

Link link_view(const Scenario& sc) {
  Link link;
  link.n_sc = sc.num_subcarriers;
  link.bandwidth = sc.bandwidth_hz;
  link.sc_bw = sc.sc_bandwidth_hz();
  link.budget = sc.power_budget[0];
  link.capacity = sc.fronthaul_cap[0];
  link.gain = sc.channel_gain_sq[0][0];
  link.noise = sc.noise_var[0];
  return link;
}

bool any_positive_gain(const Link& link) {
  return std::any_of(link.gain.begin(), link.gain.end(), [](double g) { return g > 0.0; });
}

SolveReport zero_report(const Scenario& sc, std::string note) {
  SolveReport report;
  report.power = PowerAllocation::zeros(sc.num_users, sc.num_subcarriers);
  report.fronthaul = FronthaulAllocation::zeros(sc.num_rrhs, sc.num_subcarriers);
  report.objective_bps = 0.0;
  report.objective_trace = {0.0};
  report.iterations = 0;
  report.converged = true;
  report.notes = std::move(note);
  return report;
}

PowerAllocation wrap_power(const Scenario& sc, std::vector<double> p) {
  PowerAllocation out = PowerAllocation::zeros(sc.num_users, sc.num_subcarriers);
  out.p[0] = std::move(p);
  return out;
}

FronthaulAllocation wrap_fronthaul(const Scenario& sc, std::vector<double> t) {
  FronthaulAllocation out = FronthaulAllocation::zeros(sc.num_rrhs, sc.num_subcarriers);
  out.t[0] = std::move(t);
  return out;
}

double gaussian_objective(const Scenario& sc, const std::vector<double>& p,
                          const std::vector<double>& t) {
  auto power = wrap_power(sc, p);
  auto fh = wrap_fronthaul(sc, t);
  return model::gaussian_sum_rate(sc, power, fh).total_bps;
}

double uniform_objective(const Scenario& sc, const std::vector<double>& p,
                         const std::vector<double>& t) {
  auto power = wrap_power(sc, p);
  auto fh = wrap_fronthaul(sc, t);
  return model::uniform_sum_rate(sc, power, fh).total_bps;
}

// ---- uniform-model relaxed subproblems (P2 without integer bits) ----

// Power step: for fixed t the per-SC rate is B/N log2(1 + g p / (A + Bc p))
// with A = sigma^2 (1 + 3 c), Bc = 3 c g, c = 2^(-N t / B); concave in p.
std::vector<double> uniform_power_step(const Link& link, const std::vector<double>& t_hat) {
  const int n_sc = link.n_sc;
  std::vector<double> coef_a(n_sc), coef_bc(n_sc);
  for (int n = 0; n < n_sc; ++n) {
    const double c = std::exp2(-n_sc * t_hat[n] / link.bandwidth);
    coef_a[n] = link.noise[n] * (1.0 + 3.0 * c);
    coef_bc[n] = 3.0 * c * link.gain[n];
  }

  auto deriv = [&](int n, double p) {
    const double g = link.gain[n];
    const double d1 = coef_a[n] + coef_bc[n] * p;
    const double d2 = coef_a[n] + (coef_bc[n] + g) * p;
    return (link.sc_bw / kLn2) * g * coef_a[n] / (d1 * d2);
  };

  std::vector<double> p(n_sc, 0.0);
  auto allocate = [&](double lambda) {
    double total = 0.0;
    for (int n = 0; n < n_sc; ++n) {
      p[n] = 0.0;
      if (link.gain[n] <= 0.0 || deriv(n, 0.0) <= lambda) continue;
      double hi = 1.0;
      while (deriv(n, hi) > lambda) hi *= 2.0;
      p[n] = detail::bisect_root_decreasing([&](double x) { return deriv(n, x) - lambda; }, 0.0, hi);
      total += p[n];
    }
    return total;
  };

  const double lambda =
      detail::bisect_dual_to_budget([&](double lam) { return allocate(lam); }, link.budget, 1e-11);
  allocate(lambda);
  return p;
}

// Fronthaul step: one SCA pass in psi = 2^(N t / B) >= 1, where the rate is
// concave, with the capacity constraint log2-linearized at psi_tilde. The
// result stays feasible for the true constraint and cannot decrease the
// objective (both checked by the caller).
std::vector<double> uniform_fronthaul_sca_step(const Link& link, const std::vector<double>& p_hat,
                                               const std::vector<double>& psi_tilde) {
  const int n_sc = link.n_sc;
  std::vector<double> a(n_sc), d(n_sc), lin_coef(n_sc);
  double lin_budget = link.capacity;
  bool any_signal = false;
  for (int n = 0; n < n_sc; ++n) {
    a[n] = link.gain[n] * p_hat[n];
    d[n] = 3.0 * (a[n] + link.noise[n]);
    any_signal = any_signal || a[n] > 0.0;
    lin_coef[n] = link.sc_bw / (psi_tilde[n] * kLn2);
    lin_budget -= link.sc_bw * (std::log2(psi_tilde[n]) - 1.0 / kLn2);
  }
  if (!any_signal) return std::vector<double>(n_sc, 1.0);

  auto deriv = [&](int n, double psi) {
    const double s = link.noise[n];
    return (link.sc_bw / kLn2) * a[n] * d[n] / (((s + a[n]) * psi + d[n]) * (s * psi + d[n]));
  };

  std::vector<double> psi(n_sc, 1.0);
  auto allocate = [&](double mu) {
    double used = 0.0;
    for (int n = 0; n < n_sc; ++n) {
      psi[n] = 1.0;
      if (a[n] > 0.0 && deriv(n, 1.0) > mu * lin_coef[n]) {
        double hi = 2.0;
        while (deriv(n, hi) > mu * lin_coef[n]) hi *= 2.0;
        psi[n] = detail::bisect_root_decreasing(
            [&](double x) { return deriv(n, x) - mu * lin_coef[n]; }, 1.0, hi);
      }
      used += lin_coef[n] * psi[n];
    }
    return used;
  };

  const double mu =
      detail::bisect_dual_to_budget([&](double m) { return allocate(m); }, lin_budget, 1e-11);
  allocate(mu);
  return psi;
}

std::vector<double> psi_to_rate(const Link& link, const std::vector<double>& psi) {
  std::vector<double> t(link.n_sc);
  for (int n = 0; n < link.n_sc; ++n) t[n] = link.sc_bw * std::log2(psi[n]);
  return t;
}

}  // namespace

std::vector<double> water_filling(const Scenario& sc) {
  require_1x1(sc);
  const Link link = link_view(sc);
  if (!(link.budget > 0.0)) throw std::invalid_argument("water filling needs a positive budget");
  std::vector<double> floors(link.n_sc);
  for (int n = 0; n < link.n_sc; ++n) {
    floors[n] = link.gain[n] > 0.0 ? link.noise[n] / link.gain[n]
                                   : std::numeric_limits<double>::infinity();
  }
  return detail::water_fill_levels(floors, link.budget, 1e-12);
}

std::vector<double> power_given_fronthaul(const Scenario& sc, std::span<const double> t_hat,
                                          DualState* dual) {
  require_1x1(sc);
  const Link link = link_view(sc);
  if (static_cast<int>(t_hat.size()) != link.n_sc) {
    throw std::invalid_argument("t_hat size mismatch");
  }
  for (double t : t_hat) {
    if (t < 0.0 || !std::isfinite(t)) throw std::invalid_argument("t_hat must be finite and >= 0");
  }

  // expo_n = 2^(N t / B); SCs with t = 0 have an infinite activation
  // threshold and never receive power. Exponents are clamped well inside
  // double range; beyond the clamp the allocation equals the water-filling
  // limit to far below solver tolerance.
  std::vector<double> expo(link.n_sc);
  bool any_active = false;
  for (int n = 0; n < link.n_sc; ++n) {
    expo[n] = std::exp2(std::min(link.n_sc * t_hat[n] / link.bandwidth, 480.0));
    any_active = any_active || (expo[n] > 1.0 && link.gain[n] > 0.0);
  }
  if (!any_active) {
    throw SolveError("power_given_fronthaul: no subcarrier can be activated "
                     "(zero fronthaul or zero gain everywhere)");
  }

  std::vector<double> p(link.n_sc, 0.0);
  auto allocate = [&](double lambda) {
    double total = 0.0;
    for (int n = 0; n < link.n_sc; ++n) {
      p[n] = 0.0;
      const double g = link.gain[n];
      const double s = link.noise[n];
      if (g <= 0.0 || expo[n] <= 1.0) continue;
      const double alpha = s * (expo[n] + 1.0) / g;
      const double eta =
          s * s * expo[n] / (g * g) - s * (expo[n] - 1.0) / (lambda * link.n_sc * g * kLn2);
      if (eta < 0.0) {
        // conjugate form of the positive quadratic root; the textbook
        // (-alpha + sqrt(alpha^2 - 4 eta))/2 cancels to zero when |eta|
        // is many orders below alpha^2
        p[n] = -2.0 * eta / (alpha + std::sqrt(alpha * alpha - 4.0 * eta));
        total += p[n];
      }
    }
    return total;
  };

  const double lambda =
      detail::bisect_dual_to_budget([&](double lam) { return allocate(lam); }, link.budget, 1e-11);
  allocate(lambda);

  if (dual) {
    dual->lambda = lambda;
    dual->alpha.assign(link.n_sc, 0.0);
    dual->eta.assign(link.n_sc, 0.0);
    dual->threshold.assign(link.n_sc, std::numeric_limits<double>::infinity());
    for (int n = 0; n < link.n_sc; ++n) {
      const double g = link.gain[n];
      if (g <= 0.0) continue;
      dual->alpha[n] = link.noise[n] * (expo[n] + 1.0) / g;
      dual->eta[n] = link.noise[n] * link.noise[n] * expo[n] / (g * g) -
                     link.noise[n] * (expo[n] - 1.0) / (lambda * link.n_sc * g * kLn2);
      if (expo[n] > 1.0) {
        dual->threshold[n] = expo[n] * lambda * link.n_sc * kLn2 / (expo[n] - 1.0);
      }
    }
  }
  return p;
}

std::vector<double> fronthaul_given_power(const Scenario& sc, std::span<const double> p_hat,
                                          DualState* dual) {
  require_1x1(sc);
  const Link link = link_view(sc);
  if (static_cast<int>(p_hat.size()) != link.n_sc) {
    throw std::invalid_argument("p_hat size mismatch");
  }
  if (!(link.capacity > 0.0)) {
    throw std::invalid_argument("fronthaul_given_power needs a positive capacity");
  }

  std::vector<double> nu(link.n_sc);
  bool any_signal = false;
  for (int n = 0; n < link.n_sc; ++n) {
    if (p_hat[n] < 0.0) throw std::invalid_argument("p_hat must be >= 0");
    nu[n] = link.gain[n] * p_hat[n] / link.noise[n];
    any_signal = any_signal || nu[n] > 0.0;
  }
  if (dual) {
    dual->snr = nu;
    dual->degenerate = false;
  }
  if (!any_signal) {
    if (dual) {
      dual->beta = 0.0;
      dual->degenerate = true;
    }
    return std::vector<double>(link.n_sc, 0.0);
  }

  std::vector<double> t(link.n_sc, 0.0);
  auto allocate = [&](double beta) {
    const double bb = beta * link.bandwidth;
    const double ratio = (1.0 - bb) / bb;
    double total = 0.0;
    for (int n = 0; n < link.n_sc; ++n) {
      t[n] = 0.0;
      if (nu[n] > 1.0 / ratio) {
        t[n] = link.sc_bw * std::log2(ratio * nu[n]);
        total += t[n];
      }
    }
    return total;
  };

  const double beta_lo = 1e-280 / link.bandwidth;
  const double beta_hi = (1.0 - 1e-13) / link.bandwidth;
  double beta = beta_hi;
  {
    // geometric bisection on (0, 1/B); usage decreases from huge to 0
    double lo = beta_lo;
    double hi = beta_hi;
    for (int i = 0; i < 260; ++i) {
      const double mid = std::sqrt(lo * hi);
      const double used = allocate(mid);
      if (used > link.capacity) {
        lo = mid;
      } else {
        hi = mid;
        beta = mid;
        if (link.capacity - used <= 1e-11 * link.capacity) break;
      }
    }
  }
  allocate(beta);

  if (dual) {
    dual->beta = beta;
    dual->beta_lo = beta_lo;
    dual->beta_hi = beta_hi;
  }
  return t;
}

SolveReport algorithm_one(const Scenario& sc, const SolverOptions& opts) {
  require_1x1(sc);
  const Link link = link_view(sc);
  if (!any_positive_gain(link)) return zero_report(sc, "all channel gains are zero");
  if (!(link.budget > 0.0)) return zero_report(sc, "zero power budget");
  if (!(link.capacity > 0.0)) return zero_report(sc, "zero fronthaul capacity");

  std::vector<double> t(link.n_sc, link.capacity / link.n_sc);
  std::vector<double> p(link.n_sc, 0.0);

  SolveReport report;
  double prev = 0.0;
  for (int iter = 1; iter <= opts.max_iter; ++iter) {
    p = power_given_fronthaul(sc, t);
    t = fronthaul_given_power(sc, p);
    const double objective = gaussian_objective(sc, p, t);
    report.objective_trace.push_back(objective);
    report.iterations = iter;
    if (objective - prev <= opts.eps_rel * std::max(objective, 1e-300)) {
      report.converged = true;
      break;
    }
    prev = objective;
  }

  report.power = wrap_power(sc, std::move(p));
  report.fronthaul = wrap_fronthaul(sc, std::move(t));
  report.objective_bps = report.objective_trace.back();
  return report;
}

double cutset_bound(const Scenario& sc) {
  require_1x1(sc);
  const Link link = link_view(sc);
  if (!any_positive_gain(link) || !(link.budget > 0.0)) {
    return 0.0;
  }
  const std::vector<double> p_wf = water_filling(sc);
  double wireless = 0.0;
  for (int n = 0; n < link.n_sc; ++n) {
    wireless += std::log2(1.0 + link.gain[n] * p_wf[n] / link.noise[n]);
  }
  wireless /= link.n_sc;
  return std::min(wireless, link.capacity / link.bandwidth);
}

GapReferences gap_reference_solutions(const Scenario& sc) {
  require_1x1(sc);
  const Link link = link_view(sc);

  GapReferences out;
  if (!any_positive_gain(link) || !(link.budget > 0.0)) {
    out.gaussian_ref = zero_report(sc, "gap reference: no usable channel");
    out.uniform_ref = zero_report(sc, "gap reference: no usable channel");
    return out;
  }
  // The construction spends B/N of fronthaul per SC even at zero power; it
  // only exists when the capacity admits at least that.
  if (link.capacity / link.bandwidth <= 1.0) {
    out.gaussian_ref = zero_report(sc, "gap reference: capacity below one bit/s/Hz, degenerate");
    out.uniform_ref = zero_report(sc, "gap reference: capacity below one bit/s/Hz, degenerate");
    return out;
  }

  // Power from water-filling on halved gains, subject to the rate budget
  // (1/N) sum log2(1 + g p / 2 sigma^2) <= Tbar/B - 1.
  std::vector<double> floors(link.n_sc);
  for (int n = 0; n < link.n_sc; ++n) {
    floors[n] = link.gain[n] > 0.0 ? 2.0 * link.noise[n] / link.gain[n]
                                   : std::numeric_limits<double>::infinity();
  }
  std::vector<double> p = detail::water_fill_levels(floors, link.budget, 1e-12);

  auto halved_rate = [&](const std::vector<double>& power) {
    double rate = 0.0;
    for (int n = 0; n < link.n_sc; ++n) {
      rate += std::log2(1.0 + link.gain[n] * power[n] / (2.0 * link.noise[n]));
    }
    return rate / link.n_sc;
  };

  const double rate_cap = link.capacity / link.bandwidth - 1.0;
  std::string note = "gap reference: unconstrained modified water-filling";
  if (halved_rate(p) > rate_cap) {
    // Scale the water level down until the rate budget holds with equality.
    double level_hi = 0.0;
    for (int n = 0; n < link.n_sc; ++n) {
      if (std::isfinite(floors[n])) level_hi = std::max(level_hi, floors[n] + p[n]);
    }
    double lo = 0.0;
    double hi = level_hi;
    std::vector<double> trial(link.n_sc, 0.0);
    auto rate_at = [&](double level) {
      for (int n = 0; n < link.n_sc; ++n) {
        trial[n] = std::isfinite(floors[n]) ? std::max(level - floors[n], 0.0) : 0.0;
      }
      return halved_rate(trial);
    };
    for (int i = 0; i < 200; ++i) {
      const double mid = 0.5 * (lo + hi);
      if (rate_at(mid) > rate_cap) {
        hi = mid;
      } else {
        lo = mid;
      }
    }
    rate_at(lo);
    p = trial;
    note = "gap reference: water level reduced to meet the fronthaul rate budget";
  }

  // Gaussian construction: fronthaul so the quantization noise equals
  // sigma^2 on every SC. Uniform construction: noise 3 sigma^2, carried by
  // log2(1 + g p / sigma^2) per SC.
  std::vector<double> t_gauss(link.n_sc), t_uni(link.n_sc);
  for (int n = 0; n < link.n_sc; ++n) {
    const double snr = link.gain[n] * p[n] / link.noise[n];
    t_gauss[n] = link.sc_bw * std::log2(2.0 + snr);
    t_uni[n] = link.sc_bw * std::log2(1.0 + snr);
  }

  auto make_ref = [&](std::vector<double> t, bool gaussian) {
    SolveReport ref;
    ref.power = wrap_power(sc, p);
    ref.fronthaul = wrap_fronthaul(sc, std::move(t));
    ref.objective_bps = gaussian
                            ? model::gaussian_sum_rate(sc, ref.power, ref.fronthaul).total_bps
                            : model::uniform_sum_rate(sc, ref.power, ref.fronthaul).total_bps;
    ref.objective_trace = {ref.objective_bps};
    ref.iterations = 0;
    ref.converged = true;
    ref.notes = note;
    return ref;
  };
  out.gaussian_ref = make_ref(std::move(t_gauss), true);
  out.uniform_ref = make_ref(std::move(t_uni), false);
  return out;
}

SolveReport solve_p2_noint_single(const Scenario& sc, const SolverOptions& opts,
                                  const SolveReport* warm_start) {
  require_1x1(sc);
  const Link link = link_view(sc);
  if (!any_positive_gain(link)) return zero_report(sc, "all channel gains are zero");
  if (!(link.budget > 0.0)) return zero_report(sc, "zero power budget");
  if (!(link.capacity > 0.0)) return zero_report(sc, "zero fronthaul capacity");

  GapReferences refs;
  if (!warm_start) {
    refs = gap_reference_solutions(sc);
    warm_start = &refs.uniform_ref;
  }

  std::vector<double> p = warm_start->power.p[0];
  std::vector<double> psi(link.n_sc);
  for (int n = 0; n < link.n_sc; ++n) {
    psi[n] = std::exp2(link.n_sc * warm_start->fronthaul.t[0][n] / link.bandwidth);
  }

  SolveReport report;
  double prev = uniform_objective(sc, p, psi_to_rate(link, psi));
  const double warm_objective = prev;
  const double inner_tol = std::max(opts.eps_rel * 0.1, 1e-10);
  for (int iter = 1; iter <= opts.max_iter; ++iter) {
    p = uniform_power_step(link, psi_to_rate(link, psi));

    // re-linearize the fronthaul step until it reaches its own fixed point
    double inner_prev = uniform_objective(sc, p, psi_to_rate(link, psi));
    for (int inner = 0; inner < 200; ++inner) {
      const std::vector<double> psi_new = uniform_fronthaul_sca_step(link, p, psi);
      double true_load = 0.0;
      for (int n = 0; n < link.n_sc; ++n) true_load += link.sc_bw * std::log2(psi_new[n]);
      if (true_load > link.capacity * (1.0 + 1e-7) + 1e-9) {
        throw SolveError("uniform fronthaul step left the true capacity constraint");
      }
      const double inner_obj = uniform_objective(sc, p, psi_to_rate(link, psi_new));
      if (inner_obj < inner_prev * (1.0 - 1e-7) - 1e-9) {
        throw SolveError("uniform fronthaul step decreased the objective");
      }
      psi = psi_new;
      if (inner_obj - inner_prev <= inner_tol * std::max(inner_obj, 1e-300)) break;
      inner_prev = inner_obj;
    }

    const double objective = uniform_objective(sc, p, psi_to_rate(link, psi));
    report.objective_trace.push_back(objective);
    report.iterations = iter;
    if (objective - prev <= opts.eps_rel * std::max(objective, 1e-300)) {
      report.converged = true;
      break;
    }
    prev = objective;
  }

  report.power = wrap_power(sc, std::move(p));
  report.fronthaul = wrap_fronthaul(sc, psi_to_rate(link, psi));
  report.objective_bps = report.objective_trace.back();
  if (report.objective_bps + 1e-9 < warm_objective) {
    throw SolveError("relaxed uniform solve fell below its warm start");
  }
  return report;
}

FronthaulAllocation round_bits(const FronthaulAllocation& continuous, const Scenario& sc,
                               const PowerAllocation& power, double* alpha_star) {
  require_1x1(sc);
  (void)power;  // rounding keeps power fixed; it enters only via the objective guarantee
  const Link link = link_view(sc);
  if (static_cast<int>(continuous.t.size()) != 1 ||
      static_cast<int>(continuous.t[0].size()) != link.n_sc) {
    throw std::invalid_argument("round_bits: allocation shape mismatch");
  }

  const double grid = sc.bit_grid_bps();
  std::vector<double> x(link.n_sc);
  for (int n = 0; n < link.n_sc; ++n) x[n] = continuous.t[0][n] / grid;
  std::vector<int> bits = detail::round_bits_row(x, grid, link.capacity, alpha_star);
  return FronthaulAllocation::from_bits({bits}, grid);
}

SolveReport solve_p2_single(const Scenario& sc, const SolverOptions& opts) {
  SolveReport relaxed = solve_p2_noint_single(sc, opts);
  double alpha = 1.0;
  FronthaulAllocation rounded = round_bits(relaxed.fronthaul, sc, relaxed.power, &alpha);

  SolveReport report = relaxed;
  report.fronthaul = std::move(rounded);
  report.objective_bps = model::uniform_sum_rate(sc, report.power, report.fronthaul).total_bps;
  report.objective_trace.push_back(report.objective_bps);
  std::ostringstream notes;
  notes << "relaxed objective " << relaxed.objective_bps << " bit/s; bit rounding alpha* = "
        << alpha;
  report.notes = notes.str();
  return report;
}

}  // namespace cranopt::single_link
