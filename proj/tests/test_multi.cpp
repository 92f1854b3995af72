#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "cranopt/detail/waterfill.hpp"
#include "cranopt/model.hpp"
#include "cranopt/multi.hpp"
#include "cranopt/single_link.hpp"
#include "test_util.hpp"

using namespace cranopt;
using namespace cranopt::multi;

namespace {

double true_fronthaul_load(const Scenario& sc, const PsiAllocation& psi, QuantModel model,
                           int m) {
  double load = 0.0;
  for (int n = 0; n < sc.num_subcarriers; ++n) {
    load += rate_from_psi(psi.psi[m][n], sc.bandwidth_hz, sc.num_subcarriers, model);
  }
  return load;
}

double linearized_load(const Scenario& sc, const PsiAllocation& psi,
                       const PsiAllocation& ref, int m) {
  const double sc_bw = sc.sc_bandwidth_hz();
  double load = 0.0;
  for (int n = 0; n < sc.num_subcarriers; ++n) {
    const double r = ref.psi[m][n];
    load += sc_bw * (std::log2(1.0 + r) +
                     (psi.psi[m][n] - r) / ((1.0 + r) * std::numbers::ln2));
  }
  return load;
}

}  // namespace

TEST_SUITE("multi") {

TEST_CASE("psi and rate conversions round trip") {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> unif(0.0, 40.0);
  for (int trial = 0; trial < 200; ++trial) {
    const double t = unif(rng) * 1e6;
    for (QuantModel model : {QuantModel::GaussianTestChannel, QuantModel::UniformScalar}) {
      const double psi = psi_from_rate(t, 100e6, 32, model);
      const double back = rate_from_psi(psi, 100e6, 32, model);
      CHECK(back == doctest::Approx(t).scale(1e6).epsilon(1e-12));
    }
  }
}

TEST_CASE("power subproblem reduces to the single-link closed form at M = 1") {
  std::mt19937_64 rng(22);
  for (int trial = 0; trial < 10; ++trial) {
    Scenario sc = testutil::random_1x1(rng, 6);
    std::uniform_real_distribution<double> tdist(0.2, 3.0);
    std::vector<double> t_hat(6);
    for (double& t : t_hat) t = tdist(rng) * sc.sc_bandwidth_hz();

    auto p_closed = single_link::power_given_fronthaul(sc, t_hat);

    PsiAllocation psi;
    psi.psi.assign(1, std::vector<double>(6));
    for (int n = 0; n < 6; ++n) {
      psi.psi[0][n] = psi_from_rate(t_hat[n], sc.bandwidth_hz, 6,
                                    QuantModel::GaussianTestChannel);
    }
    auto p_multi = power_subproblem(sc, psi, QuantModel::GaussianTestChannel);
    for (int n = 0; n < 6; ++n) {
      CHECK(p_multi.p[0][n] ==
            doctest::Approx(p_closed[n]).scale(sc.power_budget[0]).epsilon(1e-6));
    }
  }
}

TEST_CASE("zero psi means zero optimal power") {
  std::mt19937_64 rng(23);
  Scenario sc = testutil::random_multi(rng, 2, 2, 4);
  auto psi = PsiAllocation::filled(2, 4, 0.0);
  auto power = power_subproblem(sc, psi, QuantModel::GaussianTestChannel);
  for (int k = 0; k < 2; ++k) {
    CHECK(power.user_total(k) == 0.0);
  }
}

TEST_CASE("power subproblem matches a grid search on K=1, M=2, N=2") {
  std::mt19937_64 rng(24);
  Scenario sc = testutil::random_multi(rng, 2, 1, 2);
  auto psi = PsiAllocation::filled(2, 2, 50.0);
  auto power = power_subproblem(sc, psi, QuantModel::GaussianTestChannel);
  const double solver_obj = objective_bps(sc, power, psi, QuantModel::GaussianTestChannel);

  const double budget = sc.power_budget[0];
  double best = 0.0;
  auto trial_power = PowerAllocation::zeros(1, 2);
  for (int i = 0; i <= 4000; ++i) {
    trial_power.p[0][0] = budget * i / 4000;
    trial_power.p[0][1] = budget - trial_power.p[0][0];
    best = std::max(best,
                    objective_bps(sc, trial_power, psi, QuantModel::GaussianTestChannel));
  }
  CHECK(solver_obj >= best * (1 - 1e-3));
  CHECK(power.user_total(0) == doctest::Approx(budget).epsilon(1e-8));
}

TEST_CASE("per-user budgets bind at the optimum") {
  std::mt19937_64 rng(25);
  Scenario sc = testutil::random_multi(rng, 2, 3, 6);
  auto psi = PsiAllocation::filled(2, 6, 100.0);
  auto power = power_subproblem(sc, psi, QuantModel::GaussianTestChannel);
  for (int k = 0; k < 3; ++k) {
    CHECK(power.user_total(k) == doctest::Approx(sc.power_budget[k]).epsilon(1e-8));
  }
}

TEST_CASE("first-order expansion of the load is an upper bound, tight only at the point") {
  std::mt19937_64 rng(26);
  std::uniform_real_distribution<double> unif(0.0, 500.0);
  Scenario sc = testutil::random_multi(rng, 1, 1, 4);
  for (int trial = 0; trial < 100; ++trial) {
    PsiAllocation psi = PsiAllocation::filled(1, 4, 0.0);
    PsiAllocation ref = PsiAllocation::filled(1, 4, 0.0);
    for (int n = 0; n < 4; ++n) {
      psi.psi[0][n] = unif(rng);
      ref.psi[0][n] = unif(rng);
    }
    const double truth = true_fronthaul_load(sc, psi, QuantModel::GaussianTestChannel, 0);
    const double lin = linearized_load(sc, psi, ref, 0);
    CHECK(truth <= lin * (1 + 1e-12) + 1e-9);

    const double at_ref = linearized_load(sc, ref, ref, 0);
    CHECK(at_ref ==
          doctest::Approx(true_fronthaul_load(sc, ref, QuantModel::GaussianTestChannel, 0))
              .epsilon(1e-12));
  }
}

TEST_CASE("objective is concave along random feasible power segments") {
  std::mt19937_64 rng(27);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  Scenario sc = testutil::random_multi(rng, 2, 2, 4);
  auto psi = PsiAllocation::filled(2, 4, 30.0);
  for (int trial = 0; trial < 50; ++trial) {
    auto a = PowerAllocation::zeros(2, 4);
    auto b = PowerAllocation::zeros(2, 4);
    auto mid = PowerAllocation::zeros(2, 4);
    for (int k = 0; k < 2; ++k) {
      for (int n : sc.owned_scs(k)) {
        a.p[k][n] = unif(rng) * sc.power_budget[k] / 2;
        b.p[k][n] = unif(rng) * sc.power_budget[k] / 2;
        mid.p[k][n] = 0.5 * (a.p[k][n] + b.p[k][n]);
      }
    }
    const double fa = objective_bps(sc, a, psi, QuantModel::GaussianTestChannel);
    const double fb = objective_bps(sc, b, psi, QuantModel::GaussianTestChannel);
    const double fm = objective_bps(sc, mid, psi, QuantModel::GaussianTestChannel);
    CHECK(fm >= 0.5 * (fa + fb) - 1e-9 * std::abs(fm));
  }
}

TEST_CASE("SCA step: feasibility, improvement and fixed point") {
  std::mt19937_64 rng(28);
  for (int trial = 0; trial < 8; ++trial) {
    Scenario sc = testutil::random_multi(rng, 2, 2, 4);
    // start from the equal-split point, which is feasible with equality
    PsiAllocation psi = PsiAllocation::filled(2, 4, 0.0);
    for (int m = 0; m < 2; ++m) {
      const double val = std::exp2(sc.fronthaul_cap[m] / sc.bandwidth_hz) - 1.0;
      std::fill(psi.psi[m].begin(), psi.psi[m].end(), val);
    }
    auto power = power_subproblem(sc, psi, QuantModel::GaussianTestChannel);

    auto next = fronthaul_sca_subproblem(sc, power, psi, QuantModel::GaussianTestChannel);
    const double before = objective_bps(sc, power, psi, QuantModel::GaussianTestChannel);
    const double after = objective_bps(sc, power, next, QuantModel::GaussianTestChannel);
    CHECK(after >= before * (1 - 1e-7));
    for (int m = 0; m < 2; ++m) {
      CHECK(true_fronthaul_load(sc, next, QuantModel::GaussianTestChannel, m) <=
            sc.fronthaul_cap[m] * (1 + 1e-7));
      CHECK(linearized_load(sc, next, psi, m) <= sc.fronthaul_cap[m] * (1 + 1e-7));
    }

    // iterating to the fixed point stops improving
    PsiAllocation cur = next;
    double prev_obj = after;
    for (int it = 0; it < 60; ++it) {
      cur = fronthaul_sca_subproblem(sc, power, cur, QuantModel::GaussianTestChannel);
      const double obj = objective_bps(sc, power, cur, QuantModel::GaussianTestChannel);
      if (obj - prev_obj <= 1e-10 * obj) break;
      prev_obj = obj;
    }
    auto again = fronthaul_sca_subproblem(sc, power, cur, QuantModel::GaussianTestChannel);
    CHECK(objective_bps(sc, power, again, QuantModel::GaussianTestChannel) ==
          doctest::Approx(prev_obj).epsilon(1e-7));
  }
}

TEST_CASE("SCA iterated at M = 1 recovers the closed-form fronthaul split") {
  std::mt19937_64 rng(29);
  for (int trial = 0; trial < 6; ++trial) {
    Scenario sc = testutil::random_1x1(rng, 5);
    const double budget = sc.power_budget[0];
    std::vector<double> p_vec(5, budget / 5);
    auto t_closed = single_link::fronthaul_given_power(sc, p_vec);

    auto power = testutil::wrap_power_1x1(sc, p_vec);
    PsiAllocation psi = PsiAllocation::filled(
        1, 5, std::exp2(sc.fronthaul_cap[0] / sc.bandwidth_hz) - 1.0);
    double prev = 0.0;
    for (int it = 0; it < 200; ++it) {
      psi = fronthaul_sca_subproblem(sc, power, psi, QuantModel::GaussianTestChannel);
      const double obj = objective_bps(sc, power, psi, QuantModel::GaussianTestChannel);
      if (obj - prev <= 1e-12 * obj) break;
      prev = obj;
    }
    const double closed_obj = testutil::gaussian_total(sc, p_vec, t_closed);
    CHECK(prev == doctest::Approx(closed_obj).epsilon(1e-6));
  }
}

TEST_CASE("infeasible linearization points are rejected") {
  std::mt19937_64 rng(30);
  Scenario sc = testutil::random_multi(rng, 2, 2, 4);
  auto psi = PsiAllocation::filled(2, 4, 1e30);  // way over any capacity
  auto power = PowerAllocation::zeros(2, 4);
  CHECK_THROWS_AS(fronthaul_sca_subproblem(sc, power, psi, QuantModel::GaussianTestChannel),
                  std::invalid_argument);
}

TEST_CASE("algorithm three") {
  SUBCASE("reduces to the single-link alternation at K = M = 1") {
    std::mt19937_64 rng(31);
    // tight stopping rule: the SCA-based iteration approaches its fixed
    // point asymptotically, and this test compares fixed points
    SolverOptions opts;
    opts.eps_rel = 1e-9;
    opts.max_iter = 3000;
    for (int trial = 0; trial < 5; ++trial) {
      Scenario sc = testutil::random_1x1(rng, 6);
      auto single = single_link::algorithm_one(sc, opts);
      auto general = algorithm_three(sc, opts);
      CHECK(general.objective_bps ==
            doctest::Approx(single.objective_bps).epsilon(5e-3));
    }
  }
  SUBCASE("huge capacities converge to the wireless MRC bound") {
    std::mt19937_64 rng(32);
    Scenario sc = testutil::random_multi(rng, 2, 2, 4);
    sc.fronthaul_cap = {60.0 * sc.bandwidth_hz, 60.0 * sc.bandwidth_hz};

    // wireless bound: water-filling per user against sum_m g/sigma^2
    double bound = 0.0;
    for (int k = 0; k < 2; ++k) {
      auto owned = sc.owned_scs(k);
      std::vector<double> eff(owned.size());
      for (std::size_t i = 0; i < owned.size(); ++i) {
        double sum = 0.0;
        for (int m = 0; m < 2; ++m) {
          sum += sc.channel_gain_sq[m][k][owned[i]] / sc.noise_var[m][owned[i]];
        }
        eff[i] = 1.0 / sum;
      }
      auto p = cranopt::detail::water_fill_levels(eff, sc.power_budget[k], 1e-12);
      for (std::size_t i = 0; i < owned.size(); ++i) {
        bound += sc.sc_bandwidth_hz() * std::log2(1.0 + p[i] / eff[i]);
      }
    }

    auto report = algorithm_three(sc);
    CHECK(report.objective_bps == doctest::Approx(bound).epsilon(5e-3));
  }
  SUBCASE("trace is monotone and the result feasible") {
    std::mt19937_64 rng(33);
    for (int trial = 0; trial < 5; ++trial) {
      Scenario sc = testutil::random_multi(rng, 3, 2, 6);
      auto report = algorithm_three(sc);
      CHECK(report.converged);
      for (std::size_t i = 1; i < report.objective_trace.size(); ++i) {
        CHECK(report.objective_trace[i] >=
              report.objective_trace[i - 1] - 1e-12 * std::abs(report.objective_trace[i - 1]));
      }
      CHECK(model::check_feasible(sc, report.power, report.fronthaul,
                                  QuantModel::GaussianTestChannel)
                .empty());
    }
  }
}

TEST_CASE("two-stage integer solve") {
  SUBCASE("integer restriction cannot beat the relaxation") {
    std::mt19937_64 rng(34);
    Scenario sc = testutil::random_multi(rng, 2, 2, 4, 100e6, 2.0, 6.0);
    auto relaxed = solve_p2_noint_multi(sc);
    auto integer = solve_p2_multi(sc);
    CHECK(integer.objective_bps <= relaxed.objective_bps * (1 + 1e-12));
    CHECK(integer.fronthaul.integer_bits);
    CHECK(model::check_feasible(sc, integer.power, integer.fronthaul,
                                QuantModel::UniformScalar)
              .empty());
  }
  SUBCASE("reduces to the single-link two-stage solve at K = M = 1") {
    std::mt19937_64 rng(35);
    SolverOptions opts;
    opts.eps_rel = 1e-9;
    opts.max_iter = 3000;
    for (int trial = 0; trial < 5; ++trial) {
      Scenario sc = testutil::random_1x1(rng, 6, 100e6, 2.0, 6.0);
      auto single = single_link::solve_p2_single(sc, opts);
      auto general = solve_p2_multi(sc, opts);
      CHECK(general.objective_bps ==
            doctest::Approx(single.objective_bps).epsilon(5e-3));
    }
  }
  SUBCASE("per-RRH rounding is exact on the grid") {
    std::mt19937_64 rng(36);
    Scenario sc = testutil::random_multi(rng, 3, 2, 6, 100e6, 2.0, 6.0);
    auto integer = solve_p2_multi(sc);
    const double grid = sc.bit_grid_bps();
    for (int m = 0; m < 3; ++m) {
      double total = 0.0;
      for (int n = 0; n < 6; ++n) {
        CHECK(integer.fronthaul.d[m][n] >= 0);
        CHECK(integer.fronthaul.t[m][n] == integer.fronthaul.d[m][n] * grid);
        total += integer.fronthaul.t[m][n];
      }
      CHECK(total <= sc.fronthaul_cap[m]);
    }
  }
}

}  // TEST_SUITE
