#include "cranopt/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>
#include <sstream>

#include "cranopt/benchmarks.hpp"
#include "cranopt/detail/rng.hpp"
#include "cranopt/model.hpp"
#include "cranopt/multi.hpp"
#include "cranopt/single_link.hpp"
#include "cranopt/units.hpp"

namespace cranopt::harness {
namespace {

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

}  // namespace

void ScenarioTemplate::validate() const {
  auto fail = [](const std::string& what) {
    throw std::invalid_argument("scenario template: " + what);
  };
  if (!(cluster_radius_m > 0.0)) fail("cluster radius must be positive");
  if (!(bandwidth_mhz > 0.0)) fail("bandwidth must be positive");
  if (num_subcarriers < 1) fail("need at least one subcarrier");
  if (num_rrhs < 1 || num_users < 1) fail("need at least one RRH and one user");
  if (scs_per_user * num_users != num_subcarriers) {
    fail("scs_per_user * num_users must equal num_subcarriers");
  }
  if (fronthaul_cap_mbps.size() != 1 &&
      static_cast<int>(fronthaul_cap_mbps.size()) != num_rrhs) {
    fail("fronthaul_cap_mbps needs one entry or one per RRH");
  }
  for (double cap : fronthaul_cap_mbps) {
    if (cap < 0.0) fail("fronthaul capacities must be >= 0");
  }
  if (fading != "rayleigh" && fading != "none") fail("fading must be 'rayleigh' or 'none'");
  if (pinned_gains) {
    if (num_rrhs != 1 || num_users != 1) fail("pinned gains require a 1x1 scenario");
    if (static_cast<int>(pinned_gains->size()) != num_subcarriers) {
      fail("pinned gains must cover every subcarrier");
    }
  }
}

double pathloss_db(double distance_m) { return 30.6 + 36.7 * std::log10(distance_m); }

ScenarioTemplate preset(std::string_view name) {
  ScenarioTemplate t;
  if (name == "fig3") {
    t.name = "fig3";
    t.bandwidth_mhz = 100.0;
    t.num_subcarriers = 4;
    t.num_rrhs = 1;
    t.num_users = 1;
    t.scs_per_user = 4;
    t.fronthaul_cap_mbps = {400.0};
    t.fading = "none";
    t.pinned_gains = std::vector<double>{1.276e-9, 6.12e-10, 2.9e-11, 1.8e-11};
  } else if (name == "fig5") {
    t.name = "fig5";
    t.bandwidth_mhz = 100.0;
    t.num_subcarriers = 32;
    t.num_rrhs = 1;
    t.num_users = 1;
    t.scs_per_user = 32;
    t.fronthaul_cap_mbps = {400.0};
    t.fixed_distance_m = 50.0;
  } else if (name == "fig7") {
    t.name = "fig7";
    t.cluster_radius_m = 100.0;
    t.bandwidth_mhz = 300.0;
    t.num_subcarriers = 64;
    t.num_rrhs = 7;
    t.num_users = 16;
    t.scs_per_user = 4;
    t.fronthaul_cap_mbps = {4000.0};
  } else {
    throw std::invalid_argument("unknown preset '" + std::string(name) +
                                "' (expected fig3, fig5 or fig7)");
  }
  return t;
}

GeneratedScenario generate_scenario(const ScenarioTemplate& tmpl, std::uint64_t seed) {
  tmpl.validate();
  detail::Rng rng(seed);

  GeneratedScenario out;
  out.seed = seed;
  Scenario& sc = out.scenario;
  sc.bandwidth_hz = units::mhz_to_hz(tmpl.bandwidth_mhz);
  sc.num_subcarriers = tmpl.num_subcarriers;
  sc.num_rrhs = tmpl.num_rrhs;
  sc.num_users = tmpl.num_users;

  const double noise_w =
      units::dbm_to_watts(tmpl.noise_psd_dbm_hz + tmpl.noise_figure_db) * sc.sc_bandwidth_hz();
  sc.noise_var.assign(sc.num_rrhs, std::vector<double>(sc.num_subcarriers, noise_w));
  sc.power_budget.assign(sc.num_users, units::dbm_to_watts(tmpl.tx_power_dbm));

  sc.fronthaul_cap.resize(sc.num_rrhs);
  for (int m = 0; m < sc.num_rrhs; ++m) {
    const double mbps = tmpl.fronthaul_cap_mbps.size() == 1 ? tmpl.fronthaul_cap_mbps[0]
                                                            : tmpl.fronthaul_cap_mbps[m];
    sc.fronthaul_cap[m] = units::mbps_to_bps(mbps);
  }

  sc.sc_owner.resize(sc.num_subcarriers);
  for (int n = 0; n < sc.num_subcarriers; ++n) sc.sc_owner[n] = n / tmpl.scs_per_user;

  sc.channel_gain_sq.assign(
      sc.num_rrhs, std::vector<std::vector<double>>(
                       sc.num_users, std::vector<double>(sc.num_subcarriers, 0.0)));

  if (tmpl.pinned_gains) {
    sc.channel_gain_sq[0][0] = *tmpl.pinned_gains;
    out.nearest_rrh_by_distance.assign(sc.num_users, 0);
    sc.validate();
    return out;
  }

  // Placement: RRHs first, then users, both uniform in the disc; a fixed
  // user-RRH distance pins the single pair instead. Draw order is part of
  // the reproducibility contract.
  auto draw_in_disc = [&]() -> std::array<double, 2> {
    const double r = tmpl.cluster_radius_m * std::sqrt(rng.uniform());
    const double theta = 2.0 * std::numbers::pi * rng.uniform();
    return {r * std::cos(theta), r * std::sin(theta)};
  };
  if (tmpl.fixed_distance_m) {
    out.rrh_pos_m.push_back({0.0, 0.0});
    for (int m = 1; m < sc.num_rrhs; ++m) out.rrh_pos_m.push_back(draw_in_disc());
    out.user_pos_m.push_back({*tmpl.fixed_distance_m, 0.0});
    for (int k = 1; k < sc.num_users; ++k) out.user_pos_m.push_back(draw_in_disc());
  } else {
    for (int m = 0; m < sc.num_rrhs; ++m) out.rrh_pos_m.push_back(draw_in_disc());
    for (int k = 0; k < sc.num_users; ++k) out.user_pos_m.push_back(draw_in_disc());
  }

  const bool fading = tmpl.fading == "rayleigh";
  for (int m = 0; m < sc.num_rrhs; ++m) {
    for (int k = 0; k < sc.num_users; ++k) {
      const double dx = out.rrh_pos_m[m][0] - out.user_pos_m[k][0];
      const double dy = out.rrh_pos_m[m][1] - out.user_pos_m[k][1];
      const double dist = std::max(std::hypot(dx, dy), 1.0);  // clamp inside 1 m
      const double mean_gain = units::db_to_linear(-pathloss_db(dist));
      for (int n = 0; n < sc.num_subcarriers; ++n) {
        sc.channel_gain_sq[m][k][n] = mean_gain * (fading ? rng.exponential() : 1.0);
      }
    }
  }

  out.nearest_rrh_by_distance.assign(sc.num_users, 0);
  for (int k = 0; k < sc.num_users; ++k) {
    double best = std::numeric_limits<double>::infinity();
    for (int m = 0; m < sc.num_rrhs; ++m) {
      const double dx = out.rrh_pos_m[m][0] - out.user_pos_m[k][0];
      const double dy = out.rrh_pos_m[m][1] - out.user_pos_m[k][1];
      const double dist = std::hypot(dx, dy);
      if (dist < best) {
        best = dist;
        out.nearest_rrh_by_distance[k] = m;
      }
    }
  }

  sc.validate();
  return out;
}

const std::vector<std::string>& solver_ids() {
  static const std::vector<std::string> ids = {
      "p1",          "p2",           "p2-noint",        "bench-equal-power",
      "bench-wf-power", "bench-equal-fronthaul", "bench-equal-both",
      "bench-conventional-ofdma",
  };
  return ids;
}

SolveReport run_solver(const std::string& solver_id, const Scenario& sc,
                       const SolverOptions& opts, const std::vector<int>* nearest_rrh) {
  const bool single = sc.num_users == 1 && sc.num_rrhs == 1;
  if (solver_id == "p1") {
    return single ? single_link::algorithm_one(sc, opts) : multi::algorithm_three(sc, opts);
  }
  if (solver_id == "p2") {
    return single ? single_link::solve_p2_single(sc, opts) : multi::solve_p2_multi(sc, opts);
  }
  if (solver_id == "p2-noint") {
    return single ? single_link::solve_p2_noint_single(sc, opts)
                  : multi::solve_p2_noint_multi(sc, opts);
  }
  // Benchmark schemes run under the uniform quantizer, the model the
  // comparisons in the experiments are drawn for.
  const std::string prefix = "bench-";
  if (solver_id.rfind(prefix, 0) == 0) {
    const std::string scheme = solver_id.substr(prefix.size());
    for (benchmarks::Scheme s : benchmarks::all_schemes()) {
      if (benchmarks::to_string(s) == scheme) {
        return benchmarks::run_benchmark(s, sc, QuantModel::UniformScalar, opts, nearest_rrh);
      }
    }
  }
  throw std::invalid_argument("unknown solver id '" + solver_id + "'");
}

std::string SweepResult::csv() const {
  std::ostringstream out;
  out << "solver,fronthaul_bps,seed,objective_bps,iterations,wall_s,cutset_bps,error\n";
  for (const SweepRow& row : rows) {
    out << csv_escape(row.solver) << ',' << row.fronthaul_bps << ',' << row.seed << ','
        << row.objective_bps << ',' << row.iterations << ',' << row.wall_s << ',';
    if (row.cutset_bps >= 0.0) out << row.cutset_bps;
    out << ',' << csv_escape(row.error) << '\n';
  }
  return out.str();
}

SweepResult run_sweep(const ScenarioTemplate& tmpl, const SweepSpec& spec) {
  tmpl.validate();
  if (spec.fronthaul_grid_bps.empty()) {
    throw std::invalid_argument("sweep needs a non-empty capacity grid");
  }
  if (spec.solvers.empty()) throw std::invalid_argument("sweep needs at least one solver");
  if (spec.seeds.empty()) throw std::invalid_argument("sweep needs at least one seed");

  SweepResult result;
  for (const std::uint64_t seed : spec.seeds) {
    GeneratedScenario generated = generate_scenario(tmpl, seed);
    for (const double cap : spec.fronthaul_grid_bps) {
      Scenario sc = generated.scenario;
      std::fill(sc.fronthaul_cap.begin(), sc.fronthaul_cap.end(), cap);
      const bool single = sc.num_users == 1 && sc.num_rrhs == 1;
      const double cutset =
          single ? single_link::cutset_bound(sc) * sc.bandwidth_hz : -1.0;
      for (const std::string& solver : spec.solvers) {
        SweepRow row;
        row.solver = solver;
        row.fronthaul_bps = cap;
        row.seed = std::to_string(seed);
        row.cutset_bps = cutset;
        const auto start = std::chrono::steady_clock::now();
        try {
          const SolveReport report =
              run_solver(solver, sc, spec.options, &generated.nearest_rrh_by_distance);
          row.objective_bps = report.objective_bps;
          row.iterations = report.iterations;
        } catch (const std::exception& e) {
          row.error = e.what();
        }
        row.wall_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        result.rows.push_back(std::move(row));
      }
    }
  }

  if (spec.average && spec.seeds.size() > 1) {
    std::map<std::pair<std::string, double>, std::vector<const SweepRow*>> groups;
    for (const SweepRow& row : result.rows) {
      if (row.error.empty()) groups[{row.solver, row.fronthaul_bps}].push_back(&row);
    }
    for (const auto& [key, rows] : groups) {
      SweepRow mean;
      mean.solver = key.first;
      mean.fronthaul_bps = key.second;
      mean.seed = "mean";
      double cutset = 0.0;
      bool has_cutset = true;
      for (const SweepRow* row : rows) {
        mean.objective_bps += row->objective_bps;
        mean.iterations += row->iterations;
        mean.wall_s += row->wall_s;
        has_cutset = has_cutset && row->cutset_bps >= 0.0;
        cutset += std::max(row->cutset_bps, 0.0);
      }
      const double count = static_cast<double>(rows.size());
      mean.objective_bps /= count;
      mean.iterations = static_cast<int>(std::lround(mean.iterations / count));
      mean.wall_s /= count;
      mean.cutset_bps = has_cutset ? cutset / count : -1.0;
      result.rows.push_back(std::move(mean));
    }
  }
  return result;
}

}  // namespace cranopt::harness
