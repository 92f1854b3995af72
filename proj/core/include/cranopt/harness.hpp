#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cranopt/types.hpp"

// Scenario generation (geometry, path loss, noise), fronthaul-capacity
// sweeps and result persistence.
namespace cranopt::harness {

// Everything needed to synthesize a Scenario: geometry and radio parameters
// in the units experiments are quoted in.
struct ScenarioTemplate {
  std::string name = "custom";
  double cluster_radius_m = 100.0;
  double noise_psd_dbm_hz = -169.0;
  double noise_figure_db = 7.0;
  double tx_power_dbm = 23.0;
  double bandwidth_mhz = 100.0;
  int num_subcarriers = 32;
  int num_rrhs = 1;
  int num_users = 1;
  int scs_per_user = 32;
  std::vector<double> fronthaul_cap_mbps;  // per RRH
  std::string fading = "rayleigh";         // "rayleigh" (unit-mean exponential power) or "none"
  // 1x1 presets pin the user at a fixed distance from the RRH.
  std::optional<double> fixed_distance_m;
  // When set, channel powers are taken verbatim (single user, single RRH)
  // and fading is bypassed.
  std::optional<std::vector<double>> pinned_gains;

  void validate() const;
};

// L(d) = 30.6 + 36.7 log10(d), d in meters.
double pathloss_db(double distance_m);

// Named experiment setups: "fig3" (4 pinned SC gains), "fig5" (1x1 at 50 m,
// 32 SCs) and "fig7" (7 RRHs, 16 users, 300 MHz / 64 SCs).
ScenarioTemplate preset(std::string_view name);

struct GeneratedScenario {
  Scenario scenario;
  std::vector<std::array<double, 2>> rrh_pos_m;   // empty for pinned-gain templates
  std::vector<std::array<double, 2>> user_pos_m;
  std::vector<int> nearest_rrh_by_distance;       // [k]
  std::uint64_t seed = 0;
};

// Deterministic in (template, seed): identical inputs give byte-identical
// scenarios.
GeneratedScenario generate_scenario(const ScenarioTemplate& tmpl, std::uint64_t seed);

struct SweepSpec {
  std::vector<std::string> solvers;        // see solver_ids()
  std::vector<double> fronthaul_grid_bps;  // common capacity values
  std::vector<std::uint64_t> seeds = {1};
  bool average = false;  // append mean-over-seeds rows
  SolverOptions options;
};

struct SweepRow {
  std::string solver;
  double fronthaul_bps = 0.0;
  std::string seed;  // numeric, or "mean" for aggregate rows
  double objective_bps = 0.0;
  int iterations = 0;
  double wall_s = 0.0;
  double cutset_bps = -1.0;  // 1x1 scenarios only; < 0 means not applicable
  std::string error;         // non-empty when the cell failed
};

struct SweepResult {
  std::vector<SweepRow> rows;
  std::string csv() const;
};

// Solver/benchmark identifiers accepted by run_sweep and the CLI.
const std::vector<std::string>& solver_ids();

// Runs every (solver, capacity, seed) cell; failures are recorded per row
// and do not abort the sweep.
SweepResult run_sweep(const ScenarioTemplate& tmpl, const SweepSpec& spec);

// Dispatches one solver id on a scenario (used by sweep cells and the CLI).
SolveReport run_solver(const std::string& solver_id, const Scenario& sc,
                       const SolverOptions& opts,
                       const std::vector<int>* nearest_rrh = nullptr);

}  // namespace cranopt::harness
