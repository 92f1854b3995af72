// Command-line front end: scenario solving, benchmark comparison, capacity
// sweeps, quantizer validation and scenario generation.

#include <chrono>
#include <cstdio>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cranopt/benchmarks.hpp"
#include "cranopt/harness.hpp"
#include "cranopt/model.hpp"
#include "cranopt/multi.hpp"
#include "cranopt/quantizer.hpp"
#include "cranopt/scenario_io.hpp"
#include "cranopt/single_link.hpp"
#include "cranopt/units.hpp"

using namespace cranopt;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInternal = 1;
constexpr int kExitBadInput = 2;

struct GlobalArgs {
  std::uint64_t seed = 12345;
  double eps = 1e-6;
  int max_iter = 500;
  std::string out;
  std::string format = "json";
};

struct ScenarioArgs {
  std::string scenario_path;
  std::string preset_name;
  std::string template_path;
  std::vector<double> per_rrh_capacity_mbps;
};

void add_scenario_options(CLI::App* cmd, ScenarioArgs& args, bool with_capacity_override) {
  auto* file = cmd->add_option("--scenario", args.scenario_path, "scenario JSON file");
  auto* preset = cmd->add_option("--preset", args.preset_name,
                                 "named setup: fig3, fig5 or fig7 (generated with --seed)");
  auto* tmpl = cmd->add_option("--template", args.template_path,
                               "scenario template JSON (generated with --seed)");
  file->excludes(preset)->excludes(tmpl);
  preset->excludes(tmpl);
  if (with_capacity_override) {
    cmd->add_option("--per-rrh-capacity", args.per_rrh_capacity_mbps,
                    "override fronthaul capacities in Mbit/s (one value or one per RRH)");
  }
}

struct LoadedScenario {
  Scenario scenario;
  std::vector<int> nearest_rrh;
};

LoadedScenario load_scenario(const ScenarioArgs& args, const GlobalArgs& global) {
  LoadedScenario out;
  if (!args.scenario_path.empty()) {
    out.scenario = io::load_scenario(args.scenario_path);
  } else if (!args.preset_name.empty() || !args.template_path.empty()) {
    harness::ScenarioTemplate tmpl =
        !args.preset_name.empty()
            ? harness::preset(args.preset_name)
            : io::template_from_json_text(io::read_file(args.template_path));
    auto generated = harness::generate_scenario(tmpl, global.seed);
    out.scenario = std::move(generated.scenario);
    out.nearest_rrh = std::move(generated.nearest_rrh_by_distance);
  } else {
    throw std::invalid_argument("provide --scenario, --preset or --template");
  }
  if (!args.per_rrh_capacity_mbps.empty()) {
    const auto& caps = args.per_rrh_capacity_mbps;
    if (caps.size() != 1 && static_cast<int>(caps.size()) != out.scenario.num_rrhs) {
      throw std::invalid_argument("--per-rrh-capacity needs one value or one per RRH");
    }
    for (int m = 0; m < out.scenario.num_rrhs; ++m) {
      out.scenario.fronthaul_cap[m] =
          units::mbps_to_bps(caps.size() == 1 ? caps[0] : caps[m]);
    }
  }
  return out;
}

void emit(const GlobalArgs& global, const std::string& text) {
  if (global.out.empty()) {
    std::cout << text;
    if (!text.empty() && text.back() != '\n') std::cout << '\n';
  } else {
    io::write_file(global.out, text);
  }
}

void emit_report(const GlobalArgs& global, const SolveReport& report, const Scenario& sc) {
  emit(global, global.format == "csv" ? io::report_to_csv(report, sc)
                                      : io::report_to_json_text(report));
}

SolverOptions solver_options(const GlobalArgs& global) {
  SolverOptions opts;
  opts.eps_rel = global.eps;
  opts.max_iter = global.max_iter;
  return opts;
}

void check_model_flag(const std::string& flag, const std::string& expected,
                      const std::string& cmd) {
  if (!flag.empty() && flag != expected) {
    throw std::invalid_argument(cmd + " solves the " + expected +
                                "-model problem; --fronthaul-model " + flag + " is not valid");
  }
}

std::vector<double> capacity_grid_bps(const std::vector<double>& grid_mbps, const Scenario& sc) {
  std::vector<double> grid;
  for (double mbps : grid_mbps) grid.push_back(units::mbps_to_bps(mbps));
  if (grid.empty()) grid.push_back(sc.fronthaul_cap[0]);
  return grid;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"joint wireless power and fronthaul rate allocation for uplink OFDMA C-RAN"};
  app.require_subcommand(1);
  app.fallthrough();

  GlobalArgs global;
  app.add_option("--seed", global.seed, "RNG seed for scenario generation and Monte Carlo");
  app.add_option("--eps", global.eps, "relative convergence threshold");
  app.add_option("--max-iter", global.max_iter, "iteration cap for alternating solvers");
  app.add_option("--out", global.out, "write output to this path instead of stdout");
  app.add_option("--format", global.format, "output format: json or csv")
      ->check(CLI::IsMember({"json", "csv"}));

  // solve subcommands
  struct SolveCmd {
    CLI::App* cmd = nullptr;
    ScenarioArgs scenario;
    std::string model_flag;
    bool no_integer = false;
    bool single = false;
    bool uniform = false;
  };
  std::vector<SolveCmd> solves(4);
  auto add_solve = [&](SolveCmd& sc_cmd, const std::string& name, const std::string& desc,
                       bool single, bool uniform) {
    sc_cmd.cmd = app.add_subcommand(name, desc);
    sc_cmd.single = single;
    sc_cmd.uniform = uniform;
    add_scenario_options(sc_cmd.cmd, sc_cmd.scenario, !single);
    sc_cmd.cmd->add_option("--fronthaul-model", sc_cmd.model_flag,
                           "quantization model (fixed per subcommand; accepted for symmetry)");
    if (uniform) {
      sc_cmd.cmd->add_flag("--no-integer", sc_cmd.no_integer,
                           "stop after the continuous relaxation, skip bit rounding");
    }
  };
  add_solve(solves[0], "solve-p1-single",
            "Gaussian-model joint solve for one user and one RRH", true, false);
  add_solve(solves[1], "solve-p2-single",
            "uniform-quantizer joint solve for one user and one RRH", true, true);
  add_solve(solves[2], "solve-p1", "Gaussian-model joint solve for the general network", false,
            false);
  add_solve(solves[3], "solve-p2", "uniform-quantizer joint solve for the general network",
            false, true);

  // benchmark
  auto* bench_cmd = app.add_subcommand("benchmark", "run comparison schemes");
  ScenarioArgs bench_scenario;
  add_scenario_options(bench_cmd, bench_scenario, true);
  std::string bench_scheme = "all";
  std::string bench_model = "uniform";
  std::vector<double> bench_grid_mbps;
  bench_cmd->add_option("--scheme", bench_scheme,
                        "all, equal-power, wf-power, equal-fronthaul, equal-both or "
                        "conventional-ofdma");
  bench_cmd->add_option("--model", bench_model, "gaussian or uniform")
      ->check(CLI::IsMember({"gaussian", "uniform"}));
  bench_cmd->add_option("--grid-mbps", bench_grid_mbps,
                        "fronthaul capacities to evaluate (default: scenario value)");

  // sweep
  auto* sweep_cmd = app.add_subcommand("sweep", "solve over a fronthaul capacity grid");
  ScenarioArgs sweep_scenario;
  add_scenario_options(sweep_cmd, sweep_scenario, false);
  std::vector<std::string> sweep_solvers;
  std::vector<double> sweep_grid_mbps;
  std::vector<std::uint64_t> sweep_seeds;
  bool sweep_average = false;
  bool list_solvers = false;
  sweep_cmd->add_option("--solvers", sweep_solvers, "solver ids (see --list-solvers)");
  sweep_cmd->add_option("--grid-mbps", sweep_grid_mbps, "fronthaul capacity grid in Mbit/s");
  sweep_cmd->add_option("--seeds", sweep_seeds, "scenario seeds (default: global --seed)");
  sweep_cmd->add_flag("--average", sweep_average, "append mean-over-seeds rows");
  sweep_cmd->add_flag("--list-solvers", list_solvers, "print known solver ids and exit");

  // quantizer-validate
  auto* quant_cmd = app.add_subcommand("quantizer-validate",
                                       "Monte Carlo check of the quantizer noise model");
  int quant_bits_lo = 4;
  int quant_bits_hi = 10;
  std::vector<double> quant_signal = {0.1, 1.0, 10.0};
  std::size_t quant_samples = 1000000;
  quant_cmd->add_option("--bits-min", quant_bits_lo, "lowest bit depth");
  quant_cmd->add_option("--bits-max", quant_bits_hi, "highest bit depth");
  quant_cmd->add_option("--signal-power", quant_signal, "signal powers in watts");
  quant_cmd->add_option("--samples", quant_samples, "samples per (D, S) cell");

  // gen-scenario
  auto* gen_cmd = app.add_subcommand("gen-scenario", "generate a scenario JSON");
  ScenarioArgs gen_scenario;
  add_scenario_options(gen_cmd, gen_scenario, true);

  CLI11_PARSE(app, argc, argv);

  try {
    for (auto& solve : solves) {
      if (!solve.cmd->parsed()) continue;
      check_model_flag(solve.model_flag, solve.uniform ? "uniform" : "gaussian",
                       solve.cmd->get_name());
      auto loaded = load_scenario(solve.scenario, global);
      const Scenario& sc = loaded.scenario;
      if (solve.single && (sc.num_users != 1 || sc.num_rrhs != 1)) {
        throw std::invalid_argument(solve.cmd->get_name() + " requires a 1x1 scenario");
      }
      const SolverOptions opts = solver_options(global);
      SolveReport report;
      if (solve.single) {
        report = solve.uniform ? (solve.no_integer ? single_link::solve_p2_noint_single(sc, opts)
                                                   : single_link::solve_p2_single(sc, opts))
                               : single_link::algorithm_one(sc, opts);
      } else {
        report = solve.uniform ? (solve.no_integer ? multi::solve_p2_noint_multi(sc, opts)
                                                   : multi::solve_p2_multi(sc, opts))
                               : multi::algorithm_three(sc, opts);
      }
      emit_report(global, report, sc);
      return kExitOk;
    }

    if (bench_cmd->parsed()) {
      auto loaded = load_scenario(bench_scenario, global);
      const QuantModel model = bench_model == "gaussian" ? QuantModel::GaussianTestChannel
                                                         : QuantModel::UniformScalar;
      std::vector<benchmarks::Scheme> schemes;
      if (bench_scheme == "all") {
        schemes = benchmarks::all_schemes();
      } else {
        for (auto s : benchmarks::all_schemes()) {
          if (benchmarks::to_string(s) == bench_scheme) schemes.push_back(s);
        }
        if (schemes.empty()) {
          throw std::invalid_argument("unknown benchmark scheme '" + bench_scheme + "'");
        }
      }
      const std::vector<double> grid = capacity_grid_bps(bench_grid_mbps, loaded.scenario);
      const SolverOptions opts = solver_options(global);

      std::ostringstream csv;
      csv << "scheme,model,fronthaul_mbps,objective_bps,iterations,wall_s,notes\n";
      for (benchmarks::Scheme scheme : schemes) {
        for (double cap : grid) {
          Scenario sc = loaded.scenario;
          for (double& c : sc.fronthaul_cap) c = cap;
          const auto start = std::chrono::steady_clock::now();
          auto report = benchmarks::run_benchmark(
              scheme, sc, model, opts,
              loaded.nearest_rrh.empty() ? nullptr : &loaded.nearest_rrh);
          const double wall =
              std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
          csv << benchmarks::to_string(scheme) << ',' << bench_model << ','
              << units::bps_to_mbps(cap) << ',' << report.objective_bps << ','
              << report.iterations << ',' << wall << ",\"" << report.notes << "\"\n";
        }
      }
      emit(global, csv.str());
      return kExitOk;
    }

    if (sweep_cmd->parsed()) {
      if (list_solvers) {
        for (const auto& id : harness::solver_ids()) std::cout << id << '\n';
        return kExitOk;
      }
      if (sweep_solvers.empty() || sweep_grid_mbps.empty()) {
        throw std::invalid_argument("sweep needs --solvers and --grid-mbps");
      }
      harness::ScenarioTemplate tmpl =
          !sweep_scenario.preset_name.empty()
              ? harness::preset(sweep_scenario.preset_name)
              : io::template_from_json_text(io::read_file(sweep_scenario.template_path));
      harness::SweepSpec spec;
      spec.solvers = sweep_solvers;
      for (double mbps : sweep_grid_mbps) {
        spec.fronthaul_grid_bps.push_back(units::mbps_to_bps(mbps));
      }
      spec.seeds = sweep_seeds.empty() ? std::vector<std::uint64_t>{global.seed} : sweep_seeds;
      spec.average = sweep_average;
      spec.options = solver_options(global);
      auto result = harness::run_sweep(tmpl, spec);
      if (global.format == "csv") {
        emit(global, result.csv());
      } else {
        std::ostringstream json;
        json << "[\n";
        for (std::size_t i = 0; i < result.rows.size(); ++i) {
          const auto& row = result.rows[i];
          json << "  {\"solver\": \"" << row.solver << "\", \"fronthaul_bps\": "
               << row.fronthaul_bps << ", \"seed\": \"" << row.seed
               << "\", \"objective_bps\": " << row.objective_bps
               << ", \"iterations\": " << row.iterations << ", \"wall_s\": " << row.wall_s
               << ", \"cutset_bps\": " << row.cutset_bps << ", \"error\": \"" << row.error
               << "\"}" << (i + 1 < result.rows.size() ? "," : "") << "\n";
        }
        json << "]\n";
        emit(global, json.str());
      }
      return kExitOk;
    }

    if (quant_cmd->parsed()) {
      if (quant_bits_lo < 1 || quant_bits_hi < quant_bits_lo) {
        throw std::invalid_argument("need 1 <= bits-min <= bits-max");
      }
      std::ostringstream csv;
      csv << "bits,signal_power_w,analytic_q_w,empirical_q_w,overflow_rate,seed\n";
      std::uint64_t seed = global.seed;
      for (int bits = quant_bits_lo; bits <= quant_bits_hi; ++bits) {
        for (double s : quant_signal) {
          auto mc = quantizer::monte_carlo_noise_power(s, bits, quant_samples, seed);
          csv << bits << ',' << s << ',' << quantizer::analytic_noise_power(s, bits) << ','
              << mc.empirical_q_w << ',' << mc.overflow_rate << ',' << seed << '\n';
          ++seed;
        }
      }
      emit(global, csv.str());
      return kExitOk;
    }

    if (gen_cmd->parsed()) {
      auto loaded = load_scenario(gen_scenario, global);
      emit(global, io::scenario_to_json_text(loaded.scenario) + "\n");
      return kExitOk;
    }
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitBadInput;
  } catch (const SolveError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitBadInput;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return kExitInternal;
  }
  return kExitInternal;
}
