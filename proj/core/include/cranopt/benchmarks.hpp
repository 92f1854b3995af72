#pragma once

#include <string>
#include <vector>

#include "cranopt/types.hpp"

// The five comparison schemes: each fixes one resource dimension (or both,
// or decodes locally) instead of optimizing power and fronthaul jointly.
namespace cranopt::benchmarks {

enum class Scheme {
  EqualPower,         // p = Pbar/|SCs|, fronthaul optimized
  WaterFillingPower,  // water-filling power ignoring fronthaul, fronthaul optimized
  EqualFronthaul,     // t = Tbar/N, power optimized
  EqualBoth,          // both fixed, rate evaluated
  ConventionalOFDMA,  // each user decoded locally at its nearest RRH
};

std::string to_string(Scheme scheme);
std::vector<Scheme> all_schemes();

// Runs one benchmark scheme. `nearest_rrh`, when non-null, supplies the
// per-user serving RRH for ConventionalOFDMA (as produced by the scenario
// generator from true distances); otherwise the RRH with the largest mean
// channel gain over the user's SCs is used. Under the uniform model,
// optimized fronthaul allocations are rounded onto the bit grid and the
// report notes say so.
SolveReport run_benchmark(Scheme scheme, const Scenario& sc, QuantModel model,
                          const SolverOptions& opts = {},
                          const std::vector<int>* nearest_rrh = nullptr);

}  // namespace cranopt::benchmarks
