#pragma once

#include <string>

#include "cranopt/harness.hpp"
#include "cranopt/types.hpp"

// JSON/CSV boundary: scenario documents use labeled units (MHz, dBm, Mbps)
// and 1-based user ids; conversion to SI happens here.
namespace cranopt::io {

Scenario scenario_from_json_text(const std::string& text);
std::string scenario_to_json_text(const Scenario& sc, int indent = 2);

Scenario load_scenario(const std::string& path);
void save_scenario(const Scenario& sc, const std::string& path);

harness::ScenarioTemplate template_from_json_text(const std::string& text);

std::string report_to_json_text(const SolveReport& report, int indent = 2);

// One row per (subcarrier, RRH): sc, rrh, owner, p_watts, t_bps, d_bits.
std::string report_to_csv(const SolveReport& report, const Scenario& sc);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

}  // namespace cranopt::io
