#include "cranopt/scenario_io.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "cranopt/units.hpp"

namespace cranopt::io {
namespace {

using nlohmann::json;

// Noise power of exactly zero has no dBm representation; floor it instead.
constexpr double kMinNoiseDbm = -400.0;

}  // namespace

Scenario scenario_from_json_text(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("scenario JSON parse error: ") + e.what());
  }

  Scenario sc;
  try {
    sc.bandwidth_hz = units::mhz_to_hz(doc.at("bandwidth_mhz").get<double>());
    sc.num_subcarriers = doc.at("num_subcarriers").get<int>();
    sc.num_rrhs = doc.at("num_rrhs").get<int>();
    sc.num_users = doc.at("num_users").get<int>();

    for (int owner : doc.at("sc_owner").get<std::vector<int>>()) {
      sc.sc_owner.push_back(owner - 1);  // document is 1-based
    }
    sc.channel_gain_sq =
        doc.at("channel_gain_sq").get<std::vector<std::vector<std::vector<double>>>>();

    for (const auto& row : doc.at("noise_dbm").get<std::vector<std::vector<double>>>()) {
      std::vector<double> watts_row;
      watts_row.reserve(row.size());
      for (double dbm : row) watts_row.push_back(units::dbm_to_watts(dbm));
      sc.noise_var.push_back(std::move(watts_row));
    }
    for (double dbm : doc.at("power_budget_dbm").get<std::vector<double>>()) {
      sc.power_budget.push_back(units::dbm_to_watts(dbm));
    }
    for (double mbps : doc.at("fronthaul_cap_mbps").get<std::vector<double>>()) {
      sc.fronthaul_cap.push_back(units::mbps_to_bps(mbps));
    }
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("scenario JSON field error: ") + e.what());
  }
  sc.validate();
  return sc;
}

std::string scenario_to_json_text(const Scenario& sc, int indent) {
  sc.validate();
  json doc;
  doc["bandwidth_mhz"] = units::hz_to_mhz(sc.bandwidth_hz);
  doc["num_subcarriers"] = sc.num_subcarriers;
  doc["num_rrhs"] = sc.num_rrhs;
  doc["num_users"] = sc.num_users;
  json owners = json::array();
  for (int owner : sc.sc_owner) owners.push_back(owner + 1);
  doc["sc_owner"] = std::move(owners);
  doc["channel_gain_sq"] = sc.channel_gain_sq;
  json noise = json::array();
  for (const auto& row : sc.noise_var) {
    json noise_row = json::array();
    for (double watts : row) {
      noise_row.push_back(watts > 0.0 ? units::watts_to_dbm(watts) : kMinNoiseDbm);
    }
    noise.push_back(std::move(noise_row));
  }
  doc["noise_dbm"] = std::move(noise);
  json budgets = json::array();
  for (double watts : sc.power_budget) {
    budgets.push_back(watts > 0.0 ? units::watts_to_dbm(watts) : kMinNoiseDbm);
  }
  doc["power_budget_dbm"] = std::move(budgets);
  json caps = json::array();
  for (double bps : sc.fronthaul_cap) caps.push_back(units::bps_to_mbps(bps));
  doc["fronthaul_cap_mbps"] = std::move(caps);
  return doc.dump(indent);
}

Scenario load_scenario(const std::string& path) {
  return scenario_from_json_text(read_file(path));
}

void save_scenario(const Scenario& sc, const std::string& path) {
  write_file(path, scenario_to_json_text(sc) + "\n");
}

harness::ScenarioTemplate template_from_json_text(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("template JSON parse error: ") + e.what());
  }

  harness::ScenarioTemplate tmpl;
  try {
    tmpl.name = doc.value("name", tmpl.name);
    tmpl.cluster_radius_m = doc.value("cluster_radius_m", tmpl.cluster_radius_m);
    tmpl.noise_psd_dbm_hz = doc.value("noise_psd_dbm_per_hz", tmpl.noise_psd_dbm_hz);
    tmpl.noise_figure_db = doc.value("noise_figure_db", tmpl.noise_figure_db);
    tmpl.tx_power_dbm = doc.value("tx_power_dbm", tmpl.tx_power_dbm);
    tmpl.bandwidth_mhz = doc.value("bandwidth_mhz", tmpl.bandwidth_mhz);
    tmpl.num_subcarriers = doc.value("num_subcarriers", tmpl.num_subcarriers);
    tmpl.num_rrhs = doc.value("num_rrhs", tmpl.num_rrhs);
    tmpl.num_users = doc.value("num_users", tmpl.num_users);
    tmpl.scs_per_user = doc.value("scs_per_user", tmpl.scs_per_user);
    if (doc.contains("fronthaul_cap_mbps")) {
      tmpl.fronthaul_cap_mbps = doc.at("fronthaul_cap_mbps").get<std::vector<double>>();
    }
    tmpl.fading = doc.value("fading", tmpl.fading);
    if (doc.contains("fixed_distance_m")) {
      tmpl.fixed_distance_m = doc.at("fixed_distance_m").get<double>();
    }
    if (doc.contains("pinned_gains")) {
      tmpl.pinned_gains = doc.at("pinned_gains").get<std::vector<double>>();
    }
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("template JSON field error: ") + e.what());
  }
  if (tmpl.fronthaul_cap_mbps.empty()) tmpl.fronthaul_cap_mbps = {400.0};
  tmpl.validate();
  return tmpl;
}

std::string report_to_json_text(const SolveReport& report, int indent) {
  json doc;
  doc["objective_bps"] = report.objective_bps;
  doc["iterations"] = report.iterations;
  doc["converged"] = report.converged;
  doc["notes"] = report.notes;
  doc["objective_trace"] = report.objective_trace;
  doc["power_watts"] = report.power.p;
  doc["fronthaul_bps"] = report.fronthaul.t;
  doc["integer_bits"] = report.fronthaul.integer_bits;
  if (report.fronthaul.integer_bits) doc["bits"] = report.fronthaul.d;
  return doc.dump(indent);
}

std::string report_to_csv(const SolveReport& report, const Scenario& sc) {
  std::ostringstream out;
  out << "sc,rrh,owner,p_watts,t_bps,d_bits\n";
  for (int n = 0; n < sc.num_subcarriers; ++n) {
    const int k = sc.sc_owner[n];
    for (int m = 0; m < sc.num_rrhs; ++m) {
      out << (n + 1) << ',' << (m + 1) << ',' << (k + 1) << ',' << report.power.p[k][n] << ','
          << report.fronthaul.t[m][n] << ',';
      if (report.fronthaul.integer_bits) out << report.fronthaul.d[m][n];
      out << '\n';
    }
  }
  return out.str();
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::invalid_argument("cannot open file: " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::invalid_argument("cannot write file: " + path);
  out << content;
}

}  // namespace cranopt::io
