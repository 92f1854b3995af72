#include "cranopt/types.hpp"

#include <cmath>
#include <numeric>

namespace cranopt {

std::vector<int> Scenario::owned_scs(int user) const {
  std::vector<int> out;
  for (int n = 0; n < num_subcarriers; ++n) {
    if (sc_owner[n] == user) out.push_back(n);
  }
  return out;
}

void Scenario::validate() const {
  auto fail = [](const std::string& what) { throw std::invalid_argument("scenario: " + what); };

  if (!(bandwidth_hz > 0.0)) fail("bandwidth must be positive");
  if (num_subcarriers < 1) fail("need at least one subcarrier");
  if (num_rrhs < 1 || num_users < 1) fail("need at least one RRH and one user");

  if (static_cast<int>(channel_gain_sq.size()) != num_rrhs) fail("gain array: RRH dimension");
  for (const auto& per_user : channel_gain_sq) {
    if (static_cast<int>(per_user.size()) != num_users) fail("gain array: user dimension");
    for (const auto& per_sc : per_user) {
      if (static_cast<int>(per_sc.size()) != num_subcarriers) fail("gain array: SC dimension");
      for (double g : per_sc) {
        if (!(g >= 0.0) || !std::isfinite(g)) fail("channel gains must be finite and >= 0");
      }
    }
  }
  if (static_cast<int>(noise_var.size()) != num_rrhs) fail("noise array: RRH dimension");
  for (const auto& per_sc : noise_var) {
    if (static_cast<int>(per_sc.size()) != num_subcarriers) fail("noise array: SC dimension");
    for (double v : per_sc) {
      if (!(v >= 0.0) || !std::isfinite(v)) fail("noise variances must be finite and >= 0");
    }
  }
  if (static_cast<int>(power_budget.size()) != num_users) fail("power budget: user dimension");
  for (double p : power_budget) {
    if (!(p >= 0.0) || !std::isfinite(p)) fail("power budgets must be finite and >= 0");
  }
  if (static_cast<int>(fronthaul_cap.size()) != num_rrhs) fail("fronthaul cap: RRH dimension");
  for (double t : fronthaul_cap) {
    if (!(t >= 0.0) || !std::isfinite(t)) fail("fronthaul capacities must be finite and >= 0");
  }
  if (static_cast<int>(sc_owner.size()) != num_subcarriers) fail("sc_owner: SC dimension");
  for (int owner : sc_owner) {
    if (owner < 0 || owner >= num_users) fail("every SC must be owned by a valid user");
  }
}

PowerAllocation PowerAllocation::zeros(int num_users, int num_subcarriers) {
  PowerAllocation out;
  out.p.assign(num_users, std::vector<double>(num_subcarriers, 0.0));
  return out;
}

double PowerAllocation::user_total(int user) const {
  return std::accumulate(p[user].begin(), p[user].end(), 0.0);
}

FronthaulAllocation FronthaulAllocation::zeros(int num_rrhs, int num_subcarriers) {
  FronthaulAllocation out;
  out.t.assign(num_rrhs, std::vector<double>(num_subcarriers, 0.0));
  return out;
}

FronthaulAllocation FronthaulAllocation::from_bits(const std::vector<std::vector<int>>& bits,
                                                   double bit_grid_bps) {
  FronthaulAllocation out;
  out.integer_bits = true;
  out.d = bits;
  out.t.reserve(bits.size());
  for (const auto& row : bits) {
    std::vector<double> t_row(row.size());
    for (std::size_t n = 0; n < row.size(); ++n) t_row[n] = row[n] * bit_grid_bps;
    out.t.push_back(std::move(t_row));
  }
  return out;
}

double FronthaulAllocation::rrh_total(int rrh) const {
  return std::accumulate(t[rrh].begin(), t[rrh].end(), 0.0);
}

std::string to_string(QuantModel model) {
  return model == QuantModel::GaussianTestChannel ? "gaussian" : "uniform";
}

}  // namespace cranopt
