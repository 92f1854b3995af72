#include "cranopt/model.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace cranopt::model {
namespace {

void check_sc_index(const Scenario& sc, int n) {
  if (n < 0 || n >= sc.num_subcarriers) {
    throw std::invalid_argument("subcarrier index out of range");
  }
}

void check_noise_q(const Scenario& sc, const std::vector<std::vector<double>>& noise_q) {
  if (static_cast<int>(noise_q.size()) != sc.num_rrhs) {
    throw std::invalid_argument("noise_q: RRH dimension mismatch");
  }
  for (const auto& row : noise_q) {
    if (static_cast<int>(row.size()) != sc.num_subcarriers) {
      throw std::invalid_argument("noise_q: SC dimension mismatch");
    }
    for (double q : row) {
      if (q < 0.0 || std::isnan(q)) throw std::invalid_argument("noise_q must be >= 0");
    }
  }
}

}  // namespace

std::vector<double> mrc_weights(const Scenario& sc,
                                const std::vector<std::vector<double>>& noise_q, int n) {
  check_sc_index(sc, n);
  check_noise_q(sc, noise_q);
  const int k = sc.sc_owner[n];
  std::vector<double> w(sc.num_rrhs);
  for (int m = 0; m < sc.num_rrhs; ++m) {
    w[m] = std::sqrt(sc.channel_gain_sq[m][k][n]) / (sc.noise_var[m][n] + noise_q[m][n]);
  }
  return w;
}

double snr_with_weights(const Scenario& sc, const PowerAllocation& power,
                        const std::vector<std::vector<double>>& noise_q, int n,
                        std::span<const double> weights) {
  check_sc_index(sc, n);
  check_noise_q(sc, noise_q);
  const int k = sc.sc_owner[n];
  const double p = power.p[k][n];
  if (p < 0.0) throw std::invalid_argument("negative transmit power");

  double signal_amp = 0.0;
  double noise_power = 0.0;
  for (int m = 0; m < sc.num_rrhs; ++m) {
    signal_amp += weights[m] * std::sqrt(sc.channel_gain_sq[m][k][n]);
    noise_power += weights[m] * weights[m] * (sc.noise_var[m][n] + noise_q[m][n]);
  }
  if (noise_power <= 0.0) throw std::invalid_argument("weights see zero total noise");
  return p * signal_amp * signal_amp / noise_power;
}

double snr_post_mrc(const Scenario& sc, const PowerAllocation& power,
                    const std::vector<std::vector<double>>& noise_q, int n) {
  check_sc_index(sc, n);
  check_noise_q(sc, noise_q);
  const int k = sc.sc_owner[n];
  const double p = power.p[k][n];
  if (p < 0.0) throw std::invalid_argument("negative transmit power");

  double snr = 0.0;
  for (int m = 0; m < sc.num_rrhs; ++m) {
    const double denom = sc.noise_var[m][n] + noise_q[m][n];
    if (denom > 0.0) snr += sc.channel_gain_sq[m][k][n] * p / denom;
  }
  return snr;
}

RateBreakdown gaussian_sum_rate(const Scenario& sc, const PowerAllocation& power,
                                const FronthaulAllocation& fronthaul) {
  RateBreakdown out;
  out.per_sc_bps.assign(sc.num_subcarriers, 0.0);
  const double sc_bw = sc.sc_bandwidth_hz();
  for (int n = 0; n < sc.num_subcarriers; ++n) {
    const int k = sc.sc_owner[n];
    const double p = power.p[k][n];
    double snr = 0.0;
    for (int m = 0; m < sc.num_rrhs; ++m) {
      const double t = fronthaul.t[m][n];
      if (t <= 0.0) continue;  // the RRH does not forward this SC at all
      const double signal = sc.channel_gain_sq[m][k][n] * p + sc.noise_var[m][n];
      const double q = signal / (std::exp2(sc.num_subcarriers * t / sc.bandwidth_hz) - 1.0);
      snr += sc.channel_gain_sq[m][k][n] * p / (sc.noise_var[m][n] + q);
    }
    out.per_sc_bps[n] = sc_bw * std::log2(1.0 + snr);
    out.total_bps += out.per_sc_bps[n];
  }
  return out;
}

std::vector<double> gaussian_fronthaul_load(const Scenario& sc, const PowerAllocation& power,
                                            const std::vector<std::vector<double>>& noise_q) {
  check_noise_q(sc, noise_q);
  const double sc_bw = sc.sc_bandwidth_hz();
  std::vector<double> load(sc.num_rrhs, 0.0);
  for (int m = 0; m < sc.num_rrhs; ++m) {
    for (int n = 0; n < sc.num_subcarriers; ++n) {
      const int k = sc.sc_owner[n];
      const double signal = sc.channel_gain_sq[m][k][n] * power.p[k][n] + sc.noise_var[m][n];
      const double q = noise_q[m][n];
      if (q <= 0.0) {
        if (signal > 0.0) {
          std::ostringstream msg;
          msg << "infinite fronthaul load: zero quantization noise with nonzero signal at RRH "
              << m << ", SC " << n;
          throw std::domain_error(msg.str());
        }
        continue;  // nothing received, nothing to carry
      }
      load[m] += sc_bw * std::log2(1.0 + signal / q);
    }
  }
  return load;
}

double gaussian_noise_for_rate(double signal_power_w, double t_bps, double bandwidth_hz,
                               int num_subcarriers) {
  if (t_bps <= 0.0) return std::numeric_limits<double>::infinity();
  return signal_power_w / (std::exp2(num_subcarriers * t_bps / bandwidth_hz) - 1.0);
}

RateBreakdown uniform_sum_rate(const Scenario& sc, const PowerAllocation& power,
                               const FronthaulAllocation& fronthaul) {
  RateBreakdown out;
  out.per_sc_bps.assign(sc.num_subcarriers, 0.0);
  const double sc_bw = sc.sc_bandwidth_hz();
  for (int n = 0; n < sc.num_subcarriers; ++n) {
    const int k = sc.sc_owner[n];
    const double p = power.p[k][n];
    double snr = 0.0;
    for (int m = 0; m < sc.num_rrhs; ++m) {
      if (fronthaul.integer_bits && fronthaul.d[m][n] == 0) continue;  // zero bits: no stream
      const double gain_p = sc.channel_gain_sq[m][k][n] * p;
      const double signal = gain_p + sc.noise_var[m][n];
      const double q =
          3.0 * signal * std::exp2(-sc.num_subcarriers * fronthaul.t[m][n] / sc.bandwidth_hz);
      const double denom = sc.noise_var[m][n] + q;
      if (denom > 0.0) snr += gain_p / denom;
    }
    out.per_sc_bps[n] = sc_bw * std::log2(1.0 + snr);
    out.total_bps += out.per_sc_bps[n];
  }
  return out;
}

std::vector<double> uniform_fronthaul_load(const FronthaulAllocation& fronthaul) {
  if (!fronthaul.integer_bits) {
    throw std::invalid_argument("uniform_fronthaul_load requires an integer-bit allocation");
  }
  std::vector<double> load(fronthaul.t.size(), 0.0);
  for (std::size_t m = 0; m < fronthaul.t.size(); ++m) {
    for (double t : fronthaul.t[m]) load[m] += t;
  }
  return load;
}

std::vector<Violation> check_feasible(const Scenario& sc, const PowerAllocation& power,
                                      const FronthaulAllocation& fronthaul, QuantModel model,
                                      double tol) {
  std::vector<Violation> out;
  auto add = [&out](Violation::Kind kind, int index, int n, std::string msg) {
    out.push_back({kind, index, n, std::move(msg)});
  };

  for (int k = 0; k < sc.num_users; ++k) {
    for (int n = 0; n < sc.num_subcarriers; ++n) {
      if (power.p[k][n] < 0.0) {
        add(Violation::Kind::NegativePower, k, n,
            "negative power for user " + std::to_string(k) + " on SC " + std::to_string(n));
      }
    }
    const double total = power.user_total(k);
    const double budget = sc.power_budget[k];
    if (total > budget + tol * std::max(budget, 1e-300)) {
      std::ostringstream msg;
      msg << "user " << k << " power " << total << " W exceeds budget " << budget << " W";
      add(Violation::Kind::PowerBudget, k, -1, msg.str());
    }
  }

  const double grid = sc.bit_grid_bps();
  for (int m = 0; m < sc.num_rrhs; ++m) {
    for (int n = 0; n < sc.num_subcarriers; ++n) {
      const double t = fronthaul.t[m][n];
      if (t < 0.0) {
        add(Violation::Kind::NegativeFronthaul, m, n,
            "negative fronthaul rate at RRH " + std::to_string(m) + ", SC " + std::to_string(n));
      }
      if (model == QuantModel::UniformScalar && fronthaul.integer_bits) {
        const double bits = t / grid;
        if (std::abs(bits - std::round(bits)) > tol * std::max(bits, 1.0)) {
          std::ostringstream msg;
          msg << "RRH " << m << " SC " << n << " rate " << t << " bit/s is off the " << grid
              << " bit/s grid";
          add(Violation::Kind::IntegerGrid, m, n, msg.str());
        }
      }
    }
    const double total = fronthaul.rrh_total(m);
    const double cap = sc.fronthaul_cap[m];
    if (total > cap + tol * std::max(cap, 1e-300)) {
      std::ostringstream msg;
      msg << "RRH " << m << " fronthaul " << total << " bit/s exceeds capacity " << cap
          << " bit/s";
      add(Violation::Kind::FronthaulCapacity, m, -1, msg.str());
    }
  }
  return out;
}

}  // namespace cranopt::model
