#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace cranopt {

// Raised when a solver cannot produce a valid allocation (e.g. no
// bracketable dual, all channel gains zero).
class SolveError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Full problem instance for the uplink OFDMA fronthaul-limited network.
// All quantities are SI internally: Hz, watts, bit/s. Indices are 0-based;
// file formats use 1-based user ids and boundary units (MHz/dBm/Mbps).
struct Scenario {
  double bandwidth_hz = 0.0;  // B
  int num_subcarriers = 0;    // N
  int num_rrhs = 0;           // M
  int num_users = 0;          // K

  // |h_{m,k,n}|^2 power gains, indexed [m][k][n]. Phases are irrelevant to
  // every rate expression here; only the quantizer sample path draws them.
  std::vector<std::vector<std::vector<double>>> channel_gain_sq;
  std::vector<std::vector<double>> noise_var;  // [m][n] watts per SC
  std::vector<double> power_budget;            // [k] watts
  std::vector<double> fronthaul_cap;           // [m] bit/s
  std::vector<int> sc_owner;                   // [n] in [0, K)

  double sc_bandwidth_hz() const { return bandwidth_hz / num_subcarriers; }
  double bit_grid_bps() const { return 2.0 * bandwidth_hz / num_subcarriers; }

  std::vector<int> owned_scs(int user) const;

  // Throws std::invalid_argument when a structural invariant is broken
  // (shape mismatch, negative gain, SC without owner, ...).
  void validate() const;
};

// Per-(user, SC) transmit power in watts; nonzero only on owned SCs.
struct PowerAllocation {
  std::vector<std::vector<double>> p;  // [k][n]

  static PowerAllocation zeros(int num_users, int num_subcarriers);
  double user_total(int user) const;
};

// Per-(RRH, SC) fronthaul rate in bit/s. When integer_bits is set, d holds
// the bit depths and t[m][n] == d[m][n] * 2B/N exactly.
struct FronthaulAllocation {
  std::vector<std::vector<double>> t;  // [m][n] bit/s
  bool integer_bits = false;
  std::vector<std::vector<int>> d;  // [m][n] bits, valid when integer_bits

  static FronthaulAllocation zeros(int num_rrhs, int num_subcarriers);
  static FronthaulAllocation from_bits(const std::vector<std::vector<int>>& bits,
                                       double bit_grid_bps);
  double rrh_total(int rrh) const;
};

enum class QuantModel { GaussianTestChannel, UniformScalar };

std::string to_string(QuantModel model);

struct SolverOptions {
  double eps_rel = 1e-6;  // stop when objective gain <= eps_rel * objective
  int max_iter = 500;
};

// Outcome of any solver run: allocations, per-iteration objective values,
// and convergence metadata. The trace is non-decreasing for the alternating
// algorithms and objective_bps equals its last entry.
struct SolveReport {
  PowerAllocation power;
  FronthaulAllocation fronthaul;
  double objective_bps = 0.0;
  std::vector<double> objective_trace;
  int iterations = 0;
  bool converged = false;
  std::string notes;
};

// One broken constraint found by model::check_feasible.
struct Violation {
  enum class Kind {
    PowerBudget,
    FronthaulCapacity,
    NegativePower,
    NegativeFronthaul,
    IntegerGrid,
  };
  Kind kind;
  int index = -1;       // user or RRH, depending on kind
  int subcarrier = -1;  // -1 when the violation is an aggregate
  std::string message;
};

}  // namespace cranopt
