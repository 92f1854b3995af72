#pragma once

#include <cmath>

// Boundary unit conversions. Everything internal is SI (Hz, W, bit/s);
// configuration files speak MHz, dBm, dB and Mbps.
namespace cranopt::units {

inline double dbm_to_watts(double dbm) { return std::pow(10.0, dbm / 10.0) * 1e-3; }
inline double watts_to_dbm(double watts) { return 10.0 * std::log10(watts * 1e3); }

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
inline double linear_to_db(double x) { return 10.0 * std::log10(x); }

inline double mhz_to_hz(double mhz) { return mhz * 1e6; }
inline double hz_to_mhz(double hz) { return hz * 1e-6; }

inline double mbps_to_bps(double mbps) { return mbps * 1e6; }
inline double bps_to_mbps(double bps) { return bps * 1e-6; }

}  // namespace cranopt::units
