#pragma once

#include <cmath>

#include "emx/constants.hpp"

namespace emx {

// All model internals are SI with angular frequencies in rad/s. Files and
// CLI flags speak Hz / dBm / volts / kelvin; these helpers are the only
// place the conversions happen.

inline double hz_to_rad(double f_hz) { return two_pi * f_hz; }
inline double rad_to_hz(double w_rad) { return w_rad / two_pi; }

inline double dbm_to_watt(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }
inline double watt_to_dbm(double watt) { return 10.0 * std::log10(watt) + 30.0; }

inline double db_from_power_ratio(double r) { return 10.0 * std::log10(r); }
inline double db_from_amplitude_ratio(double r) { return 20.0 * std::log10(r); }

// A PSD quoted in dBm means "power in a 1 Hz band into the line impedance".
inline double dbm_to_v2_per_hz(double dbm, double impedance_ohm) {
    return dbm_to_watt(dbm) * impedance_ohm;  // x 1 Hz reference band
}
inline double v2_per_hz_to_dbm(double s_v2_hz, double impedance_ohm) {
    return watt_to_dbm(s_v2_hz / impedance_ohm);
}

}  // namespace emx
