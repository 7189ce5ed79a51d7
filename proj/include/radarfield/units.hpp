#pragma once

#include <cmath>

// Unit conversions for the CLI/config boundary. All internal math is done
// in watts, hertz and radians; dBm/GHz/degrees exist only at the edges.

namespace radarfield::units {

inline double dbm_to_watt(double dbm) { return 1e-3 * std::pow(10.0, dbm / 10.0); }
inline double watt_to_dbm(double w) { return 10.0 * std::log10(w / 1e-3); }
inline double ghz_to_hz(double ghz) { return ghz * 1e9; }
inline double mhz_to_hz(double mhz) { return mhz * 1e6; }
inline double deg_to_rad(double deg) { return deg * M_PI / 180.0; }
inline double rad_to_deg(double rad) { return rad * 180.0 / M_PI; }

}  // namespace radarfield::units
