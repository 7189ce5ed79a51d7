#pragma once

#include <cmath>
#include <string>

#include "radarfield/errors.hpp"

namespace radarfield {

inline constexpr const char* kVersion = "0.1.0";

namespace constants {
inline constexpr double speed_of_light = 299792458.0;   // m/s
inline constexpr double boltzmann = 1.380649e-23;       // J/K
}  // namespace constants

enum class Fading { NoFading, Rayleigh };

inline const char* to_string(Fading f) {
    return f == Fading::NoFading ? "none" : "rayleigh";
}

/// System parameters of the pulsed-radar network. Defaults are the baseline
/// evaluation setup: mm-wave line-of-sight radars at 60 GHz, 30-degree
/// beams, one transmit slot per 100-slot cycle.
///
/// Powers are in watts, frequencies in hertz, angles in radians. The
/// per-slot transmit probability is 1/m and is never stored separately;
/// the boresight gain 4*pi/phi^2 is likewise always derived from phi.
struct RadarParams {
    double lambda = 1e-4;      ///< radar density [1/m^2]
    int m = 100;               ///< cycle length in slots (1 tx + m-1 listen)
    double phi = M_PI / 6.0;   ///< antenna beamwidth [rad]
    double alpha = 2.0;        ///< path-loss exponent
    double pt = 0.01;          ///< transmit power [W] (10 dBm)
    double freq = 60e9;        ///< carrier frequency [Hz]
    double kappa = 10.0;       ///< processing gain, linear
    double sigma = 10.0;       ///< target radar cross section [m^2]
    double pfa = 0.1;          ///< target false-alarm probability
    Fading fading = Fading::NoFading;

    /// The closed forms require alpha > 2 but stay finite as alpha -> 2.
    /// Setting this flag declares that alpha == 2 is to be read as that
    /// limit. Monte Carlo runs are still allowed in limit mode, but the
    /// window-truncation error bounds only hold for alpha > 2.
    bool alpha_limit = false;

    double delta() const { return 1.0 / static_cast<double>(m); }
    double gain_max() const { return 4.0 * M_PI / (phi * phi); }

    /// Throws ValidationError listing every violated field.
    void validate() const;
};

/// Receiver noise description; the noise power is always the product
/// k_B * T * B * F and is never stored. Defaults are the noise-study
/// setup (290 K, 125 MHz, noise figure 10).
struct NoiseParams {
    double temp = 290.0;          ///< operating temperature [K]
    double bandwidth = 125e6;     ///< receiver bandwidth [Hz]
    double noise_figure = 10.0;   ///< linear noise figure

    double power() const { return constants::boltzmann * temp * bandwidth * noise_figure; }
    void validate() const;
};

/// Quantities derived from RadarParams that appear throughout the closed
/// forms: the two-way free-space factor [c/(4 pi f)]^2, the power scale
/// Pt * Gm^2 * path_factor, and the fading moment E[zeta^(2/alpha)]
/// (1 without fading, Gamma(1 + 2/alpha) under Rayleigh).
struct DerivedConstants {
    double path_factor;    ///< [c/(4 pi f)]^2
    double power_scale;    ///< Pt * Gm^2 * path_factor [W]
    double fading_moment;  ///< E[zeta^(2/alpha)]
};

DerivedConstants derive(const RadarParams& p);

}  // namespace radarfield
