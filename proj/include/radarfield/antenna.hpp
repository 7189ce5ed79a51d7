#pragma once

#include <Eigen/Core>

#include "radarfield/params.hpp"

namespace radarfield::antenna {

/// Planar (azimuth-only) gain-vs-angle model. Two kinds:
///
///  - Cone: constant gain 4*pi/phi^2 inside the beamwidth phi, zero
///    outside. The idealised pattern behind all the closed forms.
///  - PlanarArray: the azimuth cut of a uniform square array of isotropic
///    elements (default 4 per side, half-wavelength spacing), radiating
///    over the front hemisphere only. Gain is peak * |AF|^2 with the
///    sidelobe region clamped at `sidelobe_floor_db` below the peak, and
///    the peak normalised to 4*pi/hpbw^2 from the numerically measured
///    half-power beamwidth.
///
/// Patterns are immutable values; everything here is pure.
class AntennaPattern {
public:
    enum class Kind { Cone, PlanarArray };

    static AntennaPattern cone(double phi);
    static AntennaPattern planar_array(int elements_per_side = 4,
                                       double spacing_wavelengths = 0.5,
                                       double sidelobe_floor_db = -10.0);

    Kind kind() const { return kind_; }
    double peak_gain() const { return peak_gain_; }

    /// Beam span: the cone beamwidth, or the array's measured half-power
    /// beamwidth, in radians.
    double beamwidth() const { return beamwidth_; }

    /// Linear gain toward angle theta off boresight (any real angle;
    /// wrapped internally).
    double gain(double theta) const;

    /// |array factor| at theta (PlanarArray only; 1 at boresight).
    double array_factor(double theta) const;

    /// First-sidelobe level of the unclamped array factor, in dB relative
    /// to the peak (PlanarArray only).
    double first_sidelobe_db() const { return first_sidelobe_db_; }

    double sidelobe_floor_db() const { return sidelobe_floor_db_; }
    int elements_per_side() const { return elements_per_side_; }
    double spacing_wavelengths() const { return spacing_wavelengths_; }

    // -- fast-path data for the field hot loop --

    /// cos(phi/2) for the cone test (Cone only).
    double cos_half_beam() const { return cos_half_beam_; }

    /// Gain indexed by sin^2(theta) on [0, 1] for front-hemisphere angles;
    /// linear interpolation (PlanarArray only).
    double gain_from_sin2(double sin2) const {
        const double t = sin2 * static_cast<double>(kTableSize - 1);
        const int i0 = std::min(static_cast<int>(t), kTableSize - 2);
        const double f = t - i0;
        return gain_table_[i0] * (1.0 - f) + gain_table_[i0 + 1] * f;
    }

private:
    AntennaPattern() = default;
    static constexpr int kTableSize = 8193;

    Kind kind_ = Kind::Cone;
    double peak_gain_ = 0.0;
    double beamwidth_ = 0.0;
    double cos_half_beam_ = 0.0;
    int elements_per_side_ = 0;
    double spacing_wavelengths_ = 0.0;
    double sidelobe_floor_db_ = 0.0;
    double first_sidelobe_db_ = 0.0;
    Eigen::ArrayXd gain_table_;
};

/// Product of transmit and receive gains for the link tx -> rx given both
/// boresight angles and positions. Coincident positions are a domain error.
double aligned_link_gain(double tx_boresight, double rx_boresight,
                         const Eigen::Vector2d& tx_pos, const Eigen::Vector2d& rx_pos,
                         const AntennaPattern& pattern);

/// Tabulates gain vs angle over (-pi, pi]; column 0 angle [rad], column 1
/// linear gain. For CSV dumps and plotting.
Eigen::ArrayX2d sample_pattern(const AntennaPattern& pattern, int n_points);

}  // namespace radarfield::antenna
