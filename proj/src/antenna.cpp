#include "radarfield/antenna.hpp"

#include <cmath>

namespace radarfield::antenna {

namespace {

double wrap_angle(double theta) {
    theta = std::remainder(theta, 2.0 * M_PI);
    return theta;  // in [-pi, pi]
}

// |AF| of an N-element uniform line of isotropic radiators with the given
// spacing, along the azimuth cut: sin(N psi / 2) / (N sin(psi / 2)),
// psi = 2 pi spacing sin(theta).
double abs_array_factor(int n, double spacing, double theta) {
    const double psi = 2.0 * M_PI * spacing * std::sin(theta);
    const double den = static_cast<double>(n) * std::sin(0.5 * psi);
    if (std::abs(den) < 1e-12) return 1.0;  // boresight limit
    return std::abs(std::sin(0.5 * static_cast<double>(n) * psi) / den);
}

// Half-power beamwidth of |AF|^2, by bisection between boresight and the
// first null.
double measure_hpbw(int n, double spacing) {
    const double first_null = std::asin(std::min(1.0, 1.0 / (static_cast<double>(n) * spacing)));
    double lo = 0.0, hi = first_null;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double a = abs_array_factor(n, spacing, mid);
        if (a * a > 0.5)
            lo = mid;
        else
            hi = mid;
    }
    return lo + hi;  // 2 * theta_3dB
}

// Peak of |AF|^2 beyond the first null, in dB relative to boresight.
double measure_first_sidelobe_db(int n, double spacing) {
    const double first_null = std::asin(std::min(1.0, 1.0 / (static_cast<double>(n) * spacing)));
    double best = 0.0;
    for (int i = 0; i <= 20000; ++i) {
        const double theta = first_null + (0.5 * M_PI - first_null) * i / 20000.0;
        const double a = abs_array_factor(n, spacing, theta);
        best = std::max(best, a * a);
    }
    return 10.0 * std::log10(best);
}

}  // namespace

AntennaPattern AntennaPattern::cone(double phi) {
    if (!(phi > 0.0 && phi <= 2.0 * M_PI))
        throw ValidationError("AntennaPattern::cone: phi must be in (0, 2*pi]");
    AntennaPattern p;
    p.kind_ = Kind::Cone;
    p.beamwidth_ = phi;
    p.peak_gain_ = 4.0 * M_PI / (phi * phi);
    p.cos_half_beam_ = std::cos(0.5 * phi);
    return p;
}

AntennaPattern AntennaPattern::planar_array(int elements_per_side, double spacing_wavelengths,
                                            double sidelobe_floor_db) {
    if (elements_per_side < 2) throw ValidationError("planar_array: need at least 2 elements per side");
    if (!(spacing_wavelengths > 0.0)) throw ValidationError("planar_array: spacing must be > 0");
    if (!(sidelobe_floor_db < 0.0)) throw ValidationError("planar_array: sidelobe floor must be < 0 dB");

    AntennaPattern p;
    p.kind_ = Kind::PlanarArray;
    p.elements_per_side_ = elements_per_side;
    p.spacing_wavelengths_ = spacing_wavelengths;
    p.sidelobe_floor_db_ = sidelobe_floor_db;
    p.beamwidth_ = measure_hpbw(elements_per_side, spacing_wavelengths);
    p.peak_gain_ = 4.0 * M_PI / (p.beamwidth_ * p.beamwidth_);
    p.first_sidelobe_db_ = measure_first_sidelobe_db(elements_per_side, spacing_wavelengths);

    const double floor_lin = std::pow(10.0, sidelobe_floor_db / 10.0);
    p.gain_table_.resize(kTableSize);
    for (int i = 0; i < kTableSize; ++i) {
        const double sin2 = static_cast<double>(i) / (kTableSize - 1);
        const double theta = std::asin(std::sqrt(std::min(1.0, sin2)));
        const double a = abs_array_factor(elements_per_side, spacing_wavelengths, theta);
        p.gain_table_[i] = p.peak_gain_ * std::max(a * a, floor_lin);
    }
    return p;
}

double AntennaPattern::gain(double theta) const {
    theta = wrap_angle(theta);
    if (kind_ == Kind::Cone)
        return std::abs(theta) <= 0.5 * beamwidth_ ? peak_gain_ : 0.0;
    // Panel array: no radiation behind the aperture plane.
    if (std::abs(theta) > 0.5 * M_PI) return 0.0;
    const double s = std::sin(theta);
    return gain_from_sin2(s * s);
}

double AntennaPattern::array_factor(double theta) const {
    if (kind_ != Kind::PlanarArray)
        throw std::domain_error("array_factor: pattern is not a planar array");
    return abs_array_factor(elements_per_side_, spacing_wavelengths_, wrap_angle(theta));
}

double aligned_link_gain(double tx_boresight, double rx_boresight,
                         const Eigen::Vector2d& tx_pos, const Eigen::Vector2d& rx_pos,
                         const AntennaPattern& pattern) {
    const Eigen::Vector2d d = rx_pos - tx_pos;
    if (d.squaredNorm() == 0.0)
        throw std::domain_error("aligned_link_gain: coincident positions");
    const double to_rx = std::atan2(d.y(), d.x());
    const double to_tx = std::atan2(-d.y(), -d.x());
    return pattern.gain(to_rx - tx_boresight) * pattern.gain(to_tx - rx_boresight);
}

Eigen::ArrayX2d sample_pattern(const AntennaPattern& pattern, int n_points) {
    if (n_points < 2) throw ValidationError("sample_pattern: need at least 2 points");
    Eigen::ArrayX2d out(n_points, 2);
    for (int i = 0; i < n_points; ++i) {
        const double theta = -M_PI + 2.0 * M_PI * (i + 1) / static_cast<double>(n_points);
        out(i, 0) = theta;
        out(i, 1) = pattern.gain(theta);
    }
    return out;
}

}  // namespace radarfield::antenna
