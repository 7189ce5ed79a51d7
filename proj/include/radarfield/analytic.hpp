#pragma once

#include "radarfield/params.hpp"

// Closed-form interference statistics for a planar Poisson field of pulsed
// radars under the strongest-interferer approximation, plus the quadrature
// extensions that add receiver noise. Every function is a pure function of
// its arguments and safe to call concurrently.

namespace radarfield::analytic {

/// Two-way free-space factor [c / (4 pi f)]^2.
double path_factor(double freq);

/// E[zeta^(2/alpha)] for the fading power coefficient zeta: 1 without
/// fading, Gamma(1 + 2/alpha) under Rayleigh fading. Requires alpha > 2
/// (alpha == 2 accepted in declared limit mode).
double fading_moment(double alpha, Fading fading, bool alpha_limit = false);

/// Received echo power from a target at distance d with fading draw zeta
/// (zeta = 1 without fading). Decays as d^(-2 alpha): two-way propagation.
double echo_power(double d, double zeta, const RadarParams& p);

/// CDF of the strongest single interferer's received power over one
/// listening slot. Returns 1 for an empty field (lambda = 0). By
/// convention i == 0 returns the limit value 0; i < 0 is a domain error.
double strongest_cdf(double i, const RadarParams& p);

/// log of strongest_cdf, exact even where the CDF rounds to 1. Needed for
/// full-precision tail identities such as the false-alarm equation.
double strongest_log_cdf(double i, const RadarParams& p);

/// Density of the strongest interferer's power (derivative of
/// strongest_cdf). Integrates to 1 over (0, inf) whenever lambda > 0.
double strongest_pdf(double i, const RadarParams& p);

/// Inverse of strongest_cdf: the power level at CDF value y in (0, 1).
double strongest_quantile(double y, const RadarParams& p);

/// Detection threshold achieving the target false-alarm probability under
/// the strongest-interferer approximation. lambda == 0 has no
/// interference-limited threshold and is a domain error (use the
/// noise-only path instead).
double detection_threshold(const RadarParams& p);

/// Maximum distance at which a target is detected with probability one in
/// the no-fading case (echo power meets detection_threshold). Independent
/// of transmit power and carrier frequency.
double max_range_no_fading(const RadarParams& p);

/// No-fading detection probability at target distance d: 1 while the echo
/// meets the threshold (compared with >=), then 1 - strongest_cdf(threshold
/// - echo), decaying to detection_floor as d grows.
double detection_probability_no_fading(double d, const RadarParams& p);

/// Large-distance limit of the detection probability: the chance that
/// interference alone crosses the threshold in the echo slot.
double detection_floor(double pfa, double delta);
double detection_floor(const RadarParams& p);

/// Rayleigh-fading detection probability at distance d, by adaptive
/// quadrature (relative tolerance 1e-9) over the interference level.
/// Invariant under joint changes of transmit power and carrier frequency.
double detection_probability_rayleigh(double d, const RadarParams& p);

/// Thermal noise power k_B * T * B * F.
double noise_power(double temp, double bandwidth, double noise_figure);
double noise_power(const NoiseParams& n);

/// CDF of noise-plus-interference power (exponential noise convolved with
/// the strongest-interferer law), by adaptive quadrature with relative
/// tolerance 1e-8.
double noise_interference_cdf(double z, const RadarParams& p, const NoiseParams& n);

/// Detection threshold when both noise and interference are present:
/// root of the false-alarm equation on the noise-plus-interference CDF,
/// solved by bracketed bisection plus secant polish to relative 1e-8.
/// Always >= both threshold_noise_only and detection_threshold.
double threshold_with_noise(const RadarParams& p, const NoiseParams& n);

/// Maximum detectable range with noise and interference (echo power equals
/// threshold_with_noise).
double max_range_with_noise(const RadarParams& p, const NoiseParams& n);

/// Detection threshold in the absence of interference.
double threshold_noise_only(const RadarParams& p, const NoiseParams& n);

/// Maximum detectable range in the absence of interference.
double max_range_noise_only(const RadarParams& p, const NoiseParams& n);

// -- helpers shared with the Monte Carlo modules --

/// Per-slot CDF level matching the false-alarm target over m-1 listening
/// slots: (1 - pfa)^(1/(m-1)).
double per_slot_quantile(const RadarParams& p);

/// 1 - per_slot_quantile, computed without cancellation.
double per_slot_tail(const RadarParams& p);

/// Solves detection_probability_* (d) == level for d by bisection on a
/// bracket [d_lo, d_hi]; used for fading-range summaries and tests.
double analytic_range_at_level(const RadarParams& p, double level, double d_lo, double d_hi);

}  // namespace radarfield::analytic
