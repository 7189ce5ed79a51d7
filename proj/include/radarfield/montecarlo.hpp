#pragma once

#include <cstdint>
#include <functional>

#include <Eigen/Core>

#include "radarfield/antenna.hpp"
#include "radarfield/params.hpp"
#include "radarfield/scene.hpp"

// Empirical statistics engine: per-slot interference collection, threshold
// calibration to a target false-alarm rate, and detection-probability /
// maximum-range estimation with confidence intervals.
//
// Sampling layout: the typical node transmits in slot 0 and listens over
// slots 1..m-1. The m mark classes of a scene are independent Poisson
// fields, so the m-1 listening slots of one scene contribute m-1 i.i.d.
// per-slot samples (or detection trials); scenes are keyed off the root
// seed by index, making every result independent of the thread count.

namespace radarfield::mc {

struct McConfig {
    std::uint64_t seed = 1;
    int threads = 0;             ///< 0: hardware concurrency
    double point_cap = field::kDefaultPointCap;
    double window_radius = 0.0;  ///< 0: window_radius(params, analytic threshold)
};

/// Sorted sample set with order-statistic quantiles (type-1 / lower, so a
/// calibrated threshold is never understated).
class EmpiricalDistribution {
public:
    EmpiricalDistribution() = default;
    static EmpiricalDistribution from_samples(std::vector<double> samples);

    std::int64_t count() const { return samples_.size(); }
    const Eigen::ArrayXd& samples() const { return samples_; }
    double quantile(double q) const;

    /// Kolmogorov-Smirnov distance against a reference CDF.
    double ks_distance(const std::function<double(double)>& cdf) const;

private:
    Eigen::ArrayXd samples_;  // ascending
};

/// Point estimate with a 99% confidence interval.
struct Estimate {
    double value = 0.0;
    double ci_low = 0.0;
    double ci_high = 0.0;
    std::int64_t trials = 0;
};

/// Wilson score interval at 99% confidence.
Estimate wilson_interval(std::int64_t successes, std::int64_t trials);

struct InterferenceSamples {
    EmpiricalDistribution aggregate;
    EmpiricalDistribution strongest;
    field::WindowInfo window;
};

/// Draws n_samples independent per-slot interference samples (aggregate
/// and, separately retained, the strongest single component) from fresh
/// scenes.
InterferenceSamples collect_interference(const RadarParams& p,
                                         const antenna::AntennaPattern& pattern,
                                         std::int64_t n_samples, const McConfig& cfg);

/// Empirical detection threshold: the per-slot quantile of the sampled
/// interference matching the false-alarm target. Requires at least
/// 100 / (1 - quantile) samples so the tail holds >= 100 points.
double calibrate_threshold(const EmpiricalDistribution& dist, const RadarParams& p);

/// Fraction of detection trials in which the echo slot's power (echo plus
/// that slot's interference) reaches the threshold. The echo fading draw
/// is per-trial under Rayleigh. `use_strongest` scores against the
/// strongest interference component instead of the aggregate.
Estimate estimate_pd(double d, double theta, const RadarParams& p,
                     const antenna::AntennaPattern& pattern, std::int64_t trials,
                     const McConfig& cfg, bool use_strongest = false);

/// Maximum detectable range: bisection on distance against estimate_pd
/// crossing `level` (0.5 by default; the no-fading transition is a sharp
/// step so the level barely matters there). All bisection points share the
/// same seed (common random numbers), which keeps the empirical curve
/// monotone in d. The interval combines the final bracket with the
/// binomial uncertainty propagated through the local slope.
Estimate estimate_max_range(double theta, const RadarParams& p,
                            const antenna::AntennaPattern& pattern, const McConfig& cfg,
                            double level = 0.5, std::int64_t trials_per_point = 2000,
                            bool use_strongest = false);

/// Scene window radius used by the samplers: cfg.window_radius if set,
/// otherwise derived from the analytic detection threshold.
field::WindowInfo sampling_window(const RadarParams& p, const McConfig& cfg);

}  // namespace radarfield::mc
