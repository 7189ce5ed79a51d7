#include "radarfield/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <vector>

#include "radarfield/analytic.hpp"
#include "radarfield/parallel.hpp"

namespace radarfield::mc {

namespace {

constexpr double kZ99 = 2.5758293035489004;  // Phi^-1(0.995)

std::uint64_t scene_key_for(const McConfig& cfg, std::int64_t scene_index) {
    return rng::derive(cfg.seed, rng::kTagScene, static_cast<std::uint64_t>(scene_index));
}

double rx_boresight_for(std::uint64_t scene_key) {
    rng::Stream s(rng::derive(scene_key, rng::kTagRxBoresight));
    return 2.0 * M_PI * s.uniform();
}

}  // namespace

EmpiricalDistribution EmpiricalDistribution::from_samples(std::vector<double> samples) {
    std::sort(samples.begin(), samples.end());
    EmpiricalDistribution d;
    d.samples_ = Eigen::Map<const Eigen::ArrayXd>(samples.data(), samples.size());
    return d;
}

double EmpiricalDistribution::quantile(double q) const {
    if (samples_.size() == 0) throw std::domain_error("quantile: empty distribution");
    if (!(q >= 0.0 && q <= 1.0)) throw std::domain_error("quantile: q must be in [0, 1]");
    const std::int64_t n = samples_.size();
    std::int64_t idx = static_cast<std::int64_t>(std::ceil(q * static_cast<double>(n))) - 1;
    idx = std::clamp<std::int64_t>(idx, 0, n - 1);
    return samples_[idx];
}

double EmpiricalDistribution::ks_distance(const std::function<double(double)>& cdf) const {
    const std::int64_t n = samples_.size();
    if (n == 0) throw std::domain_error("ks_distance: empty distribution");
    double d = 0.0;
    for (std::int64_t i = 0; i < n; ++i) {
        const double f = cdf(samples_[i]);
        d = std::max(d, std::abs(f - static_cast<double>(i + 1) / n));
        d = std::max(d, std::abs(f - static_cast<double>(i) / n));
    }
    return d;
}

Estimate wilson_interval(std::int64_t successes, std::int64_t trials) {
    if (trials <= 0) throw std::domain_error("wilson_interval: trials must be > 0");
    const double n = static_cast<double>(trials);
    const double p = static_cast<double>(successes) / n;
    const double z2 = kZ99 * kZ99;
    const double denom = 1.0 + z2 / n;
    const double center = (p + z2 / (2.0 * n)) / denom;
    const double half = kZ99 * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom;
    Estimate e;
    e.value = p;
    e.ci_low = std::max(0.0, center - half);
    e.ci_high = std::min(1.0, center + half);
    e.trials = trials;
    return e;
}

field::WindowInfo sampling_window(const RadarParams& p, const McConfig& cfg) {
    if (cfg.window_radius > 0.0) {
        field::WindowInfo w;
        w.radius = cfg.window_radius;
        return w;
    }
    if (p.lambda == 0.0) {
        field::WindowInfo w;
        w.radius = 1.0;  // empty field; radius is immaterial
        return w;
    }
    return field::window_radius_info(p, analytic::detection_threshold(p));
}

InterferenceSamples collect_interference(const RadarParams& p,
                                         const antenna::AntennaPattern& pattern,
                                         std::int64_t n_samples, const McConfig& cfg) {
    p.validate();
    if (n_samples < 1) throw ValidationError("collect_interference: n_samples must be >= 1");
    const field::WindowInfo window = sampling_window(p, cfg);
    const int slots_per_scene = p.m - 1;
    const std::int64_t n_scenes = (n_samples + slots_per_scene - 1) / slots_per_scene;

    std::vector<double> aggregate(n_samples), strongest(n_samples);
    parallel_for(n_scenes, cfg.threads, [&](std::int64_t scene_idx) {
        const std::uint64_t key = scene_key_for(cfg, scene_idx);
        const double rx = rx_boresight_for(key);
        field::for_each_slot_sample(
            p, window.radius, pattern, rx, key,
            [&](int slot, const field::InterferenceSample& s) {
                if (slot == 0) return;  // typical node's own transmit slot
                const std::int64_t idx = scene_idx * slots_per_scene + (slot - 1);
                if (idx >= n_samples) return;
                aggregate[idx] = s.aggregate;
                strongest[idx] = s.strongest;
            },
            cfg.point_cap);
    });

    InterferenceSamples out;
    out.aggregate = EmpiricalDistribution::from_samples(std::move(aggregate));
    out.strongest = EmpiricalDistribution::from_samples(std::move(strongest));
    out.window = window;
    return out;
}

double calibrate_threshold(const EmpiricalDistribution& dist, const RadarParams& p) {
    p.validate();
    const double q = analytic::per_slot_quantile(p);
    const auto required =
        static_cast<std::int64_t>(std::ceil(100.0 / analytic::per_slot_tail(p) - 1e-9));
    if (dist.count() < required) {
        std::ostringstream os;
        os << "calibrate_threshold: need at least " << required
           << " samples for the per-slot quantile " << q << ", got " << dist.count();
        throw ValidationError(os.str());
    }
    return dist.quantile(q);
}

Estimate estimate_pd(double d, double theta, const RadarParams& p,
                     const antenna::AntennaPattern& pattern, std::int64_t trials,
                     const McConfig& cfg, bool use_strongest) {
    p.validate();
    if (!(d > 0.0)) throw std::domain_error("estimate_pd: d must be > 0");
    if (!(theta > 0.0)) throw std::domain_error("estimate_pd: theta must be > 0");
    if (trials < 1) throw ValidationError("estimate_pd: trials must be >= 1");

    const field::WindowInfo window = sampling_window(p, cfg);
    const int slots_per_scene = p.m - 1;
    const std::int64_t n_scenes = (trials + slots_per_scene - 1) / slots_per_scene;

    // Echo power uses the pattern's boresight gain both ways (the target
    // sits in the typical node's boresight).
    const double peak = pattern.peak_gain();
    const double echo_mean = p.pt * peak * peak * p.kappa * p.sigma *
                             analytic::path_factor(p.freq) *
                             std::pow(d, -2.0 * p.alpha) / (4.0 * M_PI);
    const bool rayleigh_echo = p.fading == Fading::Rayleigh;

    std::vector<std::int64_t> success_per_scene(n_scenes, 0);
    parallel_for(n_scenes, cfg.threads, [&](std::int64_t scene_idx) {
        const std::uint64_t key = scene_key_for(cfg, scene_idx);
        const double rx = rx_boresight_for(key);
        rng::Stream echo_stream(rng::derive(key, rng::kTagEcho));
        std::int64_t hits = 0;
        field::for_each_slot_sample(
            p, window.radius, pattern, rx, key,
            [&](int slot, const field::InterferenceSample& s) {
                if (slot == 0) return;
                const std::int64_t idx = scene_idx * slots_per_scene + (slot - 1);
                if (idx >= trials) return;
                const double zeta = rayleigh_echo ? echo_stream.exponential() : 1.0;
                const double interference = use_strongest ? s.strongest : s.aggregate;
                if (echo_mean * zeta + interference >= theta) ++hits;
            },
            cfg.point_cap);
        success_per_scene[scene_idx] = hits;
    });

    std::int64_t successes = 0;
    for (std::int64_t h : success_per_scene) successes += h;
    return wilson_interval(successes, trials);
}

Estimate estimate_max_range(double theta, const RadarParams& p,
                            const antenna::AntennaPattern& pattern, const McConfig& cfg,
                            double level, std::int64_t trials_per_point, bool use_strongest) {
    p.validate();
    if (!(level > 0.0 && level < 1.0))
        throw ValidationError("estimate_max_range: level must be in (0, 1)");

    double lo = 0.1;
    double hi = sampling_window(p, cfg).radius;
    Estimate pd_lo = estimate_pd(lo, theta, p, pattern, trials_per_point, cfg, use_strongest);
    Estimate pd_hi = estimate_pd(hi, theta, p, pattern, trials_per_point, cfg, use_strongest);
    if (pd_lo.value < level || pd_hi.value >= level) {
        std::ostringstream os;
        os << "estimate_max_range: level " << level << " not bracketed on [" << lo << ", " << hi
           << "] m (pd " << pd_lo.value << " .. " << pd_hi.value << ")";
        throw NumericalError(os.str(), std::abs(pd_lo.value - level));
    }

    // Geometric bisection to 1% relative width. Every point reuses the same
    // scenes (common random numbers), so the empirical curve is monotone.
    std::int64_t total_trials = 2 * trials_per_point;
    while (hi / lo - 1.0 > 0.01) {
        const double mid = std::sqrt(lo * hi);
        const Estimate pd = estimate_pd(mid, theta, p, pattern, trials_per_point, cfg, use_strongest);
        total_trials += trials_per_point;
        if (pd.value >= level) {
            lo = mid;
            pd_lo = pd;
        } else {
            hi = mid;
            pd_hi = pd;
        }
    }

    // Propagate the binomial half-width through the local slope of the
    // empirical curve to widen the bracket-based interval.
    Estimate out;
    out.value = std::sqrt(lo * hi);
    out.trials = total_trials;
    const double dp = std::max(1e-12, pd_lo.value - pd_hi.value);
    const double dlogd = std::log(hi / lo);
    const double half_width_p = 0.5 * ((pd_lo.ci_high - pd_lo.ci_low) + (pd_hi.ci_high - pd_hi.ci_low)) / 2.0;
    const double u = std::min(0.5, half_width_p * dlogd / dp);
    out.ci_low = lo * std::exp(-u);
    out.ci_high = hi * std::exp(u);
    return out;
}

}  // namespace radarfield::mc
