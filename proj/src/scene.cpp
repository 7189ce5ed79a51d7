#include "radarfield/scene.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "radarfield/analytic.hpp"

namespace radarfield::field {

namespace {

// -- hot-loop helpers ------------------------------------------------------

// sin/cos via quadrant reduction and minimax polynomials, good to ~1e-10
// absolute for |x| within a few thousand radians. The slot evaluation calls
// this once per receiver-aligned candidate; libm sin/cos would dominate the
// whole Monte Carlo loop.
inline void fast_sincos(double x, double& s, double& c) {
    const double two_over_pi = 0.6366197723675814;
    const double q = std::nearbyint(x * two_over_pi);
    const int quad = static_cast<int>(q) & 3;
    const double r = x - q * 1.5707963267948966;
    const double r2 = r * r;
    double sp = -2.5052108385441720e-08;
    sp = sp * r2 + 2.7557319223985891e-06;
    sp = sp * r2 - 1.9841269841269841e-04;
    sp = sp * r2 + 8.3333333333333333e-03;
    sp = sp * r2 - 1.6666666666666666e-01;
    sp = sp * r2 * r + r;
    double cp = -2.7557319223985888e-07;
    cp = cp * r2 + 2.4801587301587302e-05;
    cp = cp * r2 - 1.3888888888888889e-03;
    cp = cp * r2 + 4.1666666666666666e-02;
    cp = cp * r2 - 0.5;
    cp = cp * r2 + 1.0;
    switch (quad) {
        case 0: s = sp; c = cp; break;
        case 1: s = cp; c = -sp; break;
        case 2: s = -sp; c = -cp; break;
        default: s = -cp; c = sp; break;
    }
}

// |angle| <= beam/2 test without trig: dot = r * cos(angle), c = cos(beam/2).
inline bool in_cone(double dot, double r2, double c, double c2) {
    if (c >= 0.0) return dot >= 0.0 && dot * dot >= c2 * r2;
    return dot >= 0.0 || dot * dot <= c2 * r2;
}

struct EvalContext {
    double pt_path = 0.0;       // Pt * [c/(4 pi f)]^2
    double cone_coef = 0.0;     // pt_path * peak_gain^2 (cone only)
    double alpha = 2.0;
    bool alpha_is_two = true;
    bool rayleigh = false;
    bool is_cone = true;
    double cos_half = 0.0, cos_half_sq = 0.0;
    double rx_ux = 1.0, rx_uy = 0.0;  // receiver boresight unit vector
    const antenna::AntennaPattern* pattern = nullptr;

    EvalContext(const RadarParams& p, const antenna::AntennaPattern& pat, double rx_boresight) {
        pt_path = p.pt * analytic::path_factor(p.freq);
        alpha = p.alpha;
        alpha_is_two = (p.alpha == 2.0);
        rayleigh = (p.fading == Fading::Rayleigh);
        is_cone = (pat.kind() == antenna::AntennaPattern::Kind::Cone);
        cone_coef = pt_path * pat.peak_gain() * pat.peak_gain();
        cos_half = pat.cos_half_beam();
        cos_half_sq = cos_half * cos_half;
        rx_ux = std::cos(rx_boresight);
        rx_uy = std::sin(rx_boresight);
        pattern = &pat;
    }

    double inv_r_alpha(double r2) const {
        return alpha_is_two ? 1.0 / r2 : std::pow(r2, -0.5 * alpha);
    }
};

void accumulate(InterferenceSample& out, double power) {
    out.aggregate += power;
    if (power > out.strongest) out.strongest = power;
    ++out.active_count;
}

// Evaluates one slot's point range. Fading draws are consumed in point
// order, only for links whose gain product is nonzero; this ordering is
// part of the determinism contract shared with the streaming path.
InterferenceSample eval_points(const double* xs, const double* ys, const double* bs,
                               std::int64_t n, const EvalContext& ctx, rng::Stream& fading) {
    InterferenceSample out;
    if (ctx.is_cone) {
        for (std::int64_t i = 0; i < n; ++i) {
            const double x = xs[i], y = ys[i];
            const double r2 = x * x + y * y;
            if (r2 == 0.0) continue;
            const double dot_rx = x * ctx.rx_ux + y * ctx.rx_uy;
            if (!in_cone(dot_rx, r2, ctx.cos_half, ctx.cos_half_sq)) continue;
            double sb, cb;
            fast_sincos(bs[i], sb, cb);
            const double dot_tx = -x * cb - y * sb;
            if (!in_cone(dot_tx, r2, ctx.cos_half, ctx.cos_half_sq)) continue;
            const double zeta = ctx.rayleigh ? fading.exponential() : 1.0;
            accumulate(out, ctx.cone_coef * zeta * ctx.inv_r_alpha(r2));
        }
        return out;
    }
    // Planar array: gain from the sin^2-indexed table, front hemisphere only.
    for (std::int64_t i = 0; i < n; ++i) {
        const double x = xs[i], y = ys[i];
        const double r2 = x * x + y * y;
        if (r2 == 0.0) continue;
        const double dot_rx = x * ctx.rx_ux + y * ctx.rx_uy;
        if (dot_rx < 0.0) continue;
        double sb, cb;
        fast_sincos(bs[i], sb, cb);
        const double dot_tx = -x * cb - y * sb;
        if (dot_tx < 0.0) continue;
        const double cross_rx = x * ctx.rx_uy - y * ctx.rx_ux;
        const double cross_tx = y * cb - x * sb;
        const double g_rx = ctx.pattern->gain_from_sin2(std::min(1.0, cross_rx * cross_rx / r2));
        const double g_tx = ctx.pattern->gain_from_sin2(std::min(1.0, cross_tx * cross_tx / r2));
        const double product = g_rx * g_tx;
        if (product <= 0.0) continue;
        const double zeta = ctx.rayleigh ? fading.exponential() : 1.0;
        accumulate(out, ctx.pt_path * product * zeta * ctx.inv_r_alpha(r2));
    }
    return out;
}

// Draws one bucket's points: uniform positions on the disk via rejection
// from the square, uniform boresights. Order matters: sample_scene and the
// streaming path share this routine so their draw sequences coincide.
void generate_bucket(rng::Stream& gen, std::int64_t count, double radius, double* xs, double* ys,
                     double* bs) {
    for (std::int64_t i = 0; i < count; ++i) {
        // one 64-bit draw yields both coordinates of a rejection candidate;
        // 31 fractional bits per axis is far below every statistical
        // resolution in play
        double ux, uy;
        do {
            const std::uint64_t w = gen();
            ux = static_cast<double>(static_cast<std::uint32_t>(w)) * 0x1.0p-31 - 1.0;
            uy = static_cast<double>(static_cast<std::uint32_t>(w >> 32)) * 0x1.0p-31 - 1.0;
        } while (ux * ux + uy * uy > 1.0);
        xs[i] = radius * ux;
        ys[i] = radius * uy;
        bs[i] = 2.0 * M_PI * gen.uniform();
    }
}

void check_point_cap(const RadarParams& p, double radius, double point_cap) {
    const double expected = expected_point_count(p, radius);
    if (expected > point_cap) {
        std::ostringstream os;
        os << "expected point count " << expected << " exceeds the cap " << point_cap
           << " (radius " << radius << " m, lambda " << p.lambda << ")";
        throw ResourceError(os.str());
    }
}

}  // namespace

WindowInfo window_radius_info(const RadarParams& p, double theta_scale) {
    p.validate();
    if (!(theta_scale > 0.0))
        throw std::domain_error("window_radius: theta_scale must be > 0");
    const DerivedConstants d = derive(p);
    WindowInfo w;
    w.power_radius = std::pow(d.power_scale / (kWindowPowerEpsilon * theta_scale), 1.0 / p.alpha);
    if (p.lambda > 0.0) {
        // ten mean spacings of the aligned-active point process
        const double aligned_intensity =
            p.lambda * p.delta() * p.phi * p.phi / (4.0 * M_PI * M_PI);
        w.spacing_radius = 10.0 / std::sqrt(aligned_intensity);
    }
    w.spacing_binds = w.spacing_radius > w.power_radius;
    w.radius = std::max(w.power_radius, w.spacing_radius);
    return w;
}

double window_radius(const RadarParams& p, double theta_scale) {
    return window_radius_info(p, theta_scale).radius;
}

double expected_point_count(const RadarParams& p, double radius) {
    return p.lambda * M_PI * radius * radius;
}

int Scene::mark_of(std::int64_t index) const {
    const auto it = std::upper_bound(bucket_offsets.begin(), bucket_offsets.end(), index);
    return static_cast<int>(it - bucket_offsets.begin()) - 1;
}

Scene sample_scene(const RadarParams& p, double radius, std::uint64_t scene_key, double point_cap) {
    p.validate();
    if (!(radius > 0.0)) throw std::domain_error("sample_scene: radius must be > 0");
    check_point_cap(p, radius, point_cap);

    Scene scene;
    scene.params = p;
    scene.radius = radius;
    scene.scene_key = scene_key;

    rng::Stream gen(rng::derive(scene_key, rng::kTagScene));
    const double mean_per_bucket = expected_point_count(p, radius) / static_cast<double>(p.m);

    std::vector<std::int64_t> counts(p.m, 0);
    std::int64_t total = 0;
    if (mean_per_bucket > 0.0) {
        std::poisson_distribution<std::int64_t> poisson(mean_per_bucket);
        for (int mark = 0; mark < p.m; ++mark) {
            counts[mark] = poisson(gen);
            total += counts[mark];
        }
    }

    scene.bucket_offsets.resize(p.m + 1);
    scene.bucket_offsets[0] = 0;
    for (int mark = 0; mark < p.m; ++mark)
        scene.bucket_offsets[mark + 1] = scene.bucket_offsets[mark] + counts[mark];
    scene.x.resize(total);
    scene.y.resize(total);
    scene.boresight.resize(total);
    for (int mark = 0; mark < p.m; ++mark) {
        const std::int64_t lo = scene.bucket_offsets[mark];
        generate_bucket(gen, counts[mark], radius, scene.x.data() + lo, scene.y.data() + lo,
                        scene.boresight.data() + lo);
    }
    return scene;
}

InterferenceSample interference_slot(const Scene& scene, int slot,
                                     const antenna::AntennaPattern& pattern, double rx_boresight,
                                     rng::Stream& fading) {
    if (slot < 0 || slot >= scene.params.m)
        throw std::domain_error("interference_slot: slot out of range");
    const EvalContext ctx(scene.params, pattern, rx_boresight);
    const std::int64_t lo = scene.bucket_begin(slot);
    const std::int64_t hi = scene.bucket_end(slot);
    return eval_points(scene.x.data() + lo, scene.y.data() + lo, scene.boresight.data() + lo,
                       hi - lo, ctx, fading);
}

InterferenceSample interference_slot(const Scene& scene, int slot,
                                     const antenna::AntennaPattern& pattern, double rx_boresight) {
    rng::Stream fading(rng::derive(scene.scene_key, rng::kTagFading, static_cast<std::uint64_t>(slot)));
    return interference_slot(scene, slot, pattern, rx_boresight, fading);
}

void for_each_slot_sample(const RadarParams& p, double radius,
                          const antenna::AntennaPattern& pattern, double rx_boresight,
                          std::uint64_t scene_key,
                          const std::function<void(int, const InterferenceSample&)>& sink,
                          double point_cap) {
    p.validate();
    if (!(radius > 0.0)) throw std::domain_error("for_each_slot_sample: radius must be > 0");
    check_point_cap(p, radius, point_cap);

    rng::Stream gen(rng::derive(scene_key, rng::kTagScene));
    const double mean_per_bucket = expected_point_count(p, radius) / static_cast<double>(p.m);

    std::vector<std::int64_t> counts(p.m, 0);
    if (mean_per_bucket > 0.0) {
        std::poisson_distribution<std::int64_t> poisson(mean_per_bucket);
        for (int mark = 0; mark < p.m; ++mark) counts[mark] = poisson(gen);
    }

    const EvalContext ctx(p, pattern, rx_boresight);
    std::vector<double> xs, ys, bs;
    for (int mark = 0; mark < p.m; ++mark) {
        const std::int64_t n = counts[mark];
        xs.resize(n);
        ys.resize(n);
        bs.resize(n);
        generate_bucket(gen, n, radius, xs.data(), ys.data(), bs.data());
        rng::Stream fading(rng::derive(scene_key, rng::kTagFading, static_cast<std::uint64_t>(mark)));
        sink(mark, eval_points(xs.data(), ys.data(), bs.data(), n, ctx, fading));
    }
}

}  // namespace radarfield::field
