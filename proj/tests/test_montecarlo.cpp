#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "radarfield/analytic.hpp"
#include "radarfield/montecarlo.hpp"
#include "test_util.hpp"

using namespace radarfield;
using namespace radarfield::mc;
using rftest::rel_err;

namespace {

// Small-window configuration: wide beams and a short cycle keep the
// spacing floor (and so the per-scene point count) three orders of
// magnitude below the baseline setup.
RadarParams small_config() {
    RadarParams p;
    p.m = 10;
    p.phi = M_PI / 2.0;
    p.alpha = 2.0;
    p.alpha_limit = true;
    return p;
}

}  // namespace

TEST_CASE("wilson interval") {
    const Estimate e = wilson_interval(50, 100);
    CHECK(e.value == 0.5);
    CHECK(e.ci_low < 0.5);
    CHECK(e.ci_high > 0.5);
    CHECK(e.ci_low > 0.3);
    CHECK(e.ci_high < 0.7);

    const Estimate zero = wilson_interval(0, 1000);
    CHECK(zero.value == 0.0);
    CHECK(zero.ci_low == 0.0);
    CHECK(zero.ci_high > 0.0);

    const Estimate wide = wilson_interval(10, 100);
    const Estimate narrow = wilson_interval(1000, 10000);
    CHECK(narrow.ci_high - narrow.ci_low < (wide.ci_high - wide.ci_low));
    CHECK_THROWS_AS(wilson_interval(0, 0), std::domain_error);
}

TEST_CASE("empirical distribution quantiles and KS distance") {
    std::vector<double> v;
    for (int k = 10; k >= 1; --k) v.push_back(static_cast<double>(k));
    const auto d = EmpiricalDistribution::from_samples(v);
    CHECK(d.count() == 10);
    CHECK(d.samples()[0] == 1.0);

    // lower order statistic: never understates the tail point
    CHECK(d.quantile(0.5) == 5.0);
    CHECK(d.quantile(0.05) == 1.0);
    CHECK(d.quantile(0.0) == 1.0);
    CHECK(d.quantile(1.0) == 10.0);
    CHECK(d.quantile(0.91) == 10.0);
    CHECK_THROWS_AS(d.quantile(1.5), std::domain_error);

    // uniform samples against their own CDF: KS must be small
    rng::Stream s(4);
    std::vector<double> u(2000);
    for (auto& x : u) x = s.uniform();
    const auto du = EmpiricalDistribution::from_samples(u);
    CHECK(du.ks_distance([](double x) { return std::clamp(x, 0.0, 1.0); }) < 0.04);
    // and against a wrong CDF: large
    CHECK(du.ks_distance([](double x) { return std::clamp(x * x, 0.0, 1.0); }) > 0.2);
}

TEST_CASE("interference collection basics") {
    RadarParams p = small_config();
    const auto cone = antenna::AntennaPattern::cone(p.phi);
    McConfig cfg;
    cfg.seed = 11;

    RadarParams empty = p;
    empty.lambda = 0.0;
    const auto zeros = collect_interference(empty, cone, 500, cfg);
    CHECK(zeros.aggregate.count() == 500);
    CHECK(zeros.aggregate.samples().maxCoeff() == 0.0);
    CHECK(zeros.strongest.samples().maxCoeff() == 0.0);

    const auto s = collect_interference(p, cone, 3000, cfg);
    CHECK(s.aggregate.count() == 3000);
    CHECK(s.window.spacing_binds);

    // per-sample strongest <= aggregate carries over to order statistics
    for (int i = 0; i < 3000; i += 37)
        CHECK(s.strongest.samples()[i] <= s.aggregate.samples()[i]);

    CHECK_THROWS_AS(collect_interference(p, cone, 0, cfg), ValidationError);
}

TEST_CASE("collection is identical for any thread count") {
    RadarParams p = small_config();
    p.fading = Fading::Rayleigh;
    const auto cone = antenna::AntennaPattern::cone(p.phi);
    McConfig one;
    one.seed = 123;
    one.threads = 1;
    McConfig four = one;
    four.threads = 4;

    const auto a = collect_interference(p, cone, 2000, one);
    const auto b = collect_interference(p, cone, 2000, four);
    CHECK((a.aggregate.samples() == b.aggregate.samples()).all());
    CHECK((a.strongest.samples() == b.strongest.samples()).all());

    const double theta = a.aggregate.quantile(0.95);
    const Estimate ea = estimate_pd(20.0, theta, p, cone, 1500, one);
    const Estimate eb = estimate_pd(20.0, theta, p, cone, 1500, four);
    CHECK(ea.value == eb.value);
    CHECK(ea.ci_low == eb.ci_low);
}

TEST_CASE("threshold calibration") {
    RadarParams p = small_config();

    // plain decile for a two-slot cycle
    RadarParams m2 = p;
    m2.m = 2;
    std::vector<double> ladder(1000);
    for (int k = 0; k < 1000; ++k) ladder[k] = static_cast<double>(k + 1);
    const auto dist = EmpiricalDistribution::from_samples(ladder);
    CHECK(calibrate_threshold(dist, m2) == 900.0);

    // precondition names the required count
    try {
        std::vector<double> few(100, 1.0);
        calibrate_threshold(EmpiricalDistribution::from_samples(few), p);
        FAIL("expected ValidationError");
    } catch (const ValidationError& e) {
        CHECK(std::string(e.what()).find("need at least") != std::string::npos);
        CHECK(std::string(e.what()).find("got 100") != std::string::npos);
    }

    // strongest-only calibration tracks the closed-form threshold
    const auto cone = antenna::AntennaPattern::cone(p.phi);
    McConfig cfg;
    cfg.seed = 2024;
    const auto s = collect_interference(p, cone, 50000, cfg);
    const double theta_str = calibrate_threshold(s.strongest, p);
    const double theta_formula = analytic::detection_threshold(p);
    CHECK(rel_err(theta_str, theta_formula) < 0.15);

    // aggregate never calibrates below strongest-only. The gap here is
    // looser than at the baseline setup: the wide beam and short cycle put
    // the calibration quantile much shallower into the tail, where the
    // strongest component dominates less. The 10% figure is checked at the
    // baseline in the acceptance suite.
    const double theta_agg = calibrate_threshold(s.aggregate, p);
    CHECK(theta_agg >= theta_str);
    CHECK((theta_agg - theta_str) / theta_str < 0.25);
}

TEST_CASE("calibration self-consistency: false-alarm rate is recovered") {
    rng::Stream gen(606);
    for (int rep = 0; rep < 5; ++rep) {
        RadarParams p;
        p.m = 5 + static_cast<int>(gen.uniform() * 8.0);
        p.lambda = gen.uniform(5e-5, 5e-4);
        p.phi = gen.uniform(0.8, 2.5);
        p.pfa = gen.uniform(0.05, 0.3);
        p.alpha = 2.0;
        p.alpha_limit = true;

        const auto cone = antenna::AntennaPattern::cone(p.phi);
        McConfig cfg;
        cfg.seed = rng::derive(515, rng::kTagGeneric, rep);
        const auto needed =
            static_cast<std::int64_t>(std::ceil(100.0 / analytic::per_slot_tail(p)));
        const auto s =
            collect_interference(p, cone, std::max<std::int64_t>(2 * needed, 40000), cfg);
        const double theta = calibrate_threshold(s.aggregate, p);

        // fresh cycles: a false alarm is any listening slot crossing theta
        const double radius = s.window.radius;
        const int n_cycles = 4000;
        int alarms = 0;
        for (int k = 0; k < n_cycles; ++k) {
            const std::uint64_t key = rng::derive(cfg.seed, rng::kTagGeneric, 777000 + k);
            rng::Stream rx_s(rng::derive(key, rng::kTagRxBoresight));
            const double rx = 2.0 * M_PI * rx_s.uniform();
            bool any = false;
            field::for_each_slot_sample(p, radius, cone, rx, key,
                                        [&](int slot, const field::InterferenceSample& smp) {
                                            if (slot > 0 && smp.aggregate >= theta) any = true;
                                        });
            alarms += any ? 1 : 0;
        }
        const Estimate fa = wilson_interval(alarms, n_cycles);
        CHECK(fa.ci_low <= p.pfa);
        CHECK(fa.ci_high >= p.pfa);
    }
}

TEST_CASE("window convergence: far annulus barely moves the calibration") {
    // This invariant belongs to the baseline setup: the truncation effect
    // on the calibrated quantile scales with delta/(1-delta), so a short
    // cycle would overstate it. Couple the two windows realisation by
    // realisation: a disk of twice the radius equals the base disk plus an
    // independent annulus, so adding independently sampled annulus
    // contributions to the same slots reproduces the doubled window while
    // sharing all base noise. The quantile is taken directly (the shared
    // noise cancels in the difference, which is all that is asserted).
    RadarParams p;  // baseline: m = 100, phi = pi/6, lambda = 1e-4
    p.alpha_limit = true;
    const auto cone = antenna::AntennaPattern::cone(p.phi);
    McConfig cfg;
    cfg.seed = 9090;
    const double radius = sampling_window(p, cfg).radius;
    const double q = analytic::per_slot_quantile(p);

    const int slots = p.m - 1;
    const int n_scenes = 100;
    const int n = n_scenes * slots;
    std::vector<double> base(n, 0.0), enlarged(n, 0.0);
    std::vector<double> ax, ay, ab;
    for (int sc = 0; sc < n_scenes; ++sc) {
        const std::uint64_t key = rng::derive(cfg.seed, rng::kTagScene, sc);
        rng::Stream rx_s(rng::derive(key, rng::kTagRxBoresight));
        const double rx = 2.0 * M_PI * rx_s.uniform();
        field::for_each_slot_sample(p, radius, cone, rx, key,
                                    [&](int slot, const field::InterferenceSample& smp) {
                                        if (slot == 0) return;
                                        base[sc * slots + slot - 1] = smp.aggregate;
                                    });

        // annulus (radius, 2*radius]: one single-bucket scene per slot,
        // sampled in polar form
        rng::Stream ann_gen(rng::derive(key, rng::kTagGeneric, 1));
        std::poisson_distribution<std::int64_t> ann_counts(
            3.0 * field::expected_point_count(p, radius) / p.m);
        for (int slot = 0; slot < p.m; ++slot) {
            const std::int64_t cnt = ann_counts(ann_gen);
            ax.resize(cnt);
            ay.resize(cnt);
            ab.resize(cnt);
            for (std::int64_t i = 0; i < cnt; ++i) {
                const double r = radius * std::sqrt(1.0 + 3.0 * ann_gen.uniform());
                const double phi_pos = 2.0 * M_PI * ann_gen.uniform();
                ax[i] = r * std::cos(phi_pos);
                ay[i] = r * std::sin(phi_pos);
                ab[i] = 2.0 * M_PI * ann_gen.uniform();
            }
            if (slot == 0) continue;
            field::Scene mini;
            mini.params = p;
            mini.radius = 2.0 * radius;
            mini.scene_key = rng::derive(key, rng::kTagGeneric, 100 + slot);
            mini.bucket_offsets.assign(p.m + 1, 0);
            for (int k = slot + 1; k <= p.m; ++k) mini.bucket_offsets[k] = cnt;
            mini.x = Eigen::Map<Eigen::ArrayXd>(ax.data(), cnt);
            mini.y = Eigen::Map<Eigen::ArrayXd>(ay.data(), cnt);
            mini.boresight = Eigen::Map<Eigen::ArrayXd>(ab.data(), cnt);
            enlarged[sc * slots + slot - 1] =
                base[sc * slots + slot - 1] +
                field::interference_slot(mini, slot, cone, rx).aggregate;
        }
    }
    const double theta_base = EmpiricalDistribution::from_samples(base).quantile(q);
    const double theta_big = EmpiricalDistribution::from_samples(enlarged).quantile(q);
    CHECK(theta_big >= theta_base);
    CHECK((theta_big - theta_base) / theta_base < 0.01);
}

TEST_CASE("detection-probability estimation") {
    RadarParams p = small_config();
    const auto cone = antenna::AntennaPattern::cone(p.phi);
    McConfig cfg;
    cfg.seed = 31415;
    const auto s = collect_interference(p, cone, 20000, cfg);
    const double theta = calibrate_threshold(s.aggregate, p);

    // close target: certain detection
    const Estimate near = estimate_pd(0.5, theta, p, cone, 2000, cfg);
    CHECK(near.value == 1.0);

    // far target: only interference crossings remain
    const Estimate far = estimate_pd(5e4, theta, p, cone, 20000, cfg);
    const double floor = analytic::detection_floor(p);
    CHECK(far.ci_low <= floor);
    CHECK(far.ci_high >= floor * 0.5);
    CHECK(far.value < 0.05);

    CHECK_THROWS_AS(estimate_pd(-1.0, theta, p, cone, 100, cfg), std::domain_error);
    CHECK_THROWS_AS(estimate_pd(1.0, theta, p, cone, 0, cfg), ValidationError);
}

TEST_CASE("Rayleigh detection estimate agrees with the quadrature curve") {
    RadarParams p = small_config();
    p.alpha = 3.0;
    p.alpha_limit = false;
    p.fading = Fading::Rayleigh;
    p.freq = 2.4e9;
    const auto cone = antenna::AntennaPattern::cone(p.phi);
    McConfig cfg;
    cfg.seed = 777;

    const auto s = collect_interference(p, cone, 60000, cfg);
    const double theta = calibrate_threshold(s.aggregate, p);

    RadarParams nf = p;
    nf.fading = Fading::NoFading;
    const double scale = analytic::max_range_no_fading(nf);
    const double d50 = analytic::analytic_range_at_level(p, 0.5, scale * 0.01, scale * 10.0);
    const Estimate e = estimate_pd(d50, theta, p, cone, 8000, cfg);
    CHECK(e.ci_low <= 0.5);
    CHECK(e.ci_high >= 0.5);
}

TEST_CASE("maximum-range estimation") {
    RadarParams p = small_config();
    const auto cone = antenna::AntennaPattern::cone(p.phi);
    McConfig cfg;
    cfg.seed = 99;
    const auto s = collect_interference(p, cone, 20000, cfg);
    const double theta = calibrate_threshold(s.aggregate, p);

    const Estimate dm = estimate_max_range(theta, p, cone, cfg, 0.5, 1500);
    const double want = analytic::max_range_no_fading(p);
    CHECK(rel_err(dm.value, want) < 0.15);
    CHECK(dm.ci_low <= dm.value);
    CHECK(dm.ci_high >= dm.value);

    // denser field: the scaling law halves the range for 16x density
    RadarParams dense = p;
    dense.lambda *= 16.0;
    McConfig cfg2 = cfg;
    cfg2.seed = 100;
    const auto s2 = collect_interference(dense, cone, 20000, cfg2);
    const double theta2 = calibrate_threshold(s2.aggregate, dense);
    const Estimate dm2 = estimate_max_range(theta2, dense, cone, cfg2, 0.5, 1500);
    CHECK(rel_err(dm2.value, 0.5 * dm.value) < 0.2);

    // unreachable level: diagnostic error
    CHECK_THROWS_AS(estimate_max_range(theta * 1e9, p, cone, cfg, 0.5, 200), NumericalError);

    // thread-count invariance of the full pipeline
    McConfig threaded = cfg;
    threaded.threads = 3;
    const Estimate dm3 = estimate_max_range(theta, p, cone, threaded, 0.5, 1500);
    CHECK(dm3.value == dm.value);
    CHECK(dm3.ci_low == dm.ci_low);
    CHECK(dm3.ci_high == dm.ci_high);
}
