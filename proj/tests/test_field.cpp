#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "radarfield/analytic.hpp"
#include "radarfield/scene.hpp"
#include "test_util.hpp"

using namespace radarfield;
using namespace radarfield::field;
using rftest::defaults;
using rftest::rel_err;

namespace {

// Two-sample Kolmogorov-Smirnov statistic.
double two_sample_ks(std::vector<double> a, std::vector<double> b) {
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    double d = 0.0;
    std::size_t i = 0, j = 0;
    while (i < a.size() && j < b.size()) {
        if (a[i] <= b[j])
            ++i;
        else
            ++j;
        d = std::max(d, std::abs(static_cast<double>(i) / a.size() -
                                 static_cast<double>(j) / b.size()));
    }
    return d;
}

Scene single_interferer_scene(const RadarParams& p, double r, int mark, double boresight) {
    Scene s;
    s.params = p;
    s.radius = 2.0 * r;
    s.scene_key = 42;
    s.bucket_offsets.assign(p.m + 1, 0);
    for (int k = mark + 1; k <= p.m; ++k) s.bucket_offsets[k] = 1;
    s.x.resize(1);
    s.y.resize(1);
    s.boresight.resize(1);
    s.x[0] = r;
    s.y[0] = 0.0;
    s.boresight[0] = boresight;
    return s;
}

}  // namespace

TEST_CASE("stream derivation is deterministic and key-sensitive") {
    rng::Stream a(rng::derive(7, rng::kTagScene, 3));
    rng::Stream b(rng::derive(7, rng::kTagScene, 3));
    rng::Stream c(rng::derive(7, rng::kTagScene, 4));
    bool all_equal = true, any_equal_c = false;
    for (int k = 0; k < 64; ++k) {
        const auto va = a(), vb = b(), vc = c();
        all_equal = all_equal && (va == vb);
        any_equal_c = any_equal_c || (va == vc);
    }
    CHECK(all_equal);
    CHECK_FALSE(any_equal_c);

    rng::Stream u(99);
    double mean = 0.0;
    for (int k = 0; k < 20000; ++k) {
        const double x = u.uniform();
        CHECK(x >= 0.0);
        CHECK(x < 1.0);
        mean += x;
    }
    CHECK(std::abs(mean / 20000.0 - 0.5) < 0.01);
}

TEST_CASE("window radius rules") {
    const RadarParams p = defaults();
    const double theta = analytic::detection_threshold(p);
    const WindowInfo w = window_radius_info(p, theta);

    // power rule: boresight-aligned unit-fading interferer at R delivers
    // exactly epsilon * theta
    const DerivedConstants d = derive(p);
    CHECK(rel_err(w.power_radius, std::sqrt(d.power_scale / (1e-3 * theta))) < 1e-12);
    CHECK(w.power_radius == doctest::Approx(6984.3767).epsilon(1e-6));

    // spacing floor: ten mean aligned-active spacings; binds at the baseline
    CHECK(w.spacing_radius == doctest::Approx(120000.0).epsilon(1e-9));
    CHECK(w.spacing_binds);
    CHECK(w.radius == w.spacing_radius);

    // steeper path loss shrinks the power radius
    RadarParams steep = p;
    steep.alpha = 3.0;
    steep.alpha_limit = false;
    CHECK(window_radius_info(steep, theta).power_radius < w.power_radius);

    RadarParams empty = p;
    empty.lambda = 0.0;
    const WindowInfo we = window_radius_info(empty, theta);
    CHECK_FALSE(we.spacing_binds);
    CHECK(we.radius == we.power_radius);

    CHECK_THROWS_AS(window_radius(p, 0.0), std::domain_error);
}

TEST_CASE("scene sampling: determinism, emptiness, resource cap") {
    RadarParams p = defaults();
    p.m = 10;

    const Scene a = sample_scene(p, 500.0, 123);
    const Scene b = sample_scene(p, 500.0, 123);
    REQUIRE(a.size() == b.size());
    CHECK((a.x == b.x).all());
    CHECK((a.y == b.y).all());
    CHECK((a.boresight == b.boresight).all());

    RadarParams empty = p;
    empty.lambda = 0.0;
    CHECK(sample_scene(empty, 500.0, 1).size() == 0);

    CHECK_THROWS_AS(sample_scene(p, 1e7, 1, /*point_cap=*/1e4), ResourceError);
    CHECK_THROWS_AS(sample_scene(p, -1.0, 1), std::domain_error);

    // geometry invariants
    for (std::int64_t i = 0; i < a.size(); ++i) {
        CHECK(a.x[i] * a.x[i] + a.y[i] * a.y[i] <= 500.0 * 500.0);
        CHECK(a.boresight[i] >= 0.0);
        CHECK(a.boresight[i] < 2.0 * M_PI);
    }
    CHECK(a.bucket_offsets.front() == 0);
    CHECK(a.bucket_offsets.back() == a.size());
    CHECK(a.mark_of(0) >= 0);
    CHECK(a.mark_of(a.size() - 1) <= p.m - 1);
}

TEST_CASE("scene point counts follow the field intensity") {
    RadarParams p = defaults();  // lambda = 1e-4
    p.m = 10;
    const double radius = 1000.0;
    const double want_mean = expected_point_count(p, radius);  // pi * 100

    const int n_scenes = 10000;
    double total = 0.0;
    for (int k = 0; k < n_scenes; ++k)
        total += static_cast<double>(sample_scene(p, radius, 1000 + k).size());
    const double got = total / n_scenes;
    const double sigma = std::sqrt(want_mean / n_scenes);
    CHECK(std::abs(got - want_mean) < 3.0 * sigma);
}

TEST_CASE("single-interferer slot evaluation") {
    RadarParams p = defaults();
    p.m = 10;
    const auto cone = antenna::AntennaPattern::cone(p.phi);
    const double r = 250.0;

    // interferer on the +x axis pointing back at the origin; receiver
    // pointing at it
    const Scene s = single_interferer_scene(p, r, /*mark=*/3, /*boresight=*/M_PI);
    const InterferenceSample hit = interference_slot(s, 3, cone, 0.0);
    const DerivedConstants d = derive(p);
    const double want = p.pt * p.gain_max() * p.gain_max() * d.path_factor / (r * r);
    CHECK(hit.active_count == 1);
    CHECK(rel_err(hit.aggregate, want) < 1e-12);
    CHECK(hit.strongest == hit.aggregate);

    // wrong slot: nothing transmits
    const InterferenceSample miss = interference_slot(s, 4, cone, 0.0);
    CHECK(miss.active_count == 0);
    CHECK(miss.aggregate == 0.0);
    CHECK(miss.strongest == 0.0);

    // receiver looking away
    const InterferenceSample away = interference_slot(s, 3, cone, M_PI / 2.0);
    CHECK(away.aggregate == 0.0);

    // interferer pointing away from the origin
    const Scene s2 = single_interferer_scene(p, r, 3, 0.3);
    CHECK(interference_slot(s2, 3, cone, 0.0).aggregate == 0.0);

    CHECK_THROWS_AS(interference_slot(s, p.m, cone, 0.0), std::domain_error);

    // empty scene
    RadarParams empty = p;
    empty.lambda = 0.0;
    const Scene e = sample_scene(empty, 100.0, 5);
    const InterferenceSample es = interference_slot(e, 1, cone, 0.0);
    CHECK(es.aggregate == 0.0);
    CHECK(es.strongest == 0.0);
    CHECK(es.active_count == 0);
}

TEST_CASE("omnidirectional cone makes every slot point active") {
    RadarParams p = defaults();
    p.m = 5;
    p.phi = 2.0 * M_PI;
    const auto omni = antenna::AntennaPattern::cone(p.phi);
    const Scene s = sample_scene(p, 800.0, 31);
    REQUIRE(s.size() > 0);
    for (int slot = 0; slot < p.m; ++slot) {
        const auto sample = interference_slot(s, slot, omni, 1.234);
        CHECK(sample.active_count == s.bucket_end(slot) - s.bucket_begin(slot));
    }
}

TEST_CASE("streaming evaluation matches materialised scenes bit for bit") {
    rng::Stream s(2718);
    for (int rep = 0; rep < 20; ++rep) {
        RadarParams p = defaults();
        p.lambda = std::pow(10.0, s.uniform(-5.0, -3.5));
        p.m = 4 + static_cast<int>(s.uniform() * 12.0);
        p.phi = s.uniform(0.3, 2.0 * M_PI);
        p.alpha = s.uniform(2.05, 4.5);
        p.alpha_limit = false;
        p.fading = rep % 2 == 0 ? Fading::NoFading : Fading::Rayleigh;
        const bool use_array = rep % 3 == 0;
        const auto pattern = use_array ? antenna::AntennaPattern::planar_array()
                                       : antenna::AntennaPattern::cone(p.phi);
        const double radius = s.uniform(300.0, 1500.0);
        const double rx = s.uniform(0.0, 2.0 * M_PI);
        const std::uint64_t key = s();

        const Scene scene = sample_scene(p, radius, key);
        std::vector<InterferenceSample> streamed(p.m);
        for_each_slot_sample(p, radius, pattern, rx, key,
                             [&](int slot, const InterferenceSample& smp) { streamed[slot] = smp; });
        for (int slot = 0; slot < p.m; ++slot) {
            const InterferenceSample direct = interference_slot(scene, slot, pattern, rx);
            CHECK(direct.aggregate == streamed[slot].aggregate);
            CHECK(direct.strongest == streamed[slot].strongest);
            CHECK(direct.active_count == streamed[slot].active_count);
        }
    }
}

TEST_CASE("strongest never exceeds aggregate; equality for lone contributors") {
    rng::Stream s(999);
    for (int rep = 0; rep < 10; ++rep) {
        RadarParams p = defaults();
        p.m = 6;
        p.fading = rep % 2 == 0 ? Fading::NoFading : Fading::Rayleigh;
        const auto cone = antenna::AntennaPattern::cone(p.phi);
        const Scene scene = sample_scene(p, 2000.0, 5000 + rep);
        for (int slot = 0; slot < p.m; ++slot) {
            const auto smp = interference_slot(scene, slot, cone, s.uniform(0.0, 2.0 * M_PI));
            CHECK(smp.strongest <= smp.aggregate);
            CHECK((smp.aggregate == 0.0) == (smp.active_count == 0));
            if (smp.active_count <= 1) CHECK(smp.strongest == smp.aggregate);
        }
    }
}

TEST_CASE("active aligned interferers per slot match the thinned intensity") {
    RadarParams p = defaults();
    p.lambda = 1e-3;
    p.m = 10;
    p.phi = M_PI / 2.0;
    const auto cone = antenna::AntennaPattern::cone(p.phi);
    const double radius = 2000.0;

    const double aligned_intensity = p.lambda * p.delta() * p.phi * p.phi / (4.0 * M_PI * M_PI);
    const double want_mean = aligned_intensity * M_PI * radius * radius;

    double total = 0.0;
    std::int64_t n_slots = 0;
    for (int k = 0; k < 200; ++k) {
        const std::uint64_t key = rng::derive(77, rng::kTagScene, k);
        rng::Stream rx_s(rng::derive(key, rng::kTagRxBoresight));
        const double rx = 2.0 * M_PI * rx_s.uniform();
        for_each_slot_sample(p, radius, cone, rx, key,
                             [&](int, const InterferenceSample& smp) {
                                 total += static_cast<double>(smp.active_count);
                                 ++n_slots;
                             });
    }
    const double got = total / static_cast<double>(n_slots);
    const double sigma = std::sqrt(want_mean / static_cast<double>(n_slots));
    CHECK(std::abs(got - want_mean) < 3.0 * sigma);
}

TEST_CASE("per-slot samples are exchangeable across slots") {
    RadarParams p = defaults();
    p.lambda = 2e-3;
    p.m = 10;
    p.phi = M_PI / 2.0;
    const auto cone = antenna::AntennaPattern::cone(p.phi);

    std::vector<double> slot_first, slot_mid;
    for (int k = 0; k < 400; ++k) {
        const std::uint64_t key = rng::derive(31337, rng::kTagScene, k);
        rng::Stream rx_s(rng::derive(key, rng::kTagRxBoresight));
        const double rx = 2.0 * M_PI * rx_s.uniform();
        for_each_slot_sample(p, 1200.0, cone, rx, key,
                             [&](int slot, const InterferenceSample& smp) {
                                 if (slot == 1) slot_first.push_back(smp.aggregate);
                                 if (slot == p.m / 2) slot_mid.push_back(smp.aggregate);
                             });
    }
    const double d = two_sample_ks(slot_first, slot_mid);
    // 1% two-sample critical value: 1.628 * sqrt(2/n)
    CHECK(d < 1.628 * std::sqrt(2.0 / 400.0));
}

TEST_CASE("strongest-component samples follow the closed-form law") {
    RadarParams p = defaults();
    p.m = 10;  // keeps the spacing window (and scenes) small for a unit test
    const auto cone = antenna::AntennaPattern::cone(p.phi);
    const double radius = window_radius(p, analytic::detection_threshold(p));

    const int n_samples = 10000;
    std::vector<double> strongest;
    strongest.reserve(n_samples);
    int scene_idx = 0;
    while (static_cast<int>(strongest.size()) < n_samples) {
        const std::uint64_t key = rng::derive(271828, rng::kTagScene, scene_idx++);
        rng::Stream rx_s(rng::derive(key, rng::kTagRxBoresight));
        const double rx = 2.0 * M_PI * rx_s.uniform();
        for_each_slot_sample(p, radius, cone, rx, key,
                             [&](int slot, const InterferenceSample& smp) {
                                 if (slot == 0) return;
                                 if (static_cast<int>(strongest.size()) < n_samples)
                                     strongest.push_back(smp.strongest);
                             });
    }
    std::sort(strongest.begin(), strongest.end());
    double d = 0.0;
    for (int i = 0; i < n_samples; ++i) {
        const double f = analytic::strongest_cdf(strongest[i], p);
        d = std::max(d, std::abs(f - static_cast<double>(i + 1) / n_samples));
        d = std::max(d, std::abs(f - static_cast<double>(i) / n_samples));
    }
    CHECK(d < 0.02);
}
