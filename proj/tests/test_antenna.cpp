#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "radarfield/antenna.hpp"
#include "radarfield/quadrature.hpp"
#include "radarfield/rng.hpp"
#include "radarfield/units.hpp"
#include "test_util.hpp"

using namespace radarfield;
using namespace radarfield::antenna;
using rftest::rel_err;

TEST_CASE("cone gain") {
    const AntennaPattern cone = AntennaPattern::cone(M_PI / 6.0);
    CHECK(rel_err(cone.gain(0.0), 144.0 / M_PI) < 1e-14);
    CHECK(cone.gain(M_PI / 4.0) == 0.0);
    CHECK(cone.gain(M_PI / 12.0) == cone.peak_gain());  // boundary inside
    CHECK(cone.gain(0.9 * M_PI) == 0.0);

    // symmetric, and wraps: theta and theta + 2 pi agree
    rng::Stream s(5);
    for (int k = 0; k < 200; ++k) {
        const double theta = s.uniform(-M_PI, M_PI);
        CHECK(cone.gain(theta) == cone.gain(-theta));
        CHECK(cone.gain(theta) == cone.gain(theta + 2.0 * M_PI));
    }

    // the cut integrates to peak * phi (piecewise-constant: integrate the
    // two smooth pieces)
    const double inside = quad::integrate_or_throw(
        [&](double t) { return cone.gain(t); }, -M_PI / 12.0, M_PI / 12.0, 1e-12);
    CHECK(rel_err(inside, cone.peak_gain() * M_PI / 6.0) < 1e-9);

    // omni edge case: gain 1/pi everywhere
    const AntennaPattern omni = AntennaPattern::cone(2.0 * M_PI);
    CHECK(rel_err(omni.gain(3.0), 1.0 / M_PI) < 1e-14);
}

TEST_CASE("planar array pattern") {
    const AntennaPattern arr = AntennaPattern::planar_array(4, 0.5, -10.0);

    const double hpbw_deg = units::rad_to_deg(arr.beamwidth());
    CHECK(hpbw_deg > 24.0);
    CHECK(hpbw_deg < 27.0);
    CHECK(rel_err(arr.peak_gain(), 4.0 * M_PI / (arr.beamwidth() * arr.beamwidth())) < 1e-12);

    // peak at boresight; |AF| <= 1 everywhere
    CHECK(rel_err(arr.gain(0.0), arr.peak_gain()) < 1e-9);
    for (int k = 0; k <= 500; ++k) {
        const double theta = -M_PI + 2.0 * M_PI * k / 500.0;
        CHECK(arr.gain(theta) <= arr.peak_gain() * (1.0 + 1e-12));
        if (std::abs(theta) <= 0.5 * M_PI) CHECK(arr.array_factor(theta) <= 1.0 + 1e-12);
    }

    // canonical uniform four-element sidelobe is about -11.3 dB; the
    // clamped pattern never drops below the floor in the front hemisphere
    CHECK(arr.first_sidelobe_db() > -14.0);
    CHECK(arr.first_sidelobe_db() < -9.0);
    CHECK(arr.gain(1.2) >= arr.peak_gain() * std::pow(10.0, -10.0 / 10.0) * (1.0 - 1e-9));

    // symmetry and back-baffling
    rng::Stream s(7);
    for (int k = 0; k < 200; ++k) {
        const double theta = s.uniform(0.0, M_PI);
        CHECK(arr.gain(theta) == doctest::Approx(arr.gain(-theta)).epsilon(1e-12));
    }
    CHECK(arr.gain(0.6 * M_PI) == 0.0);
    CHECK(arr.gain(M_PI) == 0.0);
}

TEST_CASE("aligned link gain") {
    const AntennaPattern cone = AntennaPattern::cone(M_PI / 6.0);
    const Eigen::Vector2d a(0.0, 0.0), b(10.0, 0.0);

    // facing each other: peak product
    const double g2 = aligned_link_gain(0.0, M_PI, a, b, cone);
    CHECK(rel_err(g2, cone.peak_gain() * cone.peak_gain()) < 1e-12);
    CHECK(std::abs(g2 - 2101.0) < 1.0);

    // receiver direction outside the transmit beam
    CHECK(aligned_link_gain(M_PI / 2.0, M_PI, a, b, cone) == 0.0);

    CHECK_THROWS_AS(aligned_link_gain(0.0, 0.0, a, a, cone), std::domain_error);

    // symmetric under swapping roles for identical patterns
    rng::Stream s(11);
    for (int k = 0; k < 100; ++k) {
        const Eigen::Vector2d t(s.uniform(-50.0, 50.0), s.uniform(-50.0, 50.0));
        const Eigen::Vector2d r(s.uniform(-50.0, 50.0), s.uniform(-50.0, 50.0));
        if ((t - r).squaredNorm() == 0.0) continue;
        const double bt = s.uniform(0.0, 2.0 * M_PI);
        const double br = s.uniform(0.0, 2.0 * M_PI);
        CHECK(aligned_link_gain(bt, br, t, r, cone) ==
              doctest::Approx(aligned_link_gain(br, bt, r, t, cone)).epsilon(1e-12));
    }
}

TEST_CASE("random-orientation alignment probability matches phi^2/(4 pi^2)") {
    const double phi = M_PI / 6.0;
    const AntennaPattern cone = AntennaPattern::cone(phi);
    const Eigen::Vector2d tx(25.0, -13.0), rx(0.0, 0.0);

    rng::Stream s(123456);
    const int n = 1000000;
    int hits = 0;
    for (int k = 0; k < n; ++k) {
        const double bt = s.uniform(0.0, 2.0 * M_PI);
        const double br = s.uniform(0.0, 2.0 * M_PI);
        if (aligned_link_gain(bt, br, tx, rx, cone) > 0.0) ++hits;
    }
    const double want = phi * phi / (4.0 * M_PI * M_PI);  // 1/144
    const double got = static_cast<double>(hits) / n;
    const double sigma = std::sqrt(want * (1.0 - want) / n);
    CHECK(std::abs(got - want) < 3.0 * sigma);
}

TEST_CASE("pattern samples for dumps") {
    const AntennaPattern arr = AntennaPattern::planar_array();
    const auto table = sample_pattern(arr, 721);
    CHECK(table.rows() == 721);
    CHECK(table.col(1).maxCoeff() <= arr.peak_gain() * (1.0 + 1e-9));
    CHECK_THROWS_AS(sample_pattern(arr, 1), ValidationError);
}
