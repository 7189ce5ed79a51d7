#include "radarfield/analytic.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <vector>

#include "radarfield/quadrature.hpp"

namespace radarfield {

void RadarParams::validate() const {
    std::vector<std::string> bad;
    if (!(lambda >= 0.0)) bad.push_back("lambda must be >= 0");
    if (m < 2) bad.push_back("m must be an integer >= 2");
    if (!(phi > 0.0 && phi <= 2.0 * M_PI)) bad.push_back("phi must be in (0, 2*pi]");
    if (!(alpha > 2.0) && !(alpha == 2.0 && alpha_limit))
        bad.push_back("alpha must be > 2 (alpha == 2 only with alpha_limit set)");
    if (!(pt > 0.0)) bad.push_back("pt must be > 0");
    if (!(freq > 0.0)) bad.push_back("freq must be > 0");
    if (!(kappa > 0.0)) bad.push_back("kappa must be > 0");
    if (!(sigma > 0.0)) bad.push_back("sigma must be > 0");
    if (!(pfa > 0.0 && pfa < 1.0)) bad.push_back("pfa must be in (0, 1)");
    if (!bad.empty()) {
        std::ostringstream os;
        os << "invalid radar parameters:";
        for (const auto& s : bad) os << " [" << s << "]";
        throw ValidationError(os.str());
    }
}

void NoiseParams::validate() const {
    if (!(temp > 0.0 && bandwidth > 0.0 && noise_figure > 0.0))
        throw ValidationError("invalid noise parameters: temp, bandwidth and noise_figure must be > 0");
}

DerivedConstants derive(const RadarParams& p) {
    DerivedConstants d;
    d.path_factor = analytic::path_factor(p.freq);
    const double g = p.gain_max();
    d.power_scale = p.pt * g * g * d.path_factor;
    d.fading_moment = analytic::fading_moment(p.alpha, p.fading, p.alpha_limit);
    return d;
}

namespace analytic {

namespace {

// lambda * delta * phi^2 * fading_moment * power_scale^(2/alpha) / (4 pi):
// the coefficient K in the strongest-interferer CDF exp(-K * i^(-2/alpha)).
double strongest_coefficient(const RadarParams& p) {
    const DerivedConstants d = derive(p);
    return p.lambda * p.delta() * p.phi * p.phi * d.fading_moment *
           std::pow(d.power_scale, 2.0 / p.alpha) / (4.0 * M_PI);
}

// -log of the per-slot quantile: -log1p(-pfa) / (m - 1). The CDF of the
// strongest interferer evaluated at the detection threshold equals
// exp(-beta).
double log_quantile_deficit(const RadarParams& p) {
    return -std::log1p(-p.pfa) / static_cast<double>(p.m - 1);
}

// threshold / power_scale; carries every parameter except pt and freq.
double threshold_scale(const RadarParams& p) {
    const double om = fading_moment(p.alpha, p.fading, p.alpha_limit);
    const double k = -om * (1.0 - p.delta()) * p.lambda * p.phi * p.phi /
                     (4.0 * M_PI * std::log1p(-p.pfa));
    return std::pow(k, p.alpha / 2.0);
}

void require_alpha(const RadarParams& p) {
    if (!(p.alpha > 2.0) && !(p.alpha == 2.0 && p.alpha_limit))
        throw std::domain_error("alpha must be > 2 (or exactly 2 with alpha_limit declared)");
}

}  // namespace

double path_factor(double freq) {
    if (!(freq > 0.0)) throw std::domain_error("path_factor: freq must be > 0");
    const double x = constants::speed_of_light / (4.0 * M_PI * freq);
    return x * x;
}

double fading_moment(double alpha, Fading fading, bool alpha_limit) {
    if (!(alpha > 2.0) && !(alpha == 2.0 && alpha_limit))
        throw std::domain_error("fading_moment: alpha must be > 2 (or 2 in declared limit mode)");
    if (fading == Fading::NoFading) return 1.0;
    return std::tgamma(1.0 + 2.0 / alpha);
}

double echo_power(double d, double zeta, const RadarParams& p) {
    if (!(d > 0.0)) throw std::domain_error("echo_power: target distance must be > 0");
    if (!(zeta >= 0.0)) throw std::domain_error("echo_power: fading draw must be >= 0");
    const DerivedConstants c = derive(p);
    return c.power_scale * p.kappa * p.sigma * zeta * std::pow(d, -2.0 * p.alpha) / (4.0 * M_PI);
}

double strongest_cdf(double i, const RadarParams& p) {
    require_alpha(p);
    if (i < 0.0) throw std::domain_error("strongest_cdf: power must be >= 0");
    if (i == 0.0) return 0.0;  // limit value, by convention
    if (p.lambda == 0.0) return 1.0;
    return std::exp(-strongest_coefficient(p) * std::pow(i, -2.0 / p.alpha));
}

double strongest_log_cdf(double i, const RadarParams& p) {
    require_alpha(p);
    if (!(i > 0.0)) throw std::domain_error("strongest_log_cdf: power must be > 0");
    if (p.lambda == 0.0) return 0.0;
    return -strongest_coefficient(p) * std::pow(i, -2.0 / p.alpha);
}

double strongest_pdf(double i, const RadarParams& p) {
    require_alpha(p);
    if (!(i > 0.0)) throw std::domain_error("strongest_pdf: power must be > 0");
    if (p.lambda == 0.0) return 0.0;
    const double k = strongest_coefficient(p);
    const double s = 2.0 / p.alpha;
    return std::exp(-k * std::pow(i, -s)) * k * s * std::pow(i, -s - 1.0);
}

double strongest_quantile(double y, const RadarParams& p) {
    require_alpha(p);
    if (!(y > 0.0 && y < 1.0)) throw std::domain_error("strongest_quantile: y must be in (0,1)");
    if (p.lambda == 0.0) throw std::domain_error("strongest_quantile: empty field has a degenerate law");
    return std::pow(strongest_coefficient(p) / (-std::log(y)), p.alpha / 2.0);
}

double detection_threshold(const RadarParams& p) {
    require_alpha(p);
    if (!(p.lambda > 0.0))
        throw std::domain_error(
            "detection_threshold: no interference-limited threshold for lambda == 0; "
            "use threshold_noise_only");
    const DerivedConstants c = derive(p);
    return c.power_scale * threshold_scale(p);
}

double max_range_no_fading(const RadarParams& p) {
    require_alpha(p);
    if (p.fading != Fading::NoFading)
        throw std::domain_error("max_range_no_fading requires the no-fading configuration");
    if (!(p.lambda > 0.0))
        throw std::domain_error("max_range_no_fading: lambda must be > 0; use max_range_noise_only");
    const double a = std::pow(p.kappa * p.sigma / (4.0 * M_PI), 1.0 / (2.0 * p.alpha));
    const double b = -4.0 * M_PI * std::log1p(-p.pfa) /
                     ((1.0 - p.delta()) * p.lambda * p.phi * p.phi);
    return a * std::pow(b, 0.25);
}

double detection_probability_no_fading(double d, const RadarParams& p) {
    if (!(d > 0.0)) throw std::domain_error("detection_probability_no_fading: d must be > 0");
    if (p.fading != Fading::NoFading)
        throw std::domain_error("detection_probability_no_fading requires the no-fading configuration");
    const double theta = detection_threshold(p);
    const double s = echo_power(d, 1.0, p);
    if (s >= theta) return 1.0;  // threshold comparison is non-strict
    return 1.0 - strongest_cdf(theta - s, p);
}

double detection_floor(double pfa, double delta) {
    if (!(pfa >= 0.0 && pfa < 1.0)) throw std::domain_error("detection_floor: pfa must be in [0, 1)");
    if (!(delta >= 0.0 && delta < 1.0)) throw std::domain_error("detection_floor: delta must be in [0, 1)");
    return -std::expm1(delta / (1.0 - delta) * std::log1p(-pfa));
}

double detection_floor(const RadarParams& p) { return detection_floor(p.pfa, p.delta()); }

double detection_probability_rayleigh(double d, const RadarParams& p) {
    require_alpha(p);
    if (!(d > 0.0)) throw std::domain_error("detection_probability_rayleigh: d must be > 0");
    if (p.fading != Fading::Rayleigh)
        throw std::domain_error("detection_probability_rayleigh requires Rayleigh fading");
    if (!(p.lambda > 0.0))
        throw std::domain_error("detection_probability_rayleigh: lambda must be > 0");

    // Work in units of the threshold: with j = i / threshold the CDF of the
    // strongest interferer becomes exp(-beta * j^(-s)), and the echo-fading
    // survival factor exp(-(1 - j) * B). Neither beta nor B involves the
    // transmit power or the carrier frequency, which is what makes the
    // result exactly invariant to them.
    const double s = 2.0 / p.alpha;
    const double beta = log_quantile_deficit(p);
    const double big_b = threshold_scale(p) * 4.0 * M_PI * std::pow(d, 2.0 * p.alpha) /
                         (p.kappa * p.sigma);
    const double floor = detection_floor(p);

    auto integrand = [&](double j) {
        if (j <= 0.0) return 0.0;
        const double js = std::pow(j, -s);
        return std::exp(-big_b * (1.0 - j) - beta * js) * beta * s * js / j;
    };

    // The density mass sits near small j (the threshold is a far-tail
    // quantile); seed the subdivision at fixed quantiles of the strongest
    // law so the adaptive pass cannot overlook it.
    std::vector<double> breaks;
    for (double y : {1e-12, 1e-6, 1e-3, 0.05, 0.25, 0.5, 0.75, 0.95}) {
        const double j = std::pow(beta / (-std::log(y)), p.alpha / 2.0);
        if (j > 0.0 && j < 1.0) breaks.push_back(j);
    }
    const double integral = quad::integrate_or_throw(
        integrand, 0.0, 1.0, 1e-9, 1e-15, breaks,
        "detection_probability_rayleigh: interference quadrature failed");
    return std::min(1.0, floor + integral);
}

double noise_power(double temp, double bandwidth, double noise_figure) {
    if (temp < 0.0 || bandwidth < 0.0 || noise_figure < 0.0)
        throw std::domain_error("noise_power: factors must be non-negative");
    return constants::boltzmann * temp * bandwidth * noise_figure;
}

double noise_power(const NoiseParams& n) {
    return noise_power(n.temp, n.bandwidth, n.noise_figure);
}

double noise_interference_cdf(double z, const RadarParams& p, const NoiseParams& n) {
    require_alpha(p);
    n.validate();
    if (z < 0.0) throw std::domain_error("noise_interference_cdf: power must be >= 0");
    if (z == 0.0) return 0.0;
    const double pn = n.power();
    const double k = strongest_coefficient(p);
    const double s = 2.0 / p.alpha;

    // Convolution of the exponential noise density with the strongest-
    // interferer CDF, integrated over the interference share u = z - w:
    //   (1/Pn) int_0^z exp(-k u^(-s)) exp(-(z-u)/Pn) du.
    // All exponentials stay in [0, 1]. The noise kernel confines the mass
    // to u in [z - 45 Pn, z]; the truncated tail is below e^-45.
    const double u_lo = std::max(0.0, z - 45.0 * pn);
    auto integrand = [&](double u) {
        const double interference = u > 0.0 ? std::exp(-k * std::pow(u, -s)) : 0.0;
        return interference * std::exp(-(z - u) / pn);
    };

    std::vector<double> breaks;
    for (double c : {1.0, 3.0, 10.0, 30.0})
        breaks.push_back(z - c * pn);
    if (p.lambda > 0.0) {
        for (double y : {1e-6, 1e-3, 0.1, 0.5, 0.9})
            breaks.push_back(strongest_quantile(y, p));
    }
    const double integral = quad::integrate_or_throw(
        integrand, u_lo, z, 1e-8, 0.0, breaks,
        "noise_interference_cdf: convolution quadrature failed");
    return std::min(1.0, integral / pn);
}

double threshold_noise_only(const RadarParams& p, const NoiseParams& n) {
    n.validate();
    return -n.power() * std::log(detection_floor(p));
}

double threshold_with_noise(const RadarParams& p, const NoiseParams& n) {
    require_alpha(p);
    n.validate();
    const double q = per_slot_quantile(p);
    const double pn = n.power();
    const double lo0 = threshold_noise_only(p, n);
    if (p.lambda == 0.0) return lo0;

    auto g = [&](double z) { return noise_interference_cdf(z, p, n) - q; };

    // F is strictly increasing; the noise-only threshold is always a lower
    // bound, and the interference-only one plus a generous noise margin an
    // upper bound. Expand if rounding puts the root outside.
    double lo = lo0;
    double hi = detection_threshold(p) + 40.0 * pn;
    double glo = g(lo), ghi = g(hi);
    for (int k = 0; glo > 0.0 && k < 8; ++k) {
        lo *= 0.5;
        glo = g(lo);
    }
    for (int k = 0; ghi < 0.0 && k < 8; ++k) {
        hi *= 2.0;
        ghi = g(hi);
    }
    if (glo > 0.0 || ghi < 0.0)
        throw NumericalError("threshold_with_noise: failed to bracket the false-alarm root", std::abs(ghi));

    // Bisection to a loose bracket, then secant polish.
    for (int it = 0; it < 200 && (hi - lo) > 1e-10 * hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double gm = g(mid);
        if (gm < 0.0) {
            lo = mid;
            glo = gm;
        } else {
            hi = mid;
            ghi = gm;
        }
        if ((hi - lo) < 1e-6 * hi && ghi != glo) {
            const double sec = hi - ghi * (hi - lo) / (ghi - glo);
            if (sec > lo && sec < hi) {
                const double gs = g(sec);
                if (gs < 0.0) {
                    lo = sec;
                    glo = gs;
                } else {
                    hi = sec;
                    ghi = gs;
                }
            }
        }
    }
    if ((hi - lo) > 1e-8 * hi)
        throw NumericalError("threshold_with_noise: root refinement stalled", (hi - lo) / hi);
    return 0.5 * (lo + hi);
}

double max_range_with_noise(const RadarParams& p, const NoiseParams& n) {
    const double theta = threshold_with_noise(p, n);
    const DerivedConstants c = derive(p);
    return std::pow(p.kappa * p.sigma * c.power_scale / (4.0 * M_PI * theta), 1.0 / (2.0 * p.alpha));
}

double max_range_noise_only(const RadarParams& p, const NoiseParams& n) {
    const double theta = threshold_noise_only(p, n);
    const DerivedConstants c = derive(p);
    return std::pow(p.kappa * p.sigma * c.power_scale / (4.0 * M_PI * theta), 1.0 / (2.0 * p.alpha));
}

double per_slot_quantile(const RadarParams& p) {
    if (p.m == 2) return 1.0 - p.pfa;
    return std::exp(std::log1p(-p.pfa) / static_cast<double>(p.m - 1));
}

double per_slot_tail(const RadarParams& p) {
    // 1 - per_slot_quantile without cancellation
    return -std::expm1(std::log1p(-p.pfa) / static_cast<double>(p.m - 1));
}

double analytic_range_at_level(const RadarParams& p, double level, double d_lo, double d_hi) {
    auto pd = [&](double d) {
        return p.fading == Fading::Rayleigh ? detection_probability_rayleigh(d, p)
                                            : detection_probability_no_fading(d, p);
    };
    double plo = pd(d_lo), phi_v = pd(d_hi);
    if (plo < level || phi_v >= level)
        throw NumericalError("analytic_range_at_level: level not bracketed", std::abs(plo - level));
    double lo = d_lo, hi = d_hi;
    while (hi / lo - 1.0 > 1e-6) {
        const double mid = std::sqrt(lo * hi);
        if (pd(mid) >= level)
            lo = mid;
        else
            hi = mid;
    }
    return std::sqrt(lo * hi);
}

}  // namespace analytic
}  // namespace radarfield
