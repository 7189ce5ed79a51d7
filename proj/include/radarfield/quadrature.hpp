#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "radarfield/errors.hpp"

// Adaptive Gauss-Kronrod (7-15) quadrature on finite intervals. The
// integrands here are smooth except for essential (but bounded, -> 0)
// behaviour at an endpoint, so plain interval bisection driven by the
// Kronrod error estimate is enough. Callers may seed the subdivision with
// breakpoints when they know where the integrand mass sits.

namespace radarfield::quad {

struct Result {
    double value = 0.0;
    double abs_error = 0.0;
    int subdivisions = 0;
    bool converged = false;
};

namespace detail {

// 15-point Kronrod nodes/weights and the embedded 7-point Gauss weights.
inline constexpr double kXgk[8] = {
    0.99145537112081263920685469752633, 0.94910791234275852452618968404785,
    0.86486442335976907278971278864098, 0.74153118559939443986386477328079,
    0.58608723546769113029414483825873, 0.40584515137739716690660641207696,
    0.20778495500789846760068940377324, 0.0};
inline constexpr double kWgk[8] = {
    0.02293532201052922496373200805897, 0.06309209262997855329070066318920,
    0.10479001032225018383987632254152, 0.14065325971552591874518959051024,
    0.16900472663926790282658342659855, 0.19035057806478540991325640242101,
    0.20443294007529889241416199923465, 0.20948214108472782801299917489171};
inline constexpr double kWg[4] = {
    0.12948496616886969327061143267908, 0.27970539148927666790146777142378,
    0.38183005050511894495036977548898, 0.41795918367346938775510204081633};

template <class F>
inline void gk15(F&& f, double a, double b, double& value, double& error) {
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    const double fc = f(c);
    double result_gauss = kWg[3] * fc;
    double result_kronrod = kWgk[7] * fc;
    for (int j = 0; j < 7; ++j) {
        const double x = h * kXgk[j];
        const double f1 = f(c - x);
        const double f2 = f(c + x);
        result_kronrod += kWgk[j] * (f1 + f2);
        if (j % 2 == 1) result_gauss += kWg[j / 2] * (f1 + f2);
    }
    value = result_kronrod * h;
    error = std::abs((result_kronrod - result_gauss) * h);
}

struct Interval {
    double a, b, value, error;
};

}  // namespace detail

/// Integrates f over [a, b] to the requested relative tolerance (with an
/// optional absolute floor). `breakpoints` splits the initial interval;
/// values outside (a, b) are ignored.
template <class F>
Result integrate(F&& f, double a, double b, double rel_tol = 1e-9, double abs_tol = 0.0,
                 const std::vector<double>& breakpoints = {}, int max_subdivisions = 4000) {
    Result res;
    if (!(b > a)) {
        res.converged = true;
        return res;
    }

    std::vector<double> edges;
    edges.push_back(a);
    for (double x : breakpoints)
        if (x > a && x < b) edges.push_back(x);
    edges.push_back(b);
    std::sort(edges.begin(), edges.end());

    std::vector<detail::Interval> ivs;
    ivs.reserve(64);
    for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
        detail::Interval iv{edges[i], edges[i + 1], 0.0, 0.0};
        detail::gk15(f, iv.a, iv.b, iv.value, iv.error);
        ivs.push_back(iv);
    }

    auto totals = [&ivs](double& v, double& e) {
        v = 0.0;
        e = 0.0;
        for (const auto& iv : ivs) {
            v += iv.value;
            e += iv.error;
        }
    };

    double total_v, total_e;
    totals(total_v, total_e);
    int splits = 0;
    while (total_e > std::max(abs_tol, rel_tol * std::abs(total_v)) && splits < max_subdivisions) {
        std::size_t worst = 0;
        for (std::size_t i = 1; i < ivs.size(); ++i)
            if (ivs[i].error > ivs[worst].error) worst = i;
        detail::Interval iv = ivs[worst];
        const double mid = 0.5 * (iv.a + iv.b);
        if (mid <= iv.a || mid >= iv.b) break;  // interval at rounding limit
        detail::Interval left{iv.a, mid, 0.0, 0.0}, right{mid, iv.b, 0.0, 0.0};
        detail::gk15(f, left.a, left.b, left.value, left.error);
        detail::gk15(f, right.a, right.b, right.value, right.error);
        ivs[worst] = left;
        ivs.push_back(right);
        ++splits;
        totals(total_v, total_e);
    }

    res.value = total_v;
    res.abs_error = total_e;
    res.subdivisions = splits;
    res.converged = total_e <= std::max(abs_tol, rel_tol * std::abs(total_v));
    return res;
}

/// Like integrate(), but throws NumericalError on non-convergence.
template <class F>
double integrate_or_throw(F&& f, double a, double b, double rel_tol, double abs_tol = 0.0,
                          const std::vector<double>& breakpoints = {},
                          const char* what = "quadrature failed to converge") {
    Result r = integrate(std::forward<F>(f), a, b, rel_tol, abs_tol, breakpoints);
    if (!r.converged) {
        const double achieved = r.value != 0.0 ? r.abs_error / std::abs(r.value) : r.abs_error;
        throw NumericalError(what, achieved);
    }
    return r.value;
}

}  // namespace radarfield::quad
