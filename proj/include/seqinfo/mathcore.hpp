#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <span>

namespace seqinfo {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Interval on the extended real line. Endpoints may be infinite; lo < hi.
struct Interval {
    double lo = -kInf;
    double hi = kInf;

    [[nodiscard]] bool contains(double x) const noexcept { return x >= lo && x < hi; }
    [[nodiscard]] bool is_whole_line() const noexcept {
        return std::isinf(lo) && lo < 0 && std::isinf(hi) && hi > 0;
    }
    [[nodiscard]] double width() const noexcept { return hi - lo; }

    friend bool operator==(const Interval&, const Interval&) = default;
};

/// Throws std::invalid_argument unless lo < hi and neither endpoint is NaN.
Interval make_interval(double lo, double hi);

struct QuadratureSettings {
    double abs_tol = 1e-10;
    double rel_tol = 1e-10;
    int max_subdivisions = 60;
};

struct QuadratureResult {
    double value = 0.0;
    double error = 0.0;
    int subdivisions = 0;
};

using RealFunction = std::function<double(double)>;

// Standard normal primitives.

[[nodiscard]] inline double std_normal_pdf(double x) noexcept {
    constexpr double inv_sqrt_2pi = 0.5 * std::numbers::inv_sqrtpi * std::numbers::sqrt2;
    return inv_sqrt_2pi * std::exp(-0.5 * x * x);
}

/// Phi(x) through erfc, so both tails keep full relative accuracy.
[[nodiscard]] double std_normal_cdf(double x) noexcept;

/// Phi(b) - Phi(a), evaluated on whichever tail avoids cancellation.
[[nodiscard]] double std_normal_interval_prob(double a, double b) noexcept;

/// Mills ratio (1 - Phi(x)) / phi(x). Continued fraction for x > 5.
[[nodiscard]] double upper_mills_ratio(double x) noexcept;

/// Hazard phi(x) / (1 - Phi(x)); tail stable, always > max(0, x).
[[nodiscard]] double hazard_upper(double x) noexcept;

/// Inverse of std_normal_cdf on (0, 1).
[[nodiscard]] double std_normal_quantile(double p);

/// Globally adaptive 15-point Gauss-Kronrod quadrature.
///
/// Infinite endpoints are mapped onto a finite parameter interval:
///   [a, inf)    x = a + t / (1 - t),     t in [0, 1)
///   (-inf, b]   x = b - (1 - t) / t,     t in (0, 1]
///   (-inf, inf) x = t / (1 - t^2),       t in (-1, 1)
/// The interval with the largest error estimate is bisected until the summed
/// error is below max(abs_tol, rel_tol * |value|). Throws NonConvergence once
/// max_subdivisions intervals are in play without meeting the tolerance.
///
/// `breakpoints` (optional) pre-split the region; points outside it are
/// ignored. Passing the location of a narrow peak keeps the first Kronrod
/// pass from stepping over it.
QuadratureResult integrate(const RealFunction& f, Interval region,
                           const QuadratureSettings& settings = {},
                           std::span<const double> breakpoints = {});

/// Default finite-difference step 1e-5 * max(1, |x|).
[[nodiscard]] inline double default_diff_step(double x) noexcept {
    return 1e-5 * std::max(1.0, std::abs(x));
}

[[nodiscard]] inline double central_diff(const RealFunction& f, double x, double h) {
    return (f(x + h) - f(x - h)) / (2.0 * h);
}

[[nodiscard]] inline double central_diff(const RealFunction& f, double x) {
    return central_diff(f, x, default_diff_step(x));
}

}  // namespace seqinfo
