#include "seqinfo/mathcore.hpp"

#include <array>
#include <stdexcept>
#include <string>
#include <vector>

#include "seqinfo/errors.hpp"

namespace seqinfo {

Interval make_interval(double lo, double hi) {
    if (std::isnan(lo) || std::isnan(hi) || !(lo < hi)) {
        throw std::invalid_argument("interval requires lo < hi, got [" + std::to_string(lo) + ", " +
                                    std::to_string(hi) + ")");
    }
    return Interval{lo, hi};
}

double std_normal_cdf(double x) noexcept {
    if (x == kInf) return 1.0;
    if (x == -kInf) return 0.0;
    return 0.5 * std::erfc(-x * std::numbers::sqrt2 * 0.5);
}

double std_normal_interval_prob(double a, double b) noexcept {
    if (!(a < b)) return 0.0;
    if (a >= 0.0) return std_normal_cdf(-a) - std_normal_cdf(-b);
    return std_normal_cdf(b) - std_normal_cdf(a);
}

double upper_mills_ratio(double x) noexcept {
    if (x == kInf) return 0.0;
    if (x <= 5.0) return std_normal_cdf(-x) / std_normal_pdf(x);
    // Laplace continued fraction R = 1/(x + 1/(x + 2/(x + 3/(x + ...)))),
    // evaluated backwards from a fixed depth.
    constexpr int depth = 120;
    double t = x;
    for (int k = depth; k >= 1; --k) t = x + k / t;
    return 1.0 / t;
}

double hazard_upper(double x) noexcept {
    if (x <= 5.0) return std_normal_pdf(x) / std_normal_cdf(-x);
    return 1.0 / upper_mills_ratio(x);
}

double std_normal_quantile(double p) {
    if (!(p > 0.0 && p < 1.0)) {
        throw std::invalid_argument("std_normal_quantile: p must lie in (0, 1)");
    }
    // Acklam's rational approximation followed by Newton steps on Phi.
    static constexpr std::array<double, 6> a{-3.969683028665376e+01, 2.209460984245205e+02,
                                             -2.759285104469687e+02, 1.383577518672690e+02,
                                             -3.066479806614716e+01, 2.506628277459239e+00};
    static constexpr std::array<double, 5> b{-5.447609879822406e+01, 1.615858368580409e+02,
                                             -1.556989798598866e+02, 6.680131188771972e+01,
                                             -1.328068155288572e+01};
    static constexpr std::array<double, 6> c{-7.784894002430293e-03, -3.223964580411365e-01,
                                             -2.400758277161838e+00, -2.549732539343734e+00,
                                             4.374664141464968e+00,  2.938163982698783e+00};
    static constexpr std::array<double, 4> d{7.784695709041462e-03, 3.224671290700398e-01,
                                             2.445134137142996e+00, 3.754408661907416e+00};
    constexpr double p_low = 0.02425;
    double x = 0.0;
    if (p < p_low) {
        const double q = std::sqrt(-2.0 * std::log(p));
        x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    } else if (p <= 1.0 - p_low) {
        const double q = p - 0.5;
        const double r = q * q;
        x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
            (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
    } else {
        const double q = std::sqrt(-2.0 * std::log1p(-p));
        x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    for (int iter = 0; iter < 3; ++iter) {
        // Work on the smaller tail so the residual keeps relative accuracy.
        const double resid = (x < 0.0) ? std_normal_cdf(x) - p : (1.0 - p) - std_normal_cdf(-x);
        const double pdf = std_normal_pdf(x);
        if (pdf == 0.0) break;
        x -= resid / pdf;
    }
    return x;
}

namespace {

// Kronrod abscissae and weights (15 points) with the embedded 7-point Gauss rule.
constexpr std::array<double, 8> kXgk{
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr std::array<double, 8> kWgk{
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr std::array<double, 4> kWg{
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Segment {
    double a;
    double b;
    double value;
    double error;
};

template <class G>
Segment kronrod15(const G& g, double a, double b) {
    const double center = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    const double f_center = g(center);
    double res_g = f_center * kWg[3];
    double res_k = f_center * kWgk[7];
    double res_abs = std::abs(res_k);
    std::array<double, 7> f1{};
    std::array<double, 7> f2{};
    for (int j = 0; j < 7; ++j) {
        const double dx = half * kXgk[j];
        f1[j] = g(center - dx);
        f2[j] = g(center + dx);
        const double sum = f1[j] + f2[j];
        res_k += kWgk[j] * sum;
        res_abs += kWgk[j] * (std::abs(f1[j]) + std::abs(f2[j]));
        if (j % 2 == 1) res_g += kWg[j / 2] * sum;
    }
    const double mean = 0.5 * res_k;
    double res_asc = kWgk[7] * std::abs(f_center - mean);
    for (int j = 0; j < 7; ++j) {
        res_asc += kWgk[j] * (std::abs(f1[j] - mean) + std::abs(f2[j] - mean));
    }
    const double scale = std::abs(half);
    res_abs *= scale;
    res_asc *= scale;
    double err = std::abs((res_k - res_g) * half);
    if (res_asc != 0.0 && err != 0.0) {
        err = res_asc * std::min(1.0, std::pow(200.0 * err / res_asc, 1.5));
    }
    constexpr double eps = std::numeric_limits<double>::epsilon();
    if (res_abs > std::numeric_limits<double>::min() / (50.0 * eps)) {
        err = std::max(50.0 * eps * res_abs, err);
    }
    return Segment{a, b, res_k * half, err};
}

}  // namespace

QuadratureResult integrate(const RealFunction& f, Interval region, const QuadratureSettings& settings,
                           std::span<const double> breakpoints) {
    if (std::isnan(region.lo) || std::isnan(region.hi) || !(region.lo < region.hi)) {
        throw std::invalid_argument("integrate: region must satisfy lo < hi");
    }

    // Split in x first so every semi-infinite piece is anchored at its own finite end.
    std::vector<double> edges{region.lo};
    for (double bp : breakpoints) {
        if (bp > region.lo && bp < region.hi && std::isfinite(bp)) edges.push_back(bp);
    }
    edges.push_back(region.hi);
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());

    // Each piece maps a parameter t on [t_lo, t_hi] to x, with the Jacobian folded in.
    struct Piece {
        double lo;
        double hi;
        double t_lo;
        double t_hi;
    };
    std::vector<Piece> pieces;
    for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
        const double lo = edges[i];
        const double hi = edges[i + 1];
        if (std::isinf(lo) && std::isinf(hi)) {
            pieces.push_back({lo, hi, -1.0, 1.0});
        } else if (std::isinf(lo) || std::isinf(hi)) {
            pieces.push_back({lo, hi, 0.0, 1.0});
        } else {
            pieces.push_back({lo, hi, lo, hi});
        }
    }
    auto mapped = [&](const Piece& p) {
        return [&f, p](double t) {
            double x = t;
            double jac = 1.0;
            if (std::isinf(p.lo) && std::isinf(p.hi)) {
                const double d = 1.0 - t * t;
                x = t / d;
                jac = (1.0 + t * t) / (d * d);
            } else if (std::isinf(p.hi)) {
                const double d = 1.0 - t;
                x = p.lo + t / d;
                jac = 1.0 / (d * d);
            } else if (std::isinf(p.lo)) {
                x = p.hi - (1.0 - t) / t;
                jac = 1.0 / (t * t);
            }
            const double fx = f(x);
            return fx == 0.0 ? 0.0 : fx * jac;
        };
    };

    struct Tagged {
        Segment seg;
        std::size_t piece;
    };
    std::vector<Tagged> segments;
    segments.reserve(static_cast<std::size_t>(settings.max_subdivisions) + pieces.size());
    auto eval = [&](std::size_t k, double a, double b) {
        return Tagged{kronrod15(mapped(pieces[k]), a, b), k};
    };
    for (std::size_t k = 0; k < pieces.size(); ++k) {
        segments.push_back(eval(k, pieces[k].t_lo, pieces[k].t_hi));
    }

    auto totals = [&] {
        double value = 0.0;
        double error = 0.0;
        for (const auto& s : segments) {
            value += s.seg.value;
            error += s.seg.error;
        }
        return std::pair{value, error};
    };

    auto [value, error] = totals();
    while (error > std::max(settings.abs_tol, settings.rel_tol * std::abs(value))) {
        if (static_cast<int>(segments.size()) >= settings.max_subdivisions) {
            throw NonConvergence("integrate: tolerance not met within " +
                                     std::to_string(settings.max_subdivisions) + " subdivisions",
                                 value, error);
        }
        auto worst = std::max_element(segments.begin(), segments.end(), [](const Tagged& l, const Tagged& r) {
            return l.seg.error < r.seg.error;
        });
        const std::size_t k = worst->piece;
        const double a = worst->seg.a;
        const double b = worst->seg.b;
        const double mid = 0.5 * (a + b);
        *worst = eval(k, a, mid);
        segments.push_back(eval(k, mid, b));
        std::tie(value, error) = totals();
    }
    return QuadratureResult{value, error, static_cast<int>(segments.size())};
}

}  // namespace seqinfo
