#include "seqinfo/truncnorm.hpp"

#include <sstream>
#include <stdexcept>

#include "seqinfo/errors.hpp"

namespace seqinfo {

namespace {

double x_phi(double x) noexcept { return std::isinf(x) ? 0.0 : x * std_normal_pdf(x); }

// Both standardized bounds in the upper half line: everything is expressed
// relative to phi(alpha) through Mills ratios, which stays finite far out in
// the tail where Phi differences underflow or cancel.
StdTruncMoments upper_tail_moments(double alpha, double beta) noexcept {
    const double r_alpha = upper_mills_ratio(alpha);
    double ratio = 0.0;  // phi(beta) / phi(alpha)
    double r_beta = 0.0;
    if (!std::isinf(beta)) {
        ratio = std::exp(-0.5 * (beta - alpha) * (beta + alpha));
        r_beta = upper_mills_ratio(beta);
    }
    const double denom = r_alpha - ratio * r_beta;
    const double mean = (1.0 - ratio) / denom;
    const double second = (alpha - (std::isinf(beta) ? 0.0 : beta * ratio)) / denom;
    return StdTruncMoments{std_normal_interval_prob(alpha, beta), mean, 1.0 + second - mean * mean};
}

}  // namespace

StdTruncMoments std_trunc_moments(double alpha, double beta) noexcept {
    if (alpha >= 0.0) return upper_tail_moments(alpha, beta);
    if (beta <= 0.0) {
        // X on [alpha, beta] mirrors -X on [-beta, -alpha].
        const StdTruncMoments m = upper_tail_moments(-beta, -alpha);
        return StdTruncMoments{m.mass, -m.mean, m.var};
    }
    const double mass = std_normal_interval_prob(alpha, beta);
    const double mean = (std_normal_pdf(alpha) - std_normal_pdf(beta)) / mass;
    const double second = (x_phi(alpha) - x_phi(beta)) / mass;
    return StdTruncMoments{mass, mean, 1.0 + second - mean * mean};
}

TruncatedNormal::TruncatedNormal(double mu, double sigma, Interval region)
    : mu_(mu), sigma_(sigma), region_(region) {
    if (!std::isfinite(mu) || !(sigma > 0.0) || !std::isfinite(sigma)) {
        throw std::invalid_argument("TruncatedNormal: mu must be finite and sigma > 0");
    }
    if (std::isnan(region.lo) || std::isnan(region.hi) || !(region.lo < region.hi)) {
        throw std::invalid_argument("TruncatedNormal: region must satisfy lo < hi");
    }
    alpha_ = (region.lo - mu) / sigma;
    beta_ = (region.hi - mu) / sigma;
    const StdTruncMoments m = std_trunc_moments(alpha_, beta_);
    mass_ = m.mass;
    if (!(mass_ >= 1e-300) || !std::isfinite(m.mean) || !std::isfinite(m.var)) {
        std::ostringstream msg;
        msg << "truncation to [" << region.lo << ", " << region.hi << ") retains mass " << mass_
            << " for mu=" << mu << ", sigma=" << sigma;
        throw DegenerateTruncation(msg.str());
    }
    std_mean_ = m.mean;
    std_var_ = m.var;
}

}  // namespace seqinfo
