#pragma once

#include "seqinfo/mathcore.hpp"

namespace seqinfo {

/// Normal(mu, sigma^2) restricted to an interval with fixed absolute bounds.
/// Construction fails with DegenerateTruncation when the retained mass is
/// below 1e-300.
class TruncatedNormal {
   public:
    TruncatedNormal(double mu, double sigma, Interval region);

    [[nodiscard]] double mu() const noexcept { return mu_; }
    [[nodiscard]] double sigma() const noexcept { return sigma_; }
    [[nodiscard]] const Interval& region() const noexcept { return region_; }

    /// Standardized bounds (a - mu) / sigma and (b - mu) / sigma.
    [[nodiscard]] double alpha() const noexcept { return alpha_; }
    [[nodiscard]] double beta() const noexcept { return beta_; }

    /// Mean and variance of the standardized truncated variable.
    [[nodiscard]] double std_mean() const noexcept { return std_mean_; }
    [[nodiscard]] double std_var() const noexcept { return std_var_; }
    [[nodiscard]] double mass() const noexcept { return mass_; }

   private:
    double mu_;
    double sigma_;
    Interval region_;
    double alpha_;
    double beta_;
    double mass_;
    double std_mean_;
    double std_var_;
};

[[nodiscard]] inline double mass(const TruncatedNormal& tn) noexcept { return tn.mass(); }

[[nodiscard]] inline double trunc_mean(const TruncatedNormal& tn) noexcept {
    return tn.mu() + tn.sigma() * tn.std_mean();
}

[[nodiscard]] inline double trunc_var(const TruncatedNormal& tn) noexcept {
    return tn.sigma() * tn.sigma() * tn.std_var();
}

/// Fisher information about mu in one draw; equals trunc_var / sigma^4.
[[nodiscard]] inline double trunc_fisher_info(const TruncatedNormal& tn) noexcept {
    const double s2 = tn.sigma() * tn.sigma();
    return tn.std_var() / s2;
}

/// d/dmu of trunc_mean with the absolute bounds held fixed (= trunc_var / sigma^2).
[[nodiscard]] inline double trunc_mean_dmu(const TruncatedNormal& tn) noexcept { return tn.std_var(); }

/// Standardized truncation moments without forming the mass explicitly.
struct StdTruncMoments {
    double mass;
    double mean;  // (phi(alpha) - phi(beta)) / A
    double var;   // 1 + (alpha phi(alpha) - beta phi(beta)) / A - mean^2
};

[[nodiscard]] StdTruncMoments std_trunc_moments(double alpha, double beta) noexcept;

}  // namespace seqinfo
