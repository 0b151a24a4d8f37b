#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <vector>

#include "seqinfo/design.hpp"

namespace seqinfo {

/// Classical Cramer-Rao bound for n iid N(theta, sigma^2) draws. With a bias
/// function b the bound is [1 + b'(theta)]^2 / (n / sigma^2) + b(theta)^2,
/// b' taken by central difference.
[[nodiscard]] double classical_crlb(int n, double sigma, double theta = 0.0,
                                    const std::optional<RealFunction>& bias_fn = std::nullopt);

/// Conditional bias of the MLE given decision d, E(theta_hat - theta | D=d).
[[nodiscard]] double cond_bias(const TwoStageDesign& design, double theta, std::size_t d);

/// Analytic theta-derivative of cond_bias.
[[nodiscard]] double cond_bias_dtheta(const TwoStageDesign& design, double theta, std::size_t d);

/// Bias model of an arbitrary estimator, per decision. Supplying one assumes
/// d/dtheta E(est | D=d) = E(d/dtheta est | D=d); nothing checks it.
struct EstimatorBias {
    std::function<double(double theta, std::size_t d)> bias;
    std::function<double(double theta, std::size_t d)> bias_dtheta;
};

/// [1 + b_d']^2 / I_{X_T|D=d} + b_d^2, with b_d from the MLE unless a
/// bias model is supplied.
[[nodiscard]] double cond_mse_bound(const TwoStageDesign& design, double theta, std::size_t d,
                                    const std::optional<EstimatorBias>& estimator = std::nullopt);

struct DecisionBound {
    double prob = 0.0;
    double bias = 0.0;
    double bias_dtheta = 0.0;
    double cond_bound = 0.0;
    bool excluded = false;  // prob below kNegligibleProbability; excluded from the sum
};

struct MseBoundReport {
    TwoStageDesign design;
    double theta = 0.0;
    std::vector<DecisionBound> per_decision;
    double unconditional_bound = 0.0;
    bool any_excluded = false;
};

/// sum_d P_d(theta) * cond_mse_bound(d) over non-negligible decisions.
[[nodiscard]] MseBoundReport unconditional_mse_bound(const TwoStageDesign& design, double theta,
                                                     const std::optional<EstimatorBias>& estimator = std::nullopt);

}  // namespace seqinfo
