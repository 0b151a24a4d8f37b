#pragma once

#include <cstddef>
#include <optional>
#include <span>

#include "seqinfo/design.hpp"

namespace seqinfo {

/// One observable realization on the adapted support.
struct Outcome {
    std::size_t decision = 1;
    double mle = 0.0;
    double stage1_mean = 0.0;
    std::optional<double> stage2_mean;  // present iff the decision continues
};

/// Builds a consistent outcome (MLE included). For informative rules the
/// decision is read off the stage-1 mean; `decision` is only consulted for
/// rules driven by independent randomization. Throws InvalidOutcome when
/// stage2_mean presence does not match the decision's action.
[[nodiscard]] Outcome make_outcome(const TwoStageDesign& design, double stage1_mean,
                                   std::optional<double> stage2_mean, std::size_t decision = 0);

/// Throws InvalidOutcome unless the outcome lies on the adapted support.
void validate_outcome(const TwoStageDesign& design, const Outcome& outcome);

/// Density of the stage-1 mean, N(theta, sigma^2 / n1).
[[nodiscard]] double stage1_mean_density(const TwoStageDesign& design, double theta, double y) noexcept;

/// f(y) 1(y in cell d) / P_d(theta) on the stage-1 mean scale.
[[nodiscard]] double conditional_density_given_D(const TwoStageDesign& design, double theta, std::size_t d,
                                                 double stage1_value);

/// Density of the MLE given decision d. Stop cells: the conditional stage-1
/// density. Continue cells: numerical convolution of the cell-truncated
/// stage-1 mean with the stage-2 mean, weights n1 : n2, over the stage-1 value.
[[nodiscard]] double mle_density_given_decision(const TwoStageDesign& design, double theta, std::size_t d,
                                                double t, const QuadratureSettings& settings = {});

/// Two-cell shorthands; throw InvalidDesign unless the rule has exactly one
/// cell with the requested action.
[[nodiscard]] double mle_density_given_stop(const TwoStageDesign& design, double theta, double t);
[[nodiscard]] double mle_density_given_continue(const TwoStageDesign& design, double theta, double t,
                                                const QuadratureSettings& settings = {});

/// Subdensity of an observable outcome: f(stage1) on its cell, times f(stage2)
/// when the design continues (times the coin probability for randomized rules).
[[nodiscard]] double joint_observable_density(const TwoStageDesign& design, double theta,
                                              const Outcome& outcome);

/// Density of the stage-2 mean, N(theta, sigma^2 / n2).
[[nodiscard]] double stage2_mean_density(const TwoStageDesign& design, std::size_t d, double theta,
                                         double y);

/// sum_i log phi((x_i - theta) / sigma) - n log sigma. Takes no design.
[[nodiscard]] double log_likelihood(std::span<const double> data, double sigma, double theta);

}  // namespace seqinfo
