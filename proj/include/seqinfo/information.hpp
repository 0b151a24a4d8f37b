#pragma once

#include <cstddef>
#include <vector>

#include "seqinfo/design.hpp"

namespace seqinfo {

/// Decision cells with probability under this threshold are dropped from
/// probability-weighted sums.
inline constexpr double kNegligibleProbability = 1e-12;

struct DecisionInformation {
    double prob = 0.0;
    double info_stage1 = 0.0;        // I_{X1|D=d}
    double info_stage2 = 0.0;        // I_{X2|D=d}
    double info_total_given_d = 0.0; // I_{X_T|D=d}
    bool included = true;            // false when prob < kNegligibleProbability
};

/// Every Fisher information component at one theta.
///
/// total = design_info + sum_d prob_d * (info_stage1_d + info_stage2_d)
struct InformationBreakdown {
    double theta = 0.0;
    double total = 0.0;        // I_{X_T}
    double design_info = 0.0;  // I_D
    double cond_on_D = 0.0;    // I_{X_T|D}
    double stage1_on_D = 0.0;  // I_{X1|D}
    std::vector<DecisionInformation> per_decision;

    /// |total - design_info - sum_d prob_d (I1_d + I2_d)|.
    [[nodiscard]] double decomposition_residual() const noexcept;
};

/// Variance of the decision score, sum_d P_d'^2 / P_d. Each term is formed as
/// (n1 / sigma^2) * P_d * m_d^2 with m_d the standardized truncated mean, so
/// cells far in the tail contribute their (vanishing) share without 0/0.
[[nodiscard]] double design_information(const TwoStageDesign& design, double theta);

/// I_{X1|D=d}: information in stage-1 data given decision d, through the
/// stage-1 mean truncated to the cell. Throws DegenerateDecision when
/// P_d < kNegligibleProbability.
[[nodiscard]] double cond_info_stage1(const TwoStageDesign& design, double theta, std::size_t d);

/// I_{X2|D=d} = n2 / sigma^2 for Continue cells, 0 for Stop.
[[nodiscard]] double cond_info_stage2(const TwoStageDesign& design, std::size_t d);

/// I_{X_T|D} = sum_d P_d (I1_d + I2_d).
[[nodiscard]] double cond_info_on_D(const TwoStageDesign& design, double theta);

/// I_{X1|D} = sum_d P_d I1_d.
[[nodiscard]] double cond_info_stage1_on_D(const TwoStageDesign& design, double theta);

/// Closed form n1 / sigma^2 + sum_d P_d n2_d / sigma^2.
[[nodiscard]] double total_information(const TwoStageDesign& design, double theta);

/// Assembles all components; throws std::logic_error if the decomposition
/// identity is off by more than 1e-8.
[[nodiscard]] InformationBreakdown info_breakdown(const TwoStageDesign& design, double theta);

}  // namespace seqinfo
