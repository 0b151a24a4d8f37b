#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "seqinfo/bounds.hpp"
#include "seqinfo/density.hpp"
#include "seqinfo/design.hpp"

namespace seqinfo {

struct HistogramSpec {
    int bins = 50;
    double lo = -3.0;
    double hi = 3.0;
};

struct Histogram {
    HistogramSpec spec;
    std::vector<std::uint64_t> counts;
    std::uint64_t underflow = 0;
    std::uint64_t overflow = 0;

    /// underflow, bins..., overflow.
    [[nodiscard]] std::vector<std::uint64_t> categories() const;
};

struct SimConfig {
    TwoStageDesign design;
    double theta = 0.0;
    std::uint64_t replications = 1;
    std::uint64_t seed = 0;
    std::optional<HistogramSpec> histogram;
    /// Worker threads; 0 picks hardware concurrency. Never changes the result.
    unsigned workers = 0;
    /// Estimator under study; the MLE when empty.
    std::function<double(const Outcome&)> estimator;
};

struct BranchStats {
    std::uint64_t count = 0;
    double mean_estimate = 0.0;
    double bias = 0.0;
    double mse = 0.0;
    double se_bias = 0.0;
    double se_mse = 0.0;
    double skew_error = 0.0;     // sample skewness of estimate - theta
    double skew_sq_error = 0.0;  // sample skewness of (estimate - theta)^2
};

struct SimResult {
    TwoStageDesign design;
    double theta = 0.0;
    std::uint64_t replications = 0;
    std::uint64_t seed_used = 0;
    std::vector<BranchStats> per_decision;
    BranchStats overall;
    std::optional<std::vector<Histogram>> histograms;  // one per decision
};

/// Runs the two-stage experiment `replications` times. Replication r reads
/// normal_sampler(seed, r): n1 stage-1 draws, then one randomization draw
/// when the rule is not informative, then n2 stage-2 draws if it continues.
/// Tallies are reduced over fixed blocks of replications in index order, so
/// the result is bit-identical for any worker count.
[[nodiscard]] SimResult simulate(const SimConfig& config);

/// Writes `rep,decision,z1,mle` rows for every replication.
void write_outcome_csv(const SimConfig& config, std::ostream& out);

struct ComparisonRow {
    std::string label;  // "d=1", ..., "overall"
    std::uint64_t count = 0;
    double empirical_bias = 0.0;
    double reference_bias = 0.0;
    double z_bias = 0.0;
    double empirical_mse = 0.0;
    double bound = 0.0;
    double z_mse = 0.0;
    bool small_sample = false;  // fewer than kMinBranchHits hits, never flagged
    bool flagged = false;       // |z_bias| > 3 or |z_mse| > 3
};

inline constexpr std::uint64_t kMinBranchHits = 30;

struct BoundComparison {
    std::vector<ComparisonRow> rows;

    [[nodiscard]] bool any_flagged() const noexcept;
};

/// Skewness-corrected z-score. With t = diff / se and g = skew / sqrt(count),
/// z = t + g t^2 / 3 + g^2 t^3 / 27 + g / 6 (Hall's monotone transform).
/// Plain t is badly skewed for squared errors in branches of a few dozen hits.
[[nodiscard]] double skew_corrected_z(double diff, double se, double skew, std::uint64_t count);

/// Per-decision and overall z-scores of the empirical bias and MSE against
/// the analytic bias and bound. Throws MismatchedInputs when design or theta
/// differ.
[[nodiscard]] BoundComparison empirical_vs_bound(const SimResult& result, const MseBoundReport& report);

/// Probabilities of the histogram categories (underflow, bins, overflow) for
/// the estimator density given decision d, by quadrature of
/// mle_density_given_decision.
[[nodiscard]] std::vector<double> histogram_reference_probabilities(const TwoStageDesign& design, double theta,
                                                                    std::size_t d, const HistogramSpec& spec);

struct ChiSquareResult {
    double statistic = 0.0;
    int dof = 0;
    double p_value = 1.0;
};

/// Pearson goodness of fit. Adjacent categories are pooled until every
/// expected count is at least 5.
[[nodiscard]] ChiSquareResult chi_square_gof(const std::vector<std::uint64_t>& observed,
                                             const std::vector<double>& probabilities);

}  // namespace seqinfo
