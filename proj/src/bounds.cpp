#include "seqinfo/bounds.hpp"

#include <limits>
#include <sstream>
#include <stdexcept>

#include "seqinfo/errors.hpp"
#include "seqinfo/information.hpp"
#include "seqinfo/truncnorm.hpp"

namespace seqinfo {

namespace {

double checked_probability(const TwoStageDesign& design, double theta, std::size_t d) {
    if (!std::isfinite(theta)) throw std::invalid_argument("theta must be finite");
    const double p = decision_probabilities(design, theta)[d];
    if (p < kNegligibleProbability) {
        std::ostringstream msg;
        msg << "decision " << d << " has probability " << p << " at theta=" << theta;
        throw DegenerateDecision(msg.str());
    }
    return p;
}

// Stage-1 weight of the pooled mean after decision d.
double stage1_weight(const TwoStageDesign& design, std::size_t d) {
    return static_cast<double>(design.n1()) / total_sample_size(design, d);
}

}  // namespace

double classical_crlb(int n, double sigma, double theta, const std::optional<RealFunction>& bias_fn) {
    if (n < 1) throw std::invalid_argument("classical_crlb: n must be >= 1");
    if (!(sigma > 0.0)) throw std::invalid_argument("classical_crlb: sigma must be > 0");
    const double info = n / (sigma * sigma);
    if (!bias_fn) return 1.0 / info;
    const double b = (*bias_fn)(theta);
    const double slope = 1.0 + central_diff(*bias_fn, theta);
    return slope * slope / info + b * b;
}

double cond_bias(const TwoStageDesign& design, double theta, std::size_t d) {
    checked_probability(design, theta, d);
    if (!design.informative()) return 0.0;
    const TruncatedNormal tn(theta, design.stage1_sd(), design.stage1_region(d));
    return stage1_weight(design, d) * (trunc_mean(tn) - theta);
}

double cond_bias_dtheta(const TwoStageDesign& design, double theta, std::size_t d) {
    checked_probability(design, theta, d);
    if (!design.informative()) return 0.0;
    const TruncatedNormal tn(theta, design.stage1_sd(), design.stage1_region(d));
    return stage1_weight(design, d) * (trunc_mean_dmu(tn) - 1.0);
}

double cond_mse_bound(const TwoStageDesign& design, double theta, std::size_t d,
                      const std::optional<EstimatorBias>& estimator) {
    checked_probability(design, theta, d);
    const double info = cond_info_stage1(design, theta, d) + cond_info_stage2(design, d);
    if (!(info > std::numeric_limits<double>::min())) {
        throw ZeroInformation("conditional information vanishes for decision " + std::to_string(d));
    }
    const double b = estimator ? estimator->bias(theta, d) : cond_bias(design, theta, d);
    const double db = estimator ? estimator->bias_dtheta(theta, d) : cond_bias_dtheta(design, theta, d);
    return (1.0 + db) * (1.0 + db) / info + b * b;
}

MseBoundReport unconditional_mse_bound(const TwoStageDesign& design, double theta,
                                       const std::optional<EstimatorBias>& estimator) {
    if (!std::isfinite(theta)) throw std::invalid_argument("theta must be finite");
    MseBoundReport report{design, theta, {}, 0.0, false};
    const DecisionProbabilities probs = decision_probabilities(design, theta);
    for (std::size_t d = 1; d <= probs.size(); ++d) {
        DecisionBound row;
        row.prob = probs[d];
        if (row.prob < kNegligibleProbability) {
            row.excluded = true;
            row.bias = row.bias_dtheta = row.cond_bound = std::numeric_limits<double>::quiet_NaN();
            report.any_excluded = true;
        } else {
            row.bias = estimator ? estimator->bias(theta, d) : cond_bias(design, theta, d);
            row.bias_dtheta = estimator ? estimator->bias_dtheta(theta, d) : cond_bias_dtheta(design, theta, d);
            row.cond_bound = cond_mse_bound(design, theta, d, estimator);
            report.unconditional_bound += row.prob * row.cond_bound;
        }
        report.per_decision.push_back(row);
    }
    return report;
}

}  // namespace seqinfo
