#include "seqinfo/information.hpp"

#include <sstream>
#include <stdexcept>

#include "seqinfo/errors.hpp"
#include "seqinfo/truncnorm.hpp"

namespace seqinfo {

namespace {

void require_finite_theta(double theta) {
    if (!std::isfinite(theta)) throw std::invalid_argument("theta must be finite");
}

double stage1_info_unchecked(const TwoStageDesign& design, double theta, std::size_t d) {
    const double full = design.n1() / (design.sigma() * design.sigma());
    if (!design.informative()) return full;
    const TruncatedNormal tn(theta, design.stage1_sd(), design.stage1_region(d));
    return trunc_fisher_info(tn);
}

}  // namespace

double InformationBreakdown::decomposition_residual() const noexcept {
    double sum = design_info;
    for (const auto& e : per_decision) {
        if (e.included) sum += e.prob * (e.info_stage1 + e.info_stage2);
    }
    return std::abs(total - sum);
}

double design_information(const TwoStageDesign& design, double theta) {
    require_finite_theta(theta);
    if (!design.informative()) return 0.0;
    const double shift = design.statistic_shift(theta);
    const double rate2 = design.n1() / (design.sigma() * design.sigma());
    double info = 0.0;
    for (const auto& c : design.rule().cells()) {
        const StdTruncMoments m = std_trunc_moments(c.region.lo - shift, c.region.hi - shift);
        if (m.mass == 0.0 || !std::isfinite(m.mean)) continue;
        info += rate2 * m.mass * m.mean * m.mean;
    }
    return info;
}

double cond_info_stage1(const TwoStageDesign& design, double theta, std::size_t d) {
    require_finite_theta(theta);
    const double p = decision_probabilities(design, theta)[d];
    if (p < kNegligibleProbability) {
        std::ostringstream msg;
        msg << "decision " << d << " has probability " << p << " at theta=" << theta;
        throw DegenerateDecision(msg.str());
    }
    return stage1_info_unchecked(design, theta, d);
}

double cond_info_stage2(const TwoStageDesign& design, std::size_t d) {
    return stage2_size(design, d) / (design.sigma() * design.sigma());
}

double cond_info_stage1_on_D(const TwoStageDesign& design, double theta) {
    require_finite_theta(theta);
    const DecisionProbabilities probs = decision_probabilities(design, theta);
    double sum = 0.0;
    for (std::size_t d = 1; d <= probs.size(); ++d) {
        if (probs[d] < kNegligibleProbability) continue;
        sum += probs[d] * stage1_info_unchecked(design, theta, d);
    }
    return sum;
}

double cond_info_on_D(const TwoStageDesign& design, double theta) {
    require_finite_theta(theta);
    const DecisionProbabilities probs = decision_probabilities(design, theta);
    double sum = 0.0;
    for (std::size_t d = 1; d <= probs.size(); ++d) {
        if (probs[d] < kNegligibleProbability) continue;
        sum += probs[d] * (stage1_info_unchecked(design, theta, d) + cond_info_stage2(design, d));
    }
    return sum;
}

double total_information(const TwoStageDesign& design, double theta) {
    require_finite_theta(theta);
    const DecisionProbabilities probs = decision_probabilities(design, theta);
    double n = design.n1();
    for (std::size_t d = 1; d <= probs.size(); ++d) n += probs[d] * stage2_size(design, d);
    return n / (design.sigma() * design.sigma());
}

InformationBreakdown info_breakdown(const TwoStageDesign& design, double theta) {
    require_finite_theta(theta);
    InformationBreakdown out;
    out.theta = theta;
    const DecisionProbabilities probs = decision_probabilities(design, theta);
    out.per_decision.reserve(probs.size());
    for (std::size_t d = 1; d <= probs.size(); ++d) {
        DecisionInformation e;
        e.prob = probs[d];
        e.info_stage2 = cond_info_stage2(design, d);
        e.included = e.prob >= kNegligibleProbability;
        if (e.included) {
            e.info_stage1 = stage1_info_unchecked(design, theta, d);
            out.stage1_on_D += e.prob * e.info_stage1;
            out.cond_on_D += e.prob * (e.info_stage1 + e.info_stage2);
        }
        e.info_total_given_d = e.info_stage1 + e.info_stage2;
        out.per_decision.push_back(e);
    }
    out.design_info = design_information(design, theta);
    out.total = total_information(design, theta);
    if (out.decomposition_residual() > 1e-8) {
        std::ostringstream msg;
        msg << "information decomposition residual " << out.decomposition_residual()
            << " at theta=" << theta;
        throw std::logic_error(msg.str());
    }
    return out;
}

}  // namespace seqinfo
