#include "seqinfo/design.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "seqinfo/errors.hpp"

namespace seqinfo {

DecisionRule::DecisionRule(std::vector<DecisionCell> cells, DecisionBasis basis)
    : cells_(std::move(cells)), basis_(basis) {
    if (cells_.empty()) throw InvalidDesign("decision rule needs at least one cell");
    for (std::size_t i = 0; i < cells_.size(); ++i) {
        const auto& c = cells_[i];
        if (std::isnan(c.region.lo) || std::isnan(c.region.hi) || !(c.region.lo < c.region.hi)) {
            throw InvalidDesign("cell " + std::to_string(i + 1) + " has an empty region");
        }
        if (!c.action.stops() && c.action.n2 < 1) {
            throw InvalidDesign("cell " + std::to_string(i + 1) + " continues with n2 < 1");
        }
    }
    std::vector<std::size_t> order(cells_.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t l, std::size_t r) { return cells_[l].region.lo < cells_[r].region.lo; });
    if (cells_[order.front()].region.lo != -kInf || cells_[order.back()].region.hi != kInf) {
        throw InvalidDesign("decision cells must cover (-inf, inf)");
    }
    for (std::size_t i = 0; i + 1 < order.size(); ++i) {
        const double hi = cells_[order[i]].region.hi;
        const double next_lo = cells_[order[i + 1]].region.lo;
        if (hi != next_lo) {
            std::ostringstream msg;
            msg << "decision cells leave a gap or overlap at " << hi << " / " << next_lo;
            throw InvalidDesign(msg.str());
        }
    }
}

const DecisionCell& DecisionRule::cell(std::size_t d) const {
    if (d < 1 || d > cells_.size()) {
        throw std::out_of_range("decision index " + std::to_string(d) + " outside 1.." +
                                std::to_string(cells_.size()));
    }
    return cells_[d - 1];
}

std::size_t DecisionRule::locate(double statistic) const {
    for (std::size_t i = 0; i < cells_.size(); ++i) {
        if (cells_[i].region.contains(statistic)) return i + 1;
    }
    // Only +inf or NaN fall through the half-open cells.
    throw std::invalid_argument("decision statistic is not finite");
}

TwoStageDesign::TwoStageDesign(int n1, double sigma, DecisionRule rule)
    : n1_(n1), sigma_(sigma), rule_(std::move(rule)) {
    if (n1 < 1) throw InvalidDesign("n1 must be >= 1");
    if (!(sigma > 0.0) || !std::isfinite(sigma)) throw InvalidDesign("sigma must be finite and > 0");
}

double TwoStageDesign::stage1_sd() const noexcept { return sigma_ / std::sqrt(static_cast<double>(n1_)); }

double TwoStageDesign::statistic_shift(double theta) const noexcept {
    if (!informative()) return 0.0;
    return std::sqrt(static_cast<double>(n1_)) * theta / sigma_;
}

Interval TwoStageDesign::stage1_region(std::size_t d) const {
    const Interval& z = rule_.cell(d).region;
    const double s = stage1_sd();
    return Interval{z.lo * s, z.hi * s};
}

TwoStageDesign gsd_design(int n1, int n2, double c1, double sigma) {
    if (!std::isfinite(c1)) throw InvalidDesign("critical value c1 must be finite");
    if (n2 < 1) throw InvalidDesign("n2 must be >= 1");
    DecisionRule rule({DecisionCell{Interval{c1, kInf}, CellAction::stop()},
                       DecisionCell{Interval{-kInf, c1}, CellAction::proceed(n2)}});
    return TwoStageDesign(n1, sigma, std::move(rule));
}

TwoStageDesign randomized_stop_design(int n1, int n2, double p_stop, double sigma) {
    if (!(p_stop > 0.0 && p_stop < 1.0)) throw InvalidDesign("p_stop must lie in (0, 1)");
    if (n2 < 1) throw InvalidDesign("n2 must be >= 1");
    const double cut = std_normal_quantile(1.0 - p_stop);
    DecisionRule rule({DecisionCell{Interval{cut, kInf}, CellAction::stop()},
                       DecisionCell{Interval{-kInf, cut}, CellAction::proceed(n2)}},
                      DecisionBasis::IndependentRandomization);
    return TwoStageDesign(n1, sigma, std::move(rule));
}

DecisionProbabilities decision_probabilities(const TwoStageDesign& design, double theta) {
    const double shift = design.statistic_shift(theta);
    DecisionProbabilities out;
    out.p.reserve(design.decisions());
    for (const auto& c : design.rule().cells()) {
        out.p.push_back(std_normal_interval_prob(c.region.lo - shift, c.region.hi - shift));
    }
    return out;
}

double decision_prob_dtheta(const TwoStageDesign& design, double theta, std::size_t d) {
    const DecisionCell& c = design.rule().cell(d);
    if (!design.informative()) return 0.0;
    const double shift = design.statistic_shift(theta);
    const double rate = std::sqrt(static_cast<double>(design.n1())) / design.sigma();
    // phi(+-inf) is 0, so infinite ends contribute nothing.
    return rate * (std_normal_pdf(c.region.lo - shift) - std_normal_pdf(c.region.hi - shift));
}

int stage2_size(const TwoStageDesign& design, std::size_t d) {
    const CellAction& a = design.rule().cell(d).action;
    return a.stops() ? 0 : a.n2;
}

int total_sample_size(const TwoStageDesign& design, std::size_t d) {
    return design.n1() + stage2_size(design, d);
}

}  // namespace seqinfo
