#include "seqinfo/density.hpp"

#include <array>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "seqinfo/errors.hpp"
#include "seqinfo/information.hpp"

namespace seqinfo {

namespace {

double normal_density(double x, double mean, double sd) noexcept {
    return std_normal_pdf((x - mean) / sd) / sd;
}

double checked_probability(const TwoStageDesign& design, double theta, std::size_t d) {
    const double p = decision_probabilities(design, theta)[d];
    if (p < kNegligibleProbability) {
        std::ostringstream msg;
        msg << "decision " << d << " has probability " << p << " at theta=" << theta;
        throw DegenerateDecision(msg.str());
    }
    return p;
}

std::size_t unique_cell(const TwoStageDesign& design, CellAction::Kind kind) {
    std::size_t found = 0;
    for (std::size_t d = 1; d <= design.decisions(); ++d) {
        if (design.rule().cell(d).action.kind == kind) {
            if (found != 0) throw InvalidDesign("rule has more than one cell with the requested action");
            found = d;
        }
    }
    if (found == 0) throw InvalidDesign("rule has no cell with the requested action");
    return found;
}

double stage1_value_statistic(const TwoStageDesign& design, double stage1_mean) {
    return std::sqrt(static_cast<double>(design.n1())) * stage1_mean / design.sigma();
}

double implied_mle(const TwoStageDesign& design, const Outcome& outcome) {
    const int n2 = stage2_size(design, outcome.decision);
    if (n2 == 0 || !outcome.stage2_mean) return outcome.stage1_mean;
    const double n1 = design.n1();
    return (n1 * outcome.stage1_mean + n2 * *outcome.stage2_mean) / (n1 + n2);
}

}  // namespace

double stage1_mean_density(const TwoStageDesign& design, double theta, double y) noexcept {
    return normal_density(y, theta, design.stage1_sd());
}

double stage2_mean_density(const TwoStageDesign& design, std::size_t d, double theta, double y) {
    const int n2 = stage2_size(design, d);
    if (n2 == 0) throw InvalidOutcome("decision " + std::to_string(d) + " collects no stage-2 data");
    return normal_density(y, theta, design.sigma() / std::sqrt(static_cast<double>(n2)));
}

Outcome make_outcome(const TwoStageDesign& design, double stage1_mean, std::optional<double> stage2_mean,
                     std::size_t decision) {
    Outcome out;
    out.stage1_mean = stage1_mean;
    out.stage2_mean = stage2_mean;
    out.decision = design.informative() ? design.rule().locate(stage1_value_statistic(design, stage1_mean))
                                        : decision;
    out.mle = stage1_mean;
    if (out.decision >= 1 && out.decision <= design.decisions()) out.mle = implied_mle(design, out);
    validate_outcome(design, out);
    return out;
}

void validate_outcome(const TwoStageDesign& design, const Outcome& outcome) {
    if (outcome.decision < 1 || outcome.decision > design.decisions()) {
        throw InvalidOutcome("decision index " + std::to_string(outcome.decision) + " out of range");
    }
    const DecisionCell& cell = design.rule().cell(outcome.decision);
    if (design.informative() &&
        !cell.region.contains(stage1_value_statistic(design, outcome.stage1_mean))) {
        std::ostringstream msg;
        msg << "z1=" << stage1_value_statistic(design, outcome.stage1_mean) << " is not in the cell of decision "
            << outcome.decision;
        throw InvalidOutcome(msg.str());
    }
    if (cell.action.stops() == outcome.stage2_mean.has_value()) {
        throw InvalidOutcome("stage-2 mean must be present exactly when decision " +
                             std::to_string(outcome.decision) + " continues");
    }
    const double expected = implied_mle(design, outcome);
    if (!(std::abs(outcome.mle - expected) <= 1e-12 * (1.0 + std::abs(expected)))) {
        std::ostringstream msg;
        msg << "mle " << outcome.mle << " does not match the stage means (expected " << expected << ")";
        throw InvalidOutcome(msg.str());
    }
}

double conditional_density_given_D(const TwoStageDesign& design, double theta, std::size_t d,
                                   double stage1_value) {
    const double p = checked_probability(design, theta, d);
    if (!design.informative()) return stage1_mean_density(design, theta, stage1_value);
    if (!design.stage1_region(d).contains(stage1_value)) return 0.0;
    return stage1_mean_density(design, theta, stage1_value) / p;
}

double mle_density_given_decision(const TwoStageDesign& design, double theta, std::size_t d, double t,
                                  const QuadratureSettings& settings) {
    const int n2 = stage2_size(design, d);
    if (n2 == 0) return conditional_density_given_D(design, theta, d, t);

    const double p = checked_probability(design, theta, d);
    const double n1 = design.n1();
    const double w1 = n1 / (n1 + n2);
    const double w2 = n2 / (n1 + n2);
    const double s1 = design.stage1_sd();
    const double s2 = design.sigma() / std::sqrt(static_cast<double>(n2));

    // theta_hat = w1 * y + w2 * m2 with y the stage-1 mean and m2 the stage-2
    // mean, so f(t) = int_cell f1(y) f2((t - w1 y) / w2) / w2 dy.
    auto integrand = [&](double y) {
        return normal_density(y, theta, s1) * normal_density((t - w1 * y) / w2, theta, s2) / w2;
    };
    // As a function of y the integrand is a Gaussian; pre-split around its peak.
    const double mean2 = (t - w2 * theta) / w1;
    const double sd2 = w2 * s2 / w1;
    const double prec = 1.0 / (s1 * s1) + 1.0 / (sd2 * sd2);
    const double peak = (theta / (s1 * s1) + mean2 / (sd2 * sd2)) / prec;
    const double spread = 1.0 / std::sqrt(prec);
    const std::array<double, 5> cuts{peak - 8.0 * spread, peak - 2.0 * spread, peak, peak + 2.0 * spread,
                                     peak + 8.0 * spread};

    const Interval region = design.informative() ? design.stage1_region(d) : Interval{};
    const double norm = design.informative() ? p : 1.0;
    return integrate(integrand, region, settings, cuts).value / norm;
}

double mle_density_given_stop(const TwoStageDesign& design, double theta, double t) {
    return mle_density_given_decision(design, theta, unique_cell(design, CellAction::Kind::Stop), t);
}

double mle_density_given_continue(const TwoStageDesign& design, double theta, double t,
                                  const QuadratureSettings& settings) {
    return mle_density_given_decision(design, theta, unique_cell(design, CellAction::Kind::Continue), t,
                                      settings);
}

double joint_observable_density(const TwoStageDesign& design, double theta, const Outcome& outcome) {
    validate_outcome(design, outcome);
    double f = stage1_mean_density(design, theta, outcome.stage1_mean);
    if (!design.informative()) f *= decision_probabilities(design, theta)[outcome.decision];
    if (outcome.stage2_mean) f *= stage2_mean_density(design, outcome.decision, theta, *outcome.stage2_mean);
    return f;
}

double log_likelihood(std::span<const double> data, double sigma, double theta) {
    if (data.empty()) throw std::invalid_argument("log_likelihood: data must be nonempty");
    if (!(sigma > 0.0)) throw std::invalid_argument("log_likelihood: sigma must be > 0");
    constexpr double log_sqrt_2pi = 0.91893853320467274178;
    double sum = 0.0;
    for (double x : data) {
        const double z = (x - theta) / sigma;
        sum += -0.5 * z * z - log_sqrt_2pi;
    }
    return sum - static_cast<double>(data.size()) * std::log(sigma);
}

}  // namespace seqinfo
