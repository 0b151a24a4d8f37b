#pragma once

#include <cstddef>
#include <vector>

#include "seqinfo/mathcore.hpp"

namespace seqinfo {

/// What the interim analysis does when the decision statistic lands in a cell.
struct CellAction {
    enum class Kind { Stop, Continue };

    Kind kind = Kind::Stop;
    int n2 = 0;  // stage-2 sample size, >= 1 for Continue

    [[nodiscard]] static CellAction stop() noexcept { return {Kind::Stop, 0}; }
    [[nodiscard]] static CellAction proceed(int n2) noexcept { return {Kind::Continue, n2}; }
    [[nodiscard]] bool stops() const noexcept { return kind == Kind::Stop; }

    friend bool operator==(const CellAction&, const CellAction&) = default;
};

/// Half-open region [lo, hi) of the decision statistic mapped to an action.
struct DecisionCell {
    Interval region;
    CellAction action;

    friend bool operator==(const DecisionCell&, const DecisionCell&) = default;
};

/// Which statistic the cells partition.
///
/// InterimZ is the interim test statistic z1 = sqrt(n1) * mean(x1) / sigma,
/// so decisions depend on theta. IndependentRandomization draws the
/// decision statistic as an independent N(0, 1) variate: the cell
/// probabilities are theta-free and the interim decision carries no
/// information.
enum class DecisionBasis { InterimZ, IndependentRandomization };

/// Ordered list of K cells that exactly partition the real line. Decision
/// d (1-based) is the d-th cell in the list, independent of where the cell
/// sits on the axis.
class DecisionRule {
   public:
    explicit DecisionRule(std::vector<DecisionCell> cells,
                          DecisionBasis basis = DecisionBasis::InterimZ);

    [[nodiscard]] std::size_t size() const noexcept { return cells_.size(); }
    [[nodiscard]] const std::vector<DecisionCell>& cells() const noexcept { return cells_; }
    [[nodiscard]] const DecisionCell& cell(std::size_t d) const;
    [[nodiscard]] DecisionBasis basis() const noexcept { return basis_; }

    /// Decision (1-based) whose cell contains the statistic value.
    [[nodiscard]] std::size_t locate(double statistic) const;

    friend bool operator==(const DecisionRule&, const DecisionRule&) = default;

   private:
    std::vector<DecisionCell> cells_;
    DecisionBasis basis_;
};

class TwoStageDesign {
   public:
    TwoStageDesign(int n1, double sigma, DecisionRule rule);

    [[nodiscard]] int n1() const noexcept { return n1_; }
    [[nodiscard]] double sigma() const noexcept { return sigma_; }
    [[nodiscard]] const DecisionRule& rule() const noexcept { return rule_; }
    [[nodiscard]] std::size_t decisions() const noexcept { return rule_.size(); }
    [[nodiscard]] bool informative() const noexcept {
        return rule_.basis() == DecisionBasis::InterimZ;
    }

    /// Standard deviation of the stage-1 mean, sigma / sqrt(n1).
    [[nodiscard]] double stage1_sd() const noexcept;

    /// Mean of the decision statistic at theta: sqrt(n1) theta / sigma for an
    /// informative rule, 0 otherwise.
    [[nodiscard]] double statistic_shift(double theta) const noexcept;

    /// Cell d's region expressed on the stage-1 mean scale
    /// (z1 bounds times sigma / sqrt(n1)). Only meaningful when informative.
    [[nodiscard]] Interval stage1_region(std::size_t d) const;

    friend bool operator==(const TwoStageDesign&, const TwoStageDesign&) = default;

   private:
    int n1_;
    double sigma_;
    DecisionRule rule_;
};

/// Two-cell group sequential design: d=1 stops on z1 >= c1, d=2 continues with n2.
[[nodiscard]] TwoStageDesign gsd_design(int n1, int n2, double c1, double sigma = 1.0);

/// Two-cell design whose stop decision is an independent coin with
/// probability p_stop (d=1 stop, d=2 continue with n2).
[[nodiscard]] TwoStageDesign randomized_stop_design(int n1, int n2, double p_stop, double sigma = 1.0);

struct DecisionProbabilities {
    std::vector<double> p;

    /// 1-based access.
    [[nodiscard]] double operator[](std::size_t d) const { return p.at(d - 1); }
    [[nodiscard]] std::size_t size() const noexcept { return p.size(); }
};

[[nodiscard]] DecisionProbabilities decision_probabilities(const TwoStageDesign& design, double theta);

/// dP_d / dtheta.
[[nodiscard]] double decision_prob_dtheta(const TwoStageDesign& design, double theta, std::size_t d);

/// Cumulative sample size n_(d): n1 for Stop cells, n1 + n2 for Continue.
[[nodiscard]] int total_sample_size(const TwoStageDesign& design, std::size_t d);

[[nodiscard]] int stage2_size(const TwoStageDesign& design, std::size_t d);

}  // namespace seqinfo
