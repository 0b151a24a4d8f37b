#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

#include "seqinfo/design.hpp"

namespace seqinfo {

/// theta_i = min + i * step for i = 0 .. round((max - min) / step).
struct ThetaGrid {
    double min = -2.0;
    double max = 6.0;
    double step = 0.01;

    [[nodiscard]] std::vector<double> points() const;
};

struct CurveDecision {
    double prob = 0.0;
    double info_stage1 = 0.0;
    double info_stage2 = 0.0;
    double info_total_given_d = 0.0;
    double bias = 0.0;   // NaN for negligible decisions
    double bound = 0.0;  // NaN for negligible decisions
};

struct CurveRow {
    double theta = 0.0;
    double info_total = 0.0;
    double info_design = 0.0;
    double info_cond_on_D = 0.0;
    std::vector<CurveDecision> per_decision;
    double uncond_bound = 0.0;

    [[nodiscard]] double decomposition_residual() const noexcept;
};

[[nodiscard]] CurveRow curve_row(const TwoStageDesign& design, double theta);

/// Rows in grid order; grid points are evaluated on up to `workers` threads.
[[nodiscard]] std::vector<CurveRow> compute_curves(const TwoStageDesign& design, const ThetaGrid& grid,
                                                   unsigned workers = 0);

/// Header `theta,I_total,I_design,I_cond_D,{P_d,I1_d,I2_d,bias_d,bound_d}...,uncond_bound`.
[[nodiscard]] std::string curves_csv_header(std::size_t decisions);
void write_curves_csv(std::ostream& out, const std::vector<CurveRow>& rows);
[[nodiscard]] std::vector<CurveRow> read_curves_csv(std::istream& in);

/// Minimal line chart of I_total, I_design, I_cond_D and I_{X_T|D=d}.
[[nodiscard]] std::string render_curves_svg(const std::vector<CurveRow>& rows, const std::string& title);

}  // namespace seqinfo
