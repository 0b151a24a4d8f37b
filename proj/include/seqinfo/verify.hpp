#pragma once

#include <cstddef>
#include <random>
#include <string>
#include <vector>

#include "seqinfo/design.hpp"

namespace seqinfo {

/// Quadrature oracles that bypass the closed forms they are used to check.
namespace oracle {

struct Moments {
    double mass;
    double mean;
    double var;
};

/// Mass, mean and variance of N(mu, sigma^2) on `region`, by quadrature.
[[nodiscard]] Moments truncated_moments(double mu, double sigma, Interval region);

/// Var of d/dtheta log f(y | D=d) under f(y | D=d), the analytic score
/// (y - theta) n1 / sigma^2 - P_d' / P_d integrated by quadrature.
[[nodiscard]] double score_variance(const TwoStageDesign& design, double theta, std::size_t d);

}  // namespace oracle

/// Random design: K in 1..max_cells interval cells in shuffled order, cut
/// points in [-3, 3], n1 in 1..max_n1, sigma in [0.5, 2], each cell stopping
/// or continuing with n2 in 1..10.
[[nodiscard]] TwoStageDesign random_design(std::mt19937_64& rng, int max_cells = 4, int max_n1 = 10);

struct CheckResult {
    std::string name;
    double max_error = 0.0;
    double tolerance = 0.0;
    bool passed = false;
};

struct VerifyOptions {
    bool quick = false;
    bool inject_fault = false;  // corrupts one check; exercises the harness
};

[[nodiscard]] std::vector<CheckResult> run_verification(const VerifyOptions& options);

}  // namespace seqinfo
