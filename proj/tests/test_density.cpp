#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "seqinfo/bounds.hpp"
#include "seqinfo/density.hpp"
#include "seqinfo/errors.hpp"

using namespace seqinfo;

namespace {

double integral(const RealFunction& f, Interval r, std::vector<double> bp = {}) {
    return integrate(f, r, {1e-12, 1e-11, 400}, bp).value;
}

}  // namespace

TEST_CASE("stop-branch density") {
    const auto d = gsd_design(1, 1, 1.96);
    CHECK(mle_density_given_stop(d, 0.0, 1.0) == 0.0);
    CHECK(mle_density_given_stop(d, 0.0, 1.96) > 0.0);
    const auto f = [&](double t) { return mle_density_given_stop(d, 0.0, t); };
    CHECK(std::abs(integral(f, {1.96, kInf}) - 1.0) < 1e-8);
    const double mean = integral([&](double t) { return t * f(t); }, {1.96, kInf});
    CHECK(mean == doctest::Approx(2.3378).epsilon(5e-4 / 2.3378));
}

TEST_CASE("continue-branch convolution") {
    const auto d = gsd_design(1, 1, 1.96);
    const auto f = [&](double t) { return mle_density_given_continue(d, 0.0, t); };
    const double bp[] = {-2.0, 0.0, 2.0};
    CHECK(std::abs(integral(f, {}, {bp, bp + 3}) - 1.0) < 1e-8);
    const double mean = integral([&](double t) { return t * f(t); }, {}, {bp, bp + 3});
    CHECK(std::abs(mean - (-0.0300)) < 5e-4);
    CHECK(std::abs(mean - cond_bias(d, 0.0, 2)) < 1e-7);
    const double second = integral([&](double t) { return t * t * f(t); }, {}, {bp, bp + 3});
    const double var = second - mean * mean;
    const double bound = cond_mse_bound(d, 0.0, 2);
    const double b = cond_bias(d, 0.0, 2);
    CHECK(std::abs(var - (bound - b * b)) < 1e-7);
}

TEST_CASE("branch moments reproduce the bounds module on other designs") {
    const auto d = gsd_design(4, 3, 1.2, 1.5);
    for (double theta : {-0.5, 0.9, 2.0}) {
        const double bp[] = {theta - 1.0, theta, theta + 1.0, 0.9};
        for (std::size_t k = 1; k <= 2; ++k) {
            const auto f = [&](double t) { return mle_density_given_decision(d, theta, k, t); };
            const double m0 = integral(f, {}, {bp, bp + 4});
            const double m1 = integral([&](double t) { return t * f(t); }, {}, {bp, bp + 4});
            const double m2 = integral([&](double t) { return t * t * f(t); }, {}, {bp, bp + 4});
            CHECK(std::abs(m0 - 1.0) < 1e-8);
            CHECK(std::abs((m1 - theta) - cond_bias(d, theta, k)) < 1e-7);
            const double b = cond_bias(d, theta, k);
            const double var = m2 - m1 * m1;
            // MLE attains the bound, so the bound minus squared bias is its variance
            CHECK(std::abs(var - (cond_mse_bound(d, theta, k) - b * b)) < 1e-7);
        }
    }
}

TEST_CASE("mixture masses equal decision probabilities") {
    const auto d = gsd_design(1, 1, 1.96);
    for (double theta = -1.0; theta <= 4.0; theta += 0.5) {
        const auto p = decision_probabilities(d, theta);
        const double stop = integral(
            [&](double y) { return joint_observable_density(d, theta, make_outcome(d, y, std::nullopt)); },
            {1.96, kInf});
        // stage-2 mean integrates out to 1 for each stage-1 value
        const double cont = integral(
            [&](double y) {
                const double inner = integral(
                    [&](double y2) { return joint_observable_density(d, theta, make_outcome(d, y, y2)); }, {},
                    {theta});
                return inner;
            },
            {-kInf, 1.96});
        CHECK(std::abs(stop - p[1]) < 1e-8);
        CHECK(std::abs(cont - p[2]) < 1e-8);
        CHECK(std::abs(stop + cont - 1.0) < 1e-8);
    }
    const double half = integral(
        [&](double y) { return joint_observable_density(d, 1.96, make_outcome(d, y, std::nullopt)); }, {1.96, kInf});
    CHECK(half == doctest::Approx(0.5).epsilon(1e-9));
}

TEST_CASE("conditional stage-1 density") {
    const auto d = gsd_design(1, 1, 1.96);
    CHECK(conditional_density_given_D(d, 1.96, 1, 1.96) == doctest::Approx(0.7979).epsilon(1e-4));
    CHECK(conditional_density_given_D(d, 1.96, 1, 1.0) == 0.0);
    CHECK(conditional_density_given_D(d, 1.96, 2, 1.96) == 0.0);
    for (std::size_t k = 1; k <= 2; ++k) {
        const auto f = [&](double y) { return conditional_density_given_D(d, 0.3, k, y); };
        CHECK(std::abs(integral(f, d.stage1_region(k)) - 1.0) < 1e-8);
    }
    CHECK_THROWS_AS((void)conditional_density_given_D(d, -30.0, 1, 2.0), DegenerateDecision);
    CHECK_THROWS_AS((void)mle_density_given_stop(d, -30.0, 2.0), DegenerateDecision);
}

TEST_CASE("outcomes and the adapted support") {
    const auto d = gsd_design(1, 1, 1.96);
    const Outcome bad{1, 0.0, 0.0, std::nullopt};
    CHECK_THROWS_AS(validate_outcome(d, bad), InvalidOutcome);
    CHECK_THROWS_AS((void)joint_observable_density(d, 0.0, bad), InvalidOutcome);
    // stage-2 data after a stop is impossible
    CHECK_THROWS_AS((void)make_outcome(d, 2.5, 1.0), InvalidOutcome);
    CHECK_THROWS_AS((void)make_outcome(d, 0.5, std::nullopt), InvalidOutcome);
    const Outcome wrong_index{3, 0.0, 0.0, std::nullopt};
    CHECK_THROWS_AS(validate_outcome(d, wrong_index), InvalidOutcome);

    const auto e = gsd_design(2, 3, 1.0);
    const auto o = make_outcome(e, 0.1, 0.6);
    CHECK(o.decision == 2);
    CHECK(o.mle == doctest::Approx((2 * 0.1 + 3 * 0.6) / 5.0));
    const Outcome skewed{2, 0.0, 0.1, 0.6};
    CHECK_THROWS_AS(validate_outcome(e, skewed), InvalidOutcome);
    const auto s = make_outcome(e, 0.9, std::nullopt);
    CHECK(s.decision == 1);
    CHECK(s.mle == 0.9);
}

TEST_CASE("randomized rule densities") {
    const auto r = randomized_stop_design(1, 1, 0.25);
    const auto o = make_outcome(r, 0.3, std::nullopt, 1);
    CHECK(o.decision == 1);
    CHECK(joint_observable_density(r, 0.0, o) == doctest::Approx(0.25 * std_normal_pdf(0.3)));
    CHECK_THROWS_AS((void)make_outcome(r, 0.3, std::nullopt, 0), InvalidOutcome);
    const auto f = [&](double t) { return mle_density_given_continue(r, 0.0, t); };
    CHECK(f(0.0) == doctest::Approx(std_normal_pdf(0.0) * std::sqrt(2.0)).epsilon(1e-9));
}

TEST_CASE("shorthands require a unique cell") {
    const TwoStageDesign two_stops(1, 1.0,
                                   DecisionRule({{{-kInf, 0.0}, CellAction::stop()},
                                                 {{0.0, kInf}, CellAction::stop()}}));
    CHECK_THROWS_AS((void)mle_density_given_stop(two_stops, 0.0, 1.0), InvalidDesign);
    CHECK_THROWS_AS((void)mle_density_given_continue(two_stops, 0.0, 1.0), InvalidDesign);
}

TEST_CASE("log-likelihood") {
    const double one[] = {0.0};
    CHECK(log_likelihood(one, 1.0, 0.0) == doctest::Approx(-0.9189).epsilon(1e-4));
    CHECK(log_likelihood(one, 1.0, 0.0) == doctest::Approx(std::log(std_normal_pdf(0.0))).epsilon(1e-15));
    const double two[] = {1.0, 2.0};
    double best = -kInf, arg = 0.0;
    for (int i = 0; i <= 400; ++i) {
        const double t = -1.0 + 0.01 * i;
        const double v = log_likelihood(two, 1.0, t);
        if (v > best) {
            best = v;
            arg = t;
        }
    }
    CHECK(std::abs(arg - 1.5) <= 0.01);
    CHECK(log_likelihood(one, 2.0, 0.0) == doctest::Approx(std::log(std_normal_pdf(0.0)) - std::log(2.0)));
    CHECK_THROWS_AS((void)log_likelihood(std::span<const double>{}, 1.0, 0.0), std::invalid_argument);
    CHECK_THROWS_AS((void)log_likelihood(one, 0.0, 0.0), std::invalid_argument);
}
