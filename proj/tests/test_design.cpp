#include <doctest.h>

#include <cmath>
#include <random>

#include "seqinfo/design.hpp"
#include "seqinfo/errors.hpp"
#include "seqinfo/verify.hpp"

using namespace seqinfo;

namespace {

TwoStageDesign three_cell() {
    return TwoStageDesign(1, 1.0,
                          DecisionRule({{{-kInf, 0.0}, CellAction::proceed(4)},
                                        {{0.0, 2.0}, CellAction::proceed(2)},
                                        {{2.0, kInf}, CellAction::stop()}}));
}

}  // namespace

TEST_CASE("gsd design layout") {
    const auto d = gsd_design(1, 1, 1.96, 1.0);
    REQUIRE(d.decisions() == 2);
    CHECK(d.rule().cell(1).region == Interval{1.96, kInf});
    CHECK(d.rule().cell(1).action.stops());
    CHECK(d.rule().cell(2).region == Interval{-kInf, 1.96});
    CHECK(d.rule().cell(2).action == CellAction::proceed(1));
    CHECK(d.informative());

    const auto e3 = gsd_design(4, 8, 2.78, 1.0);
    CHECK(e3.n1() == 4);
    CHECK(e3.stage1_region(1).lo == doctest::Approx(2.78 / 2.0));
    CHECK(total_sample_size(e3, 2) == 12);

    CHECK_THROWS_AS((void)gsd_design(1, 1, kInf), InvalidDesign);
    CHECK_THROWS_AS((void)gsd_design(1, 1, std::nan("")), InvalidDesign);
    CHECK_THROWS_AS((void)gsd_design(0, 1, 1.96), InvalidDesign);
    CHECK_THROWS_AS((void)gsd_design(1, 0, 1.96), InvalidDesign);
    CHECK_THROWS_AS((void)gsd_design(1, 1, 1.96, 0.0), InvalidDesign);
    CHECK_THROWS_AS((void)gsd_design(1, 1, 1.96, -1.0), InvalidDesign);
}

TEST_CASE("rule validation") {
    using C = DecisionCell;
    CHECK_THROWS_AS(DecisionRule({}), InvalidDesign);
    // gap
    CHECK_THROWS_AS(DecisionRule({C{{-kInf, 0.0}, CellAction::stop()}, C{{0.5, kInf}, CellAction::stop()}}),
                    InvalidDesign);
    // overlap
    CHECK_THROWS_AS(DecisionRule({C{{-kInf, 1.0}, CellAction::stop()}, C{{0.5, kInf}, CellAction::stop()}}),
                    InvalidDesign);
    // does not reach infinity
    CHECK_THROWS_AS(DecisionRule({C{{-kInf, 3.0}, CellAction::stop()}}), InvalidDesign);
    CHECK_THROWS_AS(DecisionRule({C{{-5.0, kInf}, CellAction::stop()}}), InvalidDesign);
    // continue needs n2 >= 1
    CHECK_THROWS_AS(DecisionRule({C{{-kInf, kInf}, CellAction::proceed(0)}}), InvalidDesign);
    // empty region
    CHECK_THROWS_AS(DecisionRule({C{{-kInf, 0.0}, CellAction::stop()}, C{{0.0, 0.0}, CellAction::stop()},
                                  C{{0.0, kInf}, CellAction::stop()}}),
                    InvalidDesign);
    // list order need not follow the axis
    const DecisionRule shuffled({C{{1.0, kInf}, CellAction::stop()}, C{{-kInf, 1.0}, CellAction::proceed(3)}});
    CHECK(shuffled.locate(5.0) == 1);
    CHECK(shuffled.locate(-5.0) == 2);
    CHECK(shuffled.locate(1.0) == 1);
    CHECK_THROWS_AS((void)shuffled.cell(0), std::out_of_range);
    CHECK_THROWS_AS((void)shuffled.cell(3), std::out_of_range);
}

TEST_CASE("partition check on random statistics") {
    std::mt19937_64 rng(5);
    std::normal_distribution<double> z(0.0, 3.0);
    for (int k = 0; k < 10; ++k) {
        const auto design = random_design(rng);
        for (int i = 0; i < 10000; ++i) {
            const double v = z(rng);
            int hits = 0;
            for (const auto& cell : design.rule().cells()) hits += cell.region.contains(v) ? 1 : 0;
            CHECK(hits == 1);
            REQUIRE(design.rule().cell(design.rule().locate(v)).region.contains(v));
        }
    }
}

TEST_CASE("boundary tie follows the half-open convention") {
    const auto d = gsd_design(1, 1, 1.96);
    CHECK(d.rule().locate(1.96) == 1);
    CHECK(d.rule().locate(std::nextafter(1.96, 0.0)) == 2);
    CHECK_THROWS_AS((void)d.rule().locate(std::nan("")), std::invalid_argument);
}

TEST_CASE("decision probabilities") {
    const auto d = gsd_design(1, 1, 1.96);
    const auto at_c = decision_probabilities(d, 1.96);
    CHECK(at_c[1] == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(at_c[2] == doctest::Approx(0.5).epsilon(1e-15));
    const auto at_0 = decision_probabilities(d, 0.0);
    CHECK(at_0[1] == doctest::Approx(0.025).epsilon(1e-3));
    CHECK(at_0[2] == doctest::Approx(0.975).epsilon(1e-4));

    const auto three = decision_probabilities(three_cell(), 0.0);
    CHECK(three[1] == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(three[2] == doctest::Approx(0.47725).epsilon(1e-5));
    CHECK(three[3] == doctest::Approx(0.02275).epsilon(1e-4));
    CHECK(three[2] == doctest::Approx(std::erf(2.0 / std::sqrt(2.0)) / 2.0).epsilon(1e-14));

    CHECK_THROWS_AS((void)at_0[0], std::out_of_range);
    CHECK_THROWS_AS((void)at_0[3], std::out_of_range);
}

TEST_CASE("three-cell probabilities agree with Monte Carlo counting") {
    std::mt19937_64 rng(99);
    std::normal_distribution<double> z(0.0, 1.0);
    const auto design = three_cell();
    const auto p = decision_probabilities(design, 0.0);
    std::array<int, 3> count{};
    const int n = 1000000;
    for (int i = 0; i < n; ++i) ++count[design.rule().locate(z(rng)) - 1];
    for (int d = 0; d < 3; ++d) {
        const double se = std::sqrt(p.p[d] * (1 - p.p[d]) / n);
        CHECK(std::abs(count[d] / double(n) - p.p[d]) < 4 * se);
    }
}

TEST_CASE("probabilities sum to one and derivatives match finite differences") {
    std::mt19937_64 rng(21);
    std::uniform_real_distribution<double> th(-10.0, 10.0);
    for (int k = 0; k < 100; ++k) {
        const auto design = random_design(rng);
        const double theta = th(rng);
        const auto p = decision_probabilities(design, theta);
        double sum = 0.0, dsum = 0.0;
        for (std::size_t d = 1; d <= design.decisions(); ++d) {
            CHECK(p[d] >= 0.0);
            CHECK(p[d] <= 1.0);
            sum += p[d];
            const double dp = decision_prob_dtheta(design, theta, d);
            dsum += dp;
            const double fd = central_diff([&](double t) { return decision_probabilities(design, t)[d]; }, theta);
            CHECK(std::abs(dp - fd) < 1e-8);
        }
        CHECK(std::abs(sum - 1.0) < 1e-12);
        CHECK(std::abs(dsum) < 1e-12);
    }
}

TEST_CASE("derivative examples") {
    const auto d = gsd_design(1, 1, 1.96);
    CHECK(decision_prob_dtheta(d, 1.96, 1) == doctest::Approx(0.3989).epsilon(1e-4));
    CHECK(decision_prob_dtheta(d, 0.0, 1) == doctest::Approx(0.0584).epsilon(1e-3));
    CHECK(decision_prob_dtheta(d, 0.0, 2) == doctest::Approx(-0.0584).epsilon(1e-3));
}

TEST_CASE("stop probability increases with theta") {
    const auto d = gsd_design(3, 2, 1.5, 1.7);
    double prev = -1.0;
    for (double t = -6.0; t <= 8.0; t += 0.05) {
        const double p1 = decision_probabilities(d, t)[1];
        CHECK(p1 >= prev);
        if (p1 > 1e-300 && p1 < 1.0) CHECK(p1 > prev);
        prev = p1;
    }
}

TEST_CASE("sample sizes") {
    const auto d = gsd_design(1, 1, 1.96);
    CHECK(total_sample_size(d, 1) == 1);
    CHECK(total_sample_size(d, 2) == 2);
    CHECK(stage2_size(d, 1) == 0);
    CHECK(stage2_size(d, 2) == 1);
    const auto t = three_cell();
    CHECK(total_sample_size(t, 1) == 5);
    CHECK(total_sample_size(t, 2) == 3);
    CHECK(total_sample_size(t, 3) == 1);
    CHECK_THROWS_AS((void)total_sample_size(t, 4), std::out_of_range);
}

TEST_CASE("randomized stop design") {
    const auto r = randomized_stop_design(1, 1, 0.025);
    CHECK_FALSE(r.informative());
    for (double t : {-5.0, 0.0, 1.96, 7.0}) {
        const auto p = decision_probabilities(r, t);
        CHECK(p[1] == doctest::Approx(0.025).epsilon(1e-12));
        CHECK(decision_prob_dtheta(r, t, 1) == 0.0);
        CHECK(decision_prob_dtheta(r, t, 2) == 0.0);
    }
    CHECK(r.statistic_shift(3.0) == 0.0);
    CHECK_THROWS_AS((void)randomized_stop_design(1, 1, 0.0), InvalidDesign);
    CHECK_THROWS_AS((void)randomized_stop_design(1, 1, 1.0), InvalidDesign);
}

TEST_CASE("statistic shift and stage-1 region scale") {
    const auto d = gsd_design(4, 1, 2.0, 2.0);
    CHECK(d.stage1_sd() == doctest::Approx(1.0));
    CHECK(d.statistic_shift(3.0) == doctest::Approx(3.0));
    CHECK(d.stage1_region(1) == Interval{2.0, kInf});
    CHECK(d == gsd_design(4, 1, 2.0, 2.0));
    CHECK_FALSE(d == gsd_design(4, 2, 2.0, 2.0));
}
