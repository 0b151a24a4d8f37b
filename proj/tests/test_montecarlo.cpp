#include <doctest.h>

#include <cmath>
#include <sstream>
#include <string>

#include "seqinfo/bounds.hpp"
#include "seqinfo/errors.hpp"
#include "seqinfo/information.hpp"
#include "seqinfo/montecarlo.hpp"
#include "seqinfo/philox.hpp"

using namespace seqinfo;

namespace {

SimConfig config_for(const TwoStageDesign& d, double theta, std::uint64_t reps, std::uint64_t seed,
                     unsigned workers = 0) {
    return SimConfig{d, theta, reps, seed, std::nullopt, workers, {}};
}

bool same(const BranchStats& a, const BranchStats& b) {
    return a.count == b.count && a.mean_estimate == b.mean_estimate && a.bias == b.bias && a.mse == b.mse &&
           a.se_bias == b.se_bias && a.se_mse == b.se_mse;
}

}  // namespace

TEST_CASE("philox known-answer vectors") {
    const auto zero = Philox4x32::apply({0, 0, 0, 0}, {0, 0});
    CHECK(zero == Philox4x32::Counter{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8});
    const auto pi = Philox4x32::apply({0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, {0xa4093822, 0x299f31d0});
    CHECK(pi == Philox4x32::Counter{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1});
}

TEST_CASE("golden normals for seed 42, stream 0") {
    auto s = normal_sampler(42, 0);
    CHECK(s.next() == -0.66537486780734922);
    CHECK(s.next() == 1.036023808655465);
    CHECK(s.next() == -1.4338891806537386);
}

TEST_CASE("streams differ and repeat") {
    auto a = normal_sampler(42, 0);
    auto b = normal_sampler(42, 1);
    auto c = normal_sampler(43, 0);
    auto a2 = normal_sampler(42, 0);
    const double va = a.next();
    CHECK(va != b.next());
    CHECK(va != c.next());
    CHECK(va == a2.next());
}

TEST_CASE("sampler moments over 1e6 draws") {
    auto s = normal_sampler(2024, 7);
    const int n = 1000000;
    double sum = 0.0, sum2 = 0.0;
    for (int i = 0; i < n; ++i) {
        const double x = s.next();
        sum += x;
        sum2 += x * x;
    }
    const double mean = sum / n;
    const double var = sum2 / n - mean * mean;
    CHECK(std::abs(mean) < 4e-3);
    CHECK(std::abs(var - 1.0) < 0.006);
}

TEST_CASE("simulate is independent of worker count") {
    const auto d = gsd_design(2, 3, 1.5);
    auto base = config_for(d, 0.7, 50001, 9, 1);
    base.histogram = HistogramSpec{};
    const auto serial = simulate(base);
    for (unsigned w : {2u, 3u, 8u}) {
        auto cfg = base;
        cfg.workers = w;
        const auto par = simulate(cfg);
        REQUIRE(par.per_decision.size() == serial.per_decision.size());
        for (std::size_t k = 0; k < par.per_decision.size(); ++k) CHECK(same(par.per_decision[k], serial.per_decision[k]));
        CHECK(same(par.overall, serial.overall));
        REQUIRE(par.histograms.has_value());
        for (std::size_t k = 0; k < par.histograms->size(); ++k) {
            CHECK((*par.histograms)[k].counts == (*serial.histograms)[k].counts);
        }
    }
    std::ostringstream a, b;
    write_outcome_csv(config_for(d, 0.7, 2000, 9, 1), a);
    write_outcome_csv(config_for(d, 0.7, 2000, 9, 4), b);
    CHECK(a.str() == b.str());
}

TEST_CASE("single replication is reproducible") {
    const auto d = gsd_design(1, 1, 1.96);
    const auto r1 = simulate(config_for(d, 0.0, 1, 5));
    const auto r2 = simulate(config_for(d, 0.0, 1, 5));
    CHECK(same(r1.overall, r2.overall));
    CHECK(r1.overall.count == 1);
    CHECK(r1.seed_used == 5);
}

TEST_CASE("counts sum to replications and track decision probabilities") {
    const auto d = gsd_design(1, 1, 1.96);
    const std::uint64_t reps = 400000;
    for (double theta : {0.0, 1.0, 1.96, 3.0}) {
        const auto r = simulate(config_for(d, theta, reps, 31));
        std::uint64_t total = 0;
        const auto p = decision_probabilities(d, theta);
        for (std::size_t k = 0; k < r.per_decision.size(); ++k) {
            total += r.per_decision[k].count;
            const double se = std::sqrt(p.p[k] * (1 - p.p[k]) / reps);
            CHECK(std::abs(r.per_decision[k].count / double(reps) - p.p[k]) < 4 * se);
        }
        CHECK(total == reps);
        CHECK(r.overall.count == reps);
    }
}

TEST_CASE("outcome dump format") {
    const auto d = gsd_design(1, 1, 1.96);
    std::ostringstream out;
    write_outcome_csv(config_for(d, 1.96, 3, 42), out);
    std::istringstream in(out.str());
    std::string line;
    std::getline(in, line);
    CHECK(line == "rep,decision,z1,mle");
    int rows = 0;
    while (std::getline(in, line)) {
        CHECK(line.rfind(std::to_string(rows) + ",", 0) == 0);
        ++rows;
    }
    CHECK(rows == 3);
    // first stage-1 draw of replication 0 is the golden value
    std::istringstream again(out.str());
    std::getline(again, line);
    std::getline(again, line);
    const double z1 = std::stod(line.substr(line.find(',', line.find(',') + 1) + 1));
    CHECK(z1 == doctest::Approx(1.96 - 0.66537486780734922).epsilon(1e-15));
}

TEST_CASE("a biased estimator is flagged") {
    const auto d = gsd_design(1, 1, 1.96);
    auto cfg = config_for(d, 1.96, 200000, 3);
    cfg.estimator = [](const Outcome& o) { return o.mle + 0.5; };
    const auto sim = simulate(cfg);
    const auto cmp = empirical_vs_bound(sim, unconditional_mse_bound(d, 1.96));
    CHECK(cmp.any_flagged());
    for (const auto& row : cmp.rows) {
        CHECK(row.flagged);
        CHECK(std::abs(row.z_bias) > 3.0);
    }
}

TEST_CASE("MLE matches bounds at moderate replication counts") {
    const auto d = gsd_design(1, 1, 1.96);
    const auto sim = simulate(config_for(d, 1.96, 200000, 77));
    const auto cmp = empirical_vs_bound(sim, unconditional_mse_bound(d, 1.96));
    CHECK_FALSE(cmp.any_flagged());
    REQUIRE(cmp.rows.size() == 3);
    CHECK(cmp.rows[2].label == "overall");
    CHECK(cmp.rows[2].bound == doctest::Approx(0.75));
}

TEST_CASE("rare branches are reported but not flagged") {
    const auto d = gsd_design(1, 1, 1.96);
    const auto sim = simulate(config_for(d, -2.0, 500, 1));
    const auto cmp = empirical_vs_bound(sim, unconditional_mse_bound(d, -2.0));
    CHECK(cmp.rows[0].count < kMinBranchHits);
    CHECK(cmp.rows[0].small_sample);
    CHECK_FALSE(cmp.rows[0].flagged);
}

TEST_CASE("mismatched inputs are rejected") {
    const auto d = gsd_design(1, 1, 1.96);
    const auto sim = simulate(config_for(d, 1.96, 10, 1));
    CHECK_THROWS_AS((void)empirical_vs_bound(sim, unconditional_mse_bound(d, 0.0)), MismatchedInputs);
    CHECK_THROWS_AS((void)empirical_vs_bound(sim, unconditional_mse_bound(gsd_design(1, 1, 2.0), 1.96)),
                    MismatchedInputs);
}

TEST_CASE("false-flag rate of 100-replication runs over 200 seeds") {
    const auto d = gsd_design(1, 1, 1.96);
    const auto report = unconditional_mse_bound(d, 1.96);
    int flagged_rows = 0;
    int rows = 0;
    for (std::uint64_t seed = 1; seed <= 200; ++seed) {
        const auto cmp = empirical_vs_bound(simulate(config_for(d, 1.96, 100, seed, 1)), report);
        for (const auto& row : cmp.rows) {
            ++rows;
            flagged_rows += row.flagged ? 1 : 0;
        }
    }
    MESSAGE("flagged rows: " << flagged_rows << " of " << rows);
    CHECK(flagged_rows < 0.01 * rows);
}

TEST_CASE("histogram reference probabilities") {
    const auto d = gsd_design(1, 1, 1.96);
    const HistogramSpec spec{50, -3.0, 3.0};
    for (std::size_t k = 1; k <= 2; ++k) {
        const auto p = histogram_reference_probabilities(d, 0.0, k, spec);
        REQUIRE(p.size() == 52);
        double sum = 0.0;
        for (double v : p) {
            CHECK(v >= 0.0);
            sum += v;
        }
        CHECK(std::abs(sum - 1.0) < 1e-8);
    }
    // stop branch lives above 1.96
    const auto stop = histogram_reference_probabilities(d, 0.0, 1, spec);
    CHECK(stop[0] == 0.0);
    CHECK(stop[1] == 0.0);
}

TEST_CASE("histogram categories") {
    Histogram h;
    h.counts = {1, 2, 3};
    h.underflow = 4;
    h.overflow = 5;
    CHECK(h.categories() == std::vector<std::uint64_t>{4, 1, 2, 3, 5});
}

TEST_CASE("chi-square goodness of fit") {
    const std::vector<std::uint64_t> obs{25, 25, 25, 25};
    const std::vector<double> p{0.25, 0.25, 0.25, 0.25};
    const auto fit = chi_square_gof(obs, p);
    CHECK(fit.statistic == 0.0);
    CHECK(fit.dof == 3);
    CHECK(fit.p_value == doctest::Approx(1.0));
    // chi2 = 8 on 3 dof
    const std::vector<std::uint64_t> off{35, 15, 25, 25};
    const auto bad = chi_square_gof(off, p);
    CHECK(bad.statistic == doctest::Approx(8.0));
    CHECK(bad.p_value == doctest::Approx(0.04601170568).epsilon(1e-8));
    // sparse categories are pooled
    const std::vector<std::uint64_t> sparse{1, 0, 49, 50};
    const std::vector<double> ps{0.01, 0.01, 0.48, 0.5};
    CHECK(chi_square_gof(sparse, ps).dof == 1);
    CHECK_THROWS_AS((void)chi_square_gof(obs, {0.5, 0.5}), std::invalid_argument);
}

TEST_CASE("randomized rule simulation is unbiased per branch") {
    const auto r = randomized_stop_design(1, 1, 0.5);
    const auto sim = simulate(config_for(r, 1.0, 200000, 8));
    const auto cmp = empirical_vs_bound(sim, unconditional_mse_bound(r, 1.0));
    CHECK_FALSE(cmp.any_flagged());
    CHECK(std::abs(sim.per_decision[0].count / 200000.0 - 0.5) < 4 * std::sqrt(0.25 / 200000));
}
