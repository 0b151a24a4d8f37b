#include <doctest.h>

#include <cmath>
#include <random>

#include "seqinfo/errors.hpp"
#include "seqinfo/truncnorm.hpp"
#include "seqinfo/verify.hpp"

using namespace seqinfo;

TEST_CASE("mass examples") {
    CHECK(mass(TruncatedNormal(1.96, 1.0, {1.96, kInf})) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(mass(TruncatedNormal(0.0, 1.0, {1.96, kInf})) == doctest::Approx(0.025).epsilon(1e-3));
    CHECK(mass(TruncatedNormal(-3.0, 2.5, {})) == 1.0);
}

TEST_CASE("truncated mean examples") {
    CHECK(trunc_mean(TruncatedNormal(0.0, 1.0, {1.96, kInf})) == doctest::Approx(2.3378).epsilon(5e-5 / 2.3378));
    CHECK(trunc_mean(TruncatedNormal(0.7, 1.3, {-0.3, 1.7})) == doctest::Approx(0.7).epsilon(1e-14));
    const TruncatedNormal lower(1.96, 1.0, {-kInf, 1.96});
    const auto ref = oracle::truncated_moments(1.96, 1.0, {-kInf, 1.96});
    CHECK(trunc_mean(lower) == doctest::Approx(ref.mean).epsilon(1e-10));
    CHECK(trunc_mean(lower) == doctest::Approx(1.96 - 0.7979).epsilon(1e-4));
}

TEST_CASE("truncated variance and information examples") {
    CHECK(trunc_var(TruncatedNormal(1.96, 1.0, {-kInf, 1.96})) == doctest::Approx(0.3634).epsilon(5e-4));
    CHECK(trunc_var(TruncatedNormal(2.0, 3.0, {})) == doctest::Approx(9.0).epsilon(1e-15));
    CHECK(trunc_var(TruncatedNormal(0.0, 1.0, {-kInf, 1.96})) == doctest::Approx(0.8789).epsilon(5e-4));

    const double upper_fi = trunc_fisher_info(TruncatedNormal(0.0, 1.0, {1.96, kInf}));
    // closed form gives 0.11668; the published table rounds to 0.1167
    CHECK(std::abs(upper_fi - 0.1167) < 1e-3);
    CHECK(upper_fi == doctest::Approx(0.116685).epsilon(1e-5));
    CHECK(trunc_fisher_info(TruncatedNormal(4.0, 1.0, {})) == 1.0);
    CHECK(trunc_fisher_info(TruncatedNormal(0.0, 1.0, {-kInf, 1.96})) == doctest::Approx(0.8789).epsilon(5e-4));
    CHECK(trunc_fisher_info(TruncatedNormal(0.0, 2.0, {})) == doctest::Approx(0.25));
}

TEST_CASE("derivative of the truncated mean") {
    const TruncatedNormal at_c(1.96, 1.0, {1.96, kInf});
    CHECK(trunc_mean_dmu(at_c) - 1.0 == doctest::Approx(-0.6366).epsilon(5e-4));
    CHECK(trunc_mean_dmu(TruncatedNormal(1.0, 1.0, {})) == 1.0);
    CHECK(trunc_mean_dmu(TruncatedNormal(0.0, 1.0, {1.96, kInf})) - 1.0 == doctest::Approx(-0.8833).epsilon(5e-4));
}

TEST_CASE("degenerate truncation is rejected") {
    CHECK_THROWS_AS(TruncatedNormal(0.0, 1.0, {40.0, kInf}), DegenerateTruncation);
    CHECK_THROWS_AS(TruncatedNormal(0.0, 1.0, {-kInf, -40.0}), DegenerateTruncation);
    CHECK_THROWS_AS(TruncatedNormal(0.0, 0.0, {}), std::invalid_argument);
    CHECK_THROWS_AS(TruncatedNormal(0.0, 1.0, {1.0, 1.0}), std::invalid_argument);
    // still representable far in the tail
    const TruncatedNormal deep(0.0, 1.0, {30.0, kInf});
    CHECK(deep.mass() > 0.0);
    CHECK(trunc_mean(deep) > 30.0);
    CHECK(trunc_var(deep) > 0.0);
    CHECK(trunc_var(deep) < 1.0 / 900.0);
}

TEST_CASE("random triples: information equals variance, closed forms match quadrature") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> mu_d(-4.0, 4.0);
    std::uniform_real_distribution<double> edge(-5.0, 5.0);
    std::uniform_real_distribution<double> shape(0.0, 1.0);
    for (int trial = 0; trial < 100; ++trial) {
        const double mu = mu_d(rng);
        double a = edge(rng), b = edge(rng);
        if (a > b) std::swap(a, b);
        if (b - a < 0.05) b = a + 0.05;
        const double kind = shape(rng);
        if (kind < 0.25) a = -kInf;
        else if (kind < 0.5) b = kInf;
        const TruncatedNormal tn(mu, 1.0, {a, b});
        CHECK(trunc_fisher_info(tn) == trunc_var(tn));

        const double sigma = 0.5 + 2.0 * shape(rng);
        const TruncatedNormal scaled(mu, sigma, {a * sigma, b * sigma});
        const auto ref = oracle::truncated_moments(mu, sigma, scaled.region());
        CHECK(std::abs(trunc_mean(scaled) - ref.mean) < 1e-8);
        CHECK(std::abs(trunc_var(scaled) - ref.var) < 1e-8);
        CHECK(trunc_fisher_info(scaled) == doctest::Approx(trunc_var(scaled) / std::pow(sigma, 4)).epsilon(1e-13));

        const double h = default_diff_step(mu);
        const Interval r = scaled.region();
        const double fd = central_diff([&](double m) { return trunc_mean(TruncatedNormal(m, sigma, r)); }, mu, h);
        CHECK(std::abs(trunc_mean_dmu(scaled) - fd) < 1e-6);
    }
}

TEST_CASE("complementary halves and the law of total variance") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-4.0, 4.0);
    for (int trial = 0; trial < 50; ++trial) {
        const double mu = u(rng);
        const double sigma = 0.5 + std::abs(u(rng));
        const double c = u(rng);
        const TruncatedNormal lo(mu, sigma, {-kInf, c});
        const TruncatedNormal hi(mu, sigma, {c, kInf});
        CHECK(std::abs(lo.mass() + hi.mass() - 1.0) < 1e-14);
        const double within = lo.mass() * trunc_var(lo) + hi.mass() * trunc_var(hi);
        const double between = lo.mass() * std::pow(trunc_mean(lo) - mu, 2) + hi.mass() * std::pow(trunc_mean(hi) - mu, 2);
        CHECK(std::abs(within + between - sigma * sigma) < 1e-10);
    }
}

TEST_CASE("std_trunc_moments in the far tails stays finite") {
    for (double a : {8.0, 20.0, 37.0}) {
        const auto m = std_trunc_moments(a, kInf);
        CHECK(m.mean > a);
        CHECK(m.var > 0.0);
        CHECK(m.var < 1.0 / (a * a));
        const auto mirror = std_trunc_moments(-kInf, -a);
        CHECK(mirror.mean == doctest::Approx(-m.mean).epsilon(1e-14));
        CHECK(mirror.var == doctest::Approx(m.var).epsilon(1e-12));
    }
    const auto narrow = std_trunc_moments(10.0, 10.001);
    CHECK(narrow.mean == doctest::Approx(10.0005).epsilon(1e-6));
    CHECK(narrow.var == doctest::Approx(1e-6 / 12.0).epsilon(1e-2));
}
