#include "seqinfo/verify.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>

#include "seqinfo/bounds.hpp"
#include "seqinfo/density.hpp"
#include "seqinfo/information.hpp"
#include "seqinfo/montecarlo.hpp"
#include "seqinfo/truncnorm.hpp"

namespace seqinfo {

namespace oracle {

namespace {

QuadratureSettings relative_settings() {
    QuadratureSettings s;
    s.abs_tol = 1e-300;
    s.rel_tol = 1e-12;
    s.max_subdivisions = 2000;
    return s;
}

std::vector<double> probe_points(double mu, double sigma, Interval region) {
    std::vector<double> pts{mu - sigma, mu, mu + sigma};
    for (double k : {1e-3, 1e-2, 0.1, 0.5, 1.0, 3.0}) {
        if (std::isfinite(region.lo)) pts.push_back(region.lo + k * sigma);
        if (std::isfinite(region.hi)) pts.push_back(region.hi - k * sigma);
    }
    return pts;
}

}  // namespace

Moments truncated_moments(double mu, double sigma, Interval region) {
    const auto pts = probe_points(mu, sigma, region);
    const auto settings = relative_settings();
    auto pdf = [&](double t) { return std_normal_pdf((t - mu) / sigma) / sigma; };
    const double m0 = integrate(pdf, region, settings, pts).value;
    // First moment about mu changes sign, so it needs an absolute floor.
    QuadratureSettings centred = settings;
    centred.abs_tol = 1e-14 * sigma * m0;
    const double m1 =
        mu + integrate([&](double t) { return (t - mu) * pdf(t); }, region, centred, pts).value / m0;
    const double m2 =
        integrate([&](double t) { return (t - m1) * (t - m1) * pdf(t); }, region, settings, pts).value / m0;
    return Moments{m0, m1, m2};
}

double score_variance(const TwoStageDesign& design, double theta, std::size_t d) {
    const double p = decision_probabilities(design, theta)[d];
    const double dp = decision_prob_dtheta(design, theta, d);
    const double s1 = design.stage1_sd();
    const Interval region = design.informative() ? design.stage1_region(d) : Interval{};
    auto integrand = [&](double y) {
        const double score = (y - theta) / (s1 * s1) - dp / p;
        return score * score * conditional_density_given_D(design, theta, d, y);
    };
    return integrate(integrand, region, relative_settings(), probe_points(theta, s1, region)).value;
}

}  // namespace oracle

TwoStageDesign random_design(std::mt19937_64& rng, int max_cells, int max_n1) {
    std::uniform_int_distribution<int> k_dist(1, max_cells);
    std::uniform_int_distribution<int> n1_dist(1, max_n1);
    std::uniform_int_distribution<int> n2_dist(1, 10);
    std::uniform_real_distribution<double> cut_dist(-3.0, 3.0);
    std::uniform_real_distribution<double> sigma_dist(0.5, 2.0);
    std::bernoulli_distribution stop_dist(0.4);

    const int k = k_dist(rng);
    std::vector<double> cuts;
    for (int i = 0; i + 1 < k; ++i) cuts.push_back(cut_dist(rng));
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
    cuts.insert(cuts.begin(), -kInf);
    cuts.push_back(kInf);

    std::vector<DecisionCell> cells;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        const CellAction action = stop_dist(rng) ? CellAction::stop() : CellAction::proceed(n2_dist(rng));
        cells.push_back(DecisionCell{Interval{cuts[i], cuts[i + 1]}, action});
    }
    std::shuffle(cells.begin(), cells.end(), rng);
    const int n1 = n1_dist(rng);
    const double sigma = sigma_dist(rng);
    return TwoStageDesign(n1, sigma, DecisionRule(std::move(cells)));
}

namespace {

struct Check {
    std::string name;
    double tolerance;
    std::function<double()> max_error;
};

double max_abs(double a, double b) { return std::max(a, std::abs(b)); }

std::vector<Check> build_checks(const VerifyOptions& opt) {
    const int n_random = opt.quick ? 40 : 200;
    std::vector<Check> checks;

    checks.push_back({"normal cdf symmetry Phi(x)+Phi(-x)=1", 1e-14, [] {
                          double e = 0.0;
                          for (double x = -8.0; x <= 8.0; x += 0.01)
                              e = max_abs(e, std_normal_cdf(x) + std_normal_cdf(-x) - 1.0);
                          return e;
                      }});
    checks.push_back({"central difference of Phi matches phi", 1e-8, [] {
                          double e = 0.0;
                          for (double x = -8.0; x <= 8.0; x += 0.05)
                              e = max_abs(e, central_diff(std_normal_cdf, x) - std_normal_pdf(x));
                          return e;
                      }});
    checks.push_back({"hazard exceeds x with shrinking gap", 0.0, [] {
                          double violations = 0.0;
                          double prev_gap = kInf;
                          for (int x = 0; x <= 8; ++x) {
                              const double gap = hazard_upper(x) - x;
                              if (!(gap > 0.0) || !(gap < prev_gap)) violations += 1.0;
                              prev_gap = gap;
                          }
                          return violations;
                      }});
    checks.push_back({"quadrature normalizes phi on the real line", 1e-10, [] {
                          return std::abs(integrate(std_normal_pdf, Interval{}).value - 1.0);
                      }});
    checks.push_back({"truncated mean/variance match quadrature", 1e-8, [n_random] {
                          std::mt19937_64 rng(11);
                          std::uniform_real_distribution<double> u(-3.0, 3.0);
                          std::uniform_real_distribution<double> s(0.3, 2.0);
                          double e = 0.0;
                          for (int i = 0; i < n_random; ++i) {
                              const double mu = u(rng);
                              const double sigma = s(rng);
                              double a = u(rng);
                              double b = u(rng);
                              if (a > b) std::swap(a, b);
                              if (i % 3 == 0) a = -kInf;
                              if (i % 3 == 1) b = kInf;
                              if (b - a < 0.05) b = a + 0.05;
                              const TruncatedNormal tn(mu, sigma, Interval{a, b});
                              const auto q = oracle::truncated_moments(mu, sigma, Interval{a, b});
                              e = max_abs(e, trunc_mean(tn) - q.mean);
                              e = max_abs(e, trunc_var(tn) - q.var);
                          }
                          return e;
                      }});
    checks.push_back({"d/dmu truncated mean matches central difference", 1e-6, [n_random] {
                          std::mt19937_64 rng(12);
                          std::uniform_real_distribution<double> u(-3.0, 3.0);
                          double e = 0.0;
                          for (int i = 0; i < n_random; ++i) {
                              const double mu = u(rng);
                              const Interval region{u(rng), kInf};
                              auto mean_at = [&](double m) { return trunc_mean(TruncatedNormal(m, 1.0, region)); };
                              e = max_abs(e, trunc_mean_dmu(TruncatedNormal(mu, 1.0, region)) -
                                                 central_diff(mean_at, mu));
                          }
                          return e;
                      }});
    checks.push_back({"decision probabilities sum to one", 1e-12, [n_random] {
                          std::mt19937_64 rng(13);
                          std::uniform_real_distribution<double> th(-10.0, 10.0);
                          double e = 0.0;
                          for (int i = 0; i < n_random; ++i) {
                              const auto design = random_design(rng);
                              const auto p = decision_probabilities(design, th(rng));
                              double sum = 0.0;
                              for (double v : p.p) sum += v;
                              e = max_abs(e, sum - 1.0);
                          }
                          return e;
                      }});
    checks.push_back({"dP/dtheta matches central difference", 1e-8, [n_random] {
                          std::mt19937_64 rng(14);
                          std::uniform_real_distribution<double> th(-3.0, 3.0);
                          double e = 0.0;
                          for (int i = 0; i < n_random; ++i) {
                              const auto design = random_design(rng);
                              const double theta = th(rng);
                              for (std::size_t d = 1; d <= design.decisions(); ++d) {
                                  auto p = [&](double t) { return decision_probabilities(design, t)[d]; };
                                  e = max_abs(e, decision_prob_dtheta(design, theta, d) - central_diff(p, theta));
                              }
                          }
                          return e;
                      }});
    checks.push_back({"information decomposition identity", 1e-8, [n_random, fault = opt.inject_fault] {
                          std::mt19937_64 rng(15);
                          std::uniform_real_distribution<double> th(-5.0, 5.0);
                          double e = 0.0;
                          for (int i = 0; i < n_random; ++i) {
                              const auto design = random_design(rng);
                              e = max_abs(e, info_breakdown(design, th(rng)).decomposition_residual());
                          }
                          return fault ? e + 1.0 : e;
                      }});
    checks.push_back({"stage-1 information identity n1/sigma^2 = I_D + I_X1|D", 1e-8, [n_random] {
                          std::mt19937_64 rng(16);
                          std::uniform_real_distribution<double> th(-5.0, 5.0);
                          double e = 0.0;
                          for (int i = 0; i < n_random; ++i) {
                              const auto design = random_design(rng);
                              const double theta = th(rng);
                              const double full = design.n1() / (design.sigma() * design.sigma());
                              e = max_abs(e, full - design_information(design, theta) -
                                                 cond_info_stage1_on_D(design, theta));
                          }
                          return e;
                      }});
    checks.push_back({"total information equals 1 + Phi(c1 - theta)", 1e-10, [] {
                          double e = 0.0;
                          for (double c1 : {1.96, 2.78}) {
                              const auto design = gsd_design(1, 1, c1);
                              for (double t = -2.0; t <= 6.0; t += 0.01)
                                  e = max_abs(e, total_information(design, t) - 1.0 - std_normal_cdf(c1 - t));
                          }
                          return e;
                      }});
    checks.push_back({"stage-1 information matches score-variance quadrature", 1e-7, [opt] {
                          std::mt19937_64 rng(17);
                          std::uniform_real_distribution<double> th(-5.0, 5.0);
                          double e = 0.0;
                          const int n = opt.quick ? 20 : 100;
                          for (int i = 0; i < n; ++i) {
                              const auto design = random_design(rng);
                              const double theta = th(rng);
                              const auto p = decision_probabilities(design, theta);
                              for (std::size_t d = 1; d <= design.decisions(); ++d) {
                                  if (p[d] < kNegligibleProbability) continue;
                                  e = max_abs(e, cond_info_stage1(design, theta, d) -
                                                     oracle::score_variance(design, theta, d));
                              }
                          }
                          return e;
                      }});
    checks.push_back({"bias derivative matches central difference", 1e-6, [n_random] {
                          std::mt19937_64 rng(18);
                          std::uniform_real_distribution<double> th(-3.0, 3.0);
                          double e = 0.0;
                          for (int i = 0; i < n_random; ++i) {
                              const auto design = random_design(rng);
                              const double theta = th(rng);
                              const auto p = decision_probabilities(design, theta);
                              for (std::size_t d = 1; d <= design.decisions(); ++d) {
                                  if (p[d] < 1e-6) continue;
                                  auto b = [&](double t) { return cond_bias(design, t, d); };
                                  e = max_abs(e, cond_bias_dtheta(design, theta, d) - central_diff(b, theta));
                              }
                          }
                          return e;
                      }});
    checks.push_back({"published information table values", 5e-4, [] {
                          const auto design = gsd_design(1, 1, 1.96);
                          const auto a = info_breakdown(design, 1.96);
                          const auto b = info_breakdown(design, 0.0);
                          const std::array<std::pair<double, double>, 11> pairs{{
                              {a.per_decision[0].info_stage1, 0.3634},
                              {a.per_decision[1].info_stage1, 0.3634},
                              {a.design_info, 0.6366},
                              {a.per_decision[1].info_total_given_d, 1.3634},
                              {a.cond_on_D, 0.8634},
                              {a.total, 1.5},
                              {b.per_decision[1].info_stage1, 0.8789},
                              {b.stage1_on_D, 0.8598},
                              {b.design_info, 0.1402},
                              {b.cond_on_D, 1.8349},
                              {b.total, 1.975},
                          }};
                          double e = 0.0;
                          for (const auto& [got, want] : pairs) e = max_abs(e, got - want);
                          return e;
                      }});
    checks.push_back({"published bias and MSE bound table values", 5e-4, [] {
                          const auto design = gsd_design(1, 1, 1.96);
                          const std::array<std::array<double, 5>, 4> rows{{
                              {1.96, 1, 0.7979, -0.6366, 1.0},
                              {1.96, 2, -0.3989, -0.3183, 0.5},
                              {0.0, 1, 2.3378, -0.8833, 5.5821},
                              {0.0, 2, -0.0300, -0.0605, 0.4706},
                          }};
                          double e = 0.0;
                          for (const auto& r : rows) {
                              const auto d = static_cast<std::size_t>(r[1]);
                              e = max_abs(e, cond_bias(design, r[0], d) - r[2]);
                              e = max_abs(e, cond_bias_dtheta(design, r[0], d) - r[3]);
                              e = max_abs(e, cond_mse_bound(design, r[0], d) - r[4]);
                          }
                          return e;
                      }});
    checks.push_back({"MLE densities integrate to one", 1e-8, [] {
                          const auto design = gsd_design(1, 1, 1.96);
                          double e = 0.0;
                          for (double theta : {0.0, 1.96}) {
                              const double bp[] = {theta};
                              e = max_abs(e, integrate([&](double t) { return mle_density_given_stop(design, theta, t); },
                                                       Interval{1.96, kInf}, {}, bp)
                                                     .value -
                                                 1.0);
                              e = max_abs(
                                  e, integrate([&](double t) { return mle_density_given_continue(design, theta, t); },
                                               Interval{}, {}, bp)
                                             .value -
                                         1.0);
                          }
                          return e;
                      }});
    checks.push_back({"Monte Carlo MSE attains the conditional bounds (max |z|)", 3.0, [opt] {
                          const auto design = gsd_design(1, 1, 1.96);
                          const std::vector<double> thetas =
                              opt.quick ? std::vector<double>{1.96} : std::vector<double>{0.0, 1.0, 1.96, 3.0};
                          double worst = 0.0;
                          for (double theta : thetas) {
                              SimConfig cfg{design, theta, opt.quick ? 100000u : 1000000u, 20240611u,
                                            std::nullopt, 0, {}};
                              const auto cmp = empirical_vs_bound(simulate(cfg), unconditional_mse_bound(design, theta));
                              for (const auto& row : cmp.rows) {
                                  if (row.small_sample) continue;
                                  worst = std::max({worst, std::abs(row.z_bias), std::abs(row.z_mse)});
                              }
                          }
                          return worst;
                      }});
    checks.push_back({"simulation independent of worker count", 0.0, [] {
                          const auto design = gsd_design(2, 3, 1.5);
                          SimConfig cfg{design, 0.7, 50000u, 99u, HistogramSpec{}, 1, {}};
                          const auto serial = simulate(cfg);
                          cfg.workers = 5;
                          const auto parallel = simulate(cfg);
                          double diffs = 0.0;
                          for (std::size_t d = 0; d < serial.per_decision.size(); ++d) {
                              const auto& a = serial.per_decision[d];
                              const auto& b = parallel.per_decision[d];
                              if (a.count != b.count || a.bias != b.bias || a.mse != b.mse || a.se_mse != b.se_mse)
                                  diffs += 1.0;
                              if ((*serial.histograms)[d].counts != (*parallel.histograms)[d].counts) diffs += 1.0;
                          }
                          return diffs;
                      }});
    return checks;
}

}  // namespace

std::vector<CheckResult> run_verification(const VerifyOptions& options) {
    std::vector<CheckResult> out;
    for (const auto& check : build_checks(options)) {
        CheckResult r;
        r.name = check.name;
        r.tolerance = check.tolerance;
        try {
            r.max_error = check.max_error();
            r.passed = std::isfinite(r.max_error) && r.max_error <= check.tolerance;
        } catch (const std::exception& e) {
            r.name += std::string(" [threw: ") + e.what() + "]";
            r.max_error = std::numeric_limits<double>::infinity();
            r.passed = false;
        }
        out.push_back(std::move(r));
    }
    return out;
}

}  // namespace seqinfo
