#include "seqinfo/montecarlo.hpp"

#include <algorithm>
#include <atomic>
#include <boost/math/special_functions/gamma.hpp>
#include <cstdio>
#include <limits>
#include <ostream>
#include <thread>

#include "seqinfo/errors.hpp"
#include "seqinfo/information.hpp"
#include "seqinfo/philox.hpp"

namespace seqinfo {

namespace {

constexpr std::uint64_t kBlockSize = 8192;

struct Draw {
    std::size_t decision;
    double z1;
    Outcome outcome;
};

Draw run_replication(const TwoStageDesign& design, double theta, std::uint64_t seed, std::uint64_t rep) {
    NormalStream rng = normal_sampler(seed, rep);
    const double sigma = design.sigma();
    double sum1 = 0.0;
    for (int i = 0; i < design.n1(); ++i) sum1 += theta + sigma * rng.next();
    const double n1 = design.n1();
    const double mean1 = sum1 / n1;
    const double z1 = std::sqrt(n1) * mean1 / sigma;
    const double statistic = design.informative() ? z1 : rng.next();
    const std::size_t d = design.rule().locate(statistic);

    Outcome o;
    o.decision = d;
    o.stage1_mean = mean1;
    const int n2 = stage2_size(design, d);
    if (n2 == 0) {
        o.mle = mean1;
    } else {
        double sum2 = 0.0;
        for (int i = 0; i < n2; ++i) sum2 += theta + sigma * rng.next();
        o.stage2_mean = sum2 / n2;
        o.mle = (sum1 + sum2) / (n1 + n2);
    }
    return Draw{d, z1, o};
}

struct Sums {
    std::uint64_t count = 0;
    double est = 0.0;
    double e1 = 0.0;
    double e2 = 0.0;
    double e3 = 0.0;
    double e4 = 0.0;
    double e6 = 0.0;

    void add(double estimate, double err) noexcept {
        ++count;
        est += estimate;
        e1 += err;
        const double sq = err * err;
        e2 += sq;
        e3 += sq * err;
        e4 += sq * sq;
        e6 += sq * sq * sq;
    }
    void merge(const Sums& o) noexcept {
        count += o.count;
        est += o.est;
        e1 += o.e1;
        e2 += o.e2;
        e3 += o.e3;
        e4 += o.e4;
        e6 += o.e6;
    }
};

struct Tally {
    std::vector<Sums> branches;
    std::vector<Histogram> histograms;
};

Tally empty_tally(const SimConfig& config) {
    Tally t;
    t.branches.resize(config.design.decisions());
    if (config.histogram) {
        for (std::size_t d = 0; d < config.design.decisions(); ++d) {
            Histogram h;
            h.spec = *config.histogram;
            h.counts.assign(static_cast<std::size_t>(h.spec.bins), 0);
            t.histograms.push_back(std::move(h));
        }
    }
    return t;
}

void merge_into(Tally& into, const Tally& from) {
    for (std::size_t d = 0; d < into.branches.size(); ++d) into.branches[d].merge(from.branches[d]);
    for (std::size_t d = 0; d < into.histograms.size(); ++d) {
        auto& h = into.histograms[d];
        const auto& g = from.histograms[d];
        for (std::size_t b = 0; b < h.counts.size(); ++b) h.counts[b] += g.counts[b];
        h.underflow += g.underflow;
        h.overflow += g.overflow;
    }
}

void bin_value(Histogram& h, double x) {
    if (x < h.spec.lo) {
        ++h.underflow;
    } else if (x >= h.spec.hi) {
        ++h.overflow;
    } else {
        const double width = (h.spec.hi - h.spec.lo) / h.spec.bins;
        auto b = static_cast<std::size_t>((x - h.spec.lo) / width);
        b = std::min(b, static_cast<std::size_t>(h.spec.bins - 1));
        ++h.counts[b];
    }
}

BranchStats finish(const Sums& s) {
    BranchStats out;
    out.count = s.count;
    if (s.count == 0) {
        const double nan = std::numeric_limits<double>::quiet_NaN();
        out.mean_estimate = out.bias = out.mse = out.se_bias = out.se_mse = nan;
        out.skew_error = out.skew_sq_error = nan;
        return out;
    }
    const double n = static_cast<double>(s.count);
    out.mean_estimate = s.est / n;
    out.bias = s.e1 / n;
    out.mse = s.e2 / n;
    if (s.count > 1) {
        const double var_e = std::max(0.0, (s.e2 - n * out.bias * out.bias) / (n - 1.0));
        const double var_e2 = std::max(0.0, (s.e4 - n * out.mse * out.mse) / (n - 1.0));
        out.se_bias = std::sqrt(var_e / n);
        out.se_mse = std::sqrt(var_e2 / n);
        // third central moments from raw power sums
        const double m = out.bias;
        const double q = out.mse;
        const double mu3_e = s.e3 / n - 3.0 * m * q + 2.0 * m * m * m;
        const double mu3_e2 = s.e6 / n - 3.0 * q * (s.e4 / n) + 2.0 * q * q * q;
        out.skew_error = var_e > 0.0 ? mu3_e / std::pow(var_e, 1.5) : 0.0;
        out.skew_sq_error = var_e2 > 0.0 ? mu3_e2 / std::pow(var_e2, 1.5) : 0.0;
    }
    return out;
}

void validate(const SimConfig& config) {
    if (config.replications < 1) throw std::invalid_argument("replications must be >= 1");
    if (!std::isfinite(config.theta)) throw std::invalid_argument("theta must be finite");
    if (config.histogram) {
        const auto& h = *config.histogram;
        if (h.bins < 1 || !(h.lo < h.hi)) throw std::invalid_argument("histogram needs bins >= 1 and lo < hi");
    }
}

}  // namespace

std::vector<std::uint64_t> Histogram::categories() const {
    std::vector<std::uint64_t> out;
    out.reserve(counts.size() + 2);
    out.push_back(underflow);
    out.insert(out.end(), counts.begin(), counts.end());
    out.push_back(overflow);
    return out;
}

SimResult simulate(const SimConfig& config) {
    validate(config);
    const std::uint64_t blocks = (config.replications + kBlockSize - 1) / kBlockSize;
    std::vector<Tally> partial(blocks);

    auto run_block = [&](std::uint64_t b) {
        Tally t = empty_tally(config);
        const std::uint64_t begin = b * kBlockSize;
        const std::uint64_t end = std::min(config.replications, begin + kBlockSize);
        for (std::uint64_t r = begin; r < end; ++r) {
            const Draw draw = run_replication(config.design, config.theta, config.seed, r);
            const double est = config.estimator ? config.estimator(draw.outcome) : draw.outcome.mle;
            t.branches[draw.decision - 1].add(est, est - config.theta);
            if (!t.histograms.empty()) bin_value(t.histograms[draw.decision - 1], est);
        }
        partial[b] = std::move(t);
    };

    unsigned workers = config.workers != 0 ? config.workers : std::max(1u, std::thread::hardware_concurrency());
    workers = static_cast<unsigned>(std::min<std::uint64_t>(workers, blocks));
    if (workers <= 1) {
        for (std::uint64_t b = 0; b < blocks; ++b) run_block(b);
    } else {
        std::atomic<std::uint64_t> next{0};
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (unsigned w = 0; w < workers; ++w) {
            pool.emplace_back([&] {
                for (std::uint64_t b = next.fetch_add(1); b < blocks; b = next.fetch_add(1)) run_block(b);
            });
        }
        for (auto& th : pool) th.join();
    }

    Tally total = empty_tally(config);
    for (const auto& t : partial) merge_into(total, t);

    SimResult result{config.design, config.theta, config.replications, config.seed, {}, {}, std::nullopt};
    Sums all;
    for (const auto& s : total.branches) {
        result.per_decision.push_back(finish(s));
        all.merge(s);
    }
    result.overall = finish(all);
    if (config.histogram) result.histograms = std::move(total.histograms);
    return result;
}

void write_outcome_csv(const SimConfig& config, std::ostream& out) {
    validate(config);
    out << "rep,decision,z1,mle\n";
    char buf[96];
    for (std::uint64_t r = 0; r < config.replications; ++r) {
        const Draw draw = run_replication(config.design, config.theta, config.seed, r);
        const double est = config.estimator ? config.estimator(draw.outcome) : draw.outcome.mle;
        std::snprintf(buf, sizeof buf, "%llu,%zu,%.17g,%.17g\n", static_cast<unsigned long long>(r),
                      draw.decision, draw.z1, est);
        out << buf;
    }
}

bool BoundComparison::any_flagged() const noexcept {
    return std::any_of(rows.begin(), rows.end(), [](const ComparisonRow& r) { return r.flagged; });
}

double skew_corrected_z(double diff, double se, double skew, std::uint64_t count) {
    if (!(se > 0.0)) return std::numeric_limits<double>::quiet_NaN();
    const double t = diff / se;
    const double g = skew / std::sqrt(static_cast<double>(count));
    return t + g * t * t / 3.0 + g * g * t * t * t / 27.0 + g / 6.0;
}

BoundComparison empirical_vs_bound(const SimResult& result, const MseBoundReport& report) {
    if (!(result.design == report.design) || result.theta != report.theta) {
        throw MismatchedInputs("simulation and bound report describe different designs or theta");
    }
    BoundComparison cmp;
    auto make_row = [](std::string label, const BranchStats& s, double ref_bias, double bound) {
        ComparisonRow row;
        row.label = std::move(label);
        row.count = s.count;
        row.empirical_bias = s.bias;
        row.reference_bias = ref_bias;
        row.empirical_mse = s.mse;
        row.bound = bound;
        row.small_sample = s.count < kMinBranchHits || std::isnan(ref_bias);
        row.z_bias = skew_corrected_z(s.bias - ref_bias, s.se_bias, s.skew_error, s.count);
        row.z_mse = skew_corrected_z(s.mse - bound, s.se_mse, s.skew_sq_error, s.count);
        row.flagged = !row.small_sample && (std::abs(row.z_bias) > 3.0 || std::abs(row.z_mse) > 3.0);
        return row;
    };
    double overall_bias = 0.0;
    for (std::size_t d = 0; d < result.per_decision.size(); ++d) {
        const DecisionBound& b = report.per_decision[d];
        if (!b.excluded) overall_bias += b.prob * b.bias;
        cmp.rows.push_back(make_row("d=" + std::to_string(d + 1), result.per_decision[d],
                                    b.excluded ? std::numeric_limits<double>::quiet_NaN() : b.bias,
                                    b.excluded ? std::numeric_limits<double>::quiet_NaN() : b.cond_bound));
    }
    cmp.rows.push_back(make_row("overall", result.overall, overall_bias, report.unconditional_bound));
    return cmp;
}

std::vector<double> histogram_reference_probabilities(const TwoStageDesign& design, double theta, std::size_t d,
                                                      const HistogramSpec& spec) {
    // Support of the estimator given d: the cell on the stage-1 scale for
    // stopping cells, the whole line otherwise.
    Interval support{};
    if (stage2_size(design, d) == 0 && design.informative()) support = design.stage1_region(d);

    std::vector<double> edges{-kInf};
    for (int b = 0; b <= spec.bins; ++b) edges.push_back(spec.lo + (spec.hi - spec.lo) * b / spec.bins);
    edges.push_back(kInf);

    QuadratureSettings outer;
    outer.abs_tol = 1e-9;
    outer.rel_tol = 1e-9;
    outer.max_subdivisions = 200;
    std::vector<double> probs;
    probs.reserve(edges.size() - 1);
    for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
        const double lo = std::max(edges[i], support.lo);
        const double hi = std::min(edges[i + 1], support.hi);
        if (!(lo < hi)) {
            probs.push_back(0.0);
            continue;
        }
        const double bp[] = {theta};
        probs.push_back(integrate([&](double t) { return mle_density_given_decision(design, theta, d, t); },
                                  Interval{lo, hi}, outer, bp)
                            .value);
    }
    return probs;
}

ChiSquareResult chi_square_gof(const std::vector<std::uint64_t>& observed, const std::vector<double>& probabilities) {
    if (observed.size() != probabilities.size() || observed.empty()) {
        throw std::invalid_argument("chi_square_gof: observed and probabilities differ in length");
    }
    double n = 0.0;
    for (auto c : observed) n += static_cast<double>(c);

    std::vector<double> obs;
    std::vector<double> exp;
    double acc_o = 0.0;
    double acc_e = 0.0;
    for (std::size_t i = 0; i < observed.size(); ++i) {
        acc_o += static_cast<double>(observed[i]);
        acc_e += n * probabilities[i];
        if (acc_e >= 5.0) {
            obs.push_back(acc_o);
            exp.push_back(acc_e);
            acc_o = acc_e = 0.0;
        }
    }
    if (acc_e > 0.0 || acc_o > 0.0) {
        if (exp.empty()) {
            obs.push_back(acc_o);
            exp.push_back(acc_e);
        } else {
            obs.back() += acc_o;
            exp.back() += acc_e;
        }
    }
    ChiSquareResult out;
    for (std::size_t i = 0; i < obs.size(); ++i) {
        const double diff = obs[i] - exp[i];
        out.statistic += diff * diff / exp[i];
    }
    out.dof = static_cast<int>(obs.size()) - 1;
    out.p_value = out.dof > 0 ? boost::math::gamma_q(0.5 * out.dof, 0.5 * out.statistic) : 1.0;
    return out;
}

}  // namespace seqinfo
