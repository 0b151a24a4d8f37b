#include "seqinfo/cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <optional>
#include <sstream>

#include "seqinfo/bounds.hpp"
#include "seqinfo/config.hpp"
#include "seqinfo/curves.hpp"
#include "seqinfo/errors.hpp"
#include "seqinfo/information.hpp"
#include "seqinfo/montecarlo.hpp"
#include "seqinfo/verify.hpp"

namespace seqinfo::cli {

namespace {

/// Raised for failures that map straight onto an exit code.
struct Exit {
    int code;
    std::string message;
};

enum class Format { Text, Csv };

struct Options {
    int n1 = 1;
    int n2 = 1;
    double sigma = 1.0;
    double c1 = 0.0;
    std::string design_file;
    double theta = 0.0;
    ThetaGrid grid;
    std::string format = "text";
    std::string out_path;
    std::string svg_path;
    std::string dump_path;
    std::uint64_t reps = 100000;
    std::uint64_t seed = 1;
    int bins = 0;
    unsigned workers = 0;
    bool quick = false;
    bool inject_fault = false;

    // Track which optional flags were supplied.
    CLI::Option* n1_opt = nullptr;
    CLI::Option* n2_opt = nullptr;
    CLI::Option* sigma_opt = nullptr;
    CLI::Option* c1_opt = nullptr;
    CLI::Option* design_opt = nullptr;
    CLI::Option* theta_opt = nullptr;
    CLI::Option* seed_opt = nullptr;
};

std::string fixed4(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.4f", v);
    // Avoid printing -0.0000.
    if (std::string_view(buf) == "-0.0000") return "0.0000";
    return buf;
}

std::string full(double v) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

Format parse_format(const std::string& f) {
    if (f == "text") return Format::Text;
    if (f == "csv") return Format::Csv;
    throw Exit{kInvalidInput, "--format must be text or csv"};
}

bool given(const CLI::Option* opt) { return opt != nullptr && opt->count() > 0; }

TwoStageDesign load_design(const Options& o) {
    const bool inline_flags = given(o.c1_opt) || given(o.n1_opt) || given(o.n2_opt) || given(o.sigma_opt);
    if (given(o.design_opt) && inline_flags) {
        throw Exit{kInvalidInput, "give either --design FILE or inline --c1/--n1/--n2/--sigma, not both"};
    }
    if (given(o.design_opt)) {
        std::ifstream in(o.design_file);
        if (!in) throw Exit{kIoFailure, "cannot read design file '" + o.design_file + "'"};
        return parse_design_config(in);
    }
    if (!given(o.c1_opt)) throw Exit{kInvalidInput, "no design given: pass --c1 (with --n1/--n2) or --design FILE"};
    return gsd_design(o.n1, o.n2, o.c1, o.sigma);
}

void require_theta(const Options& o) {
    if (!given(o.theta_opt)) throw Exit{kInvalidInput, "--theta is required"};
    if (!std::isfinite(o.theta)) throw Exit{kInvalidInput, "--theta must be finite"};
}

void emit(const Options& o, const std::string& text, std::ostream& out) {
    if (o.out_path.empty()) {
        out << text;
        return;
    }
    std::ofstream file(o.out_path, std::ios::binary);
    if (!file) throw Exit{kIoFailure, "cannot write '" + o.out_path + "'"};
    file << text;
    if (!file) throw Exit{kIoFailure, "write to '" + o.out_path + "' failed"};
}

std::string describe_design(const TwoStageDesign& design) {
    std::ostringstream s;
    s << "design: n1=" << design.n1() << " sigma=" << fixed4(design.sigma())
      << " basis=" << (design.informative() ? "z1" : "randomized") << "\n";
    for (std::size_t d = 1; d <= design.decisions(); ++d) {
        const auto& c = design.rule().cell(d);
        s << "  d=" << d << "  " << (c.action.stops() ? "stop    " : "continue") << "  ";
        if (!c.action.stops()) s << "n2=" << c.action.n2 << "  ";
        s << "[" << fixed4(c.region.lo) << ", " << fixed4(c.region.hi) << ")\n";
    }
    return s.str();
}

/// Two-column quantity/value table.
class QuantityTable {
   public:
    void add(std::string name, double value) { rows_.emplace_back(std::move(name), value); }

    [[nodiscard]] std::string render(Format f) const {
        std::ostringstream s;
        if (f == Format::Csv) {
            s << "quantity,value\n";
            for (const auto& [name, v] : rows_) s << name << ',' << full(v) << "\n";
        } else {
            std::size_t w = 8;
            for (const auto& r : rows_) w = std::max(w, r.first.size());
            for (const auto& [name, v] : rows_) s << name << std::string(w + 2 - name.size(), ' ') << fixed4(v) << "\n";
        }
        return s.str();
    }

   private:
    std::vector<std::pair<std::string, double>> rows_;
};

QuantityTable breakdown_table(const TwoStageDesign& design, double theta) {
    const InformationBreakdown b = info_breakdown(design, theta);
    QuantityTable t;
    const std::size_t k = b.per_decision.size();
    for (std::size_t d = 0; d < k; ++d) t.add("P(D=" + std::to_string(d + 1) + ")", b.per_decision[d].prob);
    for (std::size_t d = 0; d < k; ++d) t.add("I_X1|D=" + std::to_string(d + 1), b.per_decision[d].info_stage1);
    t.add("I_X1|D", b.stage1_on_D);
    t.add("I_D", b.design_info);
    for (std::size_t d = 0; d < k; ++d) t.add("I_XT|D=" + std::to_string(d + 1), b.per_decision[d].info_total_given_d);
    t.add("I_XT|D", b.cond_on_D);
    t.add("I_XT", b.total);
    return t;
}

QuantityTable bounds_table(const TwoStageDesign& design, double theta) {
    const MseBoundReport r = unconditional_mse_bound(design, theta);
    QuantityTable t;
    for (std::size_t d = 0; d < r.per_decision.size(); ++d) {
        const auto& row = r.per_decision[d];
        const std::string s = std::to_string(d + 1);
        t.add("P(D=" + s + ")", row.prob);
        t.add("E(est-theta|D=" + s + ")", row.bias);
        t.add("d/dtheta E(est-theta|D=" + s + ")", row.bias_dtheta);
        t.add("MSE bound|D=" + s, row.cond_bound);
    }
    t.add("MSE bound (unconditional)", r.unconditional_bound);
    return t;
}

std::string header(Format f, const std::string& title, const TwoStageDesign& design, double theta) {
    if (f == Format::Csv) return {};
    return "# " + title + "\n" + describe_design(design) + "theta = " + fixed4(theta) + "\n\n";
}

int cmd_breakdown(const Options& o, std::ostream& out) {
    require_theta(o);
    const Format f = parse_format(o.format);
    const TwoStageDesign design = load_design(o);
    emit(o, header(f, "information breakdown", design, o.theta) + breakdown_table(design, o.theta).render(f), out);
    return kSuccess;
}

int cmd_bounds(const Options& o, std::ostream& out) {
    require_theta(o);
    const Format f = parse_format(o.format);
    const TwoStageDesign design = load_design(o);
    emit(o, header(f, "conditional bias and MSE lower bounds", design, o.theta) +
                bounds_table(design, o.theta).render(f),
         out);
    return kSuccess;
}

int cmd_curves(const Options& o, std::ostream& out) {
    const Format f = parse_format(o.format);
    const TwoStageDesign design = load_design(o);
    std::vector<CurveRow> rows;
    try {
        rows = compute_curves(design, o.grid);
    } catch (const std::invalid_argument& e) {
        throw Exit{kInvalidInput, e.what()};
    }
    std::ostringstream s;
    if (f == Format::Csv) {
        write_curves_csv(s, rows);
    } else {
        const std::size_t k = design.decisions();
        s << "# information curves\n" << describe_design(design) << "\n";
        s << "   theta  I_total  I_design  I_cond_D";
        for (std::size_t d = 1; d <= k; ++d) s << "    P_" << d << "  I_XT|D=" << d << "  bound_" << d;
        s << "  uncond_bound\n";
        for (const auto& r : rows) {
            char buf[64];
            std::snprintf(buf, sizeof buf, "%8.4f %8.4f %9.4f %9.4f", r.theta, r.info_total, r.info_design,
                          r.info_cond_on_D);
            s << buf;
            for (const auto& d : r.per_decision) {
                s << ' ' << std::string(6 - std::min<std::size_t>(6, fixed4(d.prob).size()), ' ') << fixed4(d.prob);
                s << "  " << std::string(8 - std::min<std::size_t>(8, fixed4(d.info_total_given_d).size()), ' ')
                  << fixed4(d.info_total_given_d);
                s << "  " << std::string(7 - std::min<std::size_t>(7, fixed4(d.bound).size()), ' ') << fixed4(d.bound);
            }
            s << "  " << fixed4(r.uncond_bound) << "\n";
        }
    }
    if (!o.svg_path.empty()) {
        std::ofstream svg(o.svg_path);
        if (!svg) throw Exit{kIoFailure, "cannot write '" + o.svg_path + "'"};
        svg << render_curves_svg(rows, "Fisher information, " + std::to_string(design.decisions()) + "-decision design");
        if (!svg) throw Exit{kIoFailure, "write to '" + o.svg_path + "' failed"};
    }
    emit(o, s.str(), out);
    return kSuccess;
}

std::uint64_t default_seed(const Options& o) {
    if (given(o.seed_opt)) return o.seed;
    if (const char* env = std::getenv("SEQINFO_SEED")) {
        char* end = nullptr;
        const unsigned long long v = std::strtoull(env, &end, 10);
        if (end == env || *end != '\0') throw Exit{kInvalidInput, "SEQINFO_SEED must be an unsigned integer"};
        return v;
    }
    return 1;
}

int cmd_simulate(const Options& o, std::ostream& out) {
    require_theta(o);
    const Format f = parse_format(o.format);
    if (o.reps < 1) throw Exit{kInvalidInput, "--reps must be >= 1"};
    if (o.bins < 0) throw Exit{kInvalidInput, "--bins must be >= 0"};
    const TwoStageDesign design = load_design(o);
    SimConfig cfg{design, o.theta, o.reps, default_seed(o), std::nullopt, o.workers, {}};
    if (o.bins > 0) cfg.histogram = HistogramSpec{o.bins, -3.0, 3.0};

    const SimResult result = simulate(cfg);
    const MseBoundReport report = unconditional_mse_bound(design, o.theta);
    const BoundComparison cmp = empirical_vs_bound(result, report);

    std::ostringstream s;
    if (f == Format::Csv) {
        s << "label,count,freq,prob,bias,se_bias,ref_bias,z_bias,mse,se_mse,bound,z_mse,flag\n";
    } else {
        s << "# simulation  reps=" << result.replications << " seed=" << result.seed_used << "\n"
          << describe_design(design) << "theta = " << fixed4(o.theta) << "\n\n";
        s << "decision     count    freq  P(D=d)     bias  se_bias ref_bias   z_bias      mse   se_mse    bound    z_mse  flag\n";
    }
    for (std::size_t i = 0; i < cmp.rows.size(); ++i) {
        const auto& row = cmp.rows[i];
        const bool overall = i + 1 == cmp.rows.size();
        const BranchStats& st = overall ? result.overall : result.per_decision[i];
        const double prob = overall ? 1.0 : report.per_decision[i].prob;
        const double freq = static_cast<double>(st.count) / static_cast<double>(result.replications);
        const std::string flag = row.flagged ? "FLAG" : (row.small_sample ? "few" : "ok");
        if (f == Format::Csv) {
            s << row.label << ',' << row.count << ',' << full(freq) << ',' << full(prob) << ',' << full(st.bias) << ','
              << full(st.se_bias) << ',' << full(row.reference_bias) << ',' << full(row.z_bias) << ','
              << full(st.mse) << ',' << full(st.se_mse) << ',' << full(row.bound) << ',' << full(row.z_mse) << ','
              << flag << "\n";
        } else {
            char buf[256];
            std::snprintf(buf, sizeof buf, "%-8s %9llu %7s %7s %8s %8s %8s %8s %8s %8s %8s %8s  %s\n",
                          row.label.c_str(), static_cast<unsigned long long>(row.count), fixed4(freq).c_str(),
                          fixed4(prob).c_str(), fixed4(st.bias).c_str(), fixed4(st.se_bias).c_str(),
                          fixed4(row.reference_bias).c_str(), fixed4(row.z_bias).c_str(), fixed4(st.mse).c_str(),
                          fixed4(st.se_mse).c_str(), fixed4(row.bound).c_str(), fixed4(row.z_mse).c_str(),
                          flag.c_str());
            s << buf;
        }
    }
    if (result.histograms && f == Format::Text) {
        s << "\nhistogram goodness of fit (" << o.bins << " bins on [-3, 3) plus tails)\n";
        for (std::size_t d = 1; d <= design.decisions(); ++d) {
            const Histogram& h = (*result.histograms)[d - 1];
            if (report.per_decision[d - 1].excluded || result.per_decision[d - 1].count == 0) continue;
            const auto probs = histogram_reference_probabilities(design, o.theta, d, h.spec);
            const ChiSquareResult chi = chi_square_gof(h.categories(), probs);
            s << "  d=" << d << "  chi2=" << fixed4(chi.statistic) << "  dof=" << chi.dof
              << "  p=" << fixed4(chi.p_value) << "\n";
        }
    }
    if (!o.dump_path.empty()) {
        std::ofstream dump(o.dump_path, std::ios::binary);
        if (!dump) throw Exit{kIoFailure, "cannot write '" + o.dump_path + "'"};
        write_outcome_csv(cfg, dump);
        if (!dump) throw Exit{kIoFailure, "write to '" + o.dump_path + "' failed"};
    }
    emit(o, s.str(), out);
    return kSuccess;
}

int cmd_verify(const Options& o, std::ostream& out) {
    const auto results = run_verification(VerifyOptions{o.quick, o.inject_fault});
    std::ostringstream s;
    int failed = 0;
    for (const auto& r : results) {
        char buf[64];
        std::snprintf(buf, sizeof buf, "max_error=%.3e tol=%.1e", r.max_error, r.tolerance);
        s << (r.passed ? "[PASS] " : "[FAIL] ") << r.name << "  " << buf << "\n";
        if (!r.passed) ++failed;
    }
    s << results.size() - static_cast<std::size_t>(failed) << "/" << results.size() << " checks passed\n";
    emit(o, s.str(), out);
    return failed == 0 ? kSuccess : kVerificationFailed;
}

int cmd_tables(const Options& o, std::ostream& out) {
    const Format f = parse_format(o.format);
    const TwoStageDesign gsd = gsd_design(1, 1, 1.96);
    std::ostringstream s;
    auto block = [&](const std::string& title, const QuantityTable& t) {
        if (f == Format::Csv) {
            s << "# " << title << "\n" << t.render(f);
        } else {
            s << title << "\n" << std::string(title.size(), '-') << "\n" << t.render(f) << "\n";
        }
    };
    block("Information, informative stopping, c1=1.96, theta=1.96", breakdown_table(gsd, 1.96));
    block("Information, informative stopping, c1=1.96, theta=0", breakdown_table(gsd, 0.0));
    block("Information, non-informative stopping, Pr(D=1)=0.5",
          breakdown_table(randomized_stop_design(1, 1, 0.5), 0.0));
    block("Information, non-informative stopping, Pr(D=1)=0.025",
          breakdown_table(randomized_stop_design(1, 1, 0.025), 0.0));
    block("Bias and MSE bounds, c1=1.96, theta=1.96", bounds_table(gsd, 1.96));
    block("Bias and MSE bounds, c1=1.96, theta=0", bounds_table(gsd, 0.0));
    emit(o, s.str(), out);
    return kSuccess;
}

struct FlagSet {
    CLI::Option* n1 = nullptr;
    CLI::Option* n2 = nullptr;
    CLI::Option* sigma = nullptr;
    CLI::Option* c1 = nullptr;
    CLI::Option* design = nullptr;
    CLI::Option* theta = nullptr;
};

FlagSet add_design_flags(CLI::App* sub, Options& o) {
    FlagSet f;
    f.n1 = sub->add_option("--n1", o.n1, "stage-1 sample size (default 1)");
    f.n2 = sub->add_option("--n2", o.n2, "stage-2 sample size (default 1)");
    f.sigma = sub->add_option("--sigma", o.sigma, "known standard deviation (default 1)");
    f.c1 = sub->add_option("--c1", o.c1, "stop when z1 >= c1");
    f.design = sub->add_option("--design", o.design_file, "design config file");
    return f;
}

CLI::Option* add_output_flags(CLI::App* sub, Options& o) {
    auto* format = sub->add_option("--format", o.format, "text or csv");
    sub->add_option("--out", o.out_path, "write the report to PATH");
    return format;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Fisher information and MSE bounds for two-stage adaptive normal designs", "seqinfo"};
    app.require_subcommand(1);
    Options o;

    auto* breakdown = app.add_subcommand("breakdown", "information decomposition at one theta");
    auto* bounds = app.add_subcommand("bounds", "conditional bias and MSE lower bounds at one theta");
    auto* curves = app.add_subcommand("curves", "information and bounds over a theta grid");
    auto* simulate_cmd = app.add_subcommand("simulate", "Monte Carlo check of the bounds");
    auto* verify = app.add_subcommand("verify", "run the identity and oracle checks");
    auto* tables = app.add_subcommand("tables", "reference tables for n1=n2=1, c1=1.96");

    std::vector<std::pair<CLI::App*, FlagSet>> flag_sets;
    for (auto* sub : {breakdown, bounds, curves, simulate_cmd}) flag_sets.emplace_back(sub, add_design_flags(sub, o));
    for (auto* sub : {breakdown, bounds, simulate_cmd, verify, tables}) add_output_flags(sub, o);
    add_output_flags(curves, o)->description("text or csv (default csv)");
    for (auto& [sub, flags] : flag_sets) {
        if (sub != curves) flags.theta = sub->add_option("--theta", o.theta, "parameter value");
    }

    curves->add_option("--theta-min", o.grid.min, "grid start (default -2)");
    curves->add_option("--theta-max", o.grid.max, "grid end (default 6)");
    curves->add_option("--theta-step", o.grid.step, "grid step (default 0.01)");
    curves->add_option("--svg", o.svg_path, "also write an SVG chart to PATH");

    simulate_cmd->add_option("--reps", o.reps, "replications (default 100000)");
    o.seed_opt = simulate_cmd->add_option("--seed", o.seed, "seed (default $SEQINFO_SEED or 1)");
    simulate_cmd->add_option("--bins", o.bins, "histogram bins on [-3, 3) for a goodness-of-fit check");
    simulate_cmd->add_option("--workers", o.workers, "threads (0 = all cores); never changes results");
    simulate_cmd->add_option("--dump", o.dump_path, "write rep,decision,z1,mle rows to PATH");

    verify->add_flag("--quick", o.quick, "reduced instance counts");
    verify->add_flag("--inject-fault", o.inject_fault)->group("");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kSuccess;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kSuccess;
    } catch (const CLI::ParseError& e) {
        err << "seqinfo: " << e.what() << "\n";
        return kInvalidInput;
    }

    for (const auto& [sub, flags] : flag_sets) {
        if (!sub->parsed()) continue;
        o.n1_opt = flags.n1;
        o.n2_opt = flags.n2;
        o.sigma_opt = flags.sigma;
        o.c1_opt = flags.c1;
        o.design_opt = flags.design;
        o.theta_opt = flags.theta;
    }

    try {
        if (breakdown->parsed()) return cmd_breakdown(o, out);
        if (bounds->parsed()) return cmd_bounds(o, out);
        if (curves->parsed()) {
            if (curves->count("--format") == 0) o.format = "csv";
            return cmd_curves(o, out);
        }
        if (simulate_cmd->parsed()) return cmd_simulate(o, out);
        if (verify->parsed()) return cmd_verify(o, out);
        if (tables->parsed()) return cmd_tables(o, out);
    } catch (const Exit& e) {
        err << "seqinfo: " << e.message << "\n";
        return e.code;
    } catch (const Error& e) {
        err << "seqinfo: " << e.what() << "\n";
        return kInvalidInput;
    } catch (const std::invalid_argument& e) {
        err << "seqinfo: " << e.what() << "\n";
        return kInvalidInput;
    } catch (const std::out_of_range& e) {
        err << "seqinfo: " << e.what() << "\n";
        return kInvalidInput;
    }
    err << "seqinfo: no subcommand\n";
    return kInvalidInput;
}

}  // namespace seqinfo::cli
