#include "seqinfo/curves.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <exception>
#include <istream>
#include <limits>
#include <mutex>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "seqinfo/bounds.hpp"
#include "seqinfo/information.hpp"

namespace seqinfo {

std::vector<double> ThetaGrid::points() const {
    if (!(step > 0.0) || !(min < max) || !std::isfinite(min) || !std::isfinite(max)) {
        throw std::invalid_argument("theta grid needs min < max and step > 0");
    }
    const auto n = static_cast<std::size_t>(std::llround((max - min) / step));
    std::vector<double> out;
    out.reserve(n + 1);
    for (std::size_t i = 0; i <= n; ++i) out.push_back(min + static_cast<double>(i) * step);
    return out;
}

double CurveRow::decomposition_residual() const noexcept {
    double sum = info_design;
    for (const auto& d : per_decision) sum += d.prob * (d.info_stage1 + d.info_stage2);
    return std::abs(info_total - sum);
}

CurveRow curve_row(const TwoStageDesign& design, double theta) {
    const InformationBreakdown info = info_breakdown(design, theta);
    const MseBoundReport bounds = unconditional_mse_bound(design, theta);
    CurveRow row;
    row.theta = theta;
    row.info_total = info.total;
    row.info_design = info.design_info;
    row.info_cond_on_D = info.cond_on_D;
    row.uncond_bound = bounds.unconditional_bound;
    for (std::size_t i = 0; i < info.per_decision.size(); ++i) {
        const auto& e = info.per_decision[i];
        const auto& b = bounds.per_decision[i];
        row.per_decision.push_back(
            CurveDecision{e.prob, e.info_stage1, e.info_stage2, e.info_total_given_d, b.bias, b.cond_bound});
    }
    return row;
}

std::vector<CurveRow> compute_curves(const TwoStageDesign& design, const ThetaGrid& grid, unsigned workers) {
    const std::vector<double> thetas = grid.points();
    std::vector<CurveRow> rows(thetas.size());
    if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
    workers = std::min<unsigned>(workers, static_cast<unsigned>(thetas.size()));
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto work = [&] {
        try {
            for (std::size_t i = next.fetch_add(1); i < thetas.size(); i = next.fetch_add(1)) {
                rows[i] = curve_row(design, thetas[i]);
            }
        } catch (...) {
            std::lock_guard lock(failure_mutex);
            if (!failure) failure = std::current_exception();
            next = thetas.size();
        }
    };
    if (workers <= 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
        for (auto& t : pool) t.join();
    }
    if (failure) std::rethrow_exception(failure);
    return rows;
}

std::string curves_csv_header(std::size_t decisions) {
    std::string h = "theta,I_total,I_design,I_cond_D";
    for (std::size_t d = 1; d <= decisions; ++d) {
        const std::string s = std::to_string(d);
        h += ",P_" + s + ",I1_" + s + ",I2_" + s + ",bias_" + s + ",bound_" + s;
    }
    return h + ",uncond_bound";
}

void write_curves_csv(std::ostream& out, const std::vector<CurveRow>& rows) {
    const std::size_t k = rows.empty() ? 0 : rows.front().per_decision.size();
    out << curves_csv_header(k) << "\n";
    char buf[32];
    auto put = [&](double v) {
        std::snprintf(buf, sizeof buf, "%.17g", v);
        out << buf;
    };
    for (const auto& r : rows) {
        put(r.theta);
        for (double v : {r.info_total, r.info_design, r.info_cond_on_D}) {
            out << ',';
            put(v);
        }
        for (const auto& d : r.per_decision) {
            for (double v : {d.prob, d.info_stage1, d.info_stage2, d.bias, d.bound}) {
                out << ',';
                put(v);
            }
        }
        out << ',';
        put(r.uncond_bound);
        out << "\n";
    }
}

std::vector<CurveRow> read_curves_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("curves csv: missing header");
    const auto columns = static_cast<std::size_t>(std::count(line.begin(), line.end(), ',')) + 1;
    if (columns < 5 || (columns - 5) % 5 != 0) throw std::runtime_error("curves csv: unexpected column count");
    const std::size_t k = (columns - 5) / 5;
    if (line != curves_csv_header(k)) throw std::runtime_error("curves csv: header mismatch");

    std::vector<CurveRow> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<double> v;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) v.push_back(std::strtod(cell.c_str(), nullptr));
        if (v.size() != columns) throw std::runtime_error("curves csv: ragged row");
        CurveRow r;
        r.theta = v[0];
        r.info_total = v[1];
        r.info_design = v[2];
        r.info_cond_on_D = v[3];
        for (std::size_t d = 0; d < k; ++d) {
            const double* p = &v[4 + 5 * d];
            r.per_decision.push_back(CurveDecision{p[0], p[1], p[2], p[1] + p[2], p[3], p[4]});
        }
        r.uncond_bound = v.back();
        rows.push_back(std::move(r));
    }
    return rows;
}

std::string render_curves_svg(const std::vector<CurveRow>& rows, const std::string& title) {
    constexpr double width = 640.0;
    constexpr double height = 420.0;
    constexpr double margin = 50.0;
    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height << "\">\n";
    svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    svg << "<text x=\"" << margin << "\" y=\"24\" font-family=\"sans-serif\" font-size=\"14\">" << title
        << "</text>\n";
    if (rows.empty()) {
        svg << "</svg>\n";
        return svg.str();
    }
    const double x0 = rows.front().theta;
    const double x1 = rows.back().theta;
    double y1 = 0.0;
    for (const auto& r : rows) {
        y1 = std::max(y1, r.info_total);
        for (const auto& d : r.per_decision) y1 = std::max(y1, d.info_total_given_d);
    }
    y1 = std::ceil(y1 * 2.0) / 2.0;
    auto sx = [&](double x) { return margin + (x - x0) / (x1 - x0) * (width - 2 * margin); };
    auto sy = [&](double y) { return height - margin - y / y1 * (height - 2 * margin); };

    svg << "<line x1=\"" << sx(x0) << "\" y1=\"" << sy(0) << "\" x2=\"" << sx(x1) << "\" y2=\"" << sy(0)
        << "\" stroke=\"black\"/>\n";
    svg << "<line x1=\"" << sx(x0) << "\" y1=\"" << sy(0) << "\" x2=\"" << sx(x0) << "\" y2=\"" << sy(y1)
        << "\" stroke=\"black\"/>\n";
    for (double t = std::ceil(x0); t <= x1; t += 1.0) {
        svg << "<text x=\"" << sx(t) << "\" y=\"" << sy(0) + 16 << "\" font-size=\"11\" text-anchor=\"middle\">" << t
            << "</text>\n";
    }
    for (double y = 0.0; y <= y1 + 1e-9; y += 0.5) {
        svg << "<text x=\"" << sx(x0) - 6 << "\" y=\"" << sy(y) + 4 << "\" font-size=\"11\" text-anchor=\"end\">" << y
            << "</text>\n";
    }

    auto polyline = [&](auto value, const char* colour, const char* dash) {
        svg << "<polyline fill=\"none\" stroke=\"" << colour << "\" stroke-width=\"1.5\"";
        if (dash[0] != '\0') svg << " stroke-dasharray=\"" << dash << "\"";
        svg << " points=\"";
        for (const auto& r : rows) svg << sx(r.theta) << ',' << sy(value(r)) << ' ';
        svg << "\"/>\n";
    };
    polyline([](const CurveRow& r) { return r.info_total; }, "blue", "");
    polyline([](const CurveRow& r) { return r.info_cond_on_D; }, "black", "");
    polyline([](const CurveRow& r) { return r.info_design; }, "red", "");
    static constexpr const char* dashes[] = {"6,3", "2,2", "8,2,2,2", "1,3"};
    for (std::size_t d = 0; d < rows.front().per_decision.size(); ++d) {
        polyline([d](const CurveRow& r) { return r.per_decision[d].info_total_given_d; }, "black", dashes[d % 4]);
    }
    svg << "</svg>\n";
    return svg.str();
}

}  // namespace seqinfo
