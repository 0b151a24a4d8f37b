#include "seqinfo/config.hpp"

#include <charconv>
#include <cstdio>
#include <optional>
#include <sstream>
#include <vector>

#include "seqinfo/errors.hpp"

namespace seqinfo {

namespace {

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

[[noreturn]] void fail(int line, const std::string& what) {
    throw InvalidDesign("design config line " + std::to_string(line) + ": " + what);
}

double parse_bound(const std::string& token, int line) {
    const std::string t = trim(token);
    if (t == "inf" || t == "+inf") return kInf;
    if (t == "-inf") return -kInf;
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (ec != std::errc() || ptr != t.data() + t.size() || !std::isfinite(v)) fail(line, "bad bound '" + t + "'");
    return v;
}

int parse_positive_int(const std::string& token, int line, const char* what) {
    const std::string t = trim(token);
    int v = 0;
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (ec != std::errc() || ptr != t.data() + t.size() || v < 1) {
        fail(line, std::string(what) + " must be a positive integer, got '" + t + "'");
    }
    return v;
}

DecisionCell parse_cell(const std::string& value, int line) {
    std::vector<std::string> parts;
    std::stringstream ss(value);
    std::string item;
    while (std::getline(ss, item, ',')) parts.push_back(trim(item));
    if (parts.size() != 3) fail(line, "cell needs 'lo, hi, stop|continue:n2'");
    const double lo = parse_bound(parts[0], line);
    const double hi = parse_bound(parts[1], line);
    if (parts[2] == "stop") return DecisionCell{Interval{lo, hi}, CellAction::stop()};
    if (parts[2].rfind("continue:", 0) == 0) {
        return DecisionCell{Interval{lo, hi},
                            CellAction::proceed(parse_positive_int(parts[2].substr(9), line, "n2"))};
    }
    fail(line, "unknown cell action '" + parts[2] + "'");
}

std::string format_double(double v) {
    if (v == kInf) return "inf";
    if (v == -kInf) return "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

TwoStageDesign parse_design_config(std::istream& in) {
    std::optional<int> n1;
    double sigma = 1.0;
    DecisionBasis basis = DecisionBasis::InterimZ;
    std::vector<DecisionCell> cells;
    std::string raw;
    int line = 0;
    while (std::getline(in, raw)) {
        ++line;
        const std::string text = trim(raw.substr(0, raw.find('#')));
        if (text.empty()) continue;
        const auto eq = text.find('=');
        if (eq == std::string::npos) fail(line, "expected 'key = value'");
        const std::string key = trim(text.substr(0, eq));
        const std::string value = trim(text.substr(eq + 1));
        if (key == "n1") {
            n1 = parse_positive_int(value, line, "n1");
        } else if (key == "sigma") {
            sigma = parse_bound(value, line);
            if (!(sigma > 0.0)) fail(line, "sigma must be > 0");
        } else if (key == "basis") {
            if (value == "z1") {
                basis = DecisionBasis::InterimZ;
            } else if (value == "randomized") {
                basis = DecisionBasis::IndependentRandomization;
            } else {
                fail(line, "basis must be z1 or randomized");
            }
        } else if (key == "cell") {
            cells.push_back(parse_cell(value, line));
        } else {
            fail(line, "unknown key '" + key + "'");
        }
    }
    if (!n1) throw InvalidDesign("design config is missing n1");
    if (cells.empty()) throw InvalidDesign("design config has no cells");
    return TwoStageDesign(*n1, sigma, DecisionRule(std::move(cells), basis));
}

TwoStageDesign parse_design_config(const std::string& text) {
    std::istringstream in(text);
    return parse_design_config(in);
}

std::string format_design_config(const TwoStageDesign& design) {
    std::ostringstream out;
    out << "n1 = " << design.n1() << "\n";
    out << "sigma = " << format_double(design.sigma()) << "\n";
    out << "basis = " << (design.informative() ? "z1" : "randomized") << "\n";
    for (const auto& c : design.rule().cells()) {
        out << "cell = " << format_double(c.region.lo) << ", " << format_double(c.region.hi) << ", ";
        if (c.action.stops()) {
            out << "stop\n";
        } else {
            out << "continue:" << c.action.n2 << "\n";
        }
    }
    return out.str();
}

}  // namespace seqinfo
