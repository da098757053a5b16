#include "bioctl/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <string>

namespace bioctl {
namespace {

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

std::string label(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return buf;
}

}  // namespace

void write_deviation_svg(std::ostream& os, std::span<const TrialRecord> records,
                         const std::vector<std::pair<double, double>>& bound_curve,
                         const ScatterPlotSpec& spec) {
    const double left = 70, right = 20, top = 40, bottom = 50;
    const double pw = spec.width - left - right;
    const double ph = spec.height - top - bottom;

    double y_lo = 0.0;
    double y_hi = 0.0;
    for (const auto& r : records) {
        if (r.failed) continue;
        y_lo = std::min(y_lo, r.deviation);
        y_hi = std::max(y_hi, r.deviation);
    }
    for (const auto& [T, b] : bound_curve) y_hi = std::max(y_hi, b);
    if (y_hi - y_lo <= 0.0) y_hi = y_lo + 1.0;
    const double pad = 0.05 * (y_hi - y_lo);
    y_lo -= pad;
    y_hi += pad;

    auto sx = [&](double T) { return left + pw * T / spec.T_max; };
    auto sy = [&](double d) { return top + ph * (y_hi - d) / (y_hi - y_lo); };

    os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(spec.width) << "\" height=\""
       << num(spec.height) << "\" viewBox=\"0 0 " << num(spec.width) << ' ' << num(spec.height) << "\">\n";
    os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    os << "<text x=\"" << num(spec.width / 2) << "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" "
          "font-size=\"15\">"
       << spec.title << "</text>\n";

    // axes, ticks
    os << "<g stroke=\"black\" stroke-width=\"1\" fill=\"none\">\n";
    os << "<rect x=\"" << num(left) << "\" y=\"" << num(top) << "\" width=\"" << num(pw) << "\" height=\""
       << num(ph) << "\"/>\n";
    os << "<line x1=\"" << num(left) << "\" y1=\"" << num(sy(0)) << "\" x2=\"" << num(left + pw) << "\" y2=\""
       << num(sy(0)) << "\" stroke-dasharray=\"4 3\" stroke=\"#888\"/>\n";
    os << "</g>\n";
    os << "<g font-family=\"sans-serif\" font-size=\"11\">\n";
    for (int i = 0; i <= 5; ++i) {
        const double T = spec.T_max * i / 5.0;
        os << "<text x=\"" << num(sx(T)) << "\" y=\"" << num(top + ph + 16) << "\" text-anchor=\"middle\">"
           << label(T) << "</text>\n";
        const double d = y_lo + (y_hi - y_lo) * i / 5.0;
        os << "<text x=\"" << num(left - 6) << "\" y=\"" << num(sy(d) + 4) << "\" text-anchor=\"end\">"
           << label(d) << "</text>\n";
    }
    os << "<text x=\"" << num(left + pw / 2) << "\" y=\"" << num(spec.height - 10)
       << "\" text-anchor=\"middle\">release period T</text>\n";
    os << "<text x=\"16\" y=\"" << num(top + ph / 2) << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 "
       << num(top + ph / 2) << ")\">Pi - T1</text>\n";
    os << "</g>\n";

    os << "<g fill=\"#1f77b4\" fill-opacity=\"0.35\">\n";
    for (const auto& r : records) {
        if (r.failed) continue;
        os << "<circle cx=\"" << num(sx(r.T)) << "\" cy=\"" << num(sy(r.deviation)) << "\" r=\"1\"/>\n";
    }
    os << "</g>\n";

    if (!bound_curve.empty()) {
        os << "<polyline fill=\"none\" stroke=\"#d62728\" stroke-width=\"2\" points=\"";
        bool first = true;
        for (const auto& [T, b] : bound_curve) {
            if (!first) os << ' ';
            os << num(sx(T)) << ',' << num(sy(b));
            first = false;
        }
        os << "\"/>\n";
    }
    os << "</svg>\n";
}

}  // namespace bioctl
