#pragma once

// Self-contained SVG summary of an experiment's records: one panel per
// (m, changed-edge count, perturbed coefficient) combination, a box per
// numerator sample size showing the spread of the critical level across
// replications, a red reference segment at the comparison tuning level,
// and the share of replications exceeding it printed above each box.

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "kliepkit/harness.hpp"

namespace kliepkit {

namespace detail {

struct BoxStats {
    double lo, q1, med, q3, hi;
    double liu = 0.0;
    double exceed_rate = 0.0;
    int n = 0;
};

inline double quantile_sorted(const std::vector<double>& v, double q) {
    if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
    const double pos = q * (static_cast<double>(v.size()) - 1.0);
    const size_t i = static_cast<size_t>(pos);
    if (i + 1 >= v.size()) return v.back();
    const double frac = pos - static_cast<double>(i);
    return v[i] * (1.0 - frac) + v[i + 1] * frac;
}

inline std::string svg_num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

}  // namespace detail

inline void emit_summary_plot(const std::vector<ReplicationRecord>& records,
                              const std::string& out_path) {
    if (records.empty()) throw std::invalid_argument("emit_summary_plot: no records");

    // panel key: (m, d, theta1_star); inside a panel one box per n_p.
    using PanelKey = std::tuple<int, int, double>;
    std::map<PanelKey, std::map<int, std::vector<double>>> values;
    std::map<PanelKey, std::map<int, std::pair<double, int>>> extras;  // (liu, exceed count)
    for (const auto& r : records) {
        PanelKey key{r.m, r.d, r.theta1_star};
        if (!r.ok()) {
            values[key][r.n_p];  // keep the cell visible even if all rows failed
            continue;
        }
        values[key][r.n_p].push_back(r.lambda_sharp);
        auto& ex = extras[key][r.n_p];
        ex.first = r.lambda_liu;
        ex.second += r.exceeds ? 1 : 0;
    }

    constexpr double kPanelW = 240, kPanelH = 190, kMarginL = 52, kMarginB = 40;
    constexpr double kMarginT = 34, kMarginR = 14, kGap = 18;
    const int ncols = static_cast<int>(std::min<size_t>(values.size(), 4));
    const int nrows = static_cast<int>((values.size() + ncols - 1) / ncols);
    const double width = ncols * (kPanelW + kGap) + kGap;
    const double height = nrows * (kPanelH + kGap) + kGap;

    std::ostringstream svg;
    svg << "<svg xmlns='http://www.w3.org/2000/svg' width='" << width << "' height='" << height
        << "' viewBox='0 0 " << width << ' ' << height << "'>\n"
        << "<rect width='100%' height='100%' fill='white'/>\n"
        << "<style>text{font-family:sans-serif;}</style>\n";

    int panel = 0;
    for (const auto& [key, cells] : values) {
        const auto [m, d, t1s] = key;
        const double px = kGap + (panel % ncols) * (kPanelW + kGap);
        const double py = kGap + (panel / ncols) * (kPanelH + kGap);
        ++panel;

        // Per-box statistics and the panel's y range.
        std::vector<std::pair<int, detail::BoxStats>> boxes;
        double ymax = 0;
        for (const auto& [np, raw] : cells) {
            detail::BoxStats b{};
            std::vector<double> v(raw);
            std::sort(v.begin(), v.end());
            b.n = static_cast<int>(v.size());
            if (!v.empty()) {
                b.lo = v.front();
                b.hi = v.back();
                b.q1 = detail::quantile_sorted(v, 0.25);
                b.med = detail::quantile_sorted(v, 0.50);
                b.q3 = detail::quantile_sorted(v, 0.75);
                ymax = std::max(ymax, b.hi);
            }
            auto it = extras.find(key);
            if (it != extras.end()) {
                auto jt = it->second.find(np);
                if (jt != it->second.end()) {
                    b.liu = jt->second.first;
                    b.exceed_rate = b.n ? static_cast<double>(jt->second.second) / b.n : 0.0;
                    ymax = std::max(ymax, b.liu);
                }
            }
            boxes.emplace_back(np, b);
        }
        if (ymax <= 0) ymax = 1;
        ymax *= 1.12;

        const double plotX = px + kMarginL, plotY = py + kMarginT;
        const double plotW = kPanelW - kMarginL - kMarginR, plotH = kPanelH - kMarginT - kMarginB;
        auto ypix = [&](double v) { return plotY + plotH * (1.0 - v / ymax); };

        svg << "<rect x='" << px << "' y='" << py << "' width='" << kPanelW << "' height='"
            << kPanelH << "' fill='none' stroke='#ccc'/>\n"
            << "<text x='" << px + kPanelW / 2 << "' y='" << py + 16
            << "' font-size='12' text-anchor='middle'>m=" << m << "  d=" << d
            << "  coeff*=" << detail::svg_num(t1s) << "</text>\n"
            << "<line x1='" << plotX << "' y1='" << plotY << "' x2='" << plotX << "' y2='"
            << plotY + plotH << "' stroke='black'/>\n"
            << "<line x1='" << plotX << "' y1='" << plotY + plotH << "' x2='" << plotX + plotW
            << "' y2='" << plotY + plotH << "' stroke='black'/>\n";
        for (int t = 0; t <= 4; ++t) {
            const double val = ymax * t / 4;
            svg << "<line x1='" << plotX - 3 << "' y1='" << ypix(val) << "' x2='" << plotX
                << "' y2='" << ypix(val) << "' stroke='black'/>\n"
                << "<text x='" << plotX - 6 << "' y='" << ypix(val) + 4
                << "' font-size='9' text-anchor='end'>" << detail::svg_num(val) << "</text>\n";
        }

        const double slot = plotW / static_cast<double>(boxes.size());
        const double bw = std::min(34.0, slot * 0.5);
        for (size_t i = 0; i < boxes.size(); ++i) {
            const auto& [np, b] = boxes[i];
            const double cx = plotX + slot * (static_cast<double>(i) + 0.5);
            if (b.n > 0) {
                svg << "<line x1='" << cx << "' y1='" << ypix(b.lo) << "' x2='" << cx << "' y2='"
                    << ypix(b.hi) << "' stroke='black'/>\n"
                    << "<rect x='" << cx - bw / 2 << "' y='" << ypix(b.q3) << "' width='" << bw
                    << "' height='" << std::max(0.5, ypix(b.q1) - ypix(b.q3))
                    << "' fill='#9ecae1' stroke='black'/>\n"
                    << "<line x1='" << cx - bw / 2 << "' y1='" << ypix(b.med) << "' x2='"
                    << cx + bw / 2 << "' y2='" << ypix(b.med) << "' stroke='black' stroke-width='1.5'/>\n"
                    << "<text x='" << cx << "' y='" << ypix(b.hi) - 4
                    << "' font-size='9' text-anchor='middle'>"
                    << static_cast<int>(std::lround(b.exceed_rate * 100)) << "%</text>\n";
            } else {
                svg << "<text x='" << cx << "' y='" << plotY + plotH / 2
                    << "' font-size='9' text-anchor='middle'>no data</text>\n";
            }
            svg << "<line x1='" << cx - bw * 0.8 << "' y1='" << ypix(b.liu) << "' x2='"
                << cx + bw * 0.8 << "' y2='" << ypix(b.liu)
                << "' stroke='red' stroke-width='2'/>\n"
                << "<text x='" << cx << "' y='" << plotY + plotH + 14
                << "' font-size='9' text-anchor='middle'>" << np << "</text>\n";
        }
        svg << "<text x='" << plotX + plotW / 2 << "' y='" << py + kPanelH - 6
            << "' font-size='10' text-anchor='middle'>numerator sample size n_p</text>\n";
    }
    svg << "</svg>\n";

    std::ofstream out(out_path);
    if (!out) throw IoError("cannot write plot: " + out_path);
    out << svg.str();
    if (!out) throw IoError("failed while writing plot: " + out_path);
}

}  // namespace kliepkit
