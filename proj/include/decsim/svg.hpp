#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace decsim::cli {

// Self-contained SVG line chart: axes with ticks, a legend, one polyline per
// series. Rendering is deterministic; identical data yields identical bytes.

struct SvgSeries {
    std::string name;
    std::vector<double> values;
};

struct SvgOptions {
    int width = 880;
    int height = 520;
    int margin_left = 72;
    int margin_right = 24;
    int margin_top = 24;
    int margin_bottom = 48;
};

namespace detail {

inline std::string fmt(double v, const char* spec = "%.2f") {
    char buf[40];
    std::snprintf(buf, sizeof(buf), spec, v);
    return buf;
}

inline const char* palette(std::size_t i) {
    static const char* colors[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728",
                                   "#9467bd", "#8c564b", "#e377c2", "#7f7f7f"};
    return colors[i % 8];
}

}  // namespace detail

inline std::string render_line_chart(const std::string& x_label,
                                     std::span<const double> x,
                                     std::span<const SvgSeries> series,
                                     const SvgOptions& opt = {}) {
    if (x.empty() || series.empty())
        throw std::invalid_argument("render_line_chart: no data");
    for (const auto& s : series)
        if (s.values.size() != x.size())
            throw std::invalid_argument("render_line_chart: series length mismatch");

    double x_lo = x[0], x_hi = x[0];
    for (const double v : x) {
        x_lo = std::min(x_lo, v);
        x_hi = std::max(x_hi, v);
    }
    double y_lo = series[0].values[0], y_hi = y_lo;
    for (const auto& s : series)
        for (const double v : s.values) {
            y_lo = std::min(y_lo, v);
            y_hi = std::max(y_hi, v);
        }
    if (x_hi == x_lo) { x_lo -= 1.0; x_hi += 1.0; }
    if (y_hi == y_lo) { y_lo -= 1.0; y_hi += 1.0; }

    const double plot_w = opt.width - opt.margin_left - opt.margin_right;
    const double plot_h = opt.height - opt.margin_top - opt.margin_bottom;
    const auto px = [&](double v) {
        return opt.margin_left + (v - x_lo) / (x_hi - x_lo) * plot_w;
    };
    const auto py = [&](double v) {
        return opt.margin_top + (y_hi - v) / (y_hi - y_lo) * plot_h;
    };

    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << opt.width
        << "\" height=\"" << opt.height << "\" viewBox=\"0 0 " << opt.width << ' '
        << opt.height << "\">\n";
    svg << "<rect width=\"" << opt.width << "\" height=\"" << opt.height
        << "\" fill=\"white\"/>\n";

    // grid and tick labels
    constexpr int ticks = 5;
    svg << "<g font-family=\"sans-serif\" font-size=\"12\" fill=\"#333\">\n";
    for (int i = 0; i <= ticks; ++i) {
        const double fx = x_lo + (x_hi - x_lo) * i / ticks;
        const double fy = y_lo + (y_hi - y_lo) * i / ticks;
        const double gx = px(fx);
        const double gy = py(fy);
        svg << "<line x1=\"" << detail::fmt(gx) << "\" y1=\"" << opt.margin_top
            << "\" x2=\"" << detail::fmt(gx) << "\" y2=\""
            << detail::fmt(opt.margin_top + plot_h) << "\" stroke=\"#ddd\"/>\n";
        svg << "<line x1=\"" << opt.margin_left << "\" y1=\"" << detail::fmt(gy)
            << "\" x2=\"" << detail::fmt(opt.margin_left + plot_w) << "\" y2=\""
            << detail::fmt(gy) << "\" stroke=\"#ddd\"/>\n";
        svg << "<text x=\"" << detail::fmt(gx) << "\" y=\""
            << detail::fmt(opt.margin_top + plot_h + 18)
            << "\" text-anchor=\"middle\">" << detail::fmt(fx, "%.4g") << "</text>\n";
        svg << "<text x=\"" << opt.margin_left - 8 << "\" y=\"" << detail::fmt(gy + 4)
            << "\" text-anchor=\"end\">" << detail::fmt(fy, "%.4g") << "</text>\n";
    }
    svg << "<text x=\"" << detail::fmt(opt.margin_left + plot_w / 2) << "\" y=\""
        << opt.height - 10 << "\" text-anchor=\"middle\">" << x_label << "</text>\n";
    svg << "</g>\n";

    // axes
    svg << "<rect x=\"" << opt.margin_left << "\" y=\"" << opt.margin_top << "\" width=\""
        << detail::fmt(plot_w) << "\" height=\"" << detail::fmt(plot_h)
        << "\" fill=\"none\" stroke=\"#333\"/>\n";

    for (std::size_t si = 0; si < series.size(); ++si) {
        svg << "<polyline fill=\"none\" stroke=\"" << detail::palette(si)
            << "\" stroke-width=\"1.5\" points=\"";
        for (std::size_t i = 0; i < x.size(); ++i) {
            if (i) svg << ' ';
            svg << detail::fmt(px(x[i])) << ',' << detail::fmt(py(series[si].values[i]));
        }
        svg << "\"/>\n";
    }

    // legend
    svg << "<g font-family=\"sans-serif\" font-size=\"12\" fill=\"#333\">\n";
    for (std::size_t si = 0; si < series.size(); ++si) {
        const double ly = opt.margin_top + 14.0 + 16.0 * static_cast<double>(si);
        const double lx = opt.margin_left + plot_w - 140.0;
        svg << "<line x1=\"" << detail::fmt(lx) << "\" y1=\"" << detail::fmt(ly - 4)
            << "\" x2=\"" << detail::fmt(lx + 20) << "\" y2=\"" << detail::fmt(ly - 4)
            << "\" stroke=\"" << detail::palette(si) << "\" stroke-width=\"1.5\"/>\n";
        svg << "<text x=\"" << detail::fmt(lx + 26) << "\" y=\"" << detail::fmt(ly)
            << "\">" << series[si].name << "</text>\n";
    }
    svg << "</g>\n</svg>\n";
    return svg.str();
}

}  // namespace decsim::cli
