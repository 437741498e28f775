#pragma once

/**
 * @file svg.hpp
 * @brief Minimal SVG figures: line/scatter plots (linear or log axes) and heatmaps.
 */

#include <lmgqpt/errors.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

namespace lmgqpt::harness {

struct Series {
    std::string label;
    std::vector<double> x;
    std::vector<double> y;
    bool markers = true;  ///< scatter markers, otherwise a polyline
};

struct PlotSpec {
    std::string title;
    std::string x_label;
    std::string y_label;
    bool log_x = false;
    bool log_y = false;
};

namespace detail {

inline constexpr double kWidth = 640, kHeight = 440, kLeft = 70, kRight = 20, kTop = 40, kBottom = 50;

inline std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4g", v);
    return buf;
}

inline std::string escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        if (c == '<') out += "&lt;";
        else if (c == '>') out += "&gt;";
        else if (c == '&') out += "&amp;";
        else out += c;
    }
    return out;
}

inline const char* palette(std::size_t i) {
    static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf"};
    return colors[i % 7];
}

inline void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot open '" + path + "' for writing");
    out << text;
}

}  // namespace detail

inline std::string render_plot(const PlotSpec& spec, const std::vector<Series>& series) {
    using namespace detail;
    auto tx = [&](double v) { return spec.log_x ? std::log10(v) : v; };
    auto ty = [&](double v) { return spec.log_y ? std::log10(v) : v; };
    double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
    for (const auto& s : series)
        for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
            const double a = tx(s.x[i]), b = ty(s.y[i]);
            if (!std::isfinite(a) || !std::isfinite(b)) continue;
            x0 = std::min(x0, a), x1 = std::max(x1, a), y0 = std::min(y0, b), y1 = std::max(y1, b);
        }
    if (!std::isfinite(x0)) x0 = 0, x1 = 1, y0 = 0, y1 = 1;
    if (x1 <= x0) x1 = x0 + 1;
    if (y1 <= y0) y1 = y0 + 1;
    const double pw = kWidth - kLeft - kRight, ph = kHeight - kTop - kBottom;
    auto px = [&](double a) { return kLeft + (a - x0) / (x1 - x0) * pw; };
    auto py = [&](double b) { return kTop + (1.0 - (b - y0) / (y1 - y0)) * ph; };

    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
       << "\" font-family=\"sans-serif\" font-size=\"12\">\n"
       << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
       << "<text x=\"" << kWidth / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">" << escape(spec.title)
       << "</text>\n"
       << "<rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\"" << pw << "\" height=\"" << ph
       << "\" fill=\"none\" stroke=\"black\"/>\n";
    for (int k = 0; k <= 4; ++k) {
        const double a = x0 + (x1 - x0) * k / 4.0, b = y0 + (y1 - y0) * k / 4.0;
        const double xv = spec.log_x ? std::pow(10.0, a) : a, yv = spec.log_y ? std::pow(10.0, b) : b;
        os << "<text x=\"" << px(a) << "\" y=\"" << kHeight - kBottom + 16 << "\" text-anchor=\"middle\">" << fmt(xv)
           << "</text>\n"
           << "<text x=\"" << kLeft - 6 << "\" y=\"" << py(b) + 4 << "\" text-anchor=\"end\">" << fmt(yv)
           << "</text>\n";
    }
    os << "<text x=\"" << kLeft + pw / 2 << "\" y=\"" << kHeight - 10 << "\" text-anchor=\"middle\">"
       << escape(spec.x_label) << "</text>\n"
       << "<text x=\"14\" y=\"" << kTop + ph / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 14 "
       << kTop + ph / 2 << ")\">" << escape(spec.y_label) << "</text>\n";
    for (std::size_t k = 0; k < series.size(); ++k) {
        const auto& s = series[k];
        std::ostringstream pts;
        for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
            const double a = tx(s.x[i]), b = ty(s.y[i]);
            if (!std::isfinite(a) || !std::isfinite(b)) continue;
            if (s.markers)
                os << "<circle cx=\"" << px(a) << "\" cy=\"" << py(b) << "\" r=\"3\" fill=\"" << palette(k)
                   << "\"/>\n";
            else
                pts << px(a) << "," << py(b) << " ";
        }
        if (!s.markers)
            os << "<polyline fill=\"none\" stroke=\"" << palette(k) << "\" stroke-width=\"1.5\" points=\""
               << pts.str() << "\"/>\n";
        os << "<text x=\"" << kLeft + 8 << "\" y=\"" << kTop + 16 + 14 * k << "\" fill=\"" << palette(k) << "\">"
           << escape(s.label) << "</text>\n";
    }
    os << "</svg>\n";
    return os.str();
}

/// values is row-major with rows along y; colour scale is linear between min and max.
inline std::string render_heatmap(const PlotSpec& spec, const std::vector<double>& xs, const std::vector<double>& ys,
                                  const std::vector<double>& values) {
    using namespace detail;
    lmgqpt::detail::require(values.size() == xs.size() * ys.size(), "render_heatmap: value count mismatch");
    const auto [lo_it, hi_it] = std::minmax_element(values.begin(), values.end());
    const double lo = values.empty() ? 0.0 : *lo_it, hi = values.empty() ? 1.0 : *hi_it;
    const double span = hi > lo ? hi - lo : 1.0;
    const double pw = kWidth - kLeft - kRight, ph = kHeight - kTop - kBottom;
    const double cw = pw / std::max<std::size_t>(1, xs.size()), ch = ph / std::max<std::size_t>(1, ys.size());
    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
       << "\" font-family=\"sans-serif\" font-size=\"12\" shape-rendering=\"crispEdges\">\n"
       << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
       << "<text x=\"" << kWidth / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">" << escape(spec.title)
       << "</text>\n";
    for (std::size_t r = 0; r < ys.size(); ++r)
        for (std::size_t c = 0; c < xs.size(); ++c) {
            const double f = std::clamp((values[r * xs.size() + c] - lo) / span, 0.0, 1.0);
            const int red = static_cast<int>(255 * f), blue = static_cast<int>(255 * (1.0 - f));
            os << "<rect x=\"" << kLeft + c * cw << "\" y=\"" << kTop + (ys.size() - 1 - r) * ch << "\" width=\""
               << cw + 0.5 << "\" height=\"" << ch + 0.5 << "\" fill=\"rgb(" << red << ",40," << blue << ")\"/>\n";
        }
    if (!xs.empty() && !ys.empty())
        os << "<text x=\"" << kLeft << "\" y=\"" << kHeight - kBottom + 16 << "\">" << fmt(xs.front()) << "</text>\n"
           << "<text x=\"" << kLeft + pw << "\" y=\"" << kHeight - kBottom + 16 << "\" text-anchor=\"end\">"
           << fmt(xs.back()) << "</text>\n"
           << "<text x=\"" << kLeft - 6 << "\" y=\"" << kTop + ph << "\" text-anchor=\"end\">" << fmt(ys.front())
           << "</text>\n"
           << "<text x=\"" << kLeft - 6 << "\" y=\"" << kTop + 10 << "\" text-anchor=\"end\">" << fmt(ys.back())
           << "</text>\n";
    os << "<text x=\"" << kLeft + pw / 2 << "\" y=\"" << kHeight - 10 << "\" text-anchor=\"middle\">"
       << escape(spec.x_label) << "</text>\n"
       << "<text x=\"14\" y=\"" << kTop + ph / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 14 "
       << kTop + ph / 2 << ")\">" << escape(spec.y_label) << "</text>\n"
       << "<text x=\"" << kWidth - kRight << "\" y=\"" << kTop - 6 << "\" text-anchor=\"end\">range " << fmt(lo)
       << " .. " << fmt(hi) << "</text>\n</svg>\n";
    return os.str();
}

inline void write_plot(const std::string& path, const PlotSpec& spec, const std::vector<Series>& series) {
    detail::write_text(path, render_plot(spec, series));
}

inline void write_heatmap(const std::string& path, const PlotSpec& spec, const std::vector<double>& xs,
                          const std::vector<double>& ys, const std::vector<double>& values) {
    detail::write_text(path, render_heatmap(spec, xs, ys, values));
}

}  // namespace lmgqpt::harness
