#pragma once

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "emx/errors.hpp"

namespace emx::svg {

// Minimal self-contained SVG emission: line plots and heatmaps, no external
// renderer. Coordinates are mapped into a fixed canvas with light axis
// furniture; log axes take log10 of the data before mapping.

struct Series {
    std::string label;
    std::vector<double> x;
    std::vector<double> y;
    std::string color = "#1f77b4";
};

struct PlotOptions {
    std::string title;
    std::string x_label;
    std::string y_label;
    bool log_x = false;
    bool log_y = false;
    int width = 720;
    int height = 480;
};

namespace detail {

inline std::string esc(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

inline std::string num(double v) {
    std::ostringstream os;
    os.precision(6);
    os << v;
    return os.str();
}

struct AxisMap {
    double lo = 0.0, hi = 1.0;
    double pix_lo = 0.0, pix_hi = 1.0;
    bool log = false;

    double operator()(double v) const {
        double t = log ? std::log10(v) : v;
        double a = log ? std::log10(lo) : lo;
        double b = log ? std::log10(hi) : hi;
        if (b == a) b = a + 1.0;
        return pix_lo + (t - a) / (b - a) * (pix_hi - pix_lo);
    }
};

inline std::vector<double> ticks(double lo, double hi, bool log) {
    std::vector<double> out;
    if (log) {
        const int e0 = static_cast<int>(std::floor(std::log10(lo)));
        const int e1 = static_cast<int>(std::ceil(std::log10(hi)));
        for (int e = e0; e <= e1; ++e) {
            const double v = std::pow(10.0, e);
            if (v >= lo * 0.999 && v <= hi * 1.001) out.push_back(v);
        }
        if (out.size() >= 2) return out;
        log = false;
    }
    const double span = hi - lo;
    if (!(span > 0.0)) return {lo};
    const double raw = span / 5.0;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    double step = mag;
    for (double m : {1.0, 2.0, 5.0, 10.0})
        if (raw <= m * mag) {
            step = m * mag;
            break;
        }
    for (double v = std::ceil(lo / step) * step; v <= hi + 0.5 * step; v += step)
        out.push_back(v);
    return out;
}

inline const char* palette(int i) {
    static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                   "#ff7f0e", "#8c564b"};
    return colors[i % 6];
}

inline std::string viridis(double t) {
    // Coarse five-stop approximation, linearly interpolated.
    static const double stops[6][3] = {{68, 1, 84},    {59, 82, 139},  {33, 145, 140},
                                       {94, 201, 98},  {192, 224, 52}, {253, 231, 37}};
    t = std::clamp(t, 0.0, 1.0) * 5.0;
    const int i = std::min(static_cast<int>(t), 4);
    const double f = t - i;
    std::ostringstream os;
    os << "rgb(" << static_cast<int>(stops[i][0] + f * (stops[i + 1][0] - stops[i][0])) << ","
       << static_cast<int>(stops[i][1] + f * (stops[i + 1][1] - stops[i][1])) << ","
       << static_cast<int>(stops[i][2] + f * (stops[i + 1][2] - stops[i][2])) << ")";
    return os.str();
}

}  // namespace detail

inline void write_line_plot(std::ostream& out, const std::vector<Series>& series,
                            PlotOptions opt = {}) {
    if (series.empty()) throw io_error("svg: no series to plot");
    double x_lo = 1e300, x_hi = -1e300, y_lo = 1e300, y_hi = -1e300;
    for (const auto& s : series)
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            if (opt.log_x && !(s.x[i] > 0.0)) continue;
            if (opt.log_y && !(s.y[i] > 0.0)) continue;
            x_lo = std::min(x_lo, s.x[i]);
            x_hi = std::max(x_hi, s.x[i]);
            y_lo = std::min(y_lo, s.y[i]);
            y_hi = std::max(y_hi, s.y[i]);
        }
    if (!(x_lo <= x_hi)) throw io_error("svg: no finite data in range");
    if (y_lo == y_hi) {
        y_lo -= 0.5;
        y_hi += 0.5;
    }

    const double ml = 70, mr = 20, mt = opt.title.empty() ? 20 : 40, mb = 50;
    detail::AxisMap xm{x_lo, x_hi, ml, opt.width - mr, opt.log_x};
    detail::AxisMap ym{y_lo, y_hi, opt.height - mb, mt, opt.log_y};

    out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
        << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << opt.width << "\" height=\""
        << opt.height << "\" viewBox=\"0 0 " << opt.width << " " << opt.height << "\">\n"
        << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    if (!opt.title.empty())
        out << "<text x=\"" << opt.width / 2 << "\" y=\"22\" text-anchor=\"middle\" "
            << "font-family=\"sans-serif\" font-size=\"15\">" << detail::esc(opt.title)
            << "</text>\n";

    for (double tx : detail::ticks(x_lo, x_hi, opt.log_x)) {
        const double px = xm(tx);
        out << "<line x1=\"" << detail::num(px) << "\" y1=\"" << mt << "\" x2=\""
            << detail::num(px) << "\" y2=\"" << opt.height - mb
            << "\" stroke=\"#dddddd\" stroke-width=\"1\"/>\n"
            << "<text x=\"" << detail::num(px) << "\" y=\"" << opt.height - mb + 18
            << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">"
            << detail::num(tx) << "</text>\n";
    }
    for (double ty : detail::ticks(y_lo, y_hi, opt.log_y)) {
        const double py = ym(ty);
        out << "<line x1=\"" << ml << "\" y1=\"" << detail::num(py) << "\" x2=\""
            << opt.width - mr << "\" y2=\"" << detail::num(py)
            << "\" stroke=\"#dddddd\" stroke-width=\"1\"/>\n"
            << "<text x=\"" << ml - 6 << "\" y=\"" << detail::num(py + 4)
            << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">"
            << detail::num(ty) << "</text>\n";
    }
    out << "<rect x=\"" << ml << "\" y=\"" << mt << "\" width=\"" << opt.width - ml - mr
        << "\" height=\"" << opt.height - mt - mb
        << "\" fill=\"none\" stroke=\"black\" stroke-width=\"1\"/>\n";
    if (!opt.x_label.empty())
        out << "<text x=\"" << (ml + opt.width - mr) / 2 << "\" y=\"" << opt.height - 12
            << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">"
            << detail::esc(opt.x_label) << "</text>\n";
    if (!opt.y_label.empty())
        out << "<text x=\"16\" y=\"" << (mt + opt.height - mb) / 2
            << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\" "
            << "transform=\"rotate(-90 16 " << (mt + opt.height - mb) / 2 << ")\">"
            << detail::esc(opt.y_label) << "</text>\n";

    int ci = 0;
    for (const auto& s : series) {
        const std::string color = s.color.empty() ? detail::palette(ci) : s.color;
        out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            if (opt.log_x && !(s.x[i] > 0.0)) continue;
            if (opt.log_y && !(s.y[i] > 0.0)) continue;
            out << detail::num(xm(s.x[i])) << "," << detail::num(ym(s.y[i])) << " ";
        }
        out << "\"/>\n";
        if (!s.label.empty())
            out << "<text x=\"" << opt.width - mr - 8 << "\" y=\"" << mt + 16 + 16 * ci
                << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"12\" fill=\""
                << color << "\">" << detail::esc(s.label) << "</text>\n";
        ++ci;
    }
    out << "</svg>\n";
}

/// Row-major grid heatmap; rows index the y axis bottom-up.
inline void write_heatmap(std::ostream& out, const std::vector<double>& x_nodes,
                          const std::vector<double>& y_nodes,
                          const std::vector<std::vector<double>>& values, PlotOptions opt = {}) {
    if (x_nodes.empty() || y_nodes.empty() || values.size() != y_nodes.size())
        throw io_error("svg: heatmap shape mismatch");
    double v_lo = 1e300, v_hi = -1e300;
    for (const auto& row : values)
        for (double v : row)
            if (std::isfinite(v)) {
                v_lo = std::min(v_lo, v);
                v_hi = std::max(v_hi, v);
            }
    if (!(v_lo <= v_hi)) throw io_error("svg: no finite heatmap values");
    if (v_lo == v_hi) v_hi = v_lo + 1.0;

    const double ml = 70, mr = 90, mt = opt.title.empty() ? 20 : 40, mb = 50;
    const double cw = (opt.width - ml - mr) / static_cast<double>(x_nodes.size());
    const double ch = (opt.height - mt - mb) / static_cast<double>(y_nodes.size());

    out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
        << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << opt.width << "\" height=\""
        << opt.height << "\" viewBox=\"0 0 " << opt.width << " " << opt.height << "\">\n"
        << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    if (!opt.title.empty())
        out << "<text x=\"" << opt.width / 2 << "\" y=\"22\" text-anchor=\"middle\" "
            << "font-family=\"sans-serif\" font-size=\"15\">" << detail::esc(opt.title)
            << "</text>\n";

    for (std::size_t r = 0; r < values.size(); ++r)
        for (std::size_t c = 0; c < values[r].size() && c < x_nodes.size(); ++c) {
            const double t = (values[r][c] - v_lo) / (v_hi - v_lo);
            out << "<rect x=\"" << detail::num(ml + cw * c) << "\" y=\""
                << detail::num(opt.height - mb - ch * (r + 1)) << "\" width=\""
                << detail::num(cw + 0.5) << "\" height=\"" << detail::num(ch + 0.5)
                << "\" fill=\"" << detail::viridis(t) << "\"/>\n";
        }

    // Color bar.
    for (int i = 0; i < 64; ++i) {
        const double t = static_cast<double>(i) / 63.0;
        out << "<rect x=\"" << opt.width - mr + 20 << "\" y=\""
            << detail::num(opt.height - mb - (opt.height - mt - mb) * (i + 1) / 64.0)
            << "\" width=\"16\" height=\""
            << detail::num((opt.height - mt - mb) / 64.0 + 0.5) << "\" fill=\""
            << detail::viridis(t) << "\"/>\n";
    }
    out << "<text x=\"" << opt.width - mr + 42 << "\" y=\"" << opt.height - mb
        << "\" font-family=\"sans-serif\" font-size=\"10\">" << detail::num(v_lo) << "</text>\n"
        << "<text x=\"" << opt.width - mr + 42 << "\" y=\"" << mt + 8
        << "\" font-family=\"sans-serif\" font-size=\"10\">" << detail::num(v_hi) << "</text>\n";

    out << "<rect x=\"" << ml << "\" y=\"" << mt << "\" width=\"" << opt.width - ml - mr
        << "\" height=\"" << opt.height - mt - mb
        << "\" fill=\"none\" stroke=\"black\" stroke-width=\"1\"/>\n";
    if (!opt.x_label.empty())
        out << "<text x=\"" << (ml + opt.width - mr) / 2 << "\" y=\"" << opt.height - 12
            << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">"
            << detail::esc(opt.x_label) << "</text>\n";
    if (!opt.y_label.empty())
        out << "<text x=\"16\" y=\"" << (mt + opt.height - mb) / 2
            << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\" "
            << "transform=\"rotate(-90 16 " << (mt + opt.height - mb) / 2 << ")\">"
            << detail::esc(opt.y_label) << "</text>\n";
    out << "<text x=\"" << ml << "\" y=\"" << opt.height - mb + 18
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">"
        << detail::num(x_nodes.front()) << "</text>\n"
        << "<text x=\"" << opt.width - mr << "\" y=\"" << opt.height - mb + 18
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">"
        << detail::num(x_nodes.back()) << "</text>\n"
        << "<text x=\"" << ml - 6 << "\" y=\"" << opt.height - mb
        << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">"
        << detail::num(y_nodes.front()) << "</text>\n"
        << "<text x=\"" << ml - 6 << "\" y=\"" << mt + 8
        << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">"
        << detail::num(y_nodes.back()) << "</text>\n";
    out << "</svg>\n";
}

}  // namespace emx::svg
