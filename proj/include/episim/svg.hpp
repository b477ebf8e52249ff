#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace episim {

/// One plotted curve; x is the day index, y the fraction.
struct SvgSeries {
    std::string label;
    std::string color;   // paper palette: red S/N, blue R/N, green I/N,
                         // purple I_G/n, orange S_G/n
    bool dashed = false; // dashed marks intervention variants
    std::vector<double> y;
};

struct SvgStyle {
    int width = 920;
    int height = 540;
    std::string x_label = "day";
    std::string y_label = "fraction";
    std::string title;
};

namespace detail {

inline double nice_tick(double span, int target_ticks) {
    const double raw = span / target_ticks;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    for (const double mult : {1.0, 2.0, 5.0, 10.0})
        if (raw <= mult * mag) return mult * mag;
    return 10.0 * mag;
}

inline std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", v);
    return buf;
}

} // namespace detail

/// Writes a line chart of the given day series. Throws when there is
/// nothing to plot.
inline void render_svg(const std::vector<SvgSeries>& series, const std::string& path,
                       const SvgStyle& style = {}) {
    std::size_t max_len = 0;
    double y_max = 0.0;
    for (const auto& s : series) {
        max_len = std::max(max_len, s.y.size());
        for (const double v : s.y) y_max = std::max(y_max, v);
    }
    if (series.empty() || max_len == 0) throw std::invalid_argument("render_svg: nothing to plot");
    if (y_max <= 0.0) y_max = 1.0;
    y_max *= 1.05;

    const double ml = 64, mr = 16, mt = style.title.empty() ? 16 : 36, mb = 44;
    const double pw = style.width - ml - mr;
    const double ph = style.height - mt - mb;
    const double x_max = static_cast<double>(max_len - 1 == 0 ? 1 : max_len - 1);
    const auto x_of = [&](double day) { return ml + day / x_max * pw; };
    const auto y_of = [&](double v) { return mt + (1.0 - v / y_max) * ph; };

    std::string svg;
    svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(style.width)
           + "\" height=\"" + std::to_string(style.height) + "\" viewBox=\"0 0 "
           + std::to_string(style.width) + " " + std::to_string(style.height) + "\">\n";
    svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    if (!style.title.empty())
        svg += "<text x=\"" + detail::fmt(ml) + "\" y=\"22\" font-size=\"15\" "
               "font-family=\"sans-serif\">" + style.title + "</text>\n";

    // grid and ticks
    const double x_step = detail::nice_tick(x_max, 8);
    const double y_step = detail::nice_tick(y_max, 6);
    svg += "<g stroke=\"#dddddd\" stroke-width=\"1\" font-size=\"11\" "
           "font-family=\"sans-serif\">\n";
    for (double gx = 0.0; gx <= x_max + 1e-9; gx += x_step) {
        svg += "<line x1=\"" + detail::fmt(x_of(gx)) + "\" y1=\"" + detail::fmt(mt) + "\" x2=\""
               + detail::fmt(x_of(gx)) + "\" y2=\"" + detail::fmt(mt + ph) + "\"/>\n";
        svg += "<text stroke=\"none\" fill=\"#444444\" x=\"" + detail::fmt(x_of(gx)) + "\" y=\""
               + detail::fmt(mt + ph + 16) + "\" text-anchor=\"middle\">" + detail::fmt(gx)
               + "</text>\n";
    }
    for (double gy = 0.0; gy <= y_max + 1e-12; gy += y_step) {
        svg += "<line x1=\"" + detail::fmt(ml) + "\" y1=\"" + detail::fmt(y_of(gy)) + "\" x2=\""
               + detail::fmt(ml + pw) + "\" y2=\"" + detail::fmt(y_of(gy)) + "\"/>\n";
        svg += "<text stroke=\"none\" fill=\"#444444\" x=\"" + detail::fmt(ml - 6) + "\" y=\""
               + detail::fmt(y_of(gy) + 4) + "\" text-anchor=\"end\">" + detail::fmt(gy)
               + "</text>\n";
    }
    svg += "</g>\n";

    // axes
    svg += "<g stroke=\"black\" stroke-width=\"1.2\">\n";
    svg += "<line x1=\"" + detail::fmt(ml) + "\" y1=\"" + detail::fmt(mt + ph) + "\" x2=\""
           + detail::fmt(ml + pw) + "\" y2=\"" + detail::fmt(mt + ph) + "\"/>\n";
    svg += "<line x1=\"" + detail::fmt(ml) + "\" y1=\"" + detail::fmt(mt) + "\" x2=\""
           + detail::fmt(ml) + "\" y2=\"" + detail::fmt(mt + ph) + "\"/>\n";
    svg += "</g>\n";
    svg += "<text x=\"" + detail::fmt(ml + pw / 2) + "\" y=\""
           + detail::fmt(style.height - 8.0) + "\" font-size=\"12\" font-family=\"sans-serif\" "
           "text-anchor=\"middle\">" + style.x_label + "</text>\n";
    svg += "<text x=\"14\" y=\"" + detail::fmt(mt + ph / 2)
           + "\" font-size=\"12\" font-family=\"sans-serif\" text-anchor=\"middle\" "
           "transform=\"rotate(-90 14 " + detail::fmt(mt + ph / 2) + ")\">" + style.y_label
           + "</text>\n";

    // curves
    for (const auto& s : series) {
        if (s.y.empty()) continue;
        svg += "<polyline fill=\"none\" stroke=\"" + s.color + "\" stroke-width=\"1.6\"";
        if (s.dashed) svg += " stroke-dasharray=\"7,4\"";
        svg += " points=\"";
        for (std::size_t t = 0; t < s.y.size(); ++t) {
            if (t) svg += ' ';
            svg += detail::fmt(x_of(static_cast<double>(t))) + ',' + detail::fmt(y_of(s.y[t]));
        }
        svg += "\"/>\n";
    }

    // legend
    double ly = mt + 10;
    for (const auto& s : series) {
        const double lx = ml + pw - 190;
        svg += "<line x1=\"" + detail::fmt(lx) + "\" y1=\"" + detail::fmt(ly) + "\" x2=\""
               + detail::fmt(lx + 26) + "\" y2=\"" + detail::fmt(ly) + "\" stroke=\"" + s.color
               + "\" stroke-width=\"1.6\"" + (s.dashed ? " stroke-dasharray=\"7,4\"" : "")
               + "/>\n";
        svg += "<text x=\"" + detail::fmt(lx + 32) + "\" y=\"" + detail::fmt(ly + 4)
               + "\" font-size=\"11\" font-family=\"sans-serif\">" + s.label + "</text>\n";
        ly += 16;
    }
    svg += "</svg>\n";

    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
    out << svg;
    if (!out) throw std::runtime_error("write failed for '" + path + "'");
}

} // namespace episim
