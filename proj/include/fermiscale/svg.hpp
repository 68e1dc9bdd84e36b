#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <limits>
#include <string>
#include <vector>

#include "fermiscale/io.hpp"

namespace fermiscale {

struct PlotSeries {
    std::string label;
    std::vector<double> x;
    std::vector<double> y;
};

/// Minimal standalone SVG line plot: axes, a handful of ticks, one polyline
/// per series, legend in the top-right corner.
inline void write_svg_plot(const std::filesystem::path& path, const std::string& title,
                           const std::string& xlabel, const std::string& ylabel,
                           const std::vector<PlotSeries>& series) {
    const int width = 720, height = 480;
    const int ml = 70, mr = 20, mt = 40, mb = 50;
    const double pw = width - ml - mr, ph = height - mt - mb;

    double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
    double ymin = xmin, ymax = -xmin;
    for (const auto& s : series)
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            xmin = std::min(xmin, s.x[i]);
            xmax = std::max(xmax, s.x[i]);
            ymin = std::min(ymin, s.y[i]);
            ymax = std::max(ymax, s.y[i]);
        }
    if (!(xmax > xmin)) { xmin -= 0.5; xmax += 0.5; }
    if (!(ymax > ymin)) { ymin -= 0.5; ymax += 0.5; }
    const double ypad = 0.05 * (ymax - ymin);
    ymin -= ypad;
    ymax += ypad;

    auto px = [&](double x) { return ml + pw * (x - xmin) / (xmax - xmin); };
    auto py = [&](double y) { return mt + ph * (1.0 - (y - ymin) / (ymax - ymin)); };
    auto num = [](double v) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.4g", v);
        return std::string(buf);
    };

    static const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                    "#ff7f0e", "#8c564b", "#17becf"};

    std::string svg;
    svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(width) +
           "\" height=\"" + std::to_string(height) + "\" font-family=\"sans-serif\">\n";
    svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    svg += "<text x=\"" + std::to_string(width / 2) + "\" y=\"24\" text-anchor=\"middle\" "
           "font-size=\"15\">" + title + "</text>\n";

    // frame and ticks
    svg += "<rect x=\"" + std::to_string(ml) + "\" y=\"" + std::to_string(mt) + "\" width=\"" +
           num(pw) + "\" height=\"" + num(ph) + "\" fill=\"none\" stroke=\"black\"/>\n";
    const int nticks = 5;
    for (int t = 0; t <= nticks; ++t) {
        const double fx = xmin + (xmax - xmin) * t / nticks;
        const double fy = ymin + (ymax - ymin) * t / nticks;
        svg += "<line x1=\"" + num(px(fx)) + "\" y1=\"" + num(mt + ph) + "\" x2=\"" + num(px(fx)) +
               "\" y2=\"" + num(mt + ph + 5) + "\" stroke=\"black\"/>\n";
        svg += "<text x=\"" + num(px(fx)) + "\" y=\"" + num(mt + ph + 20) +
               "\" text-anchor=\"middle\" font-size=\"11\">" + num(fx) + "</text>\n";
        svg += "<line x1=\"" + num(ml - 5.0) + "\" y1=\"" + num(py(fy)) + "\" x2=\"" +
               std::to_string(ml) + "\" y2=\"" + num(py(fy)) + "\" stroke=\"black\"/>\n";
        svg += "<text x=\"" + num(ml - 8.0) + "\" y=\"" + num(py(fy) + 4) +
               "\" text-anchor=\"end\" font-size=\"11\">" + num(fy) + "</text>\n";
    }
    svg += "<text x=\"" + std::to_string(ml + static_cast<int>(pw) / 2) + "\" y=\"" +
           std::to_string(height - 12) + "\" text-anchor=\"middle\" font-size=\"13\">" + xlabel +
           "</text>\n";
    svg += "<text x=\"16\" y=\"" + std::to_string(mt + static_cast<int>(ph) / 2) +
           "\" text-anchor=\"middle\" font-size=\"13\" transform=\"rotate(-90 16 " +
           std::to_string(mt + static_cast<int>(ph) / 2) + ")\">" + ylabel + "</text>\n";

    for (std::size_t s = 0; s < series.size(); ++s) {
        const char* color = palette[s % (sizeof palette / sizeof *palette)];
        std::string pts;
        for (std::size_t i = 0; i < series[s].x.size(); ++i)
            pts += num(px(series[s].x[i])) + "," + num(py(series[s].y[i])) + " ";
        svg += "<polyline fill=\"none\" stroke=\"" + std::string(color) +
               "\" stroke-width=\"1.5\" points=\"" + pts + "\"/>\n";
        const double ly = mt + 16.0 + 16.0 * s;
        svg += "<line x1=\"" + num(ml + pw - 130) + "\" y1=\"" + num(ly - 4) + "\" x2=\"" +
               num(ml + pw - 105) + "\" y2=\"" + num(ly - 4) + "\" stroke=\"" + color +
               "\" stroke-width=\"2\"/>\n";
        svg += "<text x=\"" + num(ml + pw - 100) + "\" y=\"" + num(ly) +
               "\" font-size=\"12\">" + series[s].label + "</text>\n";
    }
    svg += "</svg>\n";
    write_text_file(path, svg);
}

} // namespace fermiscale
