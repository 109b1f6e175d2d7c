#pragma once

// Self-contained deterministic SVG line/contour plots for the reproduced
// figures. Byte-identical output for identical input; no external tooling.

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "bsa/core.hpp"
#include "bsa/geometry.hpp"

namespace bsa::io {

struct Series {
    std::string label;
    std::string color = "#1f77b4";
    bool dashed = false;
    std::vector<double> x, y;
};

struct Axes {
    std::string title, x_label, y_label;
    bool y_log = false;
};

/// Heatmap cells + overlay polylines (used for the xi map with its unity
/// contour); optional, empty means pure line plot.
struct Heatmap {
    std::vector<double> x, y;   // cell-center coordinates
    std::vector<double> value;  // row-major, y-major
    double vmin = 0, vmax = 1;
};

namespace detail {

inline std::string f6(double v) { return fmt_g(v, 6); }

struct Ticks {
    std::vector<double> values;
};

inline Ticks nice_ticks(double lo, double hi) {
    Ticks t;
    if (!(hi > lo)) {
        t.values = {lo};
        return t;
    }
    const double span = hi - lo;
    const double raw = span / 5.0;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    double step = mag;
    for (double m : {1.0, 2.0, 2.5, 5.0, 10.0})
        if (mag * m >= raw) {
            step = mag * m;
            break;
        }
    const double first = std::ceil(lo / step) * step;
    for (double v = first; v <= hi + step * 1e-9; v += step) t.values.push_back(v);
    return t;
}

inline std::string color_of(double t) {
    // simple blue -> white -> red map, clamped
    t = std::clamp(t, 0.0, 1.0);
    auto chan = [](double v) {
        return std::to_string(static_cast<int>(std::round(std::clamp(v, 0.0, 1.0) * 255)));
    };
    double r, g, b;
    if (t < 0.5) {
        const double u = t / 0.5;
        r = 0.23 + (1.0 - 0.23) * u;
        g = 0.40 + (1.0 - 0.40) * u;
        b = 0.80 + (1.0 - 0.80) * u;
    } else {
        const double u = (t - 0.5) / 0.5;
        r = 1.0;
        g = 1.0 - 0.73 * u;
        b = 1.0 - 0.84 * u;
    }
    return "rgb(" + chan(r) + "," + chan(g) + "," + chan(b) + ")";
}

}  // namespace detail

/// Render series (and an optional heatmap underlay) into a complete SVG
/// document. Throws on empty input.
inline std::string emit_svg(const std::vector<Series>& series, const Axes& axes,
                            const Heatmap* heatmap = nullptr,
                            const std::vector<std::vector<geometry::Vec2>>* overlays = nullptr) {
    size_t points = 0;
    for (const Series& s : series) points += s.x.size();
    if (heatmap) points += heatmap->value.size();
    if (points == 0) throw std::invalid_argument("emit_svg: no data");

    double xlo = std::numeric_limits<double>::infinity(), xhi = -xlo;
    double ylo = xlo, yhi = -xlo;
    auto expand = [&](double x, double y) {
        xlo = std::min(xlo, x);
        xhi = std::max(xhi, x);
        ylo = std::min(ylo, y);
        yhi = std::max(yhi, y);
    };
    for (const Series& s : series)
        for (size_t k = 0; k < s.x.size(); ++k) expand(s.x[k], s.y[k]);
    if (heatmap)
        for (double x : heatmap->x)
            for (double y : heatmap->y) expand(x, y);
    if (xhi == xlo) {
        xlo -= 1;
        xhi += 1;
    }
    if (yhi == ylo) {
        ylo -= 1;
        yhi += 1;
    }
    const double pad_x = 0.04 * (xhi - xlo), pad_y = 0.06 * (yhi - ylo);
    xlo -= pad_x;
    xhi += pad_x;
    ylo -= pad_y;
    yhi += pad_y;

    const int width = 640, height = 440;
    const int ml = 72, mr = 18, mt = 34, mb = 52;
    auto px = [&](double x) {
        return ml + (x - xlo) / (xhi - xlo) * (width - ml - mr);
    };
    auto py = [&](double y) {
        return height - mb - (y - ylo) / (yhi - ylo) * (height - mt - mb);
    };

    std::string svg;
    svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(width) +
           "\" height=\"" + std::to_string(height) + "\" viewBox=\"0 0 " +
           std::to_string(width) + " " + std::to_string(height) + "\">\n";
    svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

    if (heatmap && !heatmap->x.empty() && !heatmap->y.empty()) {
        const size_t nxc = heatmap->x.size(), nyc = heatmap->y.size();
        const double wx = nxc > 1 ? (heatmap->x[1] - heatmap->x[0]) : (xhi - xlo);
        const double wy = nyc > 1 ? (heatmap->y[1] - heatmap->y[0]) : (yhi - ylo);
        for (size_t r = 0; r < nyc; ++r)
            for (size_t c = 0; c < nxc; ++c) {
                const double v = heatmap->value[r * nxc + c];
                if (std::isnan(v)) continue;
                const double t = (v - heatmap->vmin) / (heatmap->vmax - heatmap->vmin);
                const double x0p = px(heatmap->x[c] - wx / 2), x1p = px(heatmap->x[c] + wx / 2);
                const double y0p = py(heatmap->y[r] + wy / 2), y1p = py(heatmap->y[r] - wy / 2);
                svg += "<rect x=\"" + detail::f6(x0p) + "\" y=\"" + detail::f6(y0p) +
                       "\" width=\"" + detail::f6(x1p - x0p) + "\" height=\"" +
                       detail::f6(y1p - y0p) + "\" fill=\"" + detail::color_of(t) + "\"/>\n";
            }
    }

    // axes box and ticks
    svg += "<rect x=\"" + detail::f6(ml) + "\" y=\"" + detail::f6(mt) + "\" width=\"" +
           detail::f6(width - ml - mr) + "\" height=\"" + detail::f6(height - mt - mb) +
           "\" fill=\"none\" stroke=\"black\"/>\n";
    for (double v : detail::nice_ticks(xlo, xhi).values) {
        svg += "<line x1=\"" + detail::f6(px(v)) + "\" y1=\"" + detail::f6(height - mb) +
               "\" x2=\"" + detail::f6(px(v)) + "\" y2=\"" + detail::f6(height - mb + 5) +
               "\" stroke=\"black\"/>\n";
        svg += "<text x=\"" + detail::f6(px(v)) + "\" y=\"" + detail::f6(height - mb + 18) +
               "\" font-size=\"11\" text-anchor=\"middle\">" + detail::f6(v) + "</text>\n";
    }
    for (double v : detail::nice_ticks(ylo, yhi).values) {
        svg += "<line x1=\"" + detail::f6(ml - 5) + "\" y1=\"" + detail::f6(py(v)) +
               "\" x2=\"" + detail::f6(ml) + "\" y2=\"" + detail::f6(py(v)) +
               "\" stroke=\"black\"/>\n";
        svg += "<text x=\"" + detail::f6(ml - 8) + "\" y=\"" + detail::f6(py(v) + 4) +
               "\" font-size=\"11\" text-anchor=\"end\">" + detail::f6(v) + "</text>\n";
    }
    svg += "<text x=\"" + detail::f6((ml + width - mr) / 2.0) + "\" y=\"" +
           detail::f6(height - 14) + "\" font-size=\"13\" text-anchor=\"middle\">" +
           axes.x_label + "</text>\n";
    svg += "<text x=\"16\" y=\"" + detail::f6((mt + height - mb) / 2.0) +
           "\" font-size=\"13\" text-anchor=\"middle\" transform=\"rotate(-90 16 " +
           detail::f6((mt + height - mb) / 2.0) + ")\">" + axes.y_label + "</text>\n";
    svg += "<text x=\"" + detail::f6(width / 2.0) +
           "\" y=\"20\" font-size=\"14\" text-anchor=\"middle\">" + axes.title + "</text>\n";

    for (const Series& s : series) {
        if (s.x.empty()) continue;
        svg += "<polyline fill=\"none\" stroke=\"" + s.color + "\" stroke-width=\"1.5\"";
        if (s.dashed) svg += " stroke-dasharray=\"6 4\"";
        svg += " points=\"";
        for (size_t k = 0; k < s.x.size(); ++k) {
            if (k) svg += ' ';
            svg += detail::f6(px(s.x[k])) + "," + detail::f6(py(s.y[k]));
        }
        svg += "\"/>\n";
    }
    if (overlays)
        for (const auto& line : *overlays) {
            if (line.empty()) continue;
            svg += "<polyline fill=\"none\" stroke=\"black\" stroke-width=\"2\" points=\"";
            for (size_t k = 0; k < line.size(); ++k) {
                if (k) svg += ' ';
                svg += detail::f6(px(line[k].x)) + "," + detail::f6(py(line[k].y));
            }
            svg += "\"/>\n";
        }

    // legend
    int ly = mt + 14;
    for (const Series& s : series) {
        if (s.label.empty()) continue;
        svg += "<line x1=\"" + detail::f6(width - mr - 150) + "\" y1=\"" + detail::f6(ly - 4) +
               "\" x2=\"" + detail::f6(width - mr - 122) + "\" y2=\"" + detail::f6(ly - 4) +
               "\" stroke=\"" + s.color + "\" stroke-width=\"2\"" +
               (s.dashed ? " stroke-dasharray=\"6 4\"" : "") + "/>\n";
        svg += "<text x=\"" + detail::f6(width - mr - 116) + "\" y=\"" + detail::f6(ly) +
               "\" font-size=\"11\">" + s.label + "</text>\n";
        ly += 16;
    }
    svg += "</svg>\n";
    return svg;
}

}  // namespace bsa::io
