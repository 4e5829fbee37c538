#include "gepbench/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "gepbench/errors.hpp"

namespace gepbench {

namespace {

constexpr double kWidth = 640, kHeight = 420;
constexpr double kLeft = 70, kRight = 600, kTop = 50, kBottom = 360;

const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                         "#ff7f0e", "#8c564b"};

std::string fmt(double v) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

struct Scale {
    double lo, hi, px_lo, px_hi;
    double operator()(double v) const {
        if (hi == lo) return 0.5 * (px_lo + px_hi);
        return px_lo + (v - lo) / (hi - lo) * (px_hi - px_lo);
    }
};

std::string escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            default: out += c;
        }
    }
    return out;
}

} // namespace

std::string render_plot(const PlotSpec& spec) {
    if (spec.series.empty())
        fail(ErrorKind::empty_input, "render_plot: no series");
    double xmin = 0, xmax = 0, ymin = 0, ymax = 0;
    bool first = true;
    for (const auto& s : spec.series) {
        if (s.x.size() != s.y.size())
            fail(ErrorKind::length_mismatch,
                 "series '" + s.label + "': x/y lengths differ");
        if (!s.yerr.empty() && s.yerr.size() != s.y.size())
            fail(ErrorKind::length_mismatch,
                 "series '" + s.label + "': yerr length differs");
        if (s.x.empty())
            fail(ErrorKind::empty_input, "series '" + s.label + "' is empty");
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            const double e = s.yerr.empty() ? 0.0 : s.yerr[i];
            if (first) {
                xmin = xmax = s.x[i];
                ymin = s.y[i] - e;
                ymax = s.y[i] + e;
                first = false;
            } else {
                xmin = std::min(xmin, s.x[i]);
                xmax = std::max(xmax, s.x[i]);
                ymin = std::min(ymin, s.y[i] - e);
                ymax = std::max(ymax, s.y[i] + e);
            }
        }
    }
    const double xpad = xmax == xmin ? 1.0 : 0.05 * (xmax - xmin);
    const double ypad = ymax == ymin ? 1.0 : 0.08 * (ymax - ymin);
    const Scale sx{xmin - xpad, xmax + xpad, kLeft, kRight};
    const Scale sy{ymin - ypad, ymax + ypad, kBottom, kTop};

    std::string svg;
    svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + fmt(kWidth) +
           "\" height=\"" + fmt(kHeight) + "\" viewBox=\"0 0 " + fmt(kWidth) +
           " " + fmt(kHeight) + "\">\n";
    svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    svg += "<text x=\"" + fmt(0.5 * (kLeft + kRight)) + "\" y=\"24\" "
           "text-anchor=\"middle\" font-size=\"16\" font-family=\"sans-serif\">" +
           escape(spec.title) + "</text>\n";

    // axes
    svg += "<line class=\"axis\" x1=\"" + fmt(kLeft) + "\" y1=\"" +
           fmt(kBottom) + "\" x2=\"" + fmt(kRight) + "\" y2=\"" + fmt(kBottom) +
           "\" stroke=\"black\"/>\n";
    svg += "<line class=\"axis\" x1=\"" + fmt(kLeft) + "\" y1=\"" + fmt(kTop) +
           "\" x2=\"" + fmt(kLeft) + "\" y2=\"" + fmt(kBottom) +
           "\" stroke=\"black\"/>\n";
    for (int t = 0; t <= 4; ++t) {
        const double fx = sx.lo + (sx.hi - sx.lo) * t / 4.0;
        const double fy = sy.lo + (sy.hi - sy.lo) * t / 4.0;
        svg += "<text class=\"xtick\" x=\"" + fmt(sx(fx)) + "\" y=\"" +
               fmt(kBottom + 18) +
               "\" text-anchor=\"middle\" font-size=\"11\" "
               "font-family=\"sans-serif\">" + fmt(fx) + "</text>\n";
        svg += "<text class=\"ytick\" x=\"" + fmt(kLeft - 8) + "\" y=\"" +
               fmt(sy(fy) + 4) +
               "\" text-anchor=\"end\" font-size=\"11\" "
               "font-family=\"sans-serif\">" + fmt(fy) + "</text>\n";
    }
    svg += "<text x=\"" + fmt(0.5 * (kLeft + kRight)) + "\" y=\"" +
           fmt(kHeight - 12) +
           "\" text-anchor=\"middle\" font-size=\"13\" "
           "font-family=\"sans-serif\">" + escape(spec.x_label) + "</text>\n";
    svg += "<text x=\"18\" y=\"" + fmt(0.5 * (kTop + kBottom)) +
           "\" text-anchor=\"middle\" font-size=\"13\" "
           "font-family=\"sans-serif\" transform=\"rotate(-90 18 " +
           fmt(0.5 * (kTop + kBottom)) + ")\">" + escape(spec.y_label) +
           "</text>\n";

    for (std::size_t si = 0; si < spec.series.size(); ++si) {
        const auto& s = spec.series[si];
        const std::string color = kColors[si % std::size(kColors)];
        if (s.x.size() > 1) {
            svg += "<polyline class=\"series\" fill=\"none\" stroke=\"" +
                   color + "\" stroke-width=\"1.5\" points=\"";
            for (std::size_t i = 0; i < s.x.size(); ++i) {
                if (i) svg += " ";
                svg += fmt(sx(s.x[i])) + "," + fmt(sy(s.y[i]));
            }
            svg += "\"/>\n";
        }
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            if (!s.yerr.empty()) {
                svg += "<line class=\"errorbar\" stroke=\"" + color +
                       "\" x1=\"" + fmt(sx(s.x[i])) + "\" y1=\"" +
                       fmt(sy(s.y[i] - s.yerr[i])) + "\" x2=\"" +
                       fmt(sx(s.x[i])) + "\" y2=\"" +
                       fmt(sy(s.y[i] + s.yerr[i])) + "\"/>\n";
            }
            svg += "<circle class=\"marker\" fill=\"" + color + "\" r=\"3\" "
                   "cx=\"" + fmt(sx(s.x[i])) + "\" cy=\"" + fmt(sy(s.y[i])) +
                   "\"/>\n";
        }
        svg += "<text class=\"legend\" x=\"" + fmt(kRight - 150) + "\" y=\"" +
               fmt(kTop + 16.0 * static_cast<double>(si)) +
               "\" font-size=\"12\" font-family=\"sans-serif\" fill=\"" +
               color + "\">" + escape(s.label) + "</text>\n";
    }
    svg += "</svg>\n";
    return svg;
}

void emit_plot(const PlotSpec& spec, const std::filesystem::path& path) {
    const std::string svg = render_plot(spec);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) fail(ErrorKind::io, "cannot open for writing: " + path.string());
    out << svg;
    if (!out) fail(ErrorKind::io, "write failed: " + path.string());
}

} // namespace gepbench
