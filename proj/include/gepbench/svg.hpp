#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace gepbench {

// One labeled series; yerr (when nonempty) draws symmetric error bars.
struct PlotSeries {
    std::string label;
    std::vector<double> x;
    std::vector<double> y;
    std::vector<double> yerr;
};

struct PlotSpec {
    std::string title;
    std::string x_label;
    std::string y_label;
    std::vector<PlotSeries> series;
};

// Deterministic SVG: identical inputs produce identical bytes. Data points
// are <circle class="marker">, error bars <line class="errorbar">.
std::string render_plot(const PlotSpec& spec);
void emit_plot(const PlotSpec& spec, const std::filesystem::path& path);

} // namespace gepbench
