#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "preflab/stats.hpp"

namespace preflab {

struct PlotSeries {
    std::string label;
    std::vector<double> x, y;
};

struct PlotSpec {
    std::string title;
    std::string x_label, y_label;
    std::vector<PlotSeries> series;
    // Drawn as a straight overlay; its r appears in the legend.
    std::optional<LinearFit> fit;
    bool connect_points = false;  // line plot instead of scatter
    int width = 640, height = 480;
};

std::string render_svg(const PlotSpec& spec);  // InputError when empty
void write_svg(const std::filesystem::path& path, const PlotSpec& spec);

}  // namespace preflab
