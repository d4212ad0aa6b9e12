// Minimal SVG line plots.
#pragma once

#include "hgdo/simulation.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace hgdo::plot {

struct Series {
    std::string name;
    std::vector<double> x;
    std::vector<double> y;
    bool dashed = false;
};

struct Panel {
    std::string title;
    std::string x_label;
    std::string y_label;
    std::vector<Series> series;
    bool equal_aspect = false;
};

struct Figure {
    std::string title;
    std::vector<Panel> panels;  // stacked vertically
    int width = 900;
    int panel_height = 260;
};

enum class Kind { Xy, Timeseries, Estimates };

std::string render_svg(const Figure& fig);
void write_svg(const Figure& fig, const std::filesystem::path& path);

/// x-y path against the reference.
Figure xy_figure(const sim::SimTrace& trace);
/// Position and attitude against their references.
Figure timeseries_figure(const sim::SimTrace& trace);
/// True and estimated disturbance per channel.
Figure estimates_figure(const sim::SimTrace& trace);

Figure make_figure(const sim::SimTrace& trace, Kind kind);

}  // namespace hgdo::plot
