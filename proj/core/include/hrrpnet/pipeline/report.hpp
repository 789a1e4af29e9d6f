#pragma once

#include <string>
#include <vector>

namespace hrrpnet::pipeline::report {

struct Series {
    std::string label;
    std::vector<double> x;
    std::vector<double> y;
};

struct PlotSpec {
    std::string title;
    std::string x_label;
    std::string y_label;
    double y_min = 0.0;
    double y_max = 1.0;
    bool y_auto = false;
};

/// Self-contained SVG line chart with markers and a legend.
std::string line_chart(const std::vector<Series>& series, const PlotSpec& spec);

/// Bars (one per category) overlaid with a line on a secondary axis.
std::string bar_line_overlay(const std::vector<double>& bars, const std::string& bar_label,
                             const std::vector<double>& line, const std::string& line_label, const PlotSpec& spec);

void write_text(const std::string& path, const std::string& text);

}  // namespace hrrpnet::pipeline::report
