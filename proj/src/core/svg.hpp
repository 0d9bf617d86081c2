#pragma once

#include <string>
#include <vector>

namespace pctv::svg {

struct Series {
    std::string label;
    std::vector<double> x;
    std::vector<double> y;
    bool polyline = false;  // markers otherwise
    std::string color = "#1f77b4";
    double marker_radius = 3.0;
};

struct Figure {
    std::string title;
    std::string x_label;
    std::string y_label;
    bool log_x = false;
    bool equal_aspect = false;
    std::vector<Series> series;
};

/// Standalone SVG document: frame, min/max tick labels, legend.
std::string render(const Figure& figure);

}  // namespace pctv::svg
