#pragma once

#include <string>
#include <vector>

namespace freqprin::report {

struct Series {
    std::string name;
    std::vector<double> xs;
    std::vector<double> ys;
};

struct ChartSpec {
    std::string title;
    std::string x_label;
    std::string y_label;
    bool log_y = true;
};

/// Self-contained SVG line chart, one polyline per series. Points that cannot
/// be drawn (non-finite, or non-positive on a log axis) are skipped.
std::string line_chart_svg(const ChartSpec& spec, const std::vector<Series>& series);

/// Writes `text` to `path`. Throws IoError.
void write_text(const std::string& path, const std::string& text);
std::string read_text(const std::string& path);

}  // namespace freqprin::report
