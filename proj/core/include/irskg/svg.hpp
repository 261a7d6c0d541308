#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace irskg {

struct Series {
    std::string name;
    std::vector<double> x;
    std::vector<double> y;
};

struct ChartLabels {
    std::string title;
    std::string x_axis;
    std::string y_axis;
};

// Minimal SVG line chart with markers and a legend; NaN points are skipped.
void write_line_chart(std::ostream& out, const ChartLabels& labels, const std::vector<Series>& series);

}  // namespace irskg
