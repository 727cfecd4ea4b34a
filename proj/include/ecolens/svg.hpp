#pragma once

#include <string>
#include <utility>
#include <vector>

namespace ecolens::svg {

struct Series {
    std::string label;
    std::vector<std::pair<double, double>> points;
};

struct Axes {
    std::string title;
    std::string x_label;
    std::string y_label;
    bool log_x = false;
    bool log_y = false;
    bool diagonal = false; // y = x guide
};

// Multi-series line chart. Log axes drop non-positive points.
std::string line_chart(const std::vector<Series>& series, const Axes& axes,
                       int width = 760, int height = 520);

// Grouped bars: one group of bars per category, one bar per series.
struct BarGroup {
    std::string category;
    std::vector<double> values; // one per series label
};
std::string bar_chart(const std::vector<std::string>& series_labels,
                      const std::vector<BarGroup>& groups, const Axes& axes,
                      int width = 760, int height = 520);

// One labeled row per entry, a dot at the value, and an optional reference
// rule drawn vertically at `rule`.
struct DotRow {
    std::string label;
    double value = 0;
};
std::string dot_chart(const std::vector<DotRow>& rows, double rule, const Axes& axes,
                      int width = 560, int row_height = 18);

// Side-by-side composition of already-rendered panels.
std::string hstack(const std::vector<std::string>& panels);

} // namespace ecolens::svg
