#pragma once

#include <string>
#include <vector>

namespace coldamp {

/// Rectangular numeric table with named columns. All serializations print
/// numbers with 9 significant digits so identical inputs give byte-identical
/// output.
struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
};

std::string format_number(double v);  // %.9g

std::string to_csv(const Table& t);

/// {"columns": [...], "rows": [[...], ...]} with the same number formatting
/// as the CSV writer.
std::string to_json(const Table& t);

/// One named curve for the SVG plot.
struct Series {
    std::string label;
    std::vector<double> x;
    std::vector<double> y;
};

/// Minimal line plot (presentation only, excluded from golden comparisons).
std::string to_svg(const std::vector<Series>& series, const std::string& x_label,
                   const std::string& y_label, bool log_x);

}  // namespace coldamp
