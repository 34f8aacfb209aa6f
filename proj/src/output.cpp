#include "coldamp/output.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

namespace coldamp {

std::string format_number(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.9g", v);
    return buf;
}

std::string to_csv(const Table& t) {
    std::ostringstream out;
    for (size_t i = 0; i < t.columns.size(); ++i)
        out << (i ? "," : "") << t.columns[i];
    out << "\n";
    for (const auto& row : t.rows) {
        for (size_t i = 0; i < row.size(); ++i)
            out << (i ? "," : "") << format_number(row[i]);
        out << "\n";
    }
    return out.str();
}

std::string to_json(const Table& t) {
    std::ostringstream out;
    out << "{\n  \"columns\": [";
    for (size_t i = 0; i < t.columns.size(); ++i)
        out << (i ? ", " : "") << "\"" << t.columns[i] << "\"";
    out << "],\n  \"rows\": [\n";
    for (size_t r = 0; r < t.rows.size(); ++r) {
        out << "    [";
        for (size_t i = 0; i < t.rows[r].size(); ++i)
            out << (i ? ", " : "") << format_number(t.rows[r][i]);
        out << "]" << (r + 1 < t.rows.size() ? "," : "") << "\n";
    }
    out << "  ]\n}\n";
    return out.str();
}

namespace {

struct Extent {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    void add(double v) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    double span() const { return hi > lo ? hi - lo : 1.0; }
};

const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

}  // namespace

std::string to_svg(const std::vector<Series>& series, const std::string& x_label,
                   const std::string& y_label, bool log_x) {
    const int width = 720, height = 480;
    const int ml = 70, mr = 20, mt = 20, mb = 50;
    Extent ex, ey;
    for (const Series& s : series)
        for (size_t i = 0; i < s.x.size(); ++i) {
            double x = log_x ? std::log10(s.x[i]) : s.x[i];
            if (!std::isfinite(x) || !std::isfinite(s.y[i])) continue;
            ex.add(x);
            ey.add(s.y[i]);
        }
    auto px = [&](double x) {
        double v = log_x ? std::log10(x) : x;
        return ml + (v - ex.lo) / ex.span() * (width - ml - mr);
    };
    auto py = [&](double y) { return height - mb - (y - ey.lo) / ey.span() * (height - mt - mb); };

    std::ostringstream out;
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
        << height << "\">\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out << "<rect x=\"" << ml << "\" y=\"" << mt << "\" width=\"" << width - ml - mr
        << "\" height=\"" << height - mt - mb << "\" fill=\"none\" stroke=\"#333\"/>\n";
    // axis ticks
    for (int i = 0; i <= 5; ++i) {
        double fx = ex.lo + ex.span() * i / 5.0;
        double fy = ey.lo + ey.span() * i / 5.0;
        double tx = ml + (width - ml - mr) * i / 5.0;
        double ty = height - mb - (height - mt - mb) * i / 5.0;
        out << "<line x1=\"" << tx << "\" y1=\"" << height - mb << "\" x2=\"" << tx << "\" y2=\""
            << height - mb + 5 << "\" stroke=\"#333\"/>\n";
        out << "<text x=\"" << tx << "\" y=\"" << height - mb + 18
            << "\" font-size=\"11\" text-anchor=\"middle\">"
            << format_number(log_x ? std::pow(10.0, fx) : fx) << "</text>\n";
        out << "<line x1=\"" << ml - 5 << "\" y1=\"" << ty << "\" x2=\"" << ml << "\" y2=\"" << ty
            << "\" stroke=\"#333\"/>\n";
        out << "<text x=\"" << ml - 8 << "\" y=\"" << ty + 4
            << "\" font-size=\"11\" text-anchor=\"end\">" << format_number(fy) << "</text>\n";
    }
    out << "<text x=\"" << (ml + width - mr) / 2 << "\" y=\"" << height - 12
        << "\" font-size=\"13\" text-anchor=\"middle\">" << x_label << "</text>\n";
    out << "<text x=\"16\" y=\"" << (mt + height - mb) / 2
        << "\" font-size=\"13\" text-anchor=\"middle\" transform=\"rotate(-90 16 "
        << (mt + height - mb) / 2 << ")\">" << y_label << "</text>\n";

    for (size_t s = 0; s < series.size(); ++s) {
        out << "<polyline fill=\"none\" stroke=\"" << kColors[s % 6]
            << "\" stroke-width=\"1.5\" points=\"";
        for (size_t i = 0; i < series[s].x.size(); ++i) {
            if (!std::isfinite(series[s].y[i])) continue;
            out << px(series[s].x[i]) << "," << py(series[s].y[i]) << " ";
        }
        out << "\"/>\n";
        out << "<text x=\"" << width - mr - 10 << "\" y=\"" << mt + 16 + 16 * s
            << "\" font-size=\"12\" text-anchor=\"end\" fill=\"" << kColors[s % 6] << "\">"
            << series[s].label << "</text>\n";
    }
    out << "</svg>\n";
    return out.str();
}

}  // namespace coldamp
