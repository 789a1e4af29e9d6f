#include "hrrpnet/pipeline/report.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "hrrpnet/error.hpp"

namespace hrrpnet::pipeline::report {

namespace {

constexpr double kWidth = 640, kHeight = 400;
constexpr double kLeft = 70, kRight = 150, kTop = 40, kBottom = 55;
const char* const kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"};

std::string esc(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

std::string num(double v) {
    std::ostringstream os;
    os << std::setprecision(4) << v;
    return os.str();
}

struct Frame {
    double x0, x1, y0, y1;
    double px(double x) const { return kLeft + (x - x0) / (x1 - x0) * (kWidth - kLeft - kRight); }
    double py(double y) const { return kHeight - kBottom - (y - y0) / (y1 - y0) * (kHeight - kTop - kBottom); }
};

void open_svg(std::ostringstream& os, const PlotSpec& spec) {
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
       << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight << "\" font-family=\"sans-serif\" font-size=\"12\">\n"
       << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
       << "<text x=\"" << kWidth / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">" << esc(spec.title)
       << "</text>\n";
}

void axes(std::ostringstream& os, const Frame& f, const PlotSpec& spec, const std::vector<double>& xticks) {
    const double left = kLeft, right = kWidth - kRight, top = kTop, bottom = kHeight - kBottom;
    os << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << right - left << "\" height=\"" << bottom - top
       << "\" fill=\"none\" stroke=\"#333\"/>\n";
    for (int i = 0; i <= 5; ++i) {
        const double v = f.y0 + (f.y1 - f.y0) * i / 5.0;
        const double y = f.py(v);
        os << "<line x1=\"" << left << "\" x2=\"" << right << "\" y1=\"" << y << "\" y2=\"" << y
           << "\" stroke=\"#ddd\"/>\n<text x=\"" << left - 6 << "\" y=\"" << y + 4 << "\" text-anchor=\"end\">" << num(v)
           << "</text>\n";
    }
    for (double t : xticks) {
        const double x = f.px(t);
        os << "<line x1=\"" << x << "\" x2=\"" << x << "\" y1=\"" << bottom << "\" y2=\"" << bottom + 5
           << "\" stroke=\"#333\"/>\n<text x=\"" << x << "\" y=\"" << bottom + 18 << "\" text-anchor=\"middle\">"
           << num(t) << "</text>\n";
    }
    os << "<text x=\"" << (left + right) / 2 << "\" y=\"" << kHeight - 12 << "\" text-anchor=\"middle\">"
       << esc(spec.x_label) << "</text>\n"
       << "<text transform=\"translate(16," << (top + bottom) / 2 << ") rotate(-90)\" text-anchor=\"middle\">"
       << esc(spec.y_label) << "</text>\n";
}

void legend(std::ostringstream& os, std::size_t i, const std::string& label, const char* colour) {
    const double x = kWidth - kRight + 12, y = kTop + 14 + 20.0 * static_cast<double>(i);
    os << "<line x1=\"" << x << "\" x2=\"" << x + 22 << "\" y1=\"" << y << "\" y2=\"" << y << "\" stroke=\"" << colour
       << "\" stroke-width=\"2\"/>\n<text x=\"" << x + 28 << "\" y=\"" << y + 4 << "\">" << esc(label) << "</text>\n";
}

}  // namespace

std::string line_chart(const std::vector<Series>& series, const PlotSpec& spec) {
    double x0 = 0, x1 = 1, y0 = spec.y_min, y1 = spec.y_max;
    std::vector<double> xs;
    bool first = true;
    for (const auto& s : series) {
        if (s.x.size() != s.y.size()) throw ArgumentError("line_chart: series " + s.label + " has mismatched x and y");
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            if (first) {
                x0 = x1 = s.x[i];
                if (spec.y_auto) y0 = y1 = s.y[i];
                first = false;
            }
            x0 = std::min(x0, s.x[i]);
            x1 = std::max(x1, s.x[i]);
            if (spec.y_auto) {
                y0 = std::min(y0, s.y[i]);
                y1 = std::max(y1, s.y[i]);
            }
            if (std::find(xs.begin(), xs.end(), s.x[i]) == xs.end()) xs.push_back(s.x[i]);
        }
    }
    if (x1 == x0) x1 = x0 + 1;
    if (y1 == y0) y1 = y0 + 1;
    const Frame f{x0, x1, y0, y1};

    std::ostringstream os;
    open_svg(os, spec);
    axes(os, f, spec, xs);
    for (std::size_t k = 0; k < series.size(); ++k) {
        const auto& s = series[k];
        const char* colour = kPalette[k % std::size(kPalette)];
        std::vector<std::size_t> order(s.x.size());
        for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
        std::sort(order.begin(), order.end(), [&](auto a, auto b) { return s.x[a] < s.x[b]; });
        os << "<polyline fill=\"none\" stroke=\"" << colour << "\" stroke-width=\"2\" points=\"";
        for (auto i : order) os << f.px(s.x[i]) << ',' << f.py(s.y[i]) << ' ';
        os << "\"/>\n";
        for (auto i : order) {
            os << "<circle cx=\"" << f.px(s.x[i]) << "\" cy=\"" << f.py(s.y[i]) << "\" r=\"3.5\" fill=\"" << colour
               << "\"><title>" << esc(s.label) << ": " << num(s.y[i]) << "</title></circle>\n";
        }
        legend(os, k, s.label, colour);
    }
    os << "</svg>\n";
    return os.str();
}

std::string bar_line_overlay(const std::vector<double>& bars, const std::string& bar_label,
                             const std::vector<double>& line, const std::string& line_label, const PlotSpec& spec) {
    if (bars.size() != line.size() || bars.empty()) throw ArgumentError("bar_line_overlay: length mismatch");
    const auto n = static_cast<double>(bars.size());
    const Frame f{-0.5, n - 0.5, spec.y_min, spec.y_max};
    double bmax = 0.0;
    for (double b : bars) bmax = std::max(bmax, b);
    std::vector<double> ticks;
    for (std::size_t i = 0; i < bars.size(); ++i) ticks.push_back(static_cast<double>(i));

    std::ostringstream os;
    open_svg(os, spec);
    axes(os, f, spec, ticks);
    const double slot = f.px(1) - f.px(0);
    for (std::size_t i = 0; i < bars.size(); ++i) {
        // Bars share the vertical axis range, scaled so the tallest reaches the top.
        const double frac = bmax > 0 ? bars[i] / bmax : 0.0;
        const double top = f.py(spec.y_min + frac * (spec.y_max - spec.y_min));
        os << "<rect x=\"" << f.px(static_cast<double>(i)) - 0.4 * slot << "\" y=\"" << top << "\" width=\"" << 0.8 * slot
           << "\" height=\"" << f.py(spec.y_min) - top << "\" fill=\"#f4b6b6\"><title>" << esc(bar_label) << ": "
           << num(bars[i]) << "</title></rect>\n";
    }
    os << "<polyline fill=\"none\" stroke=\"" << kPalette[0] << "\" stroke-width=\"2\" points=\"";
    for (std::size_t i = 0; i < line.size(); ++i) os << f.px(static_cast<double>(i)) << ',' << f.py(line[i]) << ' ';
    os << "\"/>\n";
    for (std::size_t i = 0; i < line.size(); ++i) {
        os << "<circle cx=\"" << f.px(static_cast<double>(i)) << "\" cy=\"" << f.py(line[i]) << "\" r=\"3.5\" fill=\""
           << kPalette[0] << "\"/>\n";
    }
    legend(os, 0, line_label, kPalette[0]);
    legend(os, 1, bar_label + " (rel.)", "#f4b6b6");
    os << "</svg>\n";
    return os.str();
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream os(path);
    if (!os) throw IoError("cannot write " + path);
    os << text;
    if (!os) throw IoError("write failed for " + path);
}

}  // namespace hrrpnet::pipeline::report
