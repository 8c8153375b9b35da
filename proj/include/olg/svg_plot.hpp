#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

namespace olg {

// Minimal static SVG emitters for the harness plots. No interactivity, just
// line charts with a +-1 std band and category scatter plots.

namespace svg_detail {

inline std::string num(double v) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

struct Frame {
    double width = 640, height = 420;
    double left = 60, right = 20, top = 30, bottom = 45;
    double xmin = 0, xmax = 1, ymin = 0, ymax = 1;

    double px(double x) const {
        return left + (x - xmin) / (xmax - xmin) * (width - left - right);
    }
    double py(double y) const {
        return height - bottom - (y - ymin) / (ymax - ymin) * (height - top - bottom);
    }
};

inline void open_svg(std::ostream& out, const Frame& f, const std::string& title) {
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << f.width << "\" height=\""
        << f.height << "\" viewBox=\"0 0 " << f.width << ' ' << f.height << "\">\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out << "<text x=\"" << f.width / 2 << "\" y=\"18\" text-anchor=\"middle\" "
        << "font-family=\"sans-serif\" font-size=\"13\">" << title << "</text>\n";
    // axes
    out << "<line x1=\"" << f.left << "\" y1=\"" << f.height - f.bottom << "\" x2=\""
        << f.width - f.right << "\" y2=\"" << f.height - f.bottom
        << "\" stroke=\"black\"/>\n";
    out << "<line x1=\"" << f.left << "\" y1=\"" << f.top << "\" x2=\"" << f.left << "\" y2=\""
        << f.height - f.bottom << "\" stroke=\"black\"/>\n";
    // min/max tick labels
    out << "<text x=\"" << f.left << "\" y=\"" << f.height - f.bottom + 16
        << "\" font-family=\"sans-serif\" font-size=\"10\" text-anchor=\"middle\">"
        << num(f.xmin) << "</text>\n";
    out << "<text x=\"" << f.width - f.right << "\" y=\"" << f.height - f.bottom + 16
        << "\" font-family=\"sans-serif\" font-size=\"10\" text-anchor=\"middle\">"
        << num(f.xmax) << "</text>\n";
    out << "<text x=\"" << f.left - 6 << "\" y=\"" << f.height - f.bottom
        << "\" font-family=\"sans-serif\" font-size=\"10\" text-anchor=\"end\">" << num(f.ymin)
        << "</text>\n";
    out << "<text x=\"" << f.left - 6 << "\" y=\"" << f.top + 4
        << "\" font-family=\"sans-serif\" font-size=\"10\" text-anchor=\"end\">" << num(f.ymax)
        << "</text>\n";
}

} // namespace svg_detail

// Per-step line plot with a +-1 std shaded band and an optional vertical
// dashed marker (the training horizon).
inline void plot_curve_svg(std::ostream& out, const std::vector<double>& x,
                           const std::vector<double>& mean, const std::vector<double>& std_dev,
                           double vline_x, const std::string& title) {
    if (x.empty() || x.size() != mean.size() || x.size() != std_dev.size())
        throw std::invalid_argument("plot_curve_svg: empty or mismatched columns");
    svg_detail::Frame f;
    f.xmin = *std::min_element(x.begin(), x.end());
    f.xmax = *std::max_element(x.begin(), x.end());
    if (f.xmax == f.xmin) f.xmax = f.xmin + 1;
    f.ymin = mean.front() - std_dev.front();
    f.ymax = mean.front() + std_dev.front();
    for (std::size_t i = 0; i < mean.size(); ++i) {
        f.ymin = std::min(f.ymin, mean[i] - std_dev[i]);
        f.ymax = std::max(f.ymax, mean[i] + std_dev[i]);
    }
    if (f.ymax == f.ymin) {
        f.ymin -= 1;
        f.ymax += 1;
    }
    double pad = 0.05 * (f.ymax - f.ymin);
    f.ymin -= pad;
    f.ymax += pad;

    svg_detail::open_svg(out, f, title);

    out << "<polygon fill=\"steelblue\" fill-opacity=\"0.25\" stroke=\"none\" points=\"";
    for (std::size_t i = 0; i < x.size(); ++i)
        out << svg_detail::num(f.px(x[i])) << ',' << svg_detail::num(f.py(mean[i] + std_dev[i])) << ' ';
    for (std::size_t i = x.size(); i-- > 0;)
        out << svg_detail::num(f.px(x[i])) << ',' << svg_detail::num(f.py(mean[i] - std_dev[i])) << ' ';
    out << "\"/>\n";

    out << "<polyline fill=\"none\" stroke=\"steelblue\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < x.size(); ++i)
        out << svg_detail::num(f.px(x[i])) << ',' << svg_detail::num(f.py(mean[i])) << ' ';
    out << "\"/>\n";

    if (vline_x >= f.xmin && vline_x <= f.xmax) {
        out << "<line x1=\"" << svg_detail::num(f.px(vline_x)) << "\" y1=\"" << f.top
            << "\" x2=\"" << svg_detail::num(f.px(vline_x)) << "\" y2=\"" << f.height - f.bottom
            << "\" stroke=\"gray\" stroke-dasharray=\"5,4\"/>\n";
    }
    out << "</svg>\n";
}

// Category scatter: black initial, red precedent, blue successor.
inline void plot_scatter_svg(std::ostream& out, const std::vector<double>& x,
                             const std::vector<double>& y,
                             const std::vector<std::string>& category,
                             const std::string& title) {
    if (x.empty() || x.size() != y.size() || x.size() != category.size())
        throw std::invalid_argument("plot_scatter_svg: empty or mismatched columns");
    svg_detail::Frame f;
    f.xmin = *std::min_element(x.begin(), x.end());
    f.xmax = *std::max_element(x.begin(), x.end());
    f.ymin = *std::min_element(y.begin(), y.end());
    f.ymax = *std::max_element(y.begin(), y.end());
    if (f.xmax == f.xmin) f.xmax = f.xmin + 1;
    if (f.ymax == f.ymin) f.ymax = f.ymin + 1;

    svg_detail::open_svg(out, f, title);
    for (std::size_t i = 0; i < x.size(); ++i) {
        const char* color = "black";
        if (category[i] == "precedent") color = "red";
        else if (category[i] == "successor") color = "blue";
        else if (category[i] != "initial")
            throw std::invalid_argument("plot_scatter_svg: unknown category " + category[i]);
        out << "<circle cx=\"" << svg_detail::num(f.px(x[i])) << "\" cy=\""
            << svg_detail::num(f.py(y[i])) << "\" r=\"2\" fill=\"" << color
            << "\" fill-opacity=\"0.6\"/>\n";
    }
    out << "</svg>\n";
}

} // namespace olg
