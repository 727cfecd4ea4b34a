#include "ecolens/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace ecolens::svg {

namespace {

const char* kPalette[] = {
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b",
    "#e377c2", "#7f7f7f", "#bcbd22", "#17becf", "#393b79", "#ad494a",
};
constexpr int kPaletteSize = 12;

std::string num(double v) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

std::string esc(const std::string& s) {
    std::string out;
    out.reserve(s.size());
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

// Short human form for tick values: powers of ten as 10^k on log axes,
// otherwise %g.
std::string tick_text(double v) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%g", v);
    return buf;
}

struct Range {
    double lo = 0, hi = 1;
};

Range span(const std::vector<double>& vals, bool log_scale) {
    Range r;
    bool first = true;
    for (double v : vals) {
        if (log_scale && v <= 0) continue;
        if (first) {
            r.lo = r.hi = v;
            first = false;
        } else {
            r.lo = std::min(r.lo, v);
            r.hi = std::max(r.hi, v);
        }
    }
    if (first) {
        r.lo = log_scale ? 1 : 0;
        r.hi = log_scale ? 10 : 1;
    }
    if (r.lo == r.hi) {
        if (log_scale) {
            r.lo /= 2;
            r.hi *= 2;
        } else {
            r.lo -= 1;
            r.hi += 1;
        }
    }
    return r;
}

// Tick positions: decades for log axes, otherwise ~6 ticks at a nice step.
std::vector<double> ticks(const Range& r, bool log_scale) {
    std::vector<double> out;
    if (log_scale) {
        int lo = (int)std::floor(std::log10(r.lo));
        int hi = (int)std::ceil(std::log10(r.hi));
        if (hi - lo > 12) { // thin out very wide spans
            int step = (hi - lo + 11) / 12;
            for (int e = lo; e <= hi; e += step) out.push_back(std::pow(10.0, e));
        } else {
            for (int e = lo; e <= hi; ++e) out.push_back(std::pow(10.0, e));
        }
        return out;
    }
    double raw = (r.hi - r.lo) / 6.0;
    double mag = std::pow(10.0, std::floor(std::log10(raw)));
    double step = mag;
    for (double m : {1.0, 2.0, 5.0, 10.0}) {
        if (mag * m >= raw) {
            step = mag * m;
            break;
        }
    }
    double t = std::ceil(r.lo / step) * step;
    for (; t <= r.hi + step * 1e-9; t += step) out.push_back(t == 0 ? 0 : t);
    return out;
}

struct Frame {
    int width, height;
    int left = 64, right = 16, top = 36, bottom = 46;
    Range xr, yr;
    bool log_x = false, log_y = false;

    double px(double x) const {
        double a = log_x ? std::log10(x) : x;
        double lo = log_x ? std::log10(xr.lo) : xr.lo;
        double hi = log_x ? std::log10(xr.hi) : xr.hi;
        return left + (a - lo) / (hi - lo) * (width - left - right);
    }
    double py(double y) const {
        double a = log_y ? std::log10(y) : y;
        double lo = log_y ? std::log10(yr.lo) : yr.lo;
        double hi = log_y ? std::log10(yr.hi) : yr.hi;
        return height - bottom - (a - lo) / (hi - lo) * (height - top - bottom);
    }
};

void open_svg(std::ostringstream& o, int w, int h) {
    o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h
      << "\" viewBox=\"0 0 " << w << " " << h << "\" font-family=\"sans-serif\">\n";
    o << "<rect width=\"" << w << "\" height=\"" << h << "\" fill=\"white\"/>\n";
}

void draw_frame(std::ostringstream& o, const Frame& f, const Axes& axes) {
    o << "<text x=\"" << f.width / 2 << "\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">"
      << esc(axes.title) << "</text>\n";
    double x0 = f.left, x1 = f.width - f.right;
    double y0 = f.top, y1 = f.height - f.bottom;
    o << "<rect x=\"" << num(x0) << "\" y=\"" << num(y0) << "\" width=\"" << num(x1 - x0)
      << "\" height=\"" << num(y1 - y0) << "\" fill=\"none\" stroke=\"#333\"/>\n";
    for (double t : ticks(f.xr, f.log_x)) {
        if (t < f.xr.lo * (f.log_x ? 0.999 : 1) - (f.log_x ? 0 : 1e-9) || t > f.xr.hi * 1.001)
            continue;
        double x = f.px(t);
        if (x < x0 - 0.5 || x > x1 + 0.5) continue;
        o << "<line x1=\"" << num(x) << "\" y1=\"" << num(y1) << "\" x2=\"" << num(x) << "\" y2=\""
          << num(y1 + 5) << "\" stroke=\"#333\"/>\n";
        o << "<text x=\"" << num(x) << "\" y=\"" << num(y1 + 18)
          << "\" text-anchor=\"middle\" font-size=\"11\">" << esc(tick_text(t)) << "</text>\n";
    }
    for (double t : ticks(f.yr, f.log_y)) {
        double y = f.py(t);
        if (y < y0 - 0.5 || y > y1 + 0.5) continue;
        o << "<line x1=\"" << num(x0 - 5) << "\" y1=\"" << num(y) << "\" x2=\"" << num(x0)
          << "\" y2=\"" << num(y) << "\" stroke=\"#333\"/>\n";
        o << "<text x=\"" << num(x0 - 8) << "\" y=\"" << num(y + 4)
          << "\" text-anchor=\"end\" font-size=\"11\">" << esc(tick_text(t)) << "</text>\n";
    }
    o << "<text x=\"" << (x0 + x1) / 2 << "\" y=\"" << f.height - 8
      << "\" text-anchor=\"middle\" font-size=\"12\">" << esc(axes.x_label) << "</text>\n";
    o << "<text x=\"14\" y=\"" << (y0 + y1) / 2 << "\" text-anchor=\"middle\" font-size=\"12\""
      << " transform=\"rotate(-90 14 " << num((y0 + y1) / 2) << ")\">" << esc(axes.y_label)
      << "</text>\n";
}

} // namespace

std::string line_chart(const std::vector<Series>& series, const Axes& axes, int width,
                       int height) {
    std::vector<double> xs, ys;
    for (const auto& s : series)
        for (auto [x, y] : s.points) {
            xs.push_back(x);
            ys.push_back(y);
        }
    Frame f;
    f.width = width;
    f.height = height;
    f.log_x = axes.log_x;
    f.log_y = axes.log_y;
    f.xr = span(xs, axes.log_x);
    f.yr = span(ys, axes.log_y);

    std::ostringstream o;
    open_svg(o, width, height);
    draw_frame(o, f, axes);
    if (axes.diagonal) {
        double lo = std::max(f.xr.lo, f.yr.lo);
        double hi = std::min(f.xr.hi, f.yr.hi);
        if (lo < hi)
            o << "<line x1=\"" << num(f.px(lo)) << "\" y1=\"" << num(f.py(lo)) << "\" x2=\""
              << num(f.px(hi)) << "\" y2=\"" << num(f.py(hi))
              << "\" stroke=\"#999\" stroke-dasharray=\"4 3\"/>\n";
    }
    for (std::size_t i = 0; i < series.size(); ++i) {
        const char* color = kPalette[i % kPaletteSize];
        std::ostringstream pts;
        bool any = false;
        for (auto [x, y] : series[i].points) {
            if ((f.log_x && x <= 0) || (f.log_y && y <= 0)) continue;
            pts << num(f.px(x)) << "," << num(f.py(y)) << " ";
            any = true;
        }
        if (!any) continue;
        o << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\""
          << pts.str() << "\"/>\n";
    }
    // legend
    int ly = f.top + 6;
    for (std::size_t i = 0; i < series.size(); ++i) {
        if (series[i].label.empty()) continue;
        const char* color = kPalette[i % kPaletteSize];
        int lx = width - f.right - 130;
        o << "<line x1=\"" << lx << "\" y1=\"" << ly + 4 << "\" x2=\"" << lx + 18 << "\" y2=\""
          << ly + 4 << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
        o << "<text x=\"" << lx + 22 << "\" y=\"" << ly + 8 << "\" font-size=\"11\">"
          << esc(series[i].label) << "</text>\n";
        ly += 15;
    }
    o << "</svg>\n";
    return o.str();
}

std::string bar_chart(const std::vector<std::string>& series_labels,
                      const std::vector<BarGroup>& groups, const Axes& axes, int width,
                      int height) {
    std::vector<double> ys{0};
    for (const auto& g : groups)
        for (double v : g.values) ys.push_back(v);
    Frame f;
    f.width = width;
    f.height = height;
    f.yr = span(ys, false);
    f.yr.lo = std::min(f.yr.lo, 0.0);
    f.xr = {0, 1}; // categorical x; positions computed directly

    std::ostringstream o;
    open_svg(o, width, height);
    draw_frame(o, f, axes);
    double x0 = f.left, x1 = width - f.right;
    double gw = (x1 - x0) / std::max<std::size_t>(1, groups.size());
    std::size_t nseries = std::max<std::size_t>(1, series_labels.size());
    double bw = gw * 0.8 / (double)nseries;
    for (std::size_t gi = 0; gi < groups.size(); ++gi) {
        double gx = x0 + gw * (double)gi + gw * 0.1;
        for (std::size_t si = 0; si < groups[gi].values.size(); ++si) {
            double v = groups[gi].values[si];
            double yb = f.py(0), yv = f.py(v);
            const char* color = kPalette[si % kPaletteSize];
            o << "<rect x=\"" << num(gx + bw * (double)si) << "\" y=\"" << num(std::min(yb, yv))
              << "\" width=\"" << num(bw) << "\" height=\"" << num(std::fabs(yb - yv))
              << "\" fill=\"" << color << "\"/>\n";
        }
        o << "<text x=\"" << num(gx + gw * 0.4) << "\" y=\"" << num(height - f.bottom + 18)
          << "\" text-anchor=\"middle\" font-size=\"11\">" << esc(groups[gi].category)
          << "</text>\n";
    }
    int ly = f.top + 6;
    for (std::size_t i = 0; i < series_labels.size(); ++i) {
        const char* color = kPalette[i % kPaletteSize];
        int lx = width - f.right - 150;
        o << "<rect x=\"" << lx << "\" y=\"" << ly << "\" width=\"12\" height=\"10\" fill=\""
          << color << "\"/>\n";
        o << "<text x=\"" << lx + 16 << "\" y=\"" << ly + 9 << "\" font-size=\"11\">"
          << esc(series_labels[i]) << "</text>\n";
        ly += 15;
    }
    o << "</svg>\n";
    return o.str();
}

std::string dot_chart(const std::vector<DotRow>& rows, double rule, const Axes& axes, int width,
                      int row_height) {
    int top = 36, bottom = 40, left = 150, right = 20;
    int height = top + bottom + row_height * (int)std::max<std::size_t>(1, rows.size());
    std::vector<double> xs{rule};
    for (const auto& r : rows) xs.push_back(r.value);
    Range xr = span(xs, false);
    xr.lo = std::min(xr.lo, 0.0);

    Frame f;
    f.width = width;
    f.height = height;
    f.left = left;
    f.right = right;
    f.top = top;
    f.bottom = bottom;
    f.xr = xr;
    f.yr = {0, 1};

    std::ostringstream o;
    open_svg(o, width, height);
    o << "<text x=\"" << width / 2 << "\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">"
      << esc(axes.title) << "</text>\n";
    double px0 = left, px1 = width - right;
    double py1 = height - bottom;
    o << "<line x1=\"" << num(px0) << "\" y1=\"" << num(py1) << "\" x2=\"" << num(px1)
      << "\" y2=\"" << num(py1) << "\" stroke=\"#333\"/>\n";
    for (double t : ticks(xr, false)) {
        double x = f.px(t);
        if (x < px0 - 0.5 || x > px1 + 0.5) continue;
        o << "<line x1=\"" << num(x) << "\" y1=\"" << num(py1) << "\" x2=\"" << num(x)
          << "\" y2=\"" << num(py1 + 5) << "\" stroke=\"#333\"/>\n";
        o << "<text x=\"" << num(x) << "\" y=\"" << num(py1 + 18)
          << "\" text-anchor=\"middle\" font-size=\"11\">" << esc(tick_text(t)) << "</text>\n";
    }
    o << "<text x=\"" << (px0 + px1) / 2 << "\" y=\"" << height - 6
      << "\" text-anchor=\"middle\" font-size=\"12\">" << esc(axes.x_label) << "</text>\n";
    double rx = f.px(rule);
    o << "<line x1=\"" << num(rx) << "\" y1=\"" << top << "\" x2=\"" << num(rx) << "\" y2=\""
      << num(py1) << "\" stroke=\"#d62728\" stroke-dasharray=\"4 3\"/>\n";
    for (std::size_t i = 0; i < rows.size(); ++i) {
        double y = top + row_height * ((double)i + 0.5);
        o << "<text x=\"" << left - 8 << "\" y=\"" << num(y + 4)
          << "\" text-anchor=\"end\" font-size=\"11\">" << esc(rows[i].label) << "</text>\n";
        o << "<line x1=\"" << num(px0) << "\" y1=\"" << num(y) << "\" x2=\"" << num(px1)
          << "\" y2=\"" << num(y) << "\" stroke=\"#eee\"/>\n";
        o << "<circle cx=\"" << num(f.px(rows[i].value)) << "\" cy=\"" << num(y)
          << "\" r=\"3.5\" fill=\"#1f77b4\"/>\n";
    }
    o << "</svg>\n";
    return o.str();
}

std::string hstack(const std::vector<std::string>& panels) {
    // Parse width/height from each panel's opening tag.
    int total_w = 0, max_h = 0;
    std::vector<std::pair<int, int>> dims;
    for (const auto& p : panels) {
        int w = 0, h = 0;
        auto wp = p.find("width=\"");
        auto hp = p.find("height=\"");
        if (wp != std::string::npos) w = std::atoi(p.c_str() + wp + 7);
        if (hp != std::string::npos) h = std::atoi(p.c_str() + hp + 8);
        dims.emplace_back(w, h);
        total_w += w;
        max_h = std::max(max_h, h);
    }
    std::ostringstream o;
    open_svg(o, total_w, max_h);
    int x = 0;
    for (std::size_t i = 0; i < panels.size(); ++i) {
        std::string inner = panels[i];
        auto open_end = inner.find('\n');
        auto close = inner.rfind("</svg>");
        if (open_end == std::string::npos || close == std::string::npos) continue;
        o << "<g transform=\"translate(" << x << " 0)\">\n";
        o << inner.substr(open_end + 1, close - open_end - 1);
        o << "</g>\n";
        x += dims[i].first;
    }
    o << "</svg>\n";
    return o.str();
}

} // namespace ecolens::svg
