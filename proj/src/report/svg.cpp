#include "gridstudies/report/svg.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "gridstudies/common/csv.hpp"
#include "gridstudies/common/error.hpp"

namespace gridstudies::report {

namespace {

constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#17becf"};
constexpr double kLeft = 70, kRight = 150, kTop = 40, kBottom = 55;

std::string escape(const std::string& s) {
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

std::string num(double v) { return csv::format(v, 6); }

struct Range {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();

    void add(double v) {
        if (!std::isfinite(v)) return;
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    void finish() {
        if (!std::isfinite(lo)) lo = 0.0, hi = 1.0;
        if (hi - lo < 1e-12 * std::max(1.0, std::abs(hi))) {
            lo -= 0.5;
            hi += 0.5;
        }
    }
};

class Canvas {
public:
    Canvas(const PlotStyle& style, Range xr, Range yr) : style_(style), xr_(xr), yr_(yr) {
        if (style.width < 200 || style.height < 150) throw InvalidArgument("plot must be at least 200x150");
        pw_ = style.width - kLeft - kRight;
        ph_ = style.height - kTop - kBottom;
        out_ << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
             << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << style.width << "\" height=\"" << style.height
             << "\" viewBox=\"0 0 " << style.width << ' ' << style.height << "\" font-family=\"sans-serif\" font-size=\"12\">\n"
             << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
        axes();
    }

    double px(double x) const { return kLeft + (x - xr_.lo) / (xr_.hi - xr_.lo) * pw_; }
    double py(double y) const { return kTop + ph_ - (y - yr_.lo) / (yr_.hi - yr_.lo) * ph_; }

    std::ostringstream& body() { return out_; }

    void legend(const std::vector<std::string>& names) {
        if (names.size() < 2 && (names.empty() || names[0].empty())) return;
        const double x = kLeft + pw_ + 12;
        out_ << "<g class=\"legend\">\n";
        for (std::size_t i = 0; i < names.size(); ++i) {
            const double y = kTop + 10 + 18.0 * static_cast<double>(i);
            out_ << "<rect x=\"" << num(x) << "\" y=\"" << num(y - 9) << "\" width=\"12\" height=\"12\" fill=\""
                 << color(i) << "\"/>"
                 << "<text x=\"" << num(x + 18) << "\" y=\"" << num(y + 1) << "\">" << escape(names[i]) << "</text>\n";
        }
        out_ << "</g>\n";
    }

    std::string finish() {
        out_ << "</svg>\n";
        return out_.str();
    }

    static const char* color(std::size_t i) { return kPalette[i % std::size(kPalette)]; }

private:
    void axes() {
        const double x0 = kLeft, y0 = kTop + ph_;
        out_ << "<g class=\"axes\" stroke=\"black\" fill=\"none\">\n"
             << "<line x1=\"" << num(x0) << "\" y1=\"" << num(y0) << "\" x2=\"" << num(x0 + pw_) << "\" y2=\"" << num(y0) << "\"/>\n"
             << "<line x1=\"" << num(x0) << "\" y1=\"" << num(kTop) << "\" x2=\"" << num(x0) << "\" y2=\"" << num(y0) << "\"/>\n"
             << "</g>\n<g class=\"ticks\" text-anchor=\"middle\">\n";
        for (int k = 0; k <= 5; ++k) {
            const double xv = xr_.lo + (xr_.hi - xr_.lo) * k / 5.0;
            const double yv = yr_.lo + (yr_.hi - yr_.lo) * k / 5.0;
            out_ << "<text x=\"" << num(px(xv)) << "\" y=\"" << num(y0 + 16) << "\">" << num_short(xv) << "</text>"
                 << "<text x=\"" << num(x0 - 6) << "\" y=\"" << num(py(yv) + 4) << "\" text-anchor=\"end\">"
                 << num_short(yv) << "</text>\n";
        }
        out_ << "</g>\n"
             << "<text x=\"" << num(style_.width / 2.0) << "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">"
             << escape(style_.title) << "</text>\n"
             << "<text x=\"" << num(x0 + pw_ / 2) << "\" y=\"" << num(style_.height - 12.0) << "\" text-anchor=\"middle\">"
             << escape(style_.x_label) << "</text>\n"
             << "<text transform=\"translate(16," << num(kTop + ph_ / 2) << ") rotate(-90)\" text-anchor=\"middle\">"
             << escape(style_.y_label) << "</text>\n";
    }

    static std::string num_short(double v) { return csv::format(std::abs(v) < 1e-12 ? 0.0 : v, 4); }

    PlotStyle style_;
    Range xr_, yr_;
    double pw_ = 0, ph_ = 0;
    std::ostringstream out_;
};

}  // namespace

Histogram histogram(const std::vector<double>& data, std::size_t bins) {
    if (data.empty()) throw InvalidArgument("histogram of empty data");
    if (bins == 0) throw InvalidArgument("histogram needs at least one bin");
    Histogram h;
    h.lo = *std::min_element(data.begin(), data.end());
    h.hi = *std::max_element(data.begin(), data.end());
    if (!std::isfinite(h.lo) || !std::isfinite(h.hi)) throw InvalidArgument("histogram data must be finite");
    h.counts.assign(bins, 0);
    const double width = h.hi - h.lo;
    for (double v : data) {
        std::size_t b = 0;
        if (width > 0.0) b = std::min(bins - 1, static_cast<std::size_t>((v - h.lo) / width * static_cast<double>(bins)));
        ++h.counts[b];
    }
    return h;
}

std::string series_svg(const std::vector<Series>& series, const PlotStyle& style) {
    if (series.empty()) throw InvalidArgument("no series to plot");
    Range xr, yr;
    for (const auto& s : series) {
        if (s.x.empty() || s.x.size() != s.y.size()) throw InvalidArgument("series '" + s.name + "' is empty or has mismatched x/y");
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            xr.add(s.x[i]);
            yr.add(s.y[i]);
        }
    }
    xr.finish();
    yr.finish();
    Canvas c(style, xr, yr);
    std::vector<std::string> names;
    for (std::size_t k = 0; k < series.size(); ++k) {
        const auto& s = series[k];
        names.push_back(s.name);
        c.body() << "<polyline fill=\"none\" stroke-width=\"1.5\" stroke=\"" << Canvas::color(k) << "\" points=\"";
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            if (i) c.body() << ' ';
            c.body() << num(c.px(s.x[i])) << ',' << num(c.py(s.y[i]));
        }
        c.body() << "\"/>\n";
    }
    c.legend(names);
    return c.finish();
}

std::string histogram_svg(const Histogram& hist, const PlotStyle& style) {
    if (hist.counts.empty()) throw InvalidArgument("histogram has no bins");
    Range xr, yr;
    xr.add(hist.lo);
    xr.add(hist.hi);
    yr.add(0.0);
    yr.add(static_cast<double>(*std::max_element(hist.counts.begin(), hist.counts.end())));
    xr.finish();
    yr.finish();
    Canvas c(style, xr, yr);
    const double n = static_cast<double>(hist.counts.size());
    const double w = (xr.hi - xr.lo) / n;
    for (std::size_t b = 0; b < hist.counts.size(); ++b) {
        const double x0 = xr.lo + w * static_cast<double>(b);
        const double y = static_cast<double>(hist.counts[b]);
        c.body() << "<rect class=\"bin\" data-count=\"" << hist.counts[b] << "\" x=\"" << num(c.px(x0)) << "\" y=\""
                 << num(c.py(y)) << "\" width=\"" << num(c.px(x0 + w) - c.px(x0)) << "\" height=\""
                 << num(c.py(0.0) - c.py(y)) << "\" fill=\"" << Canvas::color(0) << "\" stroke=\"white\"/>\n";
    }
    return c.finish();
}

std::string scatter_svg(const std::vector<PointGroup>& groups, const PlotStyle& style) {
    Range xr, yr;
    std::size_t total = 0;
    for (const auto& g : groups) {
        if (g.x.size() != g.y.size()) throw InvalidArgument("group '" + g.name + "' has mismatched x/y");
        total += g.x.size();
        for (std::size_t i = 0; i < g.x.size(); ++i) {
            xr.add(g.x[i]);
            yr.add(g.y[i]);
        }
    }
    if (total == 0) throw InvalidArgument("no points to plot");
    xr.finish();
    yr.finish();
    Canvas c(style, xr, yr);
    std::vector<std::string> names;
    for (std::size_t k = 0; k < groups.size(); ++k) {
        names.push_back(groups[k].name);
        c.body() << "<g fill=\"" << Canvas::color(k) << "\">\n";
        for (std::size_t i = 0; i < groups[k].x.size(); ++i) {
            c.body() << "<circle cx=\"" << num(c.px(groups[k].x[i])) << "\" cy=\"" << num(c.py(groups[k].y[i]))
                     << "\" r=\"2\"/>\n";
        }
        c.body() << "</g>\n";
    }
    c.legend(names);
    return c.finish();
}

void write_svg(const std::filesystem::path& path, const std::string& svg) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path.string());
    out << svg;
}

}  // namespace gridstudies::report
