#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

namespace gridstudies::report {

struct Series {
    std::string name;
    std::vector<double> x;
    std::vector<double> y;
};

struct PointGroup {
    std::string name;
    std::vector<double> x;
    std::vector<double> y;
};

struct PlotStyle {
    std::string title;
    std::string x_label;
    std::string y_label;
    int width = 720;
    int height = 440;
};

struct Histogram {
    double lo = 0.0;
    double hi = 0.0;
    std::vector<std::size_t> counts;
};

/// Equal-width bins over [min, max]; the maximum lands in the last bin.
Histogram histogram(const std::vector<double>& data, std::size_t bins);

/// One polyline per series. Throws InvalidArgument on empty input or
/// mismatched x/y lengths.
std::string series_svg(const std::vector<Series>& series, const PlotStyle& style);
std::string histogram_svg(const Histogram& hist, const PlotStyle& style);
/// One circle per point, one colour per group.
std::string scatter_svg(const std::vector<PointGroup>& groups, const PlotStyle& style);

void write_svg(const std::filesystem::path& path, const std::string& svg);

}  // namespace gridstudies::report
