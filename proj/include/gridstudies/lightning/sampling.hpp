#pragma once

#include <cstdint>
#include <vector>

#include "gridstudies/lightning/egm.hpp"

namespace gridstudies::lightning {

struct LogNormalParams {
    double median = 1.0;
    double sigma_ln = 0.5;
};

/// Stroke parameter distributions for negative first strokes.
struct StrokeDistributions {
    LogNormalParams peak_ka{34.0, 0.740};
    LogNormalParams front_us{2.0, 0.494};
    LogNormalParams tail_us{77.5, 0.577};
    double footing_min_ohms = 10.0;
    double footing_max_ohms = 100.0;
    double strength_mean_kv = 977.5;
    double strength_sd_kv = 48.875;
};

struct StrokeSample {
    double x_m = 0.0;
    double y_m = 0.0;
    double phase_angle_deg = 0.0;
    double peak_ka = 0.0;
    double front_us = 0.0;
    double tail_us = 0.0;
    double footing_ohms = 0.0;
    double strength_kv = 0.0;
};

/// Sample `index` of a run; depends only on (seed, index).
StrokeSample sample_stroke(std::uint64_t seed, std::uint64_t index, const LineGeometry& geom,
                           const StrokeDistributions& dist = {});
std::vector<StrokeSample> sample_strokes(std::size_t n, std::uint64_t seed, const LineGeometry& geom,
                                         const StrokeDistributions& dist = {});

double lognormal_cdf(double x, const LogNormalParams& p);

}  // namespace gridstudies::lightning
