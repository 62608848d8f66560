#include "gridstudies/lightning/sampling.hpp"

#include <cmath>
#include <numbers>

#include "gridstudies/common/error.hpp"
#include "gridstudies/common/rng.hpp"

namespace gridstudies::lightning {

StrokeSample sample_stroke(std::uint64_t seed, std::uint64_t index, const LineGeometry& geom,
                           const StrokeDistributions& dist) {
    Rng rng = Rng::for_item(seed, index);
    StrokeSample s;
    s.peak_ka = rng.lognormal(dist.peak_ka.median, dist.peak_ka.sigma_ln);
    s.front_us = rng.lognormal(dist.front_us.median, dist.front_us.sigma_ln);
    s.tail_us = rng.lognormal(dist.tail_us.median, dist.tail_us.sigma_ln);
    s.phase_angle_deg = rng.uniform(0.0, 360.0);
    s.x_m = rng.uniform(0.0, geom.exposed_length_m());
    s.y_m = rng.uniform(-geom.strip_half_width_m, geom.strip_half_width_m);
    s.footing_ohms = rng.uniform(dist.footing_min_ohms, dist.footing_max_ohms);
    s.strength_kv = rng.normal(dist.strength_mean_kv, dist.strength_sd_kv);
    return s;
}

std::vector<StrokeSample> sample_strokes(std::size_t n, std::uint64_t seed, const LineGeometry& geom,
                                         const StrokeDistributions& dist) {
    if (n == 0) throw InvalidArgument("sample count must be at least 1");
    std::vector<StrokeSample> out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = sample_stroke(seed, i, geom, dist);
    return out;
}

double lognormal_cdf(double x, const LogNormalParams& p) {
    if (x <= 0.0) return 0.0;
    return 0.5 * std::erfc(-std::log(x / p.median) / (p.sigma_ln * std::numbers::sqrt2));
}

}  // namespace gridstudies::lightning
