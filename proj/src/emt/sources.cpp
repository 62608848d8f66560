#include "gridstudies/emt/sources.hpp"

#include <algorithm>

#include "gridstudies/common/error.hpp"

namespace gridstudies::emt {

double double_ramp_eval(const DoubleRampSource& src, double t) {
    const double tf = src.front_us * 1e-6;
    const double th = src.tail_us * 1e-6;
    if (!(tf > 0.0) || !(th > tf)) throw InvalidArgument("double ramp needs 0 < tf < th");
    const double ip = src.peak_ka * 1e3;
    if (!(t > 0.0)) return 0.0;
    if (t <= tf) return ip * t / tf;
    const double slope = 0.5 * ip / (th - tf);
    return std::max(0.0, ip - slope * (t - tf));
}

Waveform constant(double value) {
    return [value](double) { return value; };
}

Waveform step(double value, double t_on) {
    return [value, t_on](double t) { return t >= t_on ? value : 0.0; };
}

}  // namespace gridstudies::emt
