#pragma once

#include <functional>

namespace gridstudies::emt {

/// Time function in seconds -> amperes or volts.
using Waveform = std::function<double(double)>;

/// Lightning stroke current: linear rise to Ip at tf, linear fall reaching
/// Ip/2 at th, continuing with the same slope until it reaches zero.
struct DoubleRampSource {
    double peak_ka = 0.0;
    double front_us = 0.0;
    double tail_us = 0.0;
    int node = 0;
};

/// Stroke current in amperes at `t` seconds. Throws InvalidArgument unless
/// 0 < tf < th.
double double_ramp_eval(const DoubleRampSource& src, double t);

Waveform constant(double value);
Waveform step(double value, double t_on = 0.0);

}  // namespace gridstudies::emt
