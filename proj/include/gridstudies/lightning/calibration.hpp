#pragma once

#include "gridstudies/lightning/egm.hpp"
#include "gridstudies/lightning/sampling.hpp"

namespace gridstudies::lightning {

/// Expected fraction of strokes in the strip that terminate on the line,
/// integrated over the peak-current distribution (tower cross-section).
double expected_line_fraction(const LineGeometry& geom, const LogNormalParams& peak);

struct CalibrationTarget {
    double shield_ka = 17.62;
    double span_ka = 64.15;
};

struct CalibrationReport {
    LineGeometry geometry;
    CriticalCurrents currents;
    double line_fraction = 0.0;
    int rounds = 0;
};

/// Adjusts the outer-phase lateral offset (shield critical current) and the
/// shield-wire sag (span critical current) in turn until both settle.
/// Heights are kept. Throws ConvergenceError when a target lies outside its
/// search bracket.
CalibrationReport calibrate_geometry(const LineGeometry& start, const CalibrationTarget& target = {},
                                     const LogNormalParams& peak = {34.0, 0.740}, int max_rounds = 20);

}  // namespace gridstudies::lightning
