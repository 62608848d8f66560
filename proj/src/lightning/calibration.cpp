#include "gridstudies/lightning/calibration.hpp"

#include <cmath>
#include <functional>
#include <numbers>

#include "gridstudies/common/error.hpp"

namespace gridstudies::lightning {

namespace {

// Root of an increasing or decreasing f on [lo, hi].
double solve(const std::function<double(double)>& f, double lo, double hi, const char* what) {
    double flo = f(lo), fhi = f(hi);
    if (flo * fhi > 0.0) throw ConvergenceError(std::string("calibration target for ") + what + " is outside the search range");
    for (int it = 0; it < 60 && hi - lo > 1e-7; ++it) {
        const double mid = 0.5 * (lo + hi), fm = f(mid);
        if ((fm > 0.0) == (flo > 0.0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

LineGeometry with_phase_offset(LineGeometry g, double b) {
    g.phases[0].y = -b;
    g.phases[2].y = b;
    return g;
}

}  // namespace

double expected_line_fraction(const LineGeometry& geom, const LogNormalParams& peak) {
    const auto objects = cross_section(geom, false);
    const int n = 1200;
    const double z_lo = -6.0, z_hi = 6.0, dz = (z_hi - z_lo) / n;
    double acc = 0.0;
    for (int k = 0; k <= n; ++k) {
        const double z = z_lo + dz * k;
        const double ip = peak.median * std::exp(peak.sigma_ln * z);
        const double w = exposure_width(objects, ip, false, geom.strip_half_width_m);
        const double weight = (k == 0 || k == n) ? 0.5 : 1.0;
        acc += weight * w * std::exp(-0.5 * z * z);
    }
    return acc * dz / std::sqrt(2.0 * std::numbers::pi) / (2.0 * geom.strip_half_width_m);
}

CalibrationReport calibrate_geometry(const LineGeometry& start, const CalibrationTarget& target,
                                     const LogNormalParams& peak, int max_rounds) {
    start.validate();
    CalibrationReport rep;
    LineGeometry g = start;
    const double shield_y = std::max(std::abs(g.shield_wires[0].y), std::abs(g.shield_wires[1].y));
    for (rep.rounds = 1; rep.rounds <= max_rounds; ++rep.rounds) {
        const LineGeometry before = g;
        const double b = solve([&](double y) {
            return critical_current(cross_section(with_phase_offset(g, y), false), 1e-4) - target.shield_ka;
        }, shield_y + 1e-3, shield_y + 50.0, "shield critical current");
        g = with_phase_offset(g, b);
        const double sw_h = std::min(g.shield_wires[0].h, g.shield_wires[1].h);
        const double sag = solve([&](double s) {
            LineGeometry t = g;
            t.shield_sag_m = s;
            return critical_current(cross_section(t, true), 1e-4) - target.span_ka;
        }, 0.0, sw_h - 0.5, "span critical current");
        g.shield_sag_m = sag;
        const bool settled = std::abs(g.phases[0].y - before.phases[0].y) < 1e-6 &&
                             std::abs(g.shield_sag_m - before.shield_sag_m) < 1e-6;
        if (settled) break;
    }
    if (rep.rounds > max_rounds) throw ConvergenceError("geometry calibration did not settle");
    rep.geometry = g;
    rep.currents = critical_currents(g);
    rep.line_fraction = expected_line_fraction(g, peak);
    return rep;
}

}  // namespace gridstudies::lightning
