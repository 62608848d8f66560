#include "gridstudies/lightning/egm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "gridstudies/common/error.hpp"

namespace gridstudies::lightning {

void LineGeometry::validate() const {
    for (const auto& p : phases) {
        if (!(p.h > 0.0)) throw InvalidArgument("phase conductor heights must be positive");
    }
    for (const auto& s : shield_wires) {
        if (!(s.h > 0.0)) throw InvalidArgument("shield wire heights must be positive");
        for (const auto& p : phases) {
            if (!(s.h > p.h)) throw InvalidArgument("shield wires must be above the phase conductors");
        }
    }
    if (!(phase_sag_m >= 0.0 && shield_sag_m >= 0.0)) throw InvalidArgument("sag must be nonnegative");
    for (const auto& p : phases) {
        if (!(p.h - phase_sag_m > 0.0)) throw InvalidArgument("phase sag exceeds conductor height");
    }
    for (const auto& s : shield_wires) {
        if (!(s.h - shield_sag_m > 0.0)) throw InvalidArgument("shield wire sag exceeds height");
    }
    if (!(phase_radius_m > 0.0 && shield_radius_m > 0.0)) throw InvalidArgument("conductor radii must be positive");
    if (!(span_length_m > 0.0) || spans_modeled < 1) throw InvalidArgument("span layout must be positive");
    if (!(strip_half_width_m > 0.0)) throw InvalidArgument("strip half-width must be positive");
    if (!(tower_height_m > 0.0 && tower_base_radius_m > 0.0)) throw InvalidArgument("tower dimensions must be positive");
}

LineGeometry LineGeometry::reference() {
    LineGeometry g;
    g.phases = {{{-6.3813, 8.0}, {0.0, 8.0}, {6.3813, 8.0}}};
    g.shield_sag_m = 3.3541;
    g.shield_wires = {{{-2.0, 12.0}, {2.0, 12.0}}};
    return g;
}

std::vector<ExposedObject> cross_section(const LineGeometry& geom, bool midspan) {
    std::vector<ExposedObject> out;
    for (int s = 0; s < 2; ++s) {
        const auto& c = geom.shield_wires[static_cast<std::size_t>(s)];
        out.push_back({ObjectKind::ShieldWire, s, c.y, c.h - (midspan ? geom.shield_sag_m : 0.0)});
    }
    for (int p : {0, 2}) {
        const auto& c = geom.phases[static_cast<std::size_t>(p)];
        out.push_back({ObjectKind::Phase, p, c.y, c.h - (midspan ? geom.phase_sag_m : 0.0)});
    }
    return out;
}

StrikingDistances striking_distances(double ip_ka) {
    if (!(ip_ka > 0.0)) throw InvalidArgument("stroke current must be positive");
    const double s = std::pow(ip_ka, 0.75);
    return {7.1 * s, 6.4 * s};
}

double capture_height(const ExposedObject& obj, double rc, double y) {
    const double dy = y - obj.y;
    if (std::abs(dy) > rc) return -1.0;
    return obj.h + std::sqrt(rc * rc - dy * dy);
}

int struck_object(const std::vector<ExposedObject>& objects, const StrikingDistances& sd, double y) {
    int best = -1;
    double best_h = -1.0;
    for (std::size_t i = 0; i < objects.size(); ++i) {
        const double h = capture_height(objects[i], sd.rc, y);
        if (h < 0.0) continue;
        const bool better = h > best_h || (h == best_h && objects[i].kind == ObjectKind::ShieldWire &&
                                            objects[static_cast<std::size_t>(best)].kind == ObjectKind::Phase);
        if (better) {
            best = static_cast<int>(i);
            best_h = h;
        }
    }
    if (best >= 0 && best_h >= sd.rg) return best;
    return -1;
}

double exposure_width(const std::vector<ExposedObject>& objects, double ip_ka, bool phases_only, double half_width) {
    const auto sd = striking_distances(ip_ka);
    const double rc = sd.rc, rg = sd.rg;
    // Breakpoints of the upper envelope: arc ends, arc-arc and arc-ground
    // intersections.
    std::vector<double> pts;
    for (const auto& o : objects) {
        pts.push_back(o.y - rc);
        pts.push_back(o.y + rc);
        if (rg > o.h && rg - o.h <= rc) {
            const double dy = std::sqrt(rc * rc - (rg - o.h) * (rg - o.h));
            pts.push_back(o.y - dy);
            pts.push_back(o.y + dy);
        }
    }
    for (std::size_t i = 0; i < objects.size(); ++i) {
        for (std::size_t j = i + 1; j < objects.size(); ++j) {
            // Circles of equal radius: intersections lie on the perpendicular
            // bisector of the centres.
            const double dx = objects[j].y - objects[i].y, dh = objects[j].h - objects[i].h;
            const double d = std::hypot(dx, dh);
            if (d == 0.0 || d > 2.0 * rc) continue;
            const double mx = 0.5 * (objects[i].y + objects[j].y);
            const double a = std::sqrt(rc * rc - 0.25 * d * d);
            pts.push_back(mx - a * dh / d);
            pts.push_back(mx + a * dh / d);
        }
    }
    for (double& p : pts) p = std::clamp(p, -half_width, half_width);
    std::sort(pts.begin(), pts.end());
    double width = 0.0;
    for (std::size_t k = 0; k + 1 < pts.size(); ++k) {
        const double lo = pts[k], hi = pts[k + 1];
        if (!(hi > lo)) continue;
        const int hit = struck_object(objects, sd, 0.5 * (lo + hi));
        if (hit < 0) continue;
        if (!phases_only || objects[static_cast<std::size_t>(hit)].kind == ObjectKind::Phase) width += hi - lo;
    }
    return width;
}

std::string_view impact_name(ImpactKind kind) {
    switch (kind) {
        case ImpactKind::ToGround: return "ground";
        case ImpactKind::ShieldWireAtTower: return "shield_wire_tower";
        case ImpactKind::ShieldWireAtSpan: return "shield_wire_span";
        case ImpactKind::PhaseAtTower: return "phase_tower";
        case ImpactKind::PhaseAtSpan: return "phase_span";
    }
    return "unknown";
}

double tower_band_fraction(double ip_ka, const TowerBands& bands) {
    if (ip_ka > bands.high_ka) return 0.25;
    if (ip_ka >= bands.low_ka) return 0.125;
    return 0.0625;
}

Impact classify_impact(const LineGeometry& geom, double ip_ka, double x_m, double y_m, const TowerBands& bands) {
    const auto objects = cross_section(geom, false);
    const int hit = struck_object(objects, striking_distances(ip_ka), y_m);
    if (hit < 0) return {};
    const auto& obj = objects[static_cast<std::size_t>(hit)];
    const double pos = std::fmod(x_m, geom.span_length_m);
    const double to_tower = std::min(pos, geom.span_length_m - pos);
    const bool tower = to_tower <= tower_band_fraction(ip_ka, bands) * geom.span_length_m;
    if (obj.kind == ObjectKind::ShieldWire) {
        return {tower ? ImpactKind::ShieldWireAtTower : ImpactKind::ShieldWireAtSpan, obj.index};
    }
    return {tower ? ImpactKind::PhaseAtTower : ImpactKind::PhaseAtSpan, obj.index};
}

double critical_current(const std::vector<ExposedObject>& objects, double tolerance_ka, double lo_ka, double hi_ka) {
    if (!(tolerance_ka > 0.0 && lo_ka > 0.0 && hi_ka > lo_ka)) throw InvalidArgument("invalid bisection bracket");
    if (phase_exposure_width(objects, hi_ka) > 0.0) return std::numeric_limits<double>::infinity();
    if (phase_exposure_width(objects, lo_ka) == 0.0) return lo_ka;
    while (hi_ka - lo_ka > tolerance_ka) {
        const double mid = 0.5 * (lo_ka + hi_ka);
        (phase_exposure_width(objects, mid) > 0.0 ? lo_ka : hi_ka) = mid;
    }
    return hi_ka;
}

CriticalCurrents critical_currents(const LineGeometry& geom, double tolerance_ka) {
    geom.validate();
    return {critical_current(cross_section(geom, false), tolerance_ka),
            critical_current(cross_section(geom, true), tolerance_ka)};
}

}  // namespace gridstudies::lightning
