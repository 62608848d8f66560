#pragma once

#include <array>
#include <string_view>
#include <vector>

namespace gridstudies::lightning {

struct ConductorPosition {
    double y = 0.0;  // lateral offset, m
    double h = 0.0;  // height at the tower, m
};

/// Cross-section and span layout of the exposed line section.
struct LineGeometry {
    std::array<ConductorPosition, 3> phases{};        // A, B, C
    std::array<ConductorPosition, 2> shield_wires{};  // left, right
    double phase_sag_m = 2.0;
    double shield_sag_m = 3.35;
    double phase_radius_m = 0.0147;
    double shield_radius_m = 0.0055;
    double span_length_m = 321.8688;
    int spans_modeled = 4;
    double strip_half_width_m = 500.0;
    double tower_height_m = 12.0;
    double tower_base_radius_m = 2.0;

    double exposed_length_m() const { return span_length_m * spans_modeled; }
    /// Throws InvalidArgument on nonpositive heights or dimensions, or when a
    /// shield wire is not above every phase conductor.
    void validate() const;
    /// Reference 230 kV geometry calibrated against the reference critical
    /// currents and stroke counts.
    static LineGeometry reference();
};

enum class ObjectKind { ShieldWire, Phase };

/// One conductor as seen by a descending leader.
struct ExposedObject {
    ObjectKind kind = ObjectKind::ShieldWire;
    int index = 0;  // shield wire 0/1 or phase 0..2
    double y = 0.0;
    double h = 0.0;
};

/// Conductors that can be struck at one cross-section. The middle phase is
/// taken as fully shielded and left out.
std::vector<ExposedObject> cross_section(const LineGeometry& geom, bool midspan);

struct StrikingDistances {
    double rc = 0.0;  // to conductors, m
    double rg = 0.0;  // to ground, m
};

/// rc = 7.1 Ip^0.75, rg = 6.4 Ip^0.75 with Ip in kA. Throws for Ip <= 0.
StrikingDistances striking_distances(double ip_ka);

/// Height at which a vertical leader at lateral `y` first comes within rc of
/// the object; negative when it never does.
double capture_height(const ExposedObject& obj, double rc, double y);

/// Index into `objects` of the struck conductor, or -1 for ground. Shield
/// wires win exact ties over phases, conductors win ties over ground.
int struck_object(const std::vector<ExposedObject>& objects, const StrikingDistances& sd, double y);

/// Lateral width over which a conductor (or only a phase conductor) is
/// struck, counted inside |y| <= half_width.
double exposure_width(const std::vector<ExposedObject>& objects, double ip_ka, bool phases_only,
                      double half_width = 1e9);
inline double phase_exposure_width(const std::vector<ExposedObject>& objects, double ip_ka) {
    return exposure_width(objects, ip_ka, true);
}

enum class ImpactKind { ToGround, ShieldWireAtTower, ShieldWireAtSpan, PhaseAtTower, PhaseAtSpan };

struct Impact {
    ImpactKind kind = ImpactKind::ToGround;
    int conductor = -1;  // shield wire 0/1 or phase 0/2; -1 for ground

    bool on_line() const { return kind != ImpactKind::ToGround; }
    bool at_tower() const { return kind == ImpactKind::ShieldWireAtTower || kind == ImpactKind::PhaseAtTower; }
    bool on_shield() const { return kind == ImpactKind::ShieldWireAtTower || kind == ImpactKind::ShieldWireAtSpan; }
};

std::string_view impact_name(ImpactKind kind);

/// Currents separating the tower-capture bands along the span.
struct TowerBands {
    double high_ka = 64.0;  // above: within span/4 of a tower
    double low_ka = 25.0;   // [low, high]: span/8; below: span/16
};

/// Fraction of the span length, measured from the nearest tower, that counts
/// as a tower hit for a stroke of `ip_ka`.
double tower_band_fraction(double ip_ka, const TowerBands& bands = {});

/// Impact point for a stroke at (x, y): conductor from the tower
/// cross-section, tower or midspan from the current band.
Impact classify_impact(const LineGeometry& geom, double ip_ka, double x_m, double y_m, const TowerBands& bands = {});

struct CriticalCurrents {
    double shield_ka = 0.0;  // tower cross-section
    double span_ka = 0.0;    // midspan cross-section
};

/// Smallest current for which no phase is exposed, by bisection to
/// `tolerance_ka` over [lo_ka, hi_ka]. Infinite when phases remain exposed at
/// hi_ka.
double critical_current(const std::vector<ExposedObject>& objects, double tolerance_ka = 0.001, double lo_ka = 1.0,
                        double hi_ka = 2000.0);
CriticalCurrents critical_currents(const LineGeometry& geom, double tolerance_ka = 0.001);

}  // namespace gridstudies::lightning
