#include "gridstudies/phasor/line_model.hpp"

#include <cmath>
#include <numbers>

#include "gridstudies/common/error.hpp"

namespace gridstudies::phasor {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kEpsilon0 = 8.8541878128e-12;

struct Position {
    double y, h;
};

double distance(Position a, Position b) { return std::hypot(a.y - b.y, a.h - b.h); }
double image_distance(Position a, Position b) { return std::hypot(a.y - b.y, a.h + b.h); }

// Eliminates the trailing `grounded` rows/columns assuming zero potential.
Eigen::MatrixXcd kron_reduce(const Eigen::MatrixXcd& m, Eigen::Index kept) {
    const Eigen::Index grounded = m.rows() - kept;
    if (grounded == 0) return m;
    const auto a = m.topLeftCorner(kept, kept);
    const auto b = m.topRightCorner(kept, grounded);
    const auto c = m.bottomLeftCorner(grounded, kept);
    const Eigen::MatrixXcd d = m.bottomRightCorner(grounded, grounded);
    return a - b * d.lu().solve(Eigen::MatrixXcd(c));
}

}  // namespace

OverheadLineGeometry OverheadLineGeometry::default_400kv() {
    OverheadLineGeometry g;
    // Triple bundle 3 x 485 mm2 ACSR, 0.45 m bundle spacing.
    const OverheadConductor bundle{0.0, 0.0, 0.175, 0.205, 0.0198};
    g.phases = {bundle, bundle, bundle};
    g.phases[0].lateral_m = -11.0;
    g.phases[1].lateral_m = 0.0;
    g.phases[2].lateral_m = 11.0;
    for (auto& p : g.phases) p.height_m = 21.0;  // average height including sag
    const OverheadConductor shield{0.0, 29.0, 0.0052, 0.0080, 0.36};
    g.shield_wires = {shield, shield};
    g.shield_wires[0].lateral_m = -7.5;
    g.shield_wires[1].lateral_m = 7.5;
    return g;
}

LineSectionModel LineSectionModel::from_sequence(Complex z1, Complex z0, Complex y1, Complex y0,
                                                 double length_km) {
    LineSectionModel m;
    const Complex zs = (z0 + 2.0 * z1) / 3.0;
    const Complex zm = (z0 - z1) / 3.0;
    const Complex ys = (y0 + 2.0 * y1) / 3.0;
    const Complex ym = (y0 - y1) / 3.0;
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) {
            m.series_impedance_per_km(i, j) = i == j ? zs : zm;
            m.shunt_admittance_per_km(i, j) = i == j ? ys : ym;
        }
    }
    m.length_km = length_km;
    return m;
}

LineSectionModel LineSectionModel::from_geometry(const OverheadLineGeometry& geometry,
                                                 double frequency_hz, double length_km) {
    if (frequency_hz <= 0.0 || geometry.earth_resistivity_ohm_m <= 0.0) {
        throw InvalidArgument("frequency and earth resistivity must be positive");
    }
    std::vector<OverheadConductor> all(geometry.phases.begin(), geometry.phases.end());
    all.insert(all.end(), geometry.shield_wires.begin(), geometry.shield_wires.end());
    const auto n = static_cast<Eigen::Index>(all.size());
    for (const auto& c : all) {
        if (c.height_m <= 0.0 || c.gmr_m <= 0.0 || c.radius_m <= 0.0) {
            throw InvalidArgument("conductor height and radii must be positive");
        }
    }

    const double omega = 2.0 * kPi * frequency_hz;
    const double earth_r = kPi * kPi * frequency_hz * 1e-4;  // ohm/km
    const double de = 658.5 * std::sqrt(geometry.earth_resistivity_ohm_m / frequency_hz);
    const double mu_term = 2e-4;                             // mu0/(2 pi) per km
    const double p_scale = 1.0 / (2.0 * kPi * kEpsilon0);    // m/F

    Eigen::MatrixXcd z(n, n), p(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const Position pi{all[i].lateral_m, all[i].height_m};
        for (Eigen::Index j = 0; j < n; ++j) {
            const Position pj{all[j].lateral_m, all[j].height_m};
            if (i == j) {
                z(i, j) = Complex(all[i].resistance_ohm_per_km + earth_r,
                                  omega * mu_term * std::log(de / all[i].gmr_m));
                p(i, j) = p_scale * std::log(2.0 * all[i].height_m / all[i].radius_m);
            } else {
                z(i, j) = Complex(earth_r, omega * mu_term * std::log(de / distance(pi, pj)));
                p(i, j) = p_scale * std::log(image_distance(pi, pj) / distance(pi, pj));
            }
        }
    }
    const Eigen::MatrixXcd z3 = kron_reduce(z, 3);
    const Eigen::MatrixXcd p3 = kron_reduce(p, 3);
    const Eigen::MatrixXcd c3 = p3.inverse();  // F/m

    LineSectionModel m;
    m.series_impedance_per_km = z3;
    m.shunt_admittance_per_km = Complex(0.0, omega * 1000.0) * c3;
    m.length_km = length_km;
    return m;
}

CoupledBranch LineSectionModel::section(const std::array<int, 3>& from, const std::array<int, 3>& to,
                                        double section_km) const {
    if (section_km <= 0.0) throw InvalidArgument("line section length must be positive");
    CoupledBranch b;
    b.from_nodes.assign(from.begin(), from.end());
    b.to_nodes.assign(to.begin(), to.end());
    b.series_impedance = series_impedance_per_km * section_km;
    b.shunt_admittance_per_end = shunt_admittance_per_km * (0.5 * section_km);
    return b;
}

Complex LineSectionModel::positive_sequence_impedance() const {
    const auto& z = series_impedance_per_km;
    const Complex self = (z(0, 0) + z(1, 1) + z(2, 2)) / 3.0;
    const Complex mutual = (z(0, 1) + z(1, 2) + z(0, 2)) / 3.0;
    return self - mutual;
}

Complex LineSectionModel::zero_sequence_impedance() const {
    const auto& z = series_impedance_per_km;
    const Complex self = (z(0, 0) + z(1, 1) + z(2, 2)) / 3.0;
    const Complex mutual = (z(0, 1) + z(1, 2) + z(0, 2)) / 3.0;
    return self + 2.0 * mutual;
}

}  // namespace gridstudies::phasor
