#pragma once

#include <array>
#include <vector>

#include <Eigen/Dense>

#include "gridstudies/phasor/network.hpp"

namespace gridstudies::phasor {

/// One overhead conductor (or bundle equivalent) in a line cross-section.
struct OverheadConductor {
    double lateral_m = 0.0;
    double height_m = 0.0;
    double gmr_m = 0.0;              // geometric mean radius, inductance
    double radius_m = 0.0;           // equivalent radius, capacitance
    double resistance_ohm_per_km = 0.0;
};

/// Cross-section of a three-phase line with optional grounded shield wires.
struct OverheadLineGeometry {
    std::array<OverheadConductor, 3> phases;
    std::vector<OverheadConductor> shield_wires;
    double earth_resistivity_ohm_m = 100.0;

    /// Untransposed horizontal 400 kV single circuit with two shield wires.
    /// Typical construction values, not survey data.
    static OverheadLineGeometry default_400kv();
};

/// Per-km phase-domain parameters of a three-phase line.
struct LineSectionModel {
    Eigen::Matrix3cd series_impedance_per_km = Eigen::Matrix3cd::Zero();
    Eigen::Matrix3cd shunt_admittance_per_km = Eigen::Matrix3cd::Zero();
    double length_km = 0.0;

    /// Balanced (transposition-symmetric) line from sequence parameters.
    static LineSectionModel from_sequence(Complex z1_per_km, Complex z0_per_km, Complex y1_per_km,
                                          Complex y0_per_km, double length_km);

    /// Untransposed line from conductor geometry using Carson's simplified
    /// earth-return terms, with shield wires eliminated by Kron reduction.
    static LineSectionModel from_geometry(const OverheadLineGeometry& geometry, double frequency_hz,
                                          double length_km);

    /// Nominal pi section of `section_km` joining three nodes to three nodes.
    CoupledBranch section(const std::array<int, 3>& from, const std::array<int, 3>& to,
                          double section_km) const;

    /// Positive and zero sequence series impedance per km (averaged).
    Complex positive_sequence_impedance() const;
    Complex zero_sequence_impedance() const;
};

}  // namespace gridstudies::phasor
