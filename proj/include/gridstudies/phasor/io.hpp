#pragma once

#include <filesystem>
#include <string>

#include "gridstudies/phasor/network.hpp"

namespace gridstudies::phasor {

/// Parses a JSON network description:
///
///   { "nodes":    ["bus.A", "bus.B", ...],
///     "branches": [{"from": "bus.A", "to": "load.A", "r": 1, "x": 10,
///                   "shunt_g": 0, "shunt_b": 0}],
///     "sources":  [{"node": "bus.A", "emf_rms": 230940, "angle_deg": 0,
///                   "r": 1, "x": 10}],
///     "faults":   [{"node": "load.A", "to": "ground", "r": 0}] }
///
/// "ground" names node 0. Faults are resistive branches (zero becomes the
/// bolted resistance). Unknown keys and unknown node names are errors.
PhasorNetwork parse_network(const std::string& text);
PhasorNetwork read_network(const std::filesystem::path& path);

/// CSV with columns node,phase,rms_volts,angle_deg. Node names of the form
/// "<bus>.<A|B|C>" are split into bus and phase; other names get phase "-".
void write_solution_csv(const std::filesystem::path& path, const PhasorNetwork& net,
                        const PhasorSolution& sol);

}  // namespace gridstudies::phasor
