#pragma once

#include <array>
#include <string_view>

#include "gridstudies/phasor/line_model.hpp"
#include "gridstudies/phasor/network.hpp"

namespace gridstudies::phasor {

/// Fault type codes 1..11.
enum class FaultType : int {
    ABCG = 1,
    ABC = 2,
    ABG = 3,
    BCG = 4,
    ACG = 5,
    AB = 6,
    BC = 7,
    AC = 8,
    AG = 9,
    BG = 10,
    CG = 11,
};

struct FaultTopology {
    std::array<bool, 3> phases{};  // A, B, C involved
    bool ground = false;
};

/// Phases and ground involvement for code `type`; throws for codes outside 1..11.
FaultTopology fault_topology(int type);
std::string_view fault_name(int type);

/// Fault branches use this resistance in place of an exact zero.
inline constexpr double kBoltedResistance = 1e-6;

struct FaultSpec {
    int fault_type = 1;
    double distance_km = 0.0;
    std::array<double, 3> phase_resistances{};  // ohms
    double ground_resistance = 0.0;             // ohms
};

/// Three-phase attachment points of a line: sending and receiving buses.
struct LineTerminals {
    std::array<int, 3> sending{};
    std::array<int, 3> receiving{};
};

struct FaultedNetwork {
    PhasorNetwork network;
    std::array<int, 3> fault_nodes{};
    int star_node = 0;  // 0 when the topology needs no star point
};

/// Adds the line to `base` as one unbroken section between the terminals.
PhasorNetwork connect_line(const PhasorNetwork& base, const LineSectionModel& line,
                           const LineTerminals& ends);

/// Splits the line at `distance_km` into two sections joined at three new
/// nodes, without any fault branch.
FaultedNetwork split_line(const PhasorNetwork& base, const LineSectionModel& line,
                          const LineTerminals& ends, double distance_km);

/// Splits the line at `fault.distance_km` into two sections joined at three
/// new fault nodes and adds the resistive fault branches for the code:
/// single-phase-to-ground faults add one phase-to-ground branch with
/// R_phase + R_ground; phase-to-phase faults one branch with R1 + R2; the
/// remaining types join the phase resistances at a star node, which is
/// grounded through R_ground when the type involves ground.
FaultedNetwork apply_fault(const PhasorNetwork& base, const FaultSpec& fault,
                           const LineSectionModel& line, const LineTerminals& ends);

}  // namespace gridstudies::phasor
