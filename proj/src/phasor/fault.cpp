#include "gridstudies/phasor/fault.hpp"

#include <algorithm>
#include <string>

#include "gridstudies/common/error.hpp"

namespace gridstudies::phasor {

namespace {

constexpr std::array<std::string_view, 12> kNames = {
    "", "ABCG", "ABC", "ABG", "BCG", "ACG", "AB", "BC", "AC", "AG", "BG", "CG"};

double fault_resistance(double r) {
    if (r < 0.0) throw InvalidArgument("fault resistance must be non-negative");
    return std::max(r, kBoltedResistance);
}

void add_resistor(PhasorNetwork& net, int a, int b, double r) {
    net.add_branch(Branch{a, b, Complex(fault_resistance(r), 0.0), Complex{}});
}

}  // namespace

FaultTopology fault_topology(int type) {
    using T = FaultType;
    switch (static_cast<T>(type)) {
        case T::ABCG: return {{true, true, true}, true};
        case T::ABC: return {{true, true, true}, false};
        case T::ABG: return {{true, true, false}, true};
        case T::BCG: return {{false, true, true}, true};
        case T::ACG: return {{true, false, true}, true};
        case T::AB: return {{true, true, false}, false};
        case T::BC: return {{false, true, true}, false};
        case T::AC: return {{true, false, true}, false};
        case T::AG: return {{true, false, false}, true};
        case T::BG: return {{false, true, false}, true};
        case T::CG: return {{false, false, true}, true};
    }
    throw InvalidArgument("fault type " + std::to_string(type) + " outside 1..11");
}

std::string_view fault_name(int type) {
    fault_topology(type);
    return kNames[static_cast<std::size_t>(type)];
}

PhasorNetwork connect_line(const PhasorNetwork& base, const LineSectionModel& line,
                           const LineTerminals& ends) {
    PhasorNetwork net = base;
    net.add_coupled_branch(line.section(ends.sending, ends.receiving, line.length_km));
    return net;
}

FaultedNetwork split_line(const PhasorNetwork& base, const LineSectionModel& line,
                          const LineTerminals& ends, double distance_km) {
    if (!(distance_km > 0.0 && distance_km < line.length_km)) {
        throw InvalidArgument("fault distance must lie strictly inside the line");
    }
    FaultedNetwork out{base, {}, 0};
    PhasorNetwork& net = out.network;
    static constexpr char kPhase[] = {'A', 'B', 'C'};
    for (int p = 0; p < 3; ++p) out.fault_nodes[p] = net.add_node(std::string("fault.") + kPhase[p]);
    net.add_coupled_branch(line.section(ends.sending, out.fault_nodes, distance_km));
    net.add_coupled_branch(line.section(out.fault_nodes, ends.receiving, line.length_km - distance_km));
    return out;
}

FaultedNetwork apply_fault(const PhasorNetwork& base, const FaultSpec& fault,
                           const LineSectionModel& line, const LineTerminals& ends) {
    const FaultTopology topo = fault_topology(fault.fault_type);
    FaultedNetwork out = split_line(base, line, ends, fault.distance_km);
    PhasorNetwork& net = out.network;

    std::vector<int> involved;
    for (int p = 0; p < 3; ++p) {
        if (topo.phases[p]) involved.push_back(p);
    }
    const auto& rp = fault.phase_resistances;
    if (involved.size() == 1) {
        const int p = involved[0];
        add_resistor(net, out.fault_nodes[p], 0, rp[p] + fault.ground_resistance);
    } else if (involved.size() == 2 && !topo.ground) {
        const int a = involved[0], b = involved[1];
        add_resistor(net, out.fault_nodes[a], out.fault_nodes[b], rp[a] + rp[b]);
    } else {
        out.star_node = net.add_node("fault.star");
        for (int p : involved) add_resistor(net, out.fault_nodes[p], out.star_node, rp[p]);
        if (topo.ground) add_resistor(net, out.star_node, 0, fault.ground_resistance);
    }
    return out;
}

}  // namespace gridstudies::phasor
