#include "gridstudies/faultlab/faultlab.hpp"

#include <cmath>
#include <numbers>

#include "gridstudies/common/csv.hpp"
#include "gridstudies/common/error.hpp"
#include "gridstudies/common/parallel.hpp"
#include "gridstudies/common/rng.hpp"

namespace gridstudies::faultlab {

using phasor::Complex;

double to_per_unit(double volts) { return volts / kBaseVolts; }

FaultSystem build_system(const SystemConfig& config) {
    if (!(config.line_length_km > kPositionStepKm * kPositions)) {
        throw InvalidArgument("line must be longer than the last fault position");
    }
    FaultSystem sys;
    auto line = phasor::LineSectionModel::from_geometry(config.geometry, config.frequency_hz, config.line_length_km);
    if (config.transposed) {
        const Complex y = line.shunt_admittance_per_km.trace() / 3.0;
        const Complex ym = (line.shunt_admittance_per_km.sum() - line.shunt_admittance_per_km.trace()) / 6.0;
        line = phasor::LineSectionModel::from_sequence(line.positive_sequence_impedance(),
                                                       line.zero_sequence_impedance(), y - ym, y + 2.0 * ym,
                                                       config.line_length_km);
    }
    sys.line = line;

    static constexpr char kPhase[] = {'A', 'B', 'C'};
    const double shift = 2.0 * std::numbers::pi / 3.0;
    for (int p = 0; p < 3; ++p) {
        sys.ends.sending[p] = sys.base.add_node(std::string("bus.") + kPhase[p]);
    }
    for (int p = 0; p < 3; ++p) {
        sys.ends.receiving[p] = sys.base.add_node(std::string("load.") + kPhase[p]);
    }
    for (int p = 0; p < 3; ++p) {
        const Complex emf = std::polar(config.source_emf_rms, -shift * p);
        sys.base.add_source({sys.ends.sending[p], emf, config.source_impedance});
        if (config.receiving_source) sys.base.add_source({sys.ends.receiving[p], emf, config.source_impedance});
    }
    return sys;
}

std::vector<FaultCase> enumerate_train_cases() {
    std::vector<FaultCase> cases;
    cases.reserve(kPositions * kFaultTypes);
    for (int pos = 1; pos <= kPositions; ++pos) {
        for (int type = 1; type <= kFaultTypes; ++type) {
            FaultCase c;
            c.position_index = pos;
            c.fault_type = type;
            cases.push_back(c);
        }
    }
    return cases;
}

std::vector<FaultCase> sample_test_cases(std::uint64_t seed, double r_max_ohms) {
    if (!(r_max_ohms > 0.0)) throw InvalidArgument("r_max must be positive");
    Rng rng(seed);
    std::vector<FaultCase> cases(kPositions * kFaultTypes);
    for (auto& c : cases) {
        c.position_index = 1 + static_cast<int>(rng.below(kPositions));
        c.fault_type = 1 + static_cast<int>(rng.below(kFaultTypes));
        for (auto& r : c.phase_resistances) r = rng.uniform(0.0, r_max_ohms);
        c.ground_resistance = rng.uniform(0.0, r_max_ohms);
    }
    return cases;
}

namespace {

DatasetRow collect(const phasor::PhasorSolution& sol, const FaultSystem& system,
                   const std::array<int, 3>& fault_nodes) {
    DatasetRow row;
    for (int p = 0; p < 3; ++p) {
        row.v_bus[p] = to_per_unit(std::abs(sol.voltage(system.ends.sending[p])));
        row.v_load[p] = to_per_unit(std::abs(sol.voltage(system.ends.receiving[p])));
        row.v_fault[p] = to_per_unit(std::abs(sol.voltage(fault_nodes[p])));
    }
    return row;
}

}  // namespace

DatasetRow build_row(const FaultCase& fault, const FaultSystem& system) {
    if (fault.position_index < 1 || fault.position_index > kPositions) {
        throw InvalidArgument("fault position index outside 1..19");
    }
    phasor::FaultSpec spec;
    spec.fault_type = fault.fault_type;
    spec.distance_km = fault.distance_km();
    spec.phase_resistances = fault.phase_resistances;
    spec.ground_resistance = fault.ground_resistance;
    const auto faulted = phasor::apply_fault(system.base, spec, system.line, system.ends);
    auto row = collect(phasor::solve_steady_state(faulted.network), system, faulted.fault_nodes);
    row.distance_km = fault.distance_km();
    row.fault_type = fault.fault_type;
    row.code = fault.code();
    return row;
}

DatasetRow unfaulted_row(const FaultSystem& system, double distance_km) {
    const auto split = phasor::split_line(system.base, system.line, system.ends, distance_km);
    auto row = collect(phasor::solve_steady_state(split.network), system, split.fault_nodes);
    row.distance_km = distance_km;
    return row;
}

std::vector<DatasetRow> build_dataset(const std::vector<FaultCase>& cases, const FaultSystem& system,
                                      unsigned threads) {
    std::vector<DatasetRow> rows(cases.size());
    parallel_for(cases.size(), threads, [&](std::size_t i) { rows[i] = build_row(cases[i], system); });
    return rows;
}

const std::vector<std::string>& dataset_header() {
    static const std::vector<std::string> header{"VbusA",   "VbusB",   "VbusC",   "VloadA",   "VloadB", "VloadC",
                                                 "VfaultA", "VfaultB", "VfaultC", "Distance", "Type",   "Code"};
    return header;
}

void write_dataset(const std::filesystem::path& path, const std::vector<DatasetRow>& rows) {
    std::vector<std::vector<std::string>> out;
    out.reserve(rows.size());
    for (const auto& r : rows) {
        std::vector<std::string> f;
        for (const auto* group : {&r.v_bus, &r.v_load, &r.v_fault}) {
            for (double v : *group) f.push_back(csv::format(v, 17));
        }
        f.push_back(csv::format(r.distance_km));
        f.push_back(std::to_string(r.fault_type));
        f.push_back(std::to_string(r.code));
        out.push_back(std::move(f));
    }
    csv::write_table(path, dataset_header(), out);
}

std::vector<DatasetRow> read_dataset(const std::filesystem::path& path) {
    const auto table = csv::read_table(path);
    if (table.header != dataset_header()) throw ParseError("unexpected dataset header", 1);
    std::vector<DatasetRow> rows;
    rows.reserve(table.rows.size());
    for (const auto& [line, f] : table.rows) {
        DatasetRow r;
        for (int p = 0; p < 3; ++p) {
            r.v_bus[p] = csv::parse_double(f[p], line);
            r.v_load[p] = csv::parse_double(f[3 + p], line);
            r.v_fault[p] = csv::parse_double(f[6 + p], line);
        }
        r.distance_km = csv::parse_double(f[9], line);
        r.fault_type = static_cast<int>(csv::parse_int(f[10], line));
        r.code = static_cast<int>(csv::parse_int(f[11], line));
        rows.push_back(r);
    }
    return rows;
}

}  // namespace gridstudies::faultlab
