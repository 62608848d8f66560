#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <vector>

#include "gridstudies/phasor/fault.hpp"
#include "gridstudies/phasor/line_model.hpp"
#include "gridstudies/phasor/network.hpp"

namespace gridstudies::faultlab {

/// 400 kV / sqrt(3), the phase-to-ground RMS base for every per-unit value.
inline constexpr double kBaseVolts = 230940.1;
inline constexpr int kPositions = 19;
inline constexpr int kFaultTypes = 11;
inline constexpr double kPositionStepKm = 5.0;

double to_per_unit(double volts);

struct FaultCase {
    int position_index = 1;  // 1..19, distance = 5 km * index
    int fault_type = 1;      // 1..11
    std::array<double, 3> phase_resistances{};
    double ground_resistance = 0.0;

    double distance_km() const { return kPositionStepKm * position_index; }
    int code() const { return 100 * position_index + fault_type; }
};

/// 400 kV source behind an equivalent impedance feeding a 100 km line whose
/// receiving end is open unless `receiving_source` adds a second, identical
/// source there. Defaults are typical values, not survey data.
struct SystemConfig {
    double source_emf_rms = kBaseVolts;
    phasor::Complex source_impedance{1.0, 14.0};
    bool receiving_source = false;
    double line_length_km = 100.0;
    double frequency_hz = 50.0;
    bool transposed = false;
    phasor::OverheadLineGeometry geometry = phasor::OverheadLineGeometry::default_400kv();
};

struct FaultSystem {
    phasor::PhasorNetwork base;
    phasor::LineTerminals ends;
    phasor::LineSectionModel line;
};

/// Builds the network. With `transposed` the line uses the sequence
/// parameters of the geometry so that all three phases are equivalent.
FaultSystem build_system(const SystemConfig& config = {});

/// All 19 x 11 bolted cases ordered by (position, type).
std::vector<FaultCase> enumerate_train_cases();

/// 209 cases with positions and types drawn from the training grids and every
/// resistance ~ U(0, r_max).
std::vector<FaultCase> sample_test_cases(std::uint64_t seed, double r_max_ohms);

struct DatasetRow {
    std::array<double, 3> v_bus{};
    std::array<double, 3> v_load{};
    std::array<double, 3> v_fault{};
    double distance_km = 0.0;
    int fault_type = 0;
    int code = 0;
};

DatasetRow build_row(const FaultCase& fault, const FaultSystem& system);

/// Row for the healthy system observed at `distance_km` (type and code 0).
DatasetRow unfaulted_row(const FaultSystem& system, double distance_km);

/// Rows in case order; cases are solved concurrently.
std::vector<DatasetRow> build_dataset(const std::vector<FaultCase>& cases, const FaultSystem& system,
                                      unsigned threads = 0);

void write_dataset(const std::filesystem::path& path, const std::vector<DatasetRow>& rows);
std::vector<DatasetRow> read_dataset(const std::filesystem::path& path);

/// Header of the dataset files.
const std::vector<std::string>& dataset_header();

}  // namespace gridstudies::faultlab
