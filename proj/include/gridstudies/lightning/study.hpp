#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "gridstudies/lightning/egm.hpp"
#include "gridstudies/lightning/sampling.hpp"
#include "gridstudies/lightning/strike.hpp"

namespace gridstudies::lightning {

struct RateResult {
    double years = 0.0;                // Ny
    double flashovers_per_year = 0.0;  // nf
    double rate = 0.0;                 // per 100 km and year
};

/// Ny = n / (l1 * l2 * Ng), nf = Nf / Ny, rate = nf * 100 / l2. Throws
/// InvalidArgument unless n, l1, l2, Ng > 0 and Nf >= 0.
RateResult flashover_rate(double n, double flashovers, double l1_km, double l2_km, double ground_flash_density);

struct StudyConfig {
    std::size_t n = 50000;
    std::uint64_t seed = 1;
    LineGeometry geometry = LineGeometry::reference();
    StrokeDistributions distributions;
    TowerBands bands;
    StrikeParams strike;
    double ground_flash_density = 2.2;  // flashes / km^2 / year
    bool per_tower_strength = false;
    unsigned threads = 0;
};

struct EventRecord {
    StrokeSample sample;
    Impact impact;
    bool simulated = false;
    bool failed = false;
    StrikeOutcome outcome;
};

struct StudyResult {
    std::array<std::size_t, 5> counts{};  // indexed by ImpactKind
    std::size_t strokes_to_line = 0;
    std::size_t flashovers = 0;
    std::size_t flashovers_at_tower = 0;
    std::size_t flashovers_at_span = 0;
    std::size_t failures = 0;
    RateResult rate;
    std::vector<EventRecord> events;

    std::size_t count(ImpactKind kind) const { return counts[static_cast<std::size_t>(kind)]; }
};

/// Per-tower insulator strengths for event `index` (kV).
std::vector<double> tower_strengths(const StudyConfig& config, std::uint64_t index, int towers);

/// Samples, classifies and simulates every stroke. Events are independent;
/// results do not depend on the thread count. Solver failures on single
/// events are counted, not thrown.
StudyResult run_study(const StudyConfig& config);

/// One row per stroke: coordinates, stroke parameters, impact point and the
/// flashover flag.
void write_events_csv(const std::filesystem::path& path, const StudyResult& result);
std::string summary_text(const StudyConfig& config, const StudyResult& result);

}  // namespace gridstudies::lightning
