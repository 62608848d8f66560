#include "gridstudies/lightning/study.hpp"

#include <fstream>
#include <sstream>

#include "gridstudies/common/csv.hpp"
#include "gridstudies/common/error.hpp"
#include "gridstudies/common/parallel.hpp"
#include "gridstudies/common/rng.hpp"

namespace gridstudies::lightning {

RateResult flashover_rate(double n, double flashovers, double l1_km, double l2_km, double ground_flash_density) {
    if (!(n > 0.0)) throw InvalidArgument("stroke count must be positive");
    if (!(flashovers >= 0.0)) throw InvalidArgument("flashover count must be nonnegative");
    if (!(l1_km > 0.0 && l2_km > 0.0)) throw InvalidArgument("strip dimensions must be positive");
    if (!(ground_flash_density > 0.0)) throw InvalidArgument("ground flash density must be positive");
    RateResult r;
    r.years = n / (l1_km * l2_km * ground_flash_density);
    r.flashovers_per_year = flashovers / r.years;
    r.rate = r.flashovers_per_year * 100.0 / l2_km;
    return r;
}

std::vector<double> tower_strengths(const StudyConfig& config, std::uint64_t index, int towers) {
    Rng rng = Rng::for_item(config.seed ^ 0x9e3779b97f4a7c15ULL, index);
    std::vector<double> out(static_cast<std::size_t>(towers));
    for (auto& s : out) s = rng.normal(config.distributions.strength_mean_kv, config.distributions.strength_sd_kv);
    return out;
}

StudyResult run_study(const StudyConfig& config) {
    if (config.n == 0) throw InvalidArgument("study needs at least one stroke");
    config.geometry.validate();
    StudyResult res;
    res.events.resize(config.n);
    parallel_for(config.n, config.threads, [&](std::size_t i) {
        auto& ev = res.events[i];
        ev.sample = sample_stroke(config.seed, i, config.geometry, config.distributions);
        ev.impact = classify_impact(config.geometry, ev.sample.peak_ka, ev.sample.x_m, ev.sample.y_m, config.bands);
        if (!ev.impact.on_line()) return;
        ev.simulated = true;
        try {
            std::vector<double> strengths;
            if (config.per_tower_strength) {
                const int towers = 2 * config.strike.spans_each_side + (ev.impact.at_tower() ? 1 : 0);
                strengths = tower_strengths(config, i, towers);
            }
            const auto net = build_strike_network(ev.sample, ev.impact, config.geometry, config.strike, strengths);
            ev.outcome = simulate_strike(net, config.strike);
        } catch (const Error&) {
            ev.failed = true;
        }
    });
    for (const auto& ev : res.events) {
        ++res.counts[static_cast<std::size_t>(ev.impact.kind)];
        if (!ev.impact.on_line()) continue;
        ++res.strokes_to_line;
        if (ev.failed) ++res.failures;
        if (!ev.outcome.flashover) continue;
        ++res.flashovers;
        ++(ev.impact.at_tower() ? res.flashovers_at_tower : res.flashovers_at_span);
    }
    const double l1_km = 2.0 * config.geometry.strip_half_width_m / 1000.0;
    const double l2_km = config.geometry.exposed_length_m() / 1000.0;
    res.rate = flashover_rate(static_cast<double>(config.n), static_cast<double>(res.flashovers), l1_km, l2_km,
                              config.ground_flash_density);
    return res;
}

namespace {

std::string wire_label(const Impact& im) {
    switch (im.kind) {
        case ImpactKind::ToGround: return "Ground";
        case ImpactKind::ShieldWireAtTower:
        case ImpactKind::ShieldWireAtSpan: return "Shield wire";
        default: return im.conductor == 0 ? "Phase A" : "Phase C";
    }
}

}  // namespace

void write_events_csv(const std::filesystem::path& path, const StudyResult& result) {
    std::vector<std::vector<std::string>> rows;
    rows.reserve(result.events.size());
    for (std::size_t i = 0; i < result.events.size(); ++i) {
        const auto& ev = result.events[i];
        const auto& s = ev.sample;
        const std::string tower = !ev.impact.on_line() ? "None" : (ev.impact.at_tower() ? "Tower" : "Span");
        rows.push_back({std::to_string(i), csv::format(s.x_m), csv::format(s.y_m), csv::format(s.phase_angle_deg),
                        csv::format(s.peak_ka), csv::format(s.front_us), csv::format(s.tail_us),
                        csv::format(s.footing_ohms), csv::format(s.strength_kv), wire_label(ev.impact), tower,
                        ev.failed ? "NA" : (ev.outcome.flashover ? "1" : "0")});
    }
    csv::write_table(path,
                     {"Index", "X", "Y", "PhaseAngle", "StrokePeak", "FrontTime", "HalfPeak", "Footing", "Strength",
                      "Wire", "Tower", "Flashover"},
                     rows);
}

std::string summary_text(const StudyConfig& config, const StudyResult& r) {
    const auto cc = critical_currents(config.geometry);
    std::ostringstream o;
    o << "Critical current to shield wires = " << csv::fixed(cc.shield_ka, 2) << " kA\n";
    o << "Critical current that shields a span = " << csv::fixed(cc.span_ka, 2) << " kA\n";
    o << "Number of strokes = " << config.n << "\n";
    o << "Number of strokes to ground = " << r.count(ImpactKind::ToGround) << "\n";
    o << "Number of strokes to the line = " << r.strokes_to_line << "\n";
    o << "Number of strokes to towers = " << r.count(ImpactKind::ShieldWireAtTower) + r.count(ImpactKind::PhaseAtTower) << "\n";
    o << "Number of strokes to spans = " << r.count(ImpactKind::ShieldWireAtSpan) + r.count(ImpactKind::PhaseAtSpan) << "\n";
    o << "Number of strokes to shield wires = " << r.count(ImpactKind::ShieldWireAtTower) + r.count(ImpactKind::ShieldWireAtSpan) << "\n";
    o << "Number of strokes to shield wires at towers = " << r.count(ImpactKind::ShieldWireAtTower) << "\n";
    o << "Number of strokes to shield wires at spans = " << r.count(ImpactKind::ShieldWireAtSpan) << "\n";
    o << "Number of strokes to conductors = " << r.count(ImpactKind::PhaseAtTower) + r.count(ImpactKind::PhaseAtSpan) << "\n";
    o << "Number of strokes to conductors at towers = " << r.count(ImpactKind::PhaseAtTower) << "\n";
    o << "Number of strokes to conductors at spans = " << r.count(ImpactKind::PhaseAtSpan) << "\n";
    o << "Number of flashovers = " << r.flashovers << "\n";
    o << "Number of flashovers caused by strokes to spans = " << r.flashovers_at_span << "\n";
    o << "Number of flashovers caused by strokes to towers = " << r.flashovers_at_tower << "\n";
    o << "Number of failed simulations = " << r.failures << "\n";
    o << "Number of simulated years = " << csv::fixed(r.rate.years, 0) << "\n";
    o << "Number of flashovers per year = " << csv::fixed(r.rate.flashovers_per_year, 4) << "\n";
    o << "Flashover rate = " << csv::fixed(r.rate.rate, 2) << " (flashovers per 100 km and year)\n";
    return o.str();
}

}  // namespace gridstudies::lightning
