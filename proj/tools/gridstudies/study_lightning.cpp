#include <fstream>
#include <iostream>

#include "gridstudies/common/csv.hpp"
#include "gridstudies/lightning/calibration.hpp"
#include "gridstudies/lightning/study.hpp"
#include "gridstudies/report/svg.hpp"
#include "studies.hpp"

namespace gridstudies::cli {

namespace {

using namespace gridstudies::lightning;

json geometry_json(const LineGeometry& g) {
    json j;
    j["phase_y"] = {g.phases[0].y, g.phases[1].y, g.phases[2].y};
    j["phase_h"] = {g.phases[0].h, g.phases[1].h, g.phases[2].h};
    j["shield_y"] = {g.shield_wires[0].y, g.shield_wires[1].y};
    j["shield_h"] = {g.shield_wires[0].h, g.shield_wires[1].h};
    j["phase_sag_m"] = g.phase_sag_m;
    j["shield_sag_m"] = g.shield_sag_m;
    j["phase_radius_m"] = g.phase_radius_m;
    j["shield_radius_m"] = g.shield_radius_m;
    j["span_length_m"] = g.span_length_m;
    j["spans_modeled"] = g.spans_modeled;
    j["strip_half_width_m"] = g.strip_half_width_m;
    j["tower_height_m"] = g.tower_height_m;
    j["tower_base_radius_m"] = g.tower_base_radius_m;
    return j;
}

LineGeometry read_geometry(const Params& p) {
    LineGeometry g;
    const auto py = p.nums("phase_y"), ph = p.nums("phase_h"), sy = p.nums("shield_y"), sh = p.nums("shield_h");
    if (py.size() != 3 || ph.size() != 3) throw ConfigError("keys '" + p.name("phase_y") + "' and 'phase_h' need 3 entries");
    if (sy.size() != 2 || sh.size() != 2) throw ConfigError("keys '" + p.name("shield_y") + "' and 'shield_h' need 2 entries");
    for (std::size_t i = 0; i < 3; ++i) g.phases[i] = {py[i], ph[i]};
    for (std::size_t i = 0; i < 2; ++i) g.shield_wires[i] = {sy[i], sh[i]};
    g.phase_sag_m = p.num("phase_sag_m");
    g.shield_sag_m = p.num("shield_sag_m");
    g.phase_radius_m = p.num("phase_radius_m");
    g.shield_radius_m = p.num("shield_radius_m");
    g.span_length_m = p.num("span_length_m");
    g.spans_modeled = static_cast<int>(p.integer("spans_modeled"));
    g.strip_half_width_m = p.num("strip_half_width_m");
    g.tower_height_m = p.num("tower_height_m");
    g.tower_base_radius_m = p.num("tower_base_radius_m");
    check(p.name("*"), [&] { g.validate(); });
    return g;
}

StudyConfig read_study(const RunContext& ctx) {
    const Params p = ctx.p();
    StudyConfig c;
    c.n = p.count("n");
    if (c.n == 0) throw ConfigError("key '" + p.name("n") + "' must be at least 1");
    c.seed = ctx.seed;
    c.threads = ctx.threads;
    c.ground_flash_density = p.num("ground_flash_density");
    if (!(c.ground_flash_density > 0.0)) throw ConfigError("key '" + p.name("ground_flash_density") + "' must be positive");
    c.per_tower_strength = p.flag("per_tower_strength");
    c.geometry = read_geometry(p.sub("geometry"));

    const Params d = p.sub("distributions");
    auto& s = c.distributions;
    s.peak_ka = {d.num("peak_median_ka"), d.num("peak_sigma_ln")};
    s.front_us = {d.num("front_median_us"), d.num("front_sigma_ln")};
    s.tail_us = {d.num("tail_median_us"), d.num("tail_sigma_ln")};
    s.footing_min_ohms = d.num("footing_min_ohms");
    s.footing_max_ohms = d.num("footing_max_ohms");
    s.strength_mean_kv = d.num("strength_mean_kv");
    s.strength_sd_kv = d.num("strength_sd_kv");
    for (const auto* l : {&s.peak_ka, &s.front_us, &s.tail_us}) {
        if (!(l->median > 0.0 && l->sigma_ln > 0.0)) throw ConfigError("'" + d.name("*") + "' medians and sigmas must be positive");
    }
    if (!(s.footing_min_ohms > 0.0 && s.footing_max_ohms >= s.footing_min_ohms)) {
        throw ConfigError("'" + d.name("footing_min_ohms") + "' must be positive and not above footing_max_ohms");
    }
    if (!(s.strength_mean_kv > 0.0 && s.strength_sd_kv >= 0.0)) throw ConfigError("'" + d.name("strength_mean_kv") + "' must be positive");

    const Params b = p.sub("bands");
    c.bands = {b.num("high_ka"), b.num("low_ka")};
    if (!(c.bands.low_ka > 0.0 && c.bands.high_ka >= c.bands.low_ka)) throw ConfigError("'" + b.name("low_ka") + "' must be positive and not above high_ka");

    const Params k = p.sub("strike");
    c.strike.system_kv = k.num("system_kv");
    c.strike.dt = k.num("dt_ns") * 1e-9;
    c.strike.t_end = k.num("t_end_us") * 1e-6;
    c.strike.spans_each_side = static_cast<int>(k.integer("spans_each_side"));
    c.strike.termination_length_m = k.num("termination_length_m");
    c.strike.stop_on_flashover = k.flag("stop_on_flashover");
    if (!(c.strike.dt > 0.0 && c.strike.t_end > c.strike.dt)) throw ConfigError("'" + k.name("dt_ns") + "' must be positive and below t_end_us");
    if (c.strike.spans_each_side < 1) throw ConfigError("key '" + k.name("spans_each_side") + "' must be at least 1");
    if (!(c.strike.termination_length_m > 0.0 && c.strike.system_kv >= 0.0)) throw ConfigError("'" + k.name("*") + "' values out of range");
    return c;
}

void histogram_file(RunContext& ctx, const std::string& name, const std::vector<double>& v, std::size_t bins,
                    const std::string& title, const std::string& unit) {
    report::write_svg(ctx.output(name), report::histogram_svg(report::histogram(v, bins), {title, unit, "count"}));
}

}  // namespace

StudyDef lightning_study() {
    StudyDef def;
    def.name = "lightning";
    def.description = "Monte Carlo lightning performance of the 230 kV line";
    def.defaults = [] {
        const StudyConfig c;
        const auto& s = c.distributions;
        json j;
        j["n"] = c.n;
        j["ground_flash_density"] = c.ground_flash_density;
        j["per_tower_strength"] = c.per_tower_strength;
        j["histogram_bins"] = 40;
        j["geometry"] = geometry_json(c.geometry);
        j["distributions"] = {{"peak_median_ka", s.peak_ka.median},   {"peak_sigma_ln", s.peak_ka.sigma_ln},
                              {"front_median_us", s.front_us.median}, {"front_sigma_ln", s.front_us.sigma_ln},
                              {"tail_median_us", s.tail_us.median},   {"tail_sigma_ln", s.tail_us.sigma_ln},
                              {"footing_min_ohms", s.footing_min_ohms}, {"footing_max_ohms", s.footing_max_ohms},
                              {"strength_mean_kv", s.strength_mean_kv}, {"strength_sd_kv", s.strength_sd_kv}};
        j["bands"] = {{"high_ka", c.bands.high_ka}, {"low_ka", c.bands.low_ka}};
        j["strike"] = {{"system_kv", c.strike.system_kv},
                       {"dt_ns", c.strike.dt * 1e9},
                       {"t_end_us", c.strike.t_end * 1e6},
                       {"spans_each_side", c.strike.spans_each_side},
                       {"termination_length_m", c.strike.termination_length_m},
                       {"stop_on_flashover", c.strike.stop_on_flashover}};
        return j;
    };
    def.flags = [](CLI::App& app, FlagSet& f) {
        f.option<std::size_t>(app, "--n", "n", "Number of strokes");
        f.option<double>(app, "--ng", "ground_flash_density", "Ground flash density (1/km^2/year)");
        f.toggle(app, "--per-tower-strength", "per_tower_strength", "Draw an insulator strength for every tower");
    };
    def.run = [](RunContext& ctx) {
        const StudyConfig cfg = read_study(ctx);
        const std::size_t bins = ctx.p().count("histogram_bins");
        if (bins == 0) throw ConfigError("key 'lightning.histogram_bins' must be at least 1");
        const auto res = run_study(cfg);
        write_events_csv(ctx.output("events.csv"), res);
        const auto text = summary_text(cfg, res);
        std::ofstream(ctx.output("summary.txt")) << text;

        std::vector<double> peak, front, tail, angle;
        report::PointGroup ground{"ground", {}, {}}, shield{"shield wire", {}, {}}, phase{"phase", {}, {}};
        for (const auto& e : res.events) {
            peak.push_back(e.sample.peak_ka);
            front.push_back(e.sample.front_us);
            tail.push_back(e.sample.tail_us);
            angle.push_back(e.sample.phase_angle_deg);
            auto& g = !e.impact.on_line() ? ground : e.impact.on_shield() ? shield : phase;
            g.x.push_back(e.sample.x_m);
            g.y.push_back(e.sample.y_m);
        }
        histogram_file(ctx, "peak.svg", peak, bins, "Stroke peak current", "kA");
        histogram_file(ctx, "front.svg", front, bins, "Front time", "us");
        histogram_file(ctx, "tail.svg", tail, bins, "Time to half value", "us");
        histogram_file(ctx, "angle.svg", angle, bins, "Phase angle at impact", "deg");
        report::write_svg(ctx.output("impacts.svg"),
                          report::scatter_svg({ground, shield, phase}, {"Stroke terminations", "x (m)", "y (m)", 760, 560}));
        std::cout << text;
    };
    return def;
}

StudyDef calibrate_study() {
    StudyDef def;
    def.name = "calibrate-geometry";
    def.description = "Fit the phase offset and shield sag to target critical currents";
    def.defaults = [] {
        json j;
        j["shield_ka"] = CalibrationTarget{}.shield_ka;
        j["span_ka"] = CalibrationTarget{}.span_ka;
        j["max_rounds"] = 20;
        j["geometry"] = geometry_json(LineGeometry::reference());
        return j;
    };
    def.flags = [](CLI::App& app, FlagSet& f) {
        f.option<double>(app, "--shield-ka", "shield_ka", "Target shielding critical current (kA)");
        f.option<double>(app, "--span-ka", "span_ka", "Target midspan critical current (kA)");
    };
    def.run = [](RunContext& ctx) {
        const Params p = ctx.p();
        const auto start = read_geometry(p.sub("geometry"));
        const CalibrationTarget target{p.num("shield_ka"), p.num("span_ka")};
        if (!(target.shield_ka > 0.0 && target.span_ka > 0.0)) throw ConfigError("calibration targets must be positive");
        const int rounds = static_cast<int>(p.integer("max_rounds"));
        if (rounds < 1) throw ConfigError("key '" + p.name("max_rounds") + "' must be at least 1");
        const auto rep = calibrate_geometry(start, target, StrokeDistributions{}.peak_ka, rounds);

        json cfg;
        cfg["study"] = "lightning";
        cfg["lightning"]["geometry"] = geometry_json(rep.geometry);
        std::ofstream(ctx.output("calibrated_config.json")) << cfg.dump(2) << '\n';
        std::ofstream out(ctx.output("calibration.txt"));
        out << "Shield critical current = " << csv::fixed(rep.currents.shield_ka, 3) << " kA\n"
            << "Span critical current = " << csv::fixed(rep.currents.span_ka, 3) << " kA\n"
            << "Outer phase offset = " << csv::fixed(rep.geometry.phases[0].y, 4) << " m\n"
            << "Shield wire sag = " << csv::fixed(rep.geometry.shield_sag_m, 4) << " m\n"
            << "Expected stroke-to-line fraction = " << csv::fixed(rep.line_fraction, 5) << '\n'
            << "Rounds = " << rep.rounds << '\n';
        std::cout << "shield " << csv::fixed(rep.currents.shield_ka, 3) << " kA, span " << csv::fixed(rep.currents.span_ka, 3) << " kA\n";
    };
    return def;
}

}  // namespace gridstudies::cli
