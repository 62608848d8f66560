#include <iostream>

#include "gridstudies/common/csv.hpp"
#include "gridstudies/dist/cases.hpp"
#include "gridstudies/dist/montecarlo.hpp"
#include "gridstudies/dist/timeseries.hpp"
#include "gridstudies/report/svg.hpp"
#include "studies.hpp"

namespace gridstudies::cli {

namespace {

using namespace gridstudies::dist;

struct DistSettings {
    std::vector<DistCase> cases;
    Feeder base;
    int hours = 200;
    std::size_t runs = 1000;
    std::uint64_t shape_seed = 31;
    std::string shapes_dir;
    std::string load_table;
    double mean_fraction = 0.5;
    double sd_fraction = 0.05;
    std::size_t bins = 30;
};

DistSettings read_settings(const RunContext& ctx) {
    const Params p = ctx.p();
    DistSettings s;
    const std::string c = p.str("case");
    if (c == "all") {
        for (int i = 0; i < 8; ++i) s.cases.push_back(static_cast<DistCase>(i));
    } else {
        check(p.name("case"), [&] { s.cases.push_back(parse_case(c)); });
    }
    s.hours = static_cast<int>(p.integer("hours"));
    if (s.hours < 1) throw ConfigError("key '" + p.name("hours") + "' must be at least 1");
    s.runs = p.count("runs");
    if (s.runs == 0) throw ConfigError("key '" + p.name("runs") + "' must be at least 1");
    s.shape_seed = static_cast<std::uint64_t>(p.count("shape_seed"));
    s.shapes_dir = p.str("shapes_dir");
    s.load_table = p.str("load_table");
    s.mean_fraction = p.num("mean_fraction");
    s.sd_fraction = p.num("sd_fraction");
    if (s.mean_fraction < 0.0 || s.sd_fraction < 0.0) throw ConfigError("load fractions must be nonnegative");
    s.bins = p.count("histogram_bins");
    if (s.bins == 0) throw ConfigError("key '" + p.name("histogram_bins") + "' must be at least 1");
    s.base.pv = PvSpec{p.num("pv_kw")};
    s.base.generator = GeneratorSpec{p.num("generator_kw")};
    const Params st = p.sub("storage");
    StorageSpec spec;
    spec.rated_kw = st.num("rated_kw");
    spec.rated_kwh = st.num("rated_kwh");
    spec.soc_initial = st.num("soc_initial");
    spec.soc_min = st.num("soc_min");
    spec.soc_max = st.num("soc_max");
    spec.efficiency = st.num("efficiency");
    s.base.storage = spec;
    check(p.name("storage"), [&] { case_feeder(DistCase::A3, s.base).validate(); });
    check(p.name("generator_kw"), [&] { case_feeder(DistCase::B2, s.base).validate(); });
    return s;
}

Shapes load_shapes(RunContext& ctx, const DistSettings& s, int strategy) {
    const auto need = static_cast<std::size_t>(s.hours);
    if (s.shapes_dir.empty()) {
        auto shapes = synthetic_shapes(need, strategy, s.shape_seed);
        for (std::size_t l = 0; l < 3; ++l) write_shape_csv(ctx.output("shape_load" + std::to_string(l + 1) + ".csv"), shapes.loads[l]);
        write_shape_csv(ctx.output("shape_pv.csv"), shapes.pv);
        write_shape_csv(ctx.output("shape_storage" + std::to_string(strategy) + ".csv"), shapes.storage);
        return shapes;
    }
    const std::filesystem::path dir(s.shapes_dir);
    Shapes shapes;
    for (std::size_t l = 0; l < 3; ++l) shapes.loads[l] = normalize(read_shape_csv(dir / ("load" + std::to_string(l + 1) + ".csv")));
    shapes.pv = normalize(read_shape_csv(dir / "pv.csv"));
    shapes.storage = read_shape_csv(dir / ("storage" + std::to_string(strategy) + ".csv"));
    return shapes;
}

void run_time_series(RunContext& ctx, const DistSettings& s, DistCase c, std::vector<std::string>& names,
                     std::vector<Meter>& meters) {
    const Feeder f = case_feeder(c, s.base);
    const auto shapes = load_shapes(ctx, s, storage_strategy(c));
    const auto res = run_daily(f, shapes, s.hours);
    const auto name = case_name(c);
    write_hourly_csv(ctx.output(name + "_hourly.csv"), f, res);
    report::Series head{"feeder head kW", {}, {}}, line3{"Line3 kW", {}, {}};
    for (const auto& h : res.hours) {
        head.x.push_back(h.hour);
        head.y.push_back(3.0 * h.snapshot.line_sending[0].real());
        line3.x.push_back(h.hour);
        line3.y.push_back(3.0 * h.snapshot.line_sending[2].real());
    }
    report::write_svg(ctx.output(name + "_power.svg"), report::series_svg({head, line3}, {"Case " + name + " active power", "hour", "kW"}));
    names.push_back(name);
    meters.push_back(res.meter);
    std::cout << name << ": " << csv::fixed(res.meter.kwh, 2) << " kWh\n";
}

void run_mc(RunContext& ctx, const DistSettings& s, DistCase c) {
    const Feeder f = case_feeder(c, s.base);
    const auto name = case_name(c);
    MonteCarloConfig cfg;
    cfg.runs = s.runs;
    cfg.seed = ctx.seed;
    cfg.mean_fraction = s.mean_fraction;
    cfg.sd_fraction = s.sd_fraction;
    cfg.threads = ctx.threads;
    LoadTable table;
    if (c == DistCase::B3 || c == DistCase::B4) {
        std::filesystem::path path;
        if (s.load_table.empty()) {
            path = ctx.output(name + "_loads.csv");
            write_load_table(path, generate_load_table(f, s.runs, ctx.seed, c == DistCase::B4, s.mean_fraction, s.sd_fraction));
        } else {
            path = s.load_table;
        }
        table = read_load_table(path);
        cfg.table = &table;
    }
    const auto res = run_monte_carlo(f, cfg);
    write_runs_csv(ctx.output(name + "_runs.csv"), res);
    write_stats_csv(ctx.output(name + "_stats.csv"), res);
    std::vector<double> load1, line3, source;
    for (const auto& r : res.runs) {
        load1.push_back(r.snapshot.load[0].real());
        line3.push_back(r.snapshot.line_sending[2].real());
        source.push_back(r.snapshot.source.real());
    }
    auto hist = [&](const std::string& file, const std::vector<double>& v, const std::string& title) {
        report::write_svg(ctx.output(name + file), report::histogram_svg(report::histogram(v, s.bins), {title, "kW per phase", "runs"}));
    };
    hist("_load1.svg", load1, "Case " + name + " Load1 active power");
    hist("_line3.svg", line3, "Case " + name + " Line3 sending active power");
    hist("_source.svg", source, "Case " + name + " source active power");
    std::cout << name << ": Load1 mean " << csv::fixed(res.loads[0].mean_kw, 2) << " kW, Line3 mean "
              << csv::fixed(res.lines[2].mean_kw, 2) << " kW\n";
}

}  // namespace

StudyDef dist_study() {
    StudyDef def;
    def.name = "dist";
    def.description = "Radial feeder time series (A1-A4) and Monte Carlo loads (B1-B4)";
    def.defaults = [] {
        const StorageSpec st;
        json j;
        j["case"] = "A1";
        j["hours"] = 200;
        j["runs"] = 1000;
        j["shape_seed"] = 31;
        j["shapes_dir"] = "";
        j["load_table"] = "";
        j["mean_fraction"] = 0.5;
        j["sd_fraction"] = 0.05;
        j["histogram_bins"] = 30;
        j["pv_kw"] = PvSpec{}.rated_kw;
        j["generator_kw"] = GeneratorSpec{}.rated_kw;
        j["storage"] = {{"rated_kw", st.rated_kw},   {"rated_kwh", st.rated_kwh}, {"soc_initial", st.soc_initial},
                        {"soc_min", st.soc_min},     {"soc_max", st.soc_max},     {"efficiency", st.efficiency}};
        return j;
    };
    def.flags = [](CLI::App& app, FlagSet& f) {
        f.option<std::string>(app, "--case", "case", "A1-A4, B1-B4 or all");
        f.option<int>(app, "--hours", "hours", "Time-series horizon (h)");
        f.option<std::size_t>(app, "--runs", "runs", "Monte Carlo runs");
        f.option<std::string>(app, "--shapes", "shapes_dir", "Directory with load1..3.csv, pv.csv, storage1.csv, storage2.csv");
        f.option<std::string>(app, "--load-table", "load_table", "Random-load table (run,load,kW) for B3/B4");
    };
    def.run = [](RunContext& ctx) {
        const auto s = read_settings(ctx);
        std::vector<std::string> names;
        std::vector<Meter> meters;
        for (auto c : s.cases) {
            if (is_time_series(c)) {
                run_time_series(ctx, s, c, names, meters);
            } else {
                run_mc(ctx, s, c);
            }
        }
        if (!meters.empty()) write_meter_csv(ctx.output("meter.csv"), names, meters);
    };
    return def;
}

}  // namespace gridstudies::cli
