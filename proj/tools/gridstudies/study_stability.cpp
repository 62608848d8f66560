#include <cmath>
#include <fstream>
#include <iostream>
#include <numbers>

#include "gridstudies/common/csv.hpp"
#include "gridstudies/common/error.hpp"
#include "gridstudies/report/svg.hpp"
#include "gridstudies/stability/smib.hpp"
#include "studies.hpp"

namespace gridstudies::cli {

namespace {

using namespace gridstudies::stability;

constexpr double kDeg = 180.0 / std::numbers::pi;

SmibModel read_model(const Params& m) {
    SmibModel model;
    model.s_base_mva = m.num("s_base_mva");
    model.h = m.num("h");
    model.d = m.num("d");
    model.xd_prime = m.num("xd_prime");
    model.xt = m.num("xt");
    model.x_line1 = m.num("x_line1");
    model.x_line2 = m.num("x_line2");
    model.e_bus = m.num("e_bus");
    model.f0 = m.num("f0");
    check(m.name("*"), [&] { model.validate(); });
    return model;
}

void run_single(RunContext& ctx, const SmibModel& model, const FaultEvent& fault, const SimOptions& opts) {
    const Params p = ctx.p();
    OperatingPoint op;
    if (const auto p_mw = p.opt_num("p_mw")) {
        if (!(*p_mw >= 0.0 && *p_mw <= model.s_base_mva)) {
            throw ConfigError("key '" + p.name("p_mw") + "' must lie in [0, " + csv::format(model.s_base_mva) + "]");
        }
        op.p = *p_mw / model.s_base_mva;
        const auto q_mvar = p.opt_num("q_mvar");
        op.q = q_mvar ? *q_mvar / model.s_base_mva : std::sqrt(1.0 - op.p * op.p);
    } else {
        check(p.name("power_factor"), [&] { op = OperatingPoint::at_power_factor(model, p.num("power_factor")); });
    }
    SimulationResult res;
    check(p.name("p_mw"), [&] { res = simulate(model, op, fault, opts); });
    write_trace_csv(ctx.output("trace.csv"), res.trace);

    std::vector<double> t_s, deg;
    for (std::size_t i = 0; i < res.trace.t.size(); ++i) {
        t_s.push_back(res.trace.t[i]);
        deg.push_back(res.trace.delta[i] * kDeg);
    }
    report::write_svg(ctx.output("trace.svg"),
                      report::series_svg({{"rotor angle", t_s, deg}},
                                         {"Rotor angle, P = " + csv::fixed(op.p * model.s_base_mva, 1) + " MW", "t (s)", "delta (deg)"}));

    std::ofstream s(ctx.output("summary.txt"));
    s << "Power = " << csv::fixed(op.p * model.s_base_mva, 2) << " MW\n"
      << "Reactive power = " << csv::fixed(op.q * model.s_base_mva, 2) << " Mvar\n"
      << "Fault duration = " << csv::fixed(fault.duration * 1e3, 2) << " ms\n"
      << "Initial rotor angle = " << csv::fixed(res.initial.delta0 * kDeg, 4) << " deg\n"
      << "Internal EMF = " << csv::fixed(res.initial.e_prime, 6) << " pu\n";
    if (fault.location == 0.0) {
        const auto cc = cct_equal_area(model, op);
        if (cc.unbounded) {
            s << "Critical clearing time = unbounded\n";
        } else {
            s << "Critical clearing angle = " << csv::fixed(cc.delta_crit * kDeg, 4) << " deg\n"
              << "Critical clearing time = " << csv::fixed(cc.t_crit * 1e3, 3) << " ms\n";
        }
    }
    s << "Stability = " << (res.unstable ? 1 : 0) << '\n';
    std::cout << (res.unstable ? "unstable" : "stable") << '\n';
}

void run_sweep(RunContext& ctx, const SmibModel& model, const FaultEvent& fault, const SimOptions& opts) {
    const Params p = ctx.p();
    const Params d = p.sub("durations_ms");
    std::vector<double> durations;
    check(d.name("count"), [&] { durations = linspace(d.num("from"), d.num("to"), d.count("count")); });
    const auto pfs = p.nums("power_factors");
    for (double pf : pfs) {
        if (!(pf > 0.0 && pf <= 1.0)) throw ConfigError("key '" + p.name("power_factors") + "' entries must lie in (0, 1]");
    }
    std::vector<SweepRow> rows;
    check(p.name("durations_ms"), [&] { rows = sweep(model, durations, pfs, fault, opts, ctx.threads); });
    write_sweep_csv(ctx.output("sweep.csv"), rows);

    report::PointGroup stable{"stable", {}, {}}, unstable{"unstable", {}, {}};
    for (const auto& r : rows) {
        auto& g = r.stability ? unstable : stable;
        g.x.push_back(r.duration_ms);
        g.y.push_back(r.power_mw);
    }
    report::write_svg(ctx.output("stability_map.svg"),
                      report::scatter_svg({stable, unstable}, {"Stability map", "fault duration (ms)", "P (MW)"}));

    std::vector<std::vector<std::string>> cct_rows;
    for (double pf : pfs) {
        const auto op = OperatingPoint::at_power_factor(model, pf);
        std::string t = "inf";
        try {
            const auto cc = cct_equal_area(model, op);
            if (!cc.unbounded) t = csv::fixed(cc.t_crit * 1e3, 3);
        } catch (const InvalidArgument&) {
            t = "none";
        }
        cct_rows.push_back({csv::fixed(pf * model.s_base_mva, 1), csv::fixed(pf, 3), t});
    }
    csv::write_table(ctx.output("cct.csv"), {"Power", "PowerFactor", "CCT_ms"}, cct_rows);
    std::cout << rows.size() << " sweep points\n";
}

}  // namespace

StudyDef stability_study() {
    StudyDef def;
    def.name = "stability";
    def.description = "Single machine, infinite bus transient stability: one trace or a sweep";
    def.defaults = [] {
        json j;
        j["p_mw"] = nullptr;
        j["q_mvar"] = nullptr;
        j["power_factor"] = 0.9;
        j["duration_ms"] = 50.0;
        j["fault_time_s"] = 0.1;
        j["location"] = 0.0;
        j["sweep"] = false;
        j["durations_ms"] = {{"from", 70.0}, {"to", 250.0}, {"count", 67}};
        j["power_factors"] = {0.6, 0.7, 0.8, 0.9, 1.0};
        j["dt_s"] = 5e-4;
        j["observe_s"] = 2.0;
        const SmibModel m;
        j["model"] = {{"s_base_mva", m.s_base_mva}, {"h", m.h},   {"d", m.d},         {"xd_prime", m.xd_prime},
                      {"xt", m.xt},                 {"x_line1", m.x_line1}, {"x_line2", m.x_line2}, {"e_bus", m.e_bus},
                      {"f0", m.f0}};
        return j;
    };
    def.flags = [](CLI::App& app, FlagSet& f) {
        f.option<double>(app, "--p-mw", "p_mw", "Active power output (MW)");
        f.option<double>(app, "--q-mvar", "q_mvar", "Reactive power output (Mvar), default keeps full apparent power");
        f.option<double>(app, "--pf", "power_factor", "Power factor when --p-mw is not given");
        f.option<double>(app, "--duration-ms", "duration_ms", "Fault duration (ms)");
        f.option<double>(app, "--location", "location", "Fault location along circuit 2 (0..1)");
        f.toggle(app, "--sweep", "sweep", "Sweep durations and power factors");
    };
    def.run = [](RunContext& ctx) {
        const Params p = ctx.p();
        const SmibModel model = read_model(p.sub("model"));
        FaultEvent fault;
        fault.t_on = p.num("fault_time_s");
        fault.duration = p.num("duration_ms") * 1e-3;
        fault.location = p.num("location");
        if (fault.t_on < 0.0 || fault.duration < 0.0) throw ConfigError("fault time and duration must be nonnegative");
        if (fault.location < 0.0 || fault.location > 1.0) throw ConfigError("key '" + p.name("location") + "' must lie in [0, 1]");
        SimOptions opts;
        opts.dt = p.num("dt_s");
        opts.observe_after_clear = p.num("observe_s");
        if (!(opts.dt > 0.0) || !(opts.observe_after_clear > 0.0)) throw ConfigError("dt_s and observe_s must be positive");
        if (p.flag("sweep")) {
            run_sweep(ctx, model, fault, opts);
        } else {
            run_single(ctx, model, fault, opts);
        }
    };
    return def;
}

}  // namespace gridstudies::cli
