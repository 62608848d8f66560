#include <iostream>

#include "gridstudies/common/csv.hpp"
#include "gridstudies/faultlab/faultlab.hpp"
#include "gridstudies/phasor/io.hpp"
#include "gridstudies/report/svg.hpp"
#include "gridstudies/studies/pipelines.hpp"
#include "studies.hpp"

namespace gridstudies::cli {

namespace {

faultlab::SystemConfig read_system(const Params& s) {
    faultlab::SystemConfig cfg;
    cfg.source_impedance = {s.num("source_r"), s.num("source_x")};
    cfg.receiving_source = s.flag("receiving_source");
    cfg.transposed = s.flag("transposed");
    cfg.line_length_km = s.num("line_length_km");
    cfg.frequency_hz = s.num("frequency_hz");
    if (cfg.line_length_km < faultlab::kPositionStepKm * faultlab::kPositions + 1e-9) {
        throw ConfigError("key '" + s.name("line_length_km") + "' must exceed the last fault position (95 km)");
    }
    if (!(cfg.frequency_hz > 0.0)) throw ConfigError("key '" + s.name("frequency_hz") + "' must be positive");
    return cfg;
}

}  // namespace

StudyDef fault_lab_study() {
    StudyDef def;
    def.name = "fault-lab";
    def.description = "Fault datasets on the 400 kV line and kNN location-type agreement";
    def.defaults = [] {
        json j;
        j["mode"] = "train";
        j["rmax"] = 1.0;
        j["system"] = {{"source_r", 1.0},          {"source_x", 14.0},        {"receiving_source", false},
                       {"transposed", false},      {"line_length_km", 100.0}, {"frequency_hz", 50.0}};
        j["knn"] = {{"k_max", 4}, {"r_values", {1.0, 5.0}}};
        return j;
    };
    def.flags = [](CLI::App& app, FlagSet& f) {
        f.option<std::string>(app, "--mode", "mode", "train | test | knn")->check(CLI::IsMember({"train", "test", "knn"}));
        f.option<double>(app, "--rmax", "rmax", "Upper bound of the random fault resistances (ohm)");
    };
    def.run = [](RunContext& ctx) {
        const Params p = ctx.p();
        const std::string mode = p.str("mode");
        if (mode != "train" && mode != "test" && mode != "knn") throw ConfigError("key '" + p.name("mode") + "' must be train, test or knn");
        const double rmax = p.num("rmax");
        if (rmax < 0.0) throw ConfigError("key '" + p.name("rmax") + "' must be nonnegative");
        faultlab::FaultSystem system;
        const auto cfg = read_system(p.sub("system"));
        check(p.name("system"), [&] { system = faultlab::build_system(cfg); });

        if (mode == "knn") {
            const Params k = p.sub("knn");
            const int k_max = static_cast<int>(k.integer("k_max"));
            if (k_max < 1) throw ConfigError("key '" + k.name("k_max") + "' must be at least 1");
            std::vector<std::vector<std::string>> rows;
            std::vector<report::Series> series;
            for (double r : k.nums("r_values")) {
                if (r < 0.0) throw ConfigError("key '" + k.name("r_values") + "' entries must be nonnegative");
                const auto curve = studies::fault_knn_curve(system, r, ctx.seed, k_max, ctx.threads);
                report::Series s{"r_max = " + csv::format(r) + " ohm", {}, {}};
                for (int kk = 1; kk <= k_max; ++kk) {
                    const double a = curve.agreement[static_cast<std::size_t>(kk - 1)];
                    rows.push_back({csv::format(r), std::to_string(kk), csv::fixed(a, 9)});
                    s.x.push_back(kk);
                    s.y.push_back(a);
                }
                series.push_back(std::move(s));
                std::cout << "r_max " << r << ": best k = " << curve.best_k() << ", k=1 agreement " << csv::fixed(curve.agreement[0], 6) << '\n';
            }
            csv::write_table(ctx.output("knn_agreement.csv"), {"RMax", "K", "Agreement"}, rows);
            report::write_svg(ctx.output("knn_agreement.svg"), report::series_svg(series, {"kNN agreement", "k", "agreement"}));
            return;
        }
        const auto cases = mode == "train" ? faultlab::enumerate_train_cases() : faultlab::sample_test_cases(ctx.seed, rmax);
        const auto rows = faultlab::build_dataset(cases, system, ctx.threads);
        std::filesystem::path path;
        if (ctx.out_file) {
            path = *ctx.out_file;
            ctx.record(path);
        } else {
            path = ctx.output(mode + ".csv");
        }
        faultlab::write_dataset(path, rows);
        std::cout << rows.size() << " rows\n";
    };
    return def;
}

StudyDef phasor_study() {
    StudyDef def;
    def.name = "phasor";
    def.description = "Steady-state phasor solution of a JSON network description";
    def.defaults = [] {
        json j;
        j["network"] = "";
        return j;
    };
    def.flags = [](CLI::App& app, FlagSet& f) { f.option<std::string>(app, "--network", "network", "Network description (JSON)"); };
    def.run = [](RunContext& ctx) {
        const Params p = ctx.p();
        const auto file = p.str("network");
        if (file.empty()) throw ConfigError("key '" + p.name("network") + "' is required");
        const auto net = phasor::read_network(file);
        const auto sol = phasor::solve_steady_state(net);
        phasor::write_solution_csv(ctx.output("solution.csv"), net, sol);
    };
    return def;
}

}  // namespace gridstudies::cli
