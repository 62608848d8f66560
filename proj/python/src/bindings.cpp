#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "gridstudies/common/error.hpp"
#include "gridstudies/dist/cases.hpp"
#include "gridstudies/dist/montecarlo.hpp"
#include "gridstudies/dist/timeseries.hpp"
#include "gridstudies/lightning/study.hpp"
#include "gridstudies/stability/smib.hpp"
#include "gridstudies/studies/pipelines.hpp"

namespace py = pybind11;
using namespace gridstudies;

namespace {

py::dict meter_dict(const dist::Meter& m) {
    py::dict d;
    d["kWh"] = m.kwh;
    d["kvarh"] = m.kvarh;
    d["peak_kW"] = m.peak_kw;
    d["peak_kVA"] = m.peak_kva;
    d["losses_kWh"] = m.losses_kwh;
    d["losses_kvarh"] = m.losses_kvarh;
    d["peak_losses_kW"] = m.peak_losses_kw;
    return d;
}

py::dict stats_dict(const dist::ElementStats& s) {
    py::dict d;
    d["mean_kW"] = s.mean_kw;
    d["mean_kvar"] = s.mean_kvar;
    d["sd_kW"] = s.sd_kw;
    d["sd_kvar"] = s.sd_kvar;
    return d;
}

stability::OperatingPoint operating_point(const stability::SmibModel& m, double p_mw) {
    if (!(p_mw >= 0.0 && p_mw <= m.s_base_mva)) throw InvalidArgument("p_mw must lie in [0, S_base]");
    return stability::OperatingPoint::at_power_factor(m, p_mw / m.s_base_mva);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Bindings for the gridstudies C++ core";
    m.attr("__version__") = GRIDSTUDIES_VERSION;

    py::register_exception<Error>(m, "GridStudiesError", PyExc_RuntimeError);
    py::register_exception<InvalidArgument>(m, "InvalidArgument", PyExc_ValueError);

    m.def(
        "flashover_rate",
        [](double n, double flashovers, double l1_km, double l2_km, double ng) {
            const auto r = lightning::flashover_rate(n, flashovers, l1_km, l2_km, ng);
            py::dict d;
            d["years"] = r.years;
            d["flashovers_per_year"] = r.flashovers_per_year;
            d["rate"] = r.rate;
            return d;
        },
        py::arg("n"), py::arg("flashovers"), py::arg("l1_km"), py::arg("l2_km"), py::arg("ground_flash_density"));

    m.def("critical_currents", [] {
        const auto c = lightning::critical_currents(lightning::LineGeometry::reference());
        return py::make_tuple(c.shield_ka, c.span_ka);
    });

    m.def(
        "lightning_study",
        [](std::size_t n, std::uint64_t seed, unsigned threads) {
            lightning::StudyConfig cfg;
            cfg.n = n;
            cfg.seed = seed;
            cfg.threads = threads;
            lightning::StudyResult r;
            {
                py::gil_scoped_release release;
                r = lightning::run_study(cfg);
            }
            py::dict d;
            d["strokes"] = n;
            d["strokes_to_line"] = r.strokes_to_line;
            d["flashovers"] = r.flashovers;
            d["flashovers_at_tower"] = r.flashovers_at_tower;
            d["flashovers_at_span"] = r.flashovers_at_span;
            d["shielding_failures"] = r.count(lightning::ImpactKind::PhaseAtTower) + r.count(lightning::ImpactKind::PhaseAtSpan);
            d["rate"] = r.rate.rate;
            d["summary"] = lightning::summary_text(cfg, r);
            return d;
        },
        py::arg("n") = 1000, py::arg("seed") = 1, py::arg("threads") = 0);

    m.def(
        "stability_simulate",
        [](double p_mw, double duration_ms) {
            const stability::SmibModel model;
            stability::FaultEvent f;
            f.duration = duration_ms * 1e-3;
            const auto r = stability::simulate(model, operating_point(model, p_mw), f);
            py::dict d;
            d["unstable"] = r.unstable;
            d["t"] = r.trace.t;
            d["delta"] = r.trace.delta;
            d["speed_dev"] = r.trace.speed_dev;
            d["delta0"] = r.initial.delta0;
            return d;
        },
        py::arg("p_mw"), py::arg("duration_ms"));

    m.def(
        "stability_cct",
        [](double p_mw) {
            const stability::SmibModel model;
            const auto c = stability::cct_equal_area(model, operating_point(model, p_mw));
            return py::make_tuple(c.delta_crit, c.unbounded ? INFINITY : c.t_crit);
        },
        py::arg("p_mw"));

    m.def(
        "stability_sweep",
        [](unsigned threads) {
            std::vector<std::tuple<double, double, int>> out;
            for (const auto& r : studies::reference_stability_grid({}, threads)) out.emplace_back(r.power_mw, r.duration_ms, r.stability);
            return out;
        },
        py::arg("threads") = 0);

    m.def(
        "feeder_daily",
        [](const std::string& case_name, int hours) {
            const auto c = dist::parse_case(case_name);
            if (!dist::is_time_series(c)) throw InvalidArgument("feeder_daily takes cases A1-A4");
            const auto r = dist::run_daily(dist::case_feeder(c), dist::synthetic_shapes(static_cast<std::size_t>(hours), dist::storage_strategy(c)), hours);
            return meter_dict(r.meter);
        },
        py::arg("case") = "A1", py::arg("hours") = 200);

    m.def(
        "feeder_monte_carlo",
        [](const std::string& case_name, std::size_t runs, std::uint64_t seed, unsigned threads) {
            const auto c = dist::parse_case(case_name);
            if (dist::is_time_series(c)) throw InvalidArgument("feeder_monte_carlo takes cases B1-B4");
            const auto f = dist::case_feeder(c);
            dist::MonteCarloConfig cfg;
            cfg.runs = runs;
            cfg.seed = seed;
            cfg.threads = threads;
            dist::LoadTable table;
            if (c == dist::DistCase::B3 || c == dist::DistCase::B4) {
                table = dist::generate_load_table(f, runs, seed, c == dist::DistCase::B4);
                cfg.table = &table;
            }
            const auto r = dist::run_monte_carlo(f, cfg);
            py::dict d;
            for (const auto& s : r.loads) d[py::str(s.name)] = stats_dict(s);
            for (const auto& s : r.lines) d[py::str(s.name)] = stats_dict(s);
            d["Source"] = stats_dict(r.source);
            return d;
        },
        py::arg("case") = "B1", py::arg("runs") = 1000, py::arg("seed") = 1, py::arg("threads") = 0);

    m.def(
        "fault_knn_curve",
        [](double r_max, std::uint64_t seed, int k_max) {
            return studies::fault_knn_curve(faultlab::build_system(), r_max, seed, k_max).agreement;
        },
        py::arg("r_max") = 1.0, py::arg("seed") = 1, py::arg("k_max") = 4);
}
