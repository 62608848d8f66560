#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>

#include "gridstudies/common/error.hpp"
#include "gridstudies/dist/cases.hpp"
#include "gridstudies/dist/montecarlo.hpp"
#include "gridstudies/dist/timeseries.hpp"

using namespace gridstudies;
using namespace gridstudies::dist;

namespace {

// Two-bus closed form: |V|^4 + (2(RP + XQ) - E^2)|V|^2 + |Z|^2 |S|^2 = 0,
// larger root.
double two_bus_voltage(double e, Complex z, double p, double q) {
    const double b = 2.0 * (z.real() * p + z.imag() * q) - e * e;
    const double c = std::norm(z) * (p * p + q * q);
    const double v2 = (-b + std::sqrt(b * b - 4.0 * c)) / 2.0;
    return std::sqrt(v2);
}

double balance_error(const HourRecord& r) {
    const auto& s = r.snapshot;
    double loads = 0.0;
    for (const auto& l : s.load) loads += l.real();
    const double injected = (r.inputs.pv_kw + r.inputs.storage_kw + r.inputs.generator_kw) / 3.0;
    const double expected = loads + s.line_losses_kw + s.source_losses_kw - injected;
    const double scale = std::max({std::abs(s.source.real()), loads, 1.0});
    return std::abs(s.source.real() - expected) / scale;
}

Shapes flat_shapes(std::size_t hours) {
    Shapes s;
    for (auto& l : s.loads) l.assign(hours, 1.0);
    s.pv.assign(hours, 0.0);
    s.storage.assign(hours, 0.0);
    return s;
}

std::filesystem::path temp_file(const std::string& name) {
    return std::filesystem::temp_directory_path() / ("gridstudies_test_dist_" + name);
}

}  // namespace

TEST_CASE("no-load snapshot holds source voltage") {
    Feeder f;
    const auto s = solve_snapshot(f, HourInputs{});
    for (int b = 0; b < 3; ++b) CHECK(s.v_pu(b, f.phase_volts()) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(s.line_losses_kw == 0.0);
    CHECK(std::abs(s.source) == 0.0);
}

TEST_CASE("single load matches two-bus closed form") {
    Feeder f;
    HourInputs in;
    in.load_kw[0] = 285.0;
    in.load_kvar[0] = f.loads[0].kvar();
    const auto s = solve_snapshot(f, in);
    const double vph = f.phase_volts();
    const double v = two_bus_voltage(vph, f.source_impedance + f.line_impedance[0], 285e3 / 3, in.load_kvar[0] * 1e3 / 3);
    CHECK(std::abs(std::abs(s.v_bus[0]) - v) / vph < 1e-8);
    // Downstream of an unloaded segment the voltage is unchanged.
    CHECK(std::abs(s.v_bus[2] - s.v_bus[0]) / vph < 1e-12);
}

TEST_CASE("losses equal source power minus load power") {
    Feeder f;
    const auto s = solve_snapshot(f, rated_inputs(f));
    double loads = 0.0;
    for (const auto& l : s.load) loads += l.real();
    const double losses = s.line_losses_kw + s.source_losses_kw;
    CHECK(std::abs(s.source.real() - loads - losses) / losses < 1e-8);
    CHECK(s.iterations < 100);
}

TEST_CASE("snapshot convergence failure is reported") {
    Feeder f;
    auto in = rated_inputs(f, 40.0);
    CHECK_THROWS_AS(solve_snapshot(f, in), ConvergenceError);
    try {
        solve_snapshot(f, in, 1e-8, 5);
    } catch (const ConvergenceError& e) {
        CHECK(std::string(e.what()).find("iteration") != std::string::npos);
    }
}

TEST_CASE("flat shapes give identical hours") {
    Feeder f;
    const auto r = run_daily(f, flat_shapes(24), 24);
    const auto ref = solve_snapshot(f, rated_inputs(f));
    for (const auto& h : r.hours) {
        CHECK(h.snapshot.source == ref.source);
        CHECK(h.snapshot.v_bus == ref.v_bus);
    }
    CHECK(r.meter.kwh == doctest::Approx(24 * 3 * ref.line_sending[0].real()));
}

TEST_CASE("adding PV strictly reduces source energy") {
    const auto shapes = synthetic_shapes(200, 1);
    const auto a1 = run_daily(case_feeder(DistCase::A1), shapes);
    const auto a2 = run_daily(case_feeder(DistCase::A2), shapes);
    CHECK(a2.meter.kwh < a1.meter.kwh);
    CHECK(a2.meter.losses_kwh < a1.meter.losses_kwh);
}

TEST_CASE("hourly power balance in every time-series case") {
    for (auto c : {DistCase::A1, DistCase::A2, DistCase::A3, DistCase::A4}) {
        const auto r = run_daily(case_feeder(c), synthetic_shapes(200, storage_strategy(c)));
        double worst = 0.0;
        for (const auto& h : r.hours) worst = std::max(worst, balance_error(h));
        CHECK(worst < 1e-6);
    }
}

TEST_CASE("lossless storage round trip") {
    Feeder f = case_feeder(DistCase::A3);
    f.storage->efficiency = 1.0;
    Shapes s = flat_shapes(48);
    for (std::size_t h = 0; h < 48; ++h) s.storage[h] = (h % 8 < 4) ? -0.5 : 0.5;
    const auto r = run_daily(f, s, 48);
    CHECK(std::abs(r.final_soc - f.storage->soc_initial) < 1e-9);
}

TEST_CASE("storage dispatch edge cases") {
    StorageSpec st;
    CHECK(dispatch_storage(st, 1.0, st.soc_min) == 0.0);
    CHECK(dispatch_storage(st, -1.0, st.soc_max) == 0.0);
    CHECK(dispatch_storage(st, 0.0, 0.5) == 0.0);
    CHECK(dispatch_storage(st, 1.0, 0.5) == doctest::Approx(st.rated_kw));
    CHECK(dispatch_storage(st, -1.0, 0.5) == doctest::Approx(-st.rated_kw));
    // Near the floor the discharge is clipped to land exactly on soc_min.
    const double kw = dispatch_storage(st, 1.0, st.soc_min + 0.05);
    CHECK(kw > 0.0);
    CHECK(kw < st.rated_kw);
    CHECK(next_soc(st, kw, st.soc_min + 0.05) == doctest::Approx(st.soc_min).epsilon(1e-12));
}

TEST_CASE("SOC stays in bounds under aggressive dispatch") {
    Feeder f = case_feeder(DistCase::A3);
    f.storage->rated_kw = 250.0;
    Shapes s = flat_shapes(200);
    for (std::size_t h = 0; h < 200; ++h) s.storage[h] = (h / 7) % 2 ? 1.0 : -1.0;
    const auto r = run_daily(f, s, 200);
    bool hit_min = false, hit_max = false;
    for (const auto& h : r.hours) {
        CHECK(h.soc >= f.storage->soc_min - 1e-9);
        CHECK(h.soc <= f.storage->soc_max + 1e-9);
        CHECK(std::abs(h.inputs.storage_kw) <= f.storage->rated_kw + 1e-9);
        hit_min = hit_min || std::abs(h.soc - f.storage->soc_min) < 1e-9;
        hit_max = hit_max || std::abs(h.soc - f.storage->soc_max) < 1e-9;
    }
    CHECK(hit_min);
    CHECK(hit_max);
}

TEST_CASE("meters are additive over split horizons") {
    const Feeder f = case_feeder(DistCase::A2);
    const auto shapes = synthetic_shapes(200, 1);
    const auto whole = run_daily(f, shapes, 200);
    auto first = run_daily(f, shapes, 120, 0);
    const auto second = run_daily(f, shapes, 80, 120);
    first.meter.merge(second.meter);
    CHECK(first.meter.kwh == doctest::Approx(whole.meter.kwh).epsilon(1e-12));
    CHECK(first.meter.kvarh == doctest::Approx(whole.meter.kvarh).epsilon(1e-12));
    CHECK(first.meter.losses_kwh == doctest::Approx(whole.meter.losses_kwh).epsilon(1e-12));
    CHECK(first.meter.peak_kw == whole.meter.peak_kw);
    CHECK(first.meter.peak_losses_kw == whole.meter.peak_losses_kw);
}

TEST_CASE("shape validation and CSV round trip") {
    Feeder f;
    CHECK_THROWS_AS(run_daily(f, flat_shapes(10), 24), InvalidArgument);
    const auto shapes = synthetic_shapes(200, 2);
    for (const auto& l : shapes.loads) CHECK(*std::max_element(l.begin(), l.end()) == doctest::Approx(1.0));
    const auto path = temp_file("shape.csv");
    write_shape_csv(path, shapes.loads[0]);
    const auto back = read_shape_csv(path);
    REQUIRE(back.size() == shapes.loads[0].size());
    for (std::size_t i = 0; i < back.size(); ++i) CHECK(back[i] == doctest::Approx(shapes.loads[0][i]).epsilon(1e-14));
    std::ofstream(path) << "hour,multiplier\n0,abc\n";
    CHECK_THROWS_AS(read_shape_csv(path), ParseError);
    std::filesystem::remove(path);
}

TEST_CASE("Monte Carlo load statistics") {
    MonteCarloConfig cfg;
    cfg.runs = 1000;
    const auto r = run_monte_carlo(case_feeder(DistCase::B1), cfg);
    CHECK(std::abs(r.loads[0].mean_kw - 47.5) / 47.5 < 0.03);
    CHECK(std::abs(r.loads[0].sd_kw - 4.75) / 4.75 < 0.10);
    // kvar keeps the rated power factor.
    CHECK(r.loads[0].mean_kvar / r.loads[0].mean_kw == doctest::Approx(std::tan(std::acos(0.9))));
}

TEST_CASE("generator reverses Line 3 flow") {
    MonteCarloConfig cfg;
    cfg.runs = 300;
    const auto b1 = run_monte_carlo(case_feeder(DistCase::B1), cfg);
    const auto b2 = run_monte_carlo(case_feeder(DistCase::B2), cfg);
    CHECK(b1.lines[2].mean_kw > 0.0);
    CHECK(b2.lines[2].mean_kw < 0.0);
    CHECK(b2.source.mean_kw < b1.source.mean_kw);
}

TEST_CASE("Monte Carlo is thread independent and deterministic") {
    MonteCarloConfig cfg;
    cfg.runs = 200;
    cfg.seed = 9;
    cfg.threads = 1;
    const auto a = run_monte_carlo(case_feeder(DistCase::B2), cfg);
    cfg.threads = 4;
    const auto b = run_monte_carlo(case_feeder(DistCase::B2), cfg);
    for (std::size_t i = 0; i < 3; ++i) {
        CHECK(a.loads[i].mean_kw == b.loads[i].mean_kw);
        CHECK(a.lines[i].sd_kvar == b.lines[i].sd_kvar);
    }
    CHECK(a.source.mean_kw == b.source.mean_kw);
    for (const auto& run : a.runs) CHECK(balance_error(HourRecord{0, run.inputs, run.snapshot, 0.0}) < 1e-6);
}

TEST_CASE("external load table") {
    const Feeder f = case_feeder(DistCase::B4);
    const auto table = generate_load_table(f, 50, 3, true);
    const auto path = temp_file("loads.csv");
    write_load_table(path, table);
    const auto back = read_load_table(path);
    REQUIRE(back.runs() == 50);
    CHECK(back.generator_kw.size() == 50);
    MonteCarloConfig cfg;
    cfg.runs = 50;
    cfg.table = &back;
    const auto r = run_monte_carlo(f, cfg);
    CHECK(r.runs[7].inputs.load_kw[1] == doctest::Approx(table.load_kw[7][1]).epsilon(1e-14));
    CHECK(r.runs[7].inputs.generator_kw == doctest::Approx(table.generator_kw[7]).epsilon(1e-14));
    cfg.runs = 51;
    CHECK_THROWS_AS(run_monte_carlo(f, cfg), InvalidArgument);

    std::ofstream(path) << "run,load,kW\n0,1,10\n0,2,10\n";
    CHECK_THROWS_AS(read_load_table(path), InvalidArgument);
    std::ofstream(path) << "run,load,kW\n0,7,10\n";
    CHECK_THROWS_AS(read_load_table(path), ParseError);
    std::filesystem::remove(path);
}

TEST_CASE("case names") {
    CHECK(case_name(parse_case("A3")) == "A3");
    CHECK(case_name(DistCase::B4) == "B4");
    CHECK_THROWS_AS(parse_case("C1"), InvalidArgument);
    CHECK(case_feeder(DistCase::A3).storage.has_value());
    CHECK_FALSE(case_feeder(DistCase::A2).storage.has_value());
    CHECK(case_feeder(DistCase::B2).generator.has_value());
}
