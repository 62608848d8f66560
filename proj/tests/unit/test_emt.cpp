#include <doctest.h>

#include <cmath>
#include <filesystem>

#include <Eigen/Eigenvalues>

#include "gridstudies/common/csv.hpp"
#include "gridstudies/common/error.hpp"
#include "gridstudies/emt/companion.hpp"
#include "gridstudies/emt/line.hpp"
#include "gridstudies/emt/network.hpp"
#include "gridstudies/emt/sources.hpp"

using namespace gridstudies;
using namespace gridstudies::emt;

namespace {

// E=1 V behind 1 ohm driving a 1 H inductor; returns max |i - (1 - e^-t)| on
// [0, 1] s and the current at 1 s.
std::pair<double, double> rl_run(double dt) {
    EmtNetwork net;
    const int n1 = net.add_node("n1");
    net.add_voltage_source(n1, constant(1.0), 1.0);
    const int ind = net.add_inductor(n1, 0, 1.0);
    EmtSolver solver(net, dt);
    // Consistent start: with no inductor current the node sits at the emf.
    Eigen::VectorXd v0 = Eigen::VectorXd::Zero(2);
    v0[1] = 1.0;
    solver.set_initial_voltages(v0);
    const auto steps = TimeGrid{dt, 1.0}.step_count();
    double worst = 0.0, last = 0.0;
    for (std::size_t k = 0; k < steps; ++k) {
        solver.step();
        last = solver.element_current(ind);
        worst = std::max(worst, std::abs(last - (1.0 - std::exp(-solver.time()))));
    }
    return {worst, last};
}

struct LineRig {
    EmtNetwork net;
    int k = 0;
    int m = 0;
};

// Unit step emf (from t_on) behind a resistance equal to Zc at end k.
LineRig line_rig(double zc, double tau, double t_on, double load_ohms) {
    LineRig rig;
    rig.k = rig.net.add_node("k");
    rig.m = rig.net.add_node("m");
    rig.net.add_voltage_source(rig.k, step(1.0, t_on), zc);
    rig.net.add_line({rig.k}, {rig.m}, BergeronLine::single(zc, tau));
    if (load_ohms > 0.0) rig.net.add_resistor(rig.m, 0, load_ohms);
    return rig;
}

}  // namespace

TEST_CASE("companion conductances") {
    const auto r = discretize(ElementKind::R, 10.0, 1e-6);
    CHECK(r.conductance == doctest::Approx(0.1));
    CHECK(r.history_current == 0.0);
    CHECK(next_history(r, 5.0, 50.0) == 0.0);
    CHECK(discretize(ElementKind::L, 1e-3, 1e-6).conductance == doctest::Approx(5e-4));
    CHECK(discretize(ElementKind::C, 1e-6, 1e-6).conductance == doctest::Approx(2.0));
    CHECK_THROWS_AS(discretize(ElementKind::L, 0.0, 1e-6), InvalidArgument);
    CHECK_THROWS_AS(discretize(ElementKind::C, -1.0, 1e-6), InvalidArgument);
    CHECK_THROWS_AS(discretize(ElementKind::R, 1.0, 0.0), InvalidArgument);

    const auto l = discretize(ElementKind::L, 1e-3, 1e-6);
    CHECK(next_history(l, 2.0, 3.0) == doctest::Approx(2.0 + 5e-4 * 3.0));
    const auto c = discretize(ElementKind::C, 1e-6, 1e-6);
    CHECK(next_history(c, 2.0, 3.0) == doctest::Approx(-2.0 - 2.0 * 3.0));
}

TEST_CASE("RL step response") {
    const auto [err, i1] = rl_run(1e-3);
    CHECK(std::abs(i1 - (1.0 - std::exp(-1.0))) / (1.0 - std::exp(-1.0)) < 1e-3);
    CHECK(err < 1e-3);
}

TEST_CASE("trapezoidal rule is second order") {
    const double coarse = rl_run(2e-3).first;
    const double fine = rl_run(1e-3).first;
    const double ratio = coarse / fine;
    CHECK(ratio >= 3.5);
    CHECK(ratio <= 4.5);
}

TEST_CASE("RC discharge") {
    EmtNetwork net;
    const int n1 = net.add_node();
    net.add_capacitor(n1, 0, 1.0, -1.0);
    net.add_resistor(n1, 0, 1.0);
    RunOptions opt;
    opt.probes = {n1};
    opt.initial_voltages = Eigen::VectorXd::Zero(2);
    opt.initial_voltages[1] = 1.0;
    const auto run = simulate(net, {1e-3, 1.0}, opt);
    CHECK(run.trace.time.back() == doctest::Approx(1.0));
    CHECK(std::abs(run.trace.volts[0].back() - std::exp(-1.0)) / std::exp(-1.0) < 1e-3);
}

TEST_CASE("source-free network stays at rest") {
    EmtNetwork net;
    const int a = net.add_node(), b = net.add_node();
    net.add_resistor(a, b, 5.0);
    net.add_inductor(b, 0, 1e-3);
    net.add_capacitor(a, 0, 1e-6);
    net.add_line({a}, {b}, BergeronLine::single(400.0, 1e-6));
    RunOptions opt;
    opt.probes = {a, b};
    const auto run = simulate(net, {1e-7, 2e-5}, opt);
    for (const auto& trace : run.trace.volts) {
        for (double v : trace) CHECK(v == 0.0);
    }
}

TEST_CASE("open-ended line doubles the incident wave at exactly tau") {
    const double dt = 1e-8, tau = 50 * dt, zc = 400.0, t_on = dt;
    auto rig = line_rig(zc, tau, t_on, 0.0);
    EmtSolver solver(rig.net, dt);
    for (int k = 0; k < 300; ++k) {
        const auto& v = solver.step();
        const double t = solver.time();
        if (t < t_on - 1e-15) continue;
        CHECK(v[rig.k] == doctest::Approx(t < t_on + 2 * tau - 1e-15 ? 0.5 : 1.0));
        if (t < t_on + tau - 1e-15) {
            CHECK(v[rig.m] == 0.0);
        } else {
            CHECK(std::abs(v[rig.m] - 1.0) < 1e-12);
        }
    }
}

TEST_CASE("fractional travel time is interpolated") {
    const double dt = 1e-8, tau = 20.5 * dt, zc = 300.0, t_on = dt;
    auto rig = line_rig(zc, tau, t_on, 0.0);
    EmtSolver solver(rig.net, dt);
    for (int k = 0; k < 35; ++k) {
        const auto& v = solver.step();
        const double t = solver.time();
        if (t < t_on + 20 * dt - 1e-15) CHECK(v[rig.m] == 0.0);
        if (t > t_on + 21 * dt + 1e-15) CHECK(std::abs(v[rig.m] - 1.0) < 1e-12);
    }
}

TEST_CASE("matched termination does not reflect") {
    const double dt = 1e-8, tau = 40 * dt, zc = 350.0, t_on = dt;
    auto rig = line_rig(zc, tau, t_on, zc);
    EmtSolver solver(rig.net, dt);
    for (int k = 0; k < 200; ++k) {
        const auto& v = solver.step();
        const double t = solver.time();
        CHECK(v[rig.k] == doctest::Approx(0.5).epsilon(1e-12));
        if (t >= t_on + tau - 1e-15) CHECK(v[rig.m] == doctest::Approx(0.5).epsilon(1e-12));
    }
}

TEST_CASE("lossless line conserves energy") {
    const double dt = 1e-9, tau = 1000 * dt, zc = 400.0;
    auto rig = line_rig(zc, tau, dt, 0.0);
    EmtSolver solver(rig.net, dt);
    double delivered = 0.0, prev_p = 0.0;
    const int steps = static_cast<int>(std::lround(10 * tau / dt));
    for (int k = 0; k < steps; ++k) {
        const auto& v = solver.step();
        const double i = (1.0 - v[rig.k]) / zc * (solver.time() >= dt ? 1.0 : 0.0);
        const double p = v[rig.k] * i;
        delivered += 0.5 * (p + prev_p) * dt;
        prev_p = p;
    }
    // Fully charged open line at 1 V stores C*l*V^2/2 = (tau/Zc)/2.
    const double stored = 0.5 * (tau / zc);
    CHECK(std::abs(delivered - stored) / stored < 5e-3);
}

TEST_CASE("travel time below dt is rejected") {
    EmtNetwork net;
    const int a = net.add_node(), b = net.add_node();
    net.add_line({a}, {b}, BergeronLine::single(400.0, 0.5e-8));
    net.add_resistor(a, 0, 1.0);
    EmtSolver solver(net, 1e-8);
    CHECK_THROWS_AS(solver.step(), InvalidArgument);
    CHECK_THROWS_AS(BergeronLine::single(400.0, 0.0), InvalidArgument);
}

TEST_CASE("multi-conductor modal line") {
    Eigen::MatrixXd l(3, 3), c(3, 3);
    l << 1.6e-6, 0.5e-6, 0.3e-6, 0.5e-6, 1.6e-6, 0.5e-6, 0.3e-6, 0.5e-6, 1.7e-6;
    c << 9e-12, -2e-12, -0.8e-12, -2e-12, 9.5e-12, -2e-12, -0.8e-12, -2e-12, 9e-12;
    const double length = 1200.0;
    const auto line = BergeronLine::from_parameters(l, c, length);
    const auto& yc = line.characteristic_admittance();
    // Characteristic admittance satisfies Yc L Yc = C.
    CHECK((yc * l * yc - c).norm() < 1e-9 * c.norm());
    CHECK((yc - yc.transpose()).norm() < 1e-12 * yc.norm());

    // Modal travel times equal length * sqrt(eig(LC)).
    Eigen::EigenSolver<Eigen::MatrixXd> es(l * c);
    std::vector<double> expected, got;
    for (int j = 0; j < 3; ++j) {
        expected.push_back(length * std::sqrt(es.eigenvalues()[j].real()));
        got.push_back(line.travel_times()[j]);
    }
    std::sort(expected.begin(), expected.end());
    std::sort(got.begin(), got.end());
    for (int j = 0; j < 3; ++j) CHECK(got[j] == doctest::Approx(expected[j]).epsilon(1e-10));

    // Conductor 0 is energised through a resistor; the others float. In the
    // settled state the floating conductors carry no charge, so their
    // voltages follow from C alone.
    EmtNetwork net;
    std::vector<int> k, m;
    for (int j = 0; j < 3; ++j) {
        k.push_back(net.add_node());
        m.push_back(net.add_node());
    }
    net.add_line(k, m, line);
    net.add_voltage_source(k[0], step(1.0, 0.0), 1.0 / yc(0, 0));
    RunOptions opt;
    opt.probes = {m[0], m[1], m[2]};
    const double tmax = line.travel_times().maxCoeff();
    const auto run = simulate(net, {tmax / 7.3, 400 * tmax}, opt);
    const Eigen::Vector2d floating = -c.block<2, 2>(1, 1).inverse() * c.block<2, 1>(1, 0);
    CHECK(run.trace.volts[0].back() == doctest::Approx(1.0).epsilon(1e-3));
    CHECK(run.trace.volts[1].back() == doctest::Approx(floating[0]).epsilon(1e-3));
    CHECK(run.trace.volts[2].back() == doctest::Approx(floating[1]).epsilon(1e-3));
}

TEST_CASE("single-conductor helper matches parameters") {
    const auto line = BergeronLine::single(450.0, 3e-6);
    CHECK(line.characteristic_admittance()(0, 0) == doctest::Approx(1.0 / 450.0));
    CHECK(line.travel_times()[0] == doctest::Approx(3e-6));
    CHECK(line.modal_impedance().size() == 1);
}

TEST_CASE("double ramp waveform") {
    const DoubleRampSource src{31.0, 2.0, 77.5, 1};
    CHECK(double_ramp_eval(src, 0.0) == 0.0);
    CHECK(double_ramp_eval(src, 2e-6) == doctest::Approx(31e3));
    CHECK(double_ramp_eval(src, 77.5e-6) == doctest::Approx(15.5e3));
    CHECK(double_ramp_eval(src, 1e-6) == doctest::Approx(15.5e3));
    CHECK(double_ramp_eval(src, 1.0) == 0.0);
    double prev = 0.0;
    for (int k = 1; k < 200000; ++k) {
        const double t = k * 1e-9;
        const double i = double_ramp_eval(src, t);
        CHECK(std::isfinite(i));
        CHECK(std::abs(i - prev) < 31e3 * 1e-9 / 2e-6 * 1.0001);
        prev = i;
    }
    CHECK_THROWS_AS(double_ramp_eval({10.0, 5.0, 5.0, 1}, 1e-6), InvalidArgument);
}

TEST_CASE("flashover switch") {
    FlashoverSwitch sw;
    sw.strength = 1000.0;
    CHECK_FALSE(flashover_eval(sw, 990.0, 1e-6).closed);
    const auto closed = flashover_eval(sw, -1000.0, 2e-6);
    CHECK(closed.closed);
    CHECK(closed.close_time.value() == 2e-6);
    const auto still = flashover_eval(closed, 0.0, 3e-6);
    CHECK(still.closed);
    CHECK(still.close_time.value() == 2e-6);
    FlashoverSwitch bad;
    CHECK_THROWS_AS(flashover_eval(bad, 1.0, 0.0), InvalidArgument);
}

TEST_CASE("flashover closes at the next step") {
    EmtNetwork net;
    const int a = net.add_node(), b = net.add_node();
    net.add_current_source(a, [](double t) { return 1e3 * t / 1e-6; });
    net.add_resistor(a, 0, 10.0);
    net.add_resistor(b, 0, 10.0);
    net.add_flashover_switch(a, b, 5000.0, 1e-3);
    EmtSolver solver(net, 1e-8);
    double closed_at = -1.0;
    while (solver.time() < 2e-6) {
        const auto& v = solver.step();
        if (closed_at < 0.0 && solver.any_flashover()) {
            closed_at = solver.time();
            CHECK(v[b] == 0.0);
            CHECK(v[a] >= 5000.0);
        } else if (closed_at > 0.0) {
            CHECK(std::abs(v[a] - v[b]) < 1.0);
        }
    }
    CHECK(closed_at == doctest::Approx(0.5e-6).epsilon(0.02));
}

TEST_CASE("identical inputs give bit-identical traces") {
    auto build = [] {
        EmtNetwork net;
        const int a = net.add_node(), b = net.add_node();
        net.add_current_source(a, [](double t) { return double_ramp_eval({20.0, 1.2, 50.0, 1}, t); });
        net.add_line({a}, {b}, BergeronLine::single(300.0, 1.37e-6));
        net.add_resistor(b, 0, 25.0);
        net.add_capacitor(a, 0, 1e-9);
        return net;
    };
    const auto n1 = build(), n2 = build();
    RunOptions opt;
    opt.probes = {1, 2};
    const auto r1 = simulate(n1, {1e-8, 1e-5}, opt), r2 = simulate(n2, {1e-8, 1e-5}, opt);
    CHECK(r1.trace.volts == r2.trace.volts);
}

TEST_CASE("interrupting inductor current rings at +-2L/dt") {
    const double dt = 1e-6, l = 1e-3;
    EmtNetwork net;
    const int a = net.add_node(), b = net.add_node();
    net.add_voltage_source(a, constant(1.0), 1.0);
    net.add_time_switch(a, b, 0.0, 50.5e-6);
    net.add_inductor(b, 0, l, 1.0);
    EmtSolver solver(net, dt);
    Eigen::VectorXd v0 = Eigen::VectorXd::Zero(3);
    solver.set_initial_voltages(v0);
    std::vector<double> after;
    while (solver.time() < 70e-6 - 1e-12) {
        const auto& v = solver.step();
        if (solver.time() > 50.5e-6) after.push_back(v[b]);
    }
    REQUIRE(after.size() > 10);
    const double amplitude = std::abs(after.front());
    CHECK(amplitude == doctest::Approx(2.0 * l / dt).epsilon(1e-3));
    for (std::size_t k = 1; k < after.size(); ++k) {
        CHECK(after[k] * after[k - 1] < 0.0);
        CHECK(std::abs(after[k]) == doctest::Approx(amplitude).epsilon(1e-6));
    }
}

TEST_CASE("floating node is singular") {
    EmtNetwork net;
    const int a = net.add_node(), b = net.add_node();
    net.add_resistor(a, 0, 1.0);
    net.add_time_switch(a, b, 1.0, 2.0);
    EmtSolver solver(net, 1e-6);
    try {
        solver.step();
        FAIL("expected SingularNetwork");
    } catch (const SingularNetwork& e) {
        CHECK(e.node() == b);
    }
}

TEST_CASE("waveform csv export") {
    EmtNetwork net;
    const int a = net.add_node("bus");
    net.add_voltage_source(a, constant(2.0), 1.0);
    net.add_resistor(a, 0, 1.0);
    RunOptions opt;
    opt.probes = {a};
    opt.decimation = 10;
    const auto run = simulate(net, {1e-6, 1e-4}, opt);
    CHECK(run.trace.time.size() == 11);
    const auto path = std::filesystem::temp_directory_path() / "gridstudies_wave.csv";
    write_waveform_csv(path.string(), net, run.trace);
    const auto table = csv::read_table(path);
    CHECK(table.header == std::vector<std::string>{"time_s", "node", "volts"});
    REQUIRE(table.rows.size() == 11);
    CHECK(table.rows[5].second[1] == "bus");
    CHECK(csv::parse_double(table.rows[5].second[2], 0) == doctest::Approx(1.0));
    std::filesystem::remove(path);
    opt.decimation = 0;
    CHECK_THROWS_AS(simulate(net, {1e-6, 1e-4}, opt), InvalidArgument);
}
