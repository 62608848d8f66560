#include <doctest.h>

#include <cmath>
#include <complex>
#include <numbers>

#include "gridstudies/common/error.hpp"
#include "gridstudies/stability/smib.hpp"

using namespace gridstudies;
using namespace gridstudies::stability;

namespace {

// Terminal voltage by Newton iteration on the complex power equation
// S = Vt * conj((Vt - Eb) / (j Xe)), flat start.
std::complex<double> oracle_terminal_voltage(double p, double q, double xe, double eb) {
    const std::complex<double> j(0, 1);
    double vr = 1.0, vi = 0.0;
    auto mismatch = [&](double a, double b) {
        const std::complex<double> v(a, b);
        const std::complex<double> s = v * std::conj((v - eb) / (j * xe));
        return std::complex<double>(s.real() - p, s.imag() - q);
    };
    for (int it = 0; it < 60; ++it) {
        const auto f = mismatch(vr, vi);
        const double h = 1e-7;
        const auto fr = (mismatch(vr + h, vi) - mismatch(vr - h, vi)) / (2 * h);
        const auto fi = (mismatch(vr, vi + h) - mismatch(vr, vi - h)) / (2 * h);
        const double det = fr.real() * fi.imag() - fi.real() * fr.imag();
        vr -= (f.real() * fi.imag() - fi.real() * f.imag()) / det;
        vi -= (fr.real() * f.imag() - f.real() * fr.imag()) / det;
    }
    return {vr, vi};
}

double energy(const SmibModel& m, double pmax, double pm, double d0, double delta, double dw) {
    return m.h * m.omega0() * dw * dw - pmax * (std::cos(delta) - std::cos(d0)) - pm * (delta - d0);
}

OperatingPoint at_mw(const SmibModel& m, double mw) {
    return OperatingPoint::at_power_factor(m, mw / m.s_base_mva);
}

}  // namespace

TEST_CASE("network reactances") {
    SmibModel m;
    CHECK(m.x_prefault() == doctest::Approx(0.3 + 0.15 + 0.5 * 0.93 / 1.43).epsilon(1e-14));
    CHECK(m.x_postfault() == doctest::Approx(0.95));
    CHECK(std::isinf(m.x_during_fault(0.0)));
    CHECK(m.x_during_fault(0.5) > m.x_postfault());
    CHECK_THROWS_AS(m.x_during_fault(1.0), InvalidArgument);
    m.h = 0;
    CHECK_THROWS_AS(m.validate(), InvalidArgument);
}

TEST_CASE("initialisation matches the phasor oracle") {
    SmibModel m;
    const OperatingPoint op{0.9, 0.436};
    const auto init = init_conditions(m, op);
    const auto vt = oracle_terminal_voltage(op.p, op.q, m.x_external(), m.e_bus);
    const std::complex<double> j(0, 1);
    const auto e = vt + j * m.xd_prime * (vt - m.e_bus) / (j * m.x_external());
    CHECK(std::abs(init.terminal_voltage - vt) < 1e-9);
    CHECK(std::abs(init.e_prime - std::abs(e)) < 1e-9);
    CHECK(std::abs(init.delta0 - std::arg(e)) < 1e-9);
    const double p0 = init.e_prime * m.e_bus * std::sin(init.delta0) / m.x_prefault();
    CHECK(std::abs(p0 - op.p) < 1e-10);
}

TEST_CASE("no-load initialisation aligns with the bus") {
    SmibModel m;
    const auto init = init_conditions(m, {0.0, 0.0});
    CHECK(std::abs(init.delta0) < 1e-12);
    CHECK(init.e_prime == doctest::Approx(m.e_bus));
}

TEST_CASE("infeasible operating point") {
    SmibModel m;
    CHECK_THROWS_AS(init_conditions(m, {1.0, 0.0}), InvalidArgument);
    CHECK_THROWS_AS(init_conditions(m, {-0.1, 0.0}), InvalidArgument);
}

TEST_CASE("equilibrium holds for 5 s") {
    SmibModel m;
    const OperatingPoint op{0.9, 0.436};
    const auto init = init_conditions(m, op);
    SwingState s{init.delta0, 0.0};
    for (int k = 0; k < 10000; ++k) s = swing_step(s, m, init.e_prime, m.x_prefault(), op.p, 5e-4);
    CHECK(std::abs(s.delta - init.delta0) < 1e-9);
}

TEST_CASE("zero-duration event equals equilibrium") {
    SmibModel m;
    FaultEvent f;
    f.duration = 0.0;
    const auto r = simulate(m, {0.9, 0.436}, f);
    CHECK_FALSE(r.unstable);
    for (double d : r.trace.delta) CHECK(std::abs(d - r.initial.delta0) < 1e-9);
}

TEST_CASE("energy function conserved without damping") {
    SmibModel m;
    const OperatingPoint op{0.9, 0.436};
    const auto init = init_conditions(m, op);
    const double pmax = init.e_prime * m.e_bus / m.x_prefault();
    SwingState s{init.delta0 + 0.1, 0.0};
    const double e0 = energy(m, pmax, op.p, init.delta0, s.delta, s.speed_dev);
    double worst = 0.0, max_dev = 0.0;
    for (int k = 0; k < 10000; ++k) {
        s = swing_step(s, m, init.e_prime, m.x_prefault(), op.p, 5e-4);
        worst = std::max(worst, std::abs(energy(m, pmax, op.p, init.delta0, s.delta, s.speed_dev) - e0));
        max_dev = std::max(max_dev, std::abs(s.delta - init.delta0));
    }
    CHECK(worst < 1e-3 * std::abs(e0));
    CHECK(max_dev < 0.1 + 1e-6);
    CHECK(max_dev > 0.09);
}

TEST_CASE("step halving converges") {
    SmibModel m;
    const OperatingPoint op{0.9, 0.436};
    const auto init = init_conditions(m, op);
    auto run = [&](double dt) {
        SwingState s{init.delta0 + 0.3, 0.0};
        const int n = static_cast<int>(std::lround(2.0 / dt));
        for (int k = 0; k < n; ++k) s = swing_step(s, m, init.e_prime, m.x_postfault(), op.p, dt);
        return s.delta;
    };
    CHECK(std::abs(run(5e-4) - run(2.5e-4)) < 1e-6);
}

TEST_CASE("full load 50 ms fault is stable") {
    SmibModel m;
    FaultEvent f;
    f.duration = 0.05;
    const auto r = simulate(m, {0.9, 0.436}, f);
    CHECK_FALSE(r.unstable);
    for (std::size_t i = 0; i < r.trace.t.size(); ++i) {
        REQUIRE(std::isfinite(r.trace.delta[i]));
        if (r.trace.t[i] >= f.t_on && r.trace.t[i] < f.t_on + f.duration - 1e-9) CHECK(r.trace.pe[i] == 0.0);
    }
    CHECK(r.trace.t[1] - r.trace.t[0] == doctest::Approx(5e-4));
}

TEST_CASE("equal-area scaling and limits") {
    SmibModel m;
    const OperatingPoint op{0.9, 0.436};
    const auto base = cct_equal_area(m, op);
    SmibModel heavy = m;
    heavy.h *= 4.0;
    CHECK(cct_equal_area(heavy, op).t_crit == doctest::Approx(2.0 * base.t_crit).epsilon(1e-12));
    CHECK(cct_equal_area(m, {0.0, 0.2}).unbounded);
    CHECK(cct_equal_area(m, {0.01, 0.2}).t_crit > cct_equal_area(m, {0.1, 0.2}).t_crit);
    SmibModel weak = m;
    weak.x_line1 = 3.0;
    CHECK_THROWS_AS(cct_equal_area(weak, {0.9, 0.436}), InvalidArgument);
}

TEST_CASE("time-domain verdict flips within one step of the equal-area CCT") {
    SmibModel m;
    const SimOptions opt;
    for (double pf : {0.6, 0.7, 0.8, 0.9, 0.95}) {
        const auto op = OperatingPoint::at_power_factor(m, pf);
        const double tc = cct_equal_area(m, op).t_crit;
        FaultEvent f;
        f.duration = tc - opt.dt;
        CHECK_FALSE(simulate(m, op, f, opt).unstable);
        f.duration = tc + opt.dt;
        CHECK(simulate(m, op, f, opt).unstable);
    }
}

TEST_CASE("reference operating points") {
    SmibModel m;
    struct Row { double mw, ms; bool unstable; };
    const Row rows[] = {{1820.4, 201.18, true},  {1820.4, 140.81, false}, {1820.4, 58.56, false},
                        {1820.4, 221.22, true},  {1975.8, 201.18, true},  {1975.8, 140.81, true},
                        {1975.8, 58.56, false},  {1975.8, 221.22, true},  {2153.4, 201.18, true},
                        {2153.4, 140.81, true},  {2153.4, 58.56, true},   {2153.4, 221.22, true},
                        {1354.2, 201.18, false}, {1354.2, 140.81, false}, {1354.2, 58.56, false},
                        {1354.2, 221.22, false}};
    for (const auto& r : rows) {
        FaultEvent f;
        f.duration = r.ms * 1e-3;
        CAPTURE(r.mw);
        CAPTURE(r.ms);
        CHECK(simulate(m, at_mw(m, r.mw), f).unstable == r.unstable);
    }
}

TEST_CASE("sweep grid is monotone and agrees with the oracle") {
    SmibModel m;
    const auto durations = linspace(70, 250, 67);
    const std::vector<double> pfs{0.6, 0.7, 0.8, 0.9, 1.0};
    const auto rows = sweep(m, durations, pfs, {}, {}, 2);
    REQUIRE(rows.size() == 335);
    for (std::size_t p = 0; p < pfs.size(); ++p) {
        for (std::size_t d = 0; d < durations.size(); ++d) {
            const auto& r = rows[p * durations.size() + d];
            CHECK(r.power_mw == doctest::Approx(pfs[p] * 2220));
            if (d > 0) CHECK(r.stability >= rows[p * durations.size() + d - 1].stability);
            if (p > 0) CHECK(r.stability >= rows[(p - 1) * durations.size() + d].stability);
        }
    }
    for (std::size_t p = 0; p + 1 < pfs.size(); ++p) {
        const double tc = cct_equal_area(m, OperatingPoint::at_power_factor(m, pfs[p])).t_crit * 1e3;
        for (std::size_t d = 0; d < durations.size(); ++d) {
            if (std::abs(durations[d] - tc) > 0.5) CHECK(rows[p * durations.size() + d].stability == (durations[d] > tc));
        }
    }
    for (std::size_t d = 0; d < durations.size(); ++d) CHECK(rows[4 * durations.size() + d].stability == 1);
    const auto serial = sweep(m, durations, pfs, {}, {}, 1);
    for (std::size_t i = 0; i < rows.size(); ++i) CHECK(serial[i].stability == rows[i].stability);
}

TEST_CASE("linspace") {
    const auto v = linspace(70, 250, 67);
    CHECK(v.size() == 67);
    CHECK(v.front() == 70.0);
    CHECK(v.back() == 250.0);
    CHECK_THROWS_AS(linspace(0, 1, 0), InvalidArgument);
}
