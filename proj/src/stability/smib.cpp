#include "gridstudies/stability/smib.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "gridstudies/common/csv.hpp"
#include "gridstudies/common/error.hpp"
#include "gridstudies/common/parallel.hpp"

namespace gridstudies::stability {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double parallel(double a, double b) { return a * b / (a + b); }

}  // namespace

double SmibModel::omega0() const { return 2.0 * std::numbers::pi * f0; }
double SmibModel::x_external() const { return xt + parallel(x_line1, x_line2); }
double SmibModel::x_prefault() const { return xd_prime + x_external(); }
double SmibModel::x_postfault() const { return xd_prime + xt + x_line1; }

double SmibModel::x_during_fault(double location) const {
    if (!(location >= 0.0 && location < 1.0)) throw InvalidArgument("fault location must lie in [0, 1)");
    if (location == 0.0) return kInf;
    // Star at the transformer HV bus: generator side, circuit 1, and the
    // faulted stub of circuit 2 to ground. Eliminate the bus.
    const double xa = xd_prime + xt, xf = location * x_line2;
    return xa + x_line1 + xa * x_line1 / xf;
}

void SmibModel::validate() const {
    if (!(xd_prime > 0 && xt > 0 && x_line1 > 0 && x_line2 > 0)) throw InvalidArgument("reactances must be positive");
    if (!(h > 0)) throw InvalidArgument("inertia constant must be positive");
    if (!(d >= 0)) throw InvalidArgument("damping must be nonnegative");
    if (!(e_bus > 0 && f0 > 0 && s_base_mva > 0)) throw InvalidArgument("bus voltage, frequency and base must be positive");
}

OperatingPoint OperatingPoint::at_power_factor(const SmibModel&, double pf) {
    if (!(pf > 0.0 && pf <= 1.0)) throw InvalidArgument("power factor must lie in (0, 1]");
    return {pf, std::sqrt(std::max(0.0, 1.0 - pf * pf))};
}

InitialState init_conditions(const SmibModel& model, const OperatingPoint& op) {
    model.validate();
    if (op.p < 0.0) throw InvalidArgument("active power must be nonnegative");
    const double xe = model.x_external(), eb = model.e_bus;
    // |Vt|^2 solves u^2 - (2 Q Xe + Eb^2) u + (P Xe)^2 + (Q Xe)^2 = 0.
    const double b = 2.0 * op.q * xe + eb * eb;
    const double c = std::pow(op.p * xe, 2) + std::pow(op.q * xe, 2);
    const double disc = b * b - 4.0 * c;
    if (disc < 0.0) throw InvalidArgument("operating point is infeasible: no terminal voltage delivers P and Q");
    const double u = 0.5 * (b + std::sqrt(disc));
    const double theta = std::atan2(op.p * xe, u - op.q * xe);
    const std::complex<double> vt = std::polar(std::sqrt(u), theta);
    const std::complex<double> j(0.0, 1.0);
    const std::complex<double> i = (vt - eb) / (j * xe);
    const std::complex<double> e = vt + j * model.xd_prime * i;
    return {std::abs(e), std::arg(e), vt};
}

SwingState swing_step(const SwingState& s, const SmibModel& model, double e_prime, double x_effective, double pm,
                      double dt) {
    const double w0 = model.omega0(), two_h = 2.0 * model.h;
    const double pmax = std::isinf(x_effective) ? 0.0 : e_prime * model.e_bus / x_effective;
    auto f = [&](double delta, double dw, double& ddelta, double& ddw) {
        ddelta = w0 * dw;
        ddw = (pm - pmax * std::sin(delta) - model.d * dw) / two_h;
    };
    double k1d, k1w, k2d, k2w, k3d, k3w, k4d, k4w;
    f(s.delta, s.speed_dev, k1d, k1w);
    f(s.delta + 0.5 * dt * k1d, s.speed_dev + 0.5 * dt * k1w, k2d, k2w);
    f(s.delta + 0.5 * dt * k2d, s.speed_dev + 0.5 * dt * k2w, k3d, k3w);
    f(s.delta + dt * k3d, s.speed_dev + dt * k3w, k4d, k4w);
    return {s.delta + dt / 6.0 * (k1d + 2 * k2d + 2 * k3d + k4d), s.speed_dev + dt / 6.0 * (k1w + 2 * k2w + 2 * k3w + k4w)};
}

SimulationResult simulate(const SmibModel& model, const OperatingPoint& op, const FaultEvent& fault,
                          const SimOptions& options) {
    if (!(options.dt > 0.0 && options.dt <= 1e-3)) throw InvalidArgument("time step must lie in (0, 1 ms]");
    if (!(fault.duration >= 0.0) || !(fault.t_on >= 0.0)) throw InvalidArgument("fault timing must be nonnegative");
    SimulationResult out;
    out.initial = init_conditions(model, op);
    const double e = out.initial.e_prime, d0 = out.initial.delta0, pm = op.p;
    const double x_pre = model.x_prefault(), x_fault = model.x_during_fault(fault.location);
    const double x_post = model.x_postfault();

    const double pmax_post = e * model.e_bus / x_post;
    const double delta_u = pmax_post > pm ? std::numbers::pi - std::asin(pm / pmax_post) : d0;

    const auto on_step = static_cast<long>(std::llround(fault.t_on / options.dt));
    const auto clear_step = on_step + static_cast<long>(std::llround(fault.duration / options.dt));
    const auto end_step = clear_step + static_cast<long>(std::llround(options.observe_after_clear / options.dt));
    const auto confirm_steps = static_cast<long>(std::llround(options.slip_confirm / options.dt));

    auto x_at = [&](long step) {
        if (step < on_step || clear_step == on_step) return x_pre;
        return step < clear_step ? x_fault : x_post;
    };
    auto pe = [&](double delta, double x) { return std::isinf(x) ? 0.0 : e * model.e_bus * std::sin(delta) / x; };

    SwingState s{d0, 0.0};
    auto& tr = out.trace;
    auto record = [&](long step) {
        tr.t.push_back(static_cast<double>(step) * options.dt);
        tr.delta.push_back(s.delta);
        tr.speed_dev.push_back(s.speed_dev);
        tr.pe.push_back(pe(s.delta, x_at(step)));
    };
    record(0);
    long slipping = 0;
    for (long k = 0; k < end_step; ++k) {
        s = swing_step(s, model, e, x_at(k), pm, options.dt);
        record(k + 1);
        if (!std::isfinite(s.delta) || !std::isfinite(s.speed_dev)) throw Error("swing integration produced non-finite values");
        if (s.delta - d0 > std::numbers::pi) {
            out.unstable = true;
            break;
        }
        if (k + 1 >= clear_step && s.delta > delta_u && s.speed_dev > 0.0) {
            if (++slipping >= confirm_steps) {
                out.unstable = true;
                break;
            }
        } else {
            slipping = 0;
        }
    }
    return out;
}

CriticalClearing cct_equal_area(const SmibModel& model, const OperatingPoint& op) {
    const auto init = init_conditions(model, op);
    const double pm = op.p, d0 = init.delta0;
    const double pmax = init.e_prime * model.e_bus / model.x_postfault();
    if (!(pmax > pm)) throw InvalidArgument("post-fault network has no stable equilibrium");
    CriticalClearing cc;
    const double dm = std::numbers::pi - std::asin(pm / pmax);
    if (pm <= 0.0) {
        cc.unbounded = true;
        cc.delta_crit = dm;
        cc.t_crit = kInf;
        return cc;
    }
    const double cos_dc = (pm * (dm - d0) + pmax * std::cos(dm)) / pmax;
    if (cos_dc > 1.0 || cos_dc < -1.0) throw InvalidArgument("equal-area construction has no clearing angle");
    cc.delta_crit = std::acos(cos_dc);
    cc.t_crit = std::sqrt(4.0 * model.h * (cc.delta_crit - d0) / (model.omega0() * pm));
    return cc;
}

std::vector<double> linspace(double a, double b, std::size_t n) {
    if (n == 0) throw InvalidArgument("linspace needs at least one point");
    if (n == 1) return {a};
    std::vector<double> v(n);
    for (std::size_t i = 0; i < n; ++i) v[i] = a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1);
    return v;
}

std::vector<SweepRow> sweep(const SmibModel& model, const std::vector<double>& durations_ms,
                            const std::vector<double>& power_factors, const FaultEvent& fault_template,
                            const SimOptions& options, unsigned threads) {
    if (durations_ms.empty() || power_factors.empty()) throw InvalidArgument("sweep grids must be non-empty");
    std::vector<SweepRow> rows(durations_ms.size() * power_factors.size());
    parallel_for(rows.size(), threads, [&](std::size_t idx) {
        const double pf = power_factors[idx / durations_ms.size()];
        const double dur = durations_ms[idx % durations_ms.size()];
        const auto op = OperatingPoint::at_power_factor(model, pf);
        SweepRow row{op.p * model.s_base_mva, dur, pf, 1};
        FaultEvent ev = fault_template;
        ev.duration = dur * 1e-3;
        try {
            row.stability = simulate(model, op, ev, options).unstable ? 1 : 0;
        } catch (const InvalidArgument&) {
            row.stability = 1;
        }
        rows[idx] = row;
    });
    return rows;
}

void write_trace_csv(const std::filesystem::path& path, const SwingTrace& trace) {
    std::vector<std::vector<std::string>> rows;
    rows.reserve(trace.t.size());
    for (std::size_t i = 0; i < trace.t.size(); ++i) {
        rows.push_back({csv::format(trace.t[i]), csv::format(trace.delta[i] * 180.0 / std::numbers::pi),
                        csv::format(trace.speed_dev[i]), csv::format(trace.pe[i])});
    }
    csv::write_table(path, {"t", "delta_deg", "speed_dev", "Pe_pu"}, rows);
}

void write_sweep_csv(const std::filesystem::path& path, const std::vector<SweepRow>& rows) {
    std::vector<std::vector<std::string>> out;
    out.reserve(rows.size());
    for (const auto& r : rows) {
        out.push_back({csv::format(r.power_mw), csv::format(r.duration_ms), std::to_string(r.stability)});
    }
    csv::write_table(path, {"Power", "Duration", "Stability"}, out);
}

}  // namespace gridstudies::stability
