#pragma once

#include <complex>
#include <filesystem>
#include <vector>

namespace gridstudies::stability {

/// Classical generator behind X'd, step-up transformer and two parallel
/// circuits to an infinite bus. Per unit on the plant rating.
struct SmibModel {
    double s_base_mva = 2220.0;
    double v_base_kv = 24.0;
    double xd_prime = 0.3;
    double h = 3.5;  // MW s / MVA
    double d = 0.0;
    double xt = 0.15;
    double x_line1 = 0.5;
    double x_line2 = 0.93;
    double e_bus = 0.92;
    double f0 = 60.0;

    double omega0() const;
    /// Terminal-to-infinite-bus reactance with both circuits in service.
    double x_external() const;
    double x_prefault() const;
    double x_postfault() const;
    /// Transfer reactance with a bolted fault at `location` (0 = transformer
    /// end of circuit 2, towards 1 = infinite-bus end); infinite at 0.
    double x_during_fault(double location) const;
    void validate() const;
};

/// Terminal injection in per unit, generator convention.
struct OperatingPoint {
    double p = 0.9;
    double q = 0.436;

    /// Full apparent power at power factor `pf`, delivering reactive power.
    static OperatingPoint at_power_factor(const SmibModel& model, double pf);
};

struct InitialState {
    double e_prime = 0.0;
    double delta0 = 0.0;  // rad, relative to the infinite bus
    std::complex<double> terminal_voltage;
};

/// Closed-form initialisation. Throws InvalidArgument if no terminal voltage
/// delivers the requested P and Q.
InitialState init_conditions(const SmibModel& model, const OperatingPoint& op);

struct SwingState {
    double delta = 0.0;
    double speed_dev = 0.0;  // pu
};

/// One RK4 step of d(delta)/dt = w0*dw, d(dw)/dt = (Pm - Pe - D*dw)/(2H),
/// Pe = E'*Eb*sin(delta)/x_effective (zero when x_effective is infinite).
SwingState swing_step(const SwingState& state, const SmibModel& model, double e_prime, double x_effective,
                      double pm, double dt);

struct FaultEvent {
    double t_on = 0.1;      // s
    double duration = 0.05; // s
    double location = 0.0;
};

struct SimOptions {
    double dt = 5e-4;
    double observe_after_clear = 2.0;  // s
    double slip_confirm = 0.5;         // s with rising angle beyond the unstable equilibrium
};

struct SwingTrace {
    std::vector<double> t;
    std::vector<double> delta;
    std::vector<double> speed_dev;
    std::vector<double> pe;
};

struct SimulationResult {
    SwingTrace trace;
    InitialState initial;
    bool unstable = false;
};

/// Unstable when delta - delta0 exceeds pi, or when delta stays beyond the
/// post-fault unstable equilibrium with rising angle for `slip_confirm`.
SimulationResult simulate(const SmibModel& model, const OperatingPoint& op, const FaultEvent& fault,
                          const SimOptions& options = {});

struct CriticalClearing {
    double delta_crit = 0.0;
    double t_crit = 0.0;
    bool unbounded = false;  // no accelerating power
};

/// Equal-area critical clearing angle and time for a fault with Pe = 0.
/// Throws InvalidArgument when the post-fault network has no stable
/// equilibrium.
CriticalClearing cct_equal_area(const SmibModel& model, const OperatingPoint& op);

struct SweepRow {
    double power_mw = 0.0;
    double duration_ms = 0.0;
    double power_factor = 0.0;
    int stability = 0;  // 1 unstable, 0 stable
};

/// n points from a to b inclusive.
std::vector<double> linspace(double a, double b, std::size_t n);

/// One verdict per (power factor, duration), power factor outer. Operating
/// points with no feasible initial state are reported unstable.
std::vector<SweepRow> sweep(const SmibModel& model, const std::vector<double>& durations_ms,
                            const std::vector<double>& power_factors, const FaultEvent& fault_template = {},
                            const SimOptions& options = {}, unsigned threads = 0);

void write_trace_csv(const std::filesystem::path& path, const SwingTrace& trace);
/// Columns Power,Duration,Stability.
void write_sweep_csv(const std::filesystem::path& path, const std::vector<SweepRow>& rows);

}  // namespace gridstudies::stability
