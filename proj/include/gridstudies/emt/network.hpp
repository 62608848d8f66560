#pragma once

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "gridstudies/emt/companion.hpp"
#include "gridstudies/emt/line.hpp"
#include "gridstudies/emt/sources.hpp"

namespace gridstudies::emt {

struct TimeGrid {
    double dt = 10e-9;
    double t_end = 30e-6;
    std::size_t step_count() const;
};

/// Voltage-controlled switch that closes permanently once |v| >= strength.
struct FlashoverSwitch {
    int node_a = 0;
    int node_b = 0;
    double strength = 0.0;
    double closed_ohms = 1e-3;
    bool closed = false;
    std::optional<double> close_time;
};

FlashoverSwitch flashover_eval(FlashoverSwitch sw, double v_across, double t);

/// Switch driven by time: conducting while t_close <= t < t_open.
struct TimeSwitch {
    int node_a = 0;
    int node_b = 0;
    double t_close = 0.0;
    double t_open = 0.0;
    double closed_ohms = 1e-6;
    bool conducting(double t) const { return t >= t_close && t < t_open; }
};

struct LumpedElement {
    ElementKind kind = ElementKind::R;
    int node_a = 0;
    int node_b = 0;
    double value = 0.0;
    double initial_current = 0.0;  // a -> b, L and C only
};

struct LineElement {
    std::vector<int> k_nodes;
    std::vector<int> m_nodes;
    BergeronLine line;
};

struct CurrentSource {
    int node = 0;
    Waveform current;  // injected into the node
};

/// Voltage source behind a series resistance, stamped as a Norton pair.
struct VoltageSource {
    int node = 0;
    Waveform emf;
    double series_ohms = 0.0;
};

/// Circuit description for the time-domain solver. Node 0 is ground.
class EmtNetwork {
public:
    int add_node(std::string name = {});
    int node_count() const { return static_cast<int>(names_.size()); }
    const std::string& node_name(int node) const;

    int add_resistor(int a, int b, double ohms);
    int add_inductor(int a, int b, double henries, double initial_current = 0.0);
    int add_capacitor(int a, int b, double farads, double initial_current = 0.0);
    int add_line(std::vector<int> k_nodes, std::vector<int> m_nodes, BergeronLine line);
    int add_current_source(int node, Waveform current);
    int add_voltage_source(int node, Waveform emf, double series_ohms);
    int add_flashover_switch(int a, int b, double strength_volts, double closed_ohms = 1e-3);
    int add_time_switch(int a, int b, double t_close, double t_open, double closed_ohms = 1e-6);

    const std::vector<LumpedElement>& elements() const { return elements_; }
    const std::vector<LineElement>& lines() const { return lines_; }
    const std::vector<CurrentSource>& current_sources() const { return current_sources_; }
    const std::vector<VoltageSource>& voltage_sources() const { return voltage_sources_; }
    const std::vector<FlashoverSwitch>& flashover_switches() const { return flashover_; }
    const std::vector<TimeSwitch>& time_switches() const { return time_switches_; }

private:
    void check_node(int node) const;

    std::vector<std::string> names_;
    std::vector<LumpedElement> elements_;
    std::vector<LineElement> lines_;
    std::vector<CurrentSource> current_sources_;
    std::vector<VoltageSource> voltage_sources_;
    std::vector<FlashoverSwitch> flashover_;
    std::vector<TimeSwitch> time_switches_;
};

/// Fixed-step trapezoidal solver for one network. Holds a reference to the
/// network, which must outlive the solver.
class EmtSolver {
public:
    EmtSolver(const EmtNetwork& net, double dt);

    /// Node voltages at t=0 (index 0 is ground). Must describe a state in
    /// which only the elements' declared initial currents flow. Defaults to 0.
    void set_initial_voltages(const Eigen::VectorXd& v);

    /// Advance one step; returns node voltages with ground at index 0.
    const Eigen::VectorXd& step();

    double time() const { return static_cast<double>(steps_) * dt_; }
    std::size_t steps() const { return steps_; }
    double dt() const { return dt_; }
    const Eigen::VectorXd& voltages() const { return v_; }
    /// Current of lumped element `index` (a -> b) at the last solved step.
    double element_current(std::size_t index) const;
    const std::vector<FlashoverSwitch>& flashover_switches() const { return flashover_; }
    bool any_flashover() const;

private:
    void start();
    void factor();
    Eigen::VectorXd end_voltages(const std::vector<int>& nodes) const;

    const EmtNetwork& net_;
    double dt_;
    std::size_t steps_ = 0;
    bool started_ = false;
    Eigen::VectorXd v_;
    std::vector<CompanionBranch> companions_;
    std::vector<double> element_current_;
    std::vector<BergeronLine> lines_;
    std::vector<FlashoverSwitch> flashover_;
    std::vector<bool> time_state_;
    Eigen::MatrixXd g_;
    Eigen::PartialPivLU<Eigen::MatrixXd> lu_;
    bool refactor_ = true;
    Eigen::VectorXd rhs_;
};

struct RunOptions {
    std::vector<int> probes;
    std::size_t decimation = 1;
    bool stop_on_flashover = false;
    Eigen::VectorXd initial_voltages;  // empty for all-zero
};

struct ProbeTrace {
    std::vector<int> nodes;
    std::vector<double> time;
    std::vector<std::vector<double>> volts;  // [probe][sample]
};

struct RunResult {
    ProbeTrace trace;
    std::vector<FlashoverSwitch> switches;
    std::vector<double> peak_across;  // per flashover switch, max |v|
    double end_time = 0.0;
    std::size_t steps = 0;
};

RunResult simulate(const EmtNetwork& net, const TimeGrid& grid, const RunOptions& options = {});

/// Long-format CSV with columns time_s,node,volts.
void write_waveform_csv(const std::string& path, const EmtNetwork& net, const ProbeTrace& trace);

}  // namespace gridstudies::emt
