#include "gridstudies/emt/network.hpp"

#include <cmath>
#include <fstream>

#include "gridstudies/common/csv.hpp"
#include "gridstudies/common/error.hpp"

namespace gridstudies::emt {

std::size_t TimeGrid::step_count() const {
    if (!(dt > 0.0)) throw InvalidArgument("time step must be positive");
    if (!(t_end >= 0.0)) throw InvalidArgument("end time must be nonnegative");
    return static_cast<std::size_t>(std::ceil(t_end / dt - 1e-9));
}

FlashoverSwitch flashover_eval(FlashoverSwitch sw, double v_across, double t) {
    if (!(sw.strength > 0.0)) throw InvalidArgument("flashover strength must be positive");
    if (!sw.closed && std::abs(v_across) >= sw.strength) {
        sw.closed = true;
        sw.close_time = t;
    }
    return sw;
}

// ---- network ------------------------------------------------------------

int EmtNetwork::add_node(std::string name) {
    names_.push_back(name.empty() ? "n" + std::to_string(names_.size() + 1) : std::move(name));
    return node_count();
}

const std::string& EmtNetwork::node_name(int node) const {
    static const std::string ground = "ground";
    if (node == 0) return ground;
    check_node(node);
    return names_[node - 1];
}

void EmtNetwork::check_node(int node) const {
    if (node < 0 || node > node_count()) throw InvalidArgument("unknown node " + std::to_string(node));
}

int EmtNetwork::add_resistor(int a, int b, double ohms) {
    check_node(a);
    check_node(b);
    if (!(ohms > 0.0)) throw InvalidArgument("resistance must be positive");
    elements_.push_back({ElementKind::R, a, b, ohms, 0.0});
    return static_cast<int>(elements_.size()) - 1;
}

int EmtNetwork::add_inductor(int a, int b, double henries, double initial_current) {
    check_node(a);
    check_node(b);
    if (!(henries > 0.0)) throw InvalidArgument("inductance must be positive");
    elements_.push_back({ElementKind::L, a, b, henries, initial_current});
    return static_cast<int>(elements_.size()) - 1;
}

int EmtNetwork::add_capacitor(int a, int b, double farads, double initial_current) {
    check_node(a);
    check_node(b);
    if (!(farads > 0.0)) throw InvalidArgument("capacitance must be positive");
    elements_.push_back({ElementKind::C, a, b, farads, initial_current});
    return static_cast<int>(elements_.size()) - 1;
}

int EmtNetwork::add_line(std::vector<int> k_nodes, std::vector<int> m_nodes, BergeronLine line) {
    const auto n = static_cast<std::size_t>(line.conductors());
    if (k_nodes.size() != n || m_nodes.size() != n) throw InvalidArgument("line end node count mismatch");
    for (int k : k_nodes) check_node(k);
    for (int m : m_nodes) check_node(m);
    lines_.push_back({std::move(k_nodes), std::move(m_nodes), std::move(line)});
    return static_cast<int>(lines_.size()) - 1;
}

int EmtNetwork::add_current_source(int node, Waveform current) {
    check_node(node);
    current_sources_.push_back({node, std::move(current)});
    return static_cast<int>(current_sources_.size()) - 1;
}

int EmtNetwork::add_voltage_source(int node, Waveform emf, double series_ohms) {
    check_node(node);
    if (node == 0) throw InvalidArgument("voltage source on ground");
    if (!(series_ohms > 0.0)) throw InvalidArgument("source resistance must be positive");
    voltage_sources_.push_back({node, std::move(emf), series_ohms});
    return static_cast<int>(voltage_sources_.size()) - 1;
}

int EmtNetwork::add_flashover_switch(int a, int b, double strength_volts, double closed_ohms) {
    check_node(a);
    check_node(b);
    if (!(strength_volts > 0.0)) throw InvalidArgument("flashover strength must be positive");
    if (!(closed_ohms > 0.0)) throw InvalidArgument("closed resistance must be positive");
    FlashoverSwitch sw;
    sw.node_a = a;
    sw.node_b = b;
    sw.strength = strength_volts;
    sw.closed_ohms = closed_ohms;
    flashover_.push_back(sw);
    return static_cast<int>(flashover_.size()) - 1;
}

int EmtNetwork::add_time_switch(int a, int b, double t_close, double t_open, double closed_ohms) {
    check_node(a);
    check_node(b);
    if (!(closed_ohms > 0.0)) throw InvalidArgument("closed resistance must be positive");
    time_switches_.push_back({a, b, t_close, t_open, closed_ohms});
    return static_cast<int>(time_switches_.size()) - 1;
}

// ---- solver -------------------------------------------------------------

namespace {

void stamp(Eigen::MatrixXd& g, int a, int b, double y) {
    if (a > 0) g(a - 1, a - 1) += y;
    if (b > 0) g(b - 1, b - 1) += y;
    if (a > 0 && b > 0) {
        g(a - 1, b - 1) -= y;
        g(b - 1, a - 1) -= y;
    }
}

void inject(Eigen::VectorXd& rhs, int node, double i) {
    if (node > 0) rhs[node - 1] += i;
}

}  // namespace

EmtSolver::EmtSolver(const EmtNetwork& net, double dt) : net_(net), dt_(dt) {
    if (!(dt > 0.0)) throw InvalidArgument("time step must be positive");
    if (net.node_count() == 0) throw SingularNetwork("singular: network has no nodes");
    v_ = Eigen::VectorXd::Zero(net.node_count() + 1);
    companions_.reserve(net.elements().size());
    for (const auto& e : net.elements()) companions_.push_back(discretize(e.kind, e.value, dt));
    element_current_.assign(net.elements().size(), 0.0);
    for (const auto& l : net.lines()) lines_.push_back(l.line);
    flashover_ = net.flashover_switches();
    time_state_.assign(net.time_switches().size(), false);
}

void EmtSolver::set_initial_voltages(const Eigen::VectorXd& v) {
    if (started_) throw InvalidArgument("initial state must be set before the first step");
    if (v.size() != net_.node_count() + 1) throw InvalidArgument("initial voltage vector size mismatch");
    v_ = v;
    v_[0] = 0.0;
}

Eigen::VectorXd EmtSolver::end_voltages(const std::vector<int>& nodes) const {
    Eigen::VectorXd out(nodes.size());
    for (std::size_t i = 0; i < nodes.size(); ++i) out[i] = v_[nodes[i]];
    return out;
}

void EmtSolver::start() {
    const auto& elements = net_.elements();
    for (std::size_t i = 0; i < elements.size(); ++i) {
        const auto& e = elements[i];
        const double v = v_[e.node_a] - v_[e.node_b];
        element_current_[i] = e.kind == ElementKind::R ? v / e.value : e.initial_current;
        companions_[i].history_current = next_history(companions_[i], element_current_[i], v);
    }
    for (std::size_t l = 0; l < lines_.size(); ++l) {
        const auto& spec = net_.lines()[l];
        lines_[l].prepare(dt_, end_voltages(spec.k_nodes), end_voltages(spec.m_nodes));
    }
    for (std::size_t s = 0; s < time_state_.size(); ++s) time_state_[s] = net_.time_switches()[s].conducting(0.0);
    started_ = true;
}

void EmtSolver::factor() {
    const int n = net_.node_count();
    g_ = Eigen::MatrixXd::Zero(n, n);
    for (std::size_t i = 0; i < companions_.size(); ++i) {
        const auto& e = net_.elements()[i];
        stamp(g_, e.node_a, e.node_b, companions_[i].conductance);
    }
    for (std::size_t l = 0; l < lines_.size(); ++l) {
        const auto& spec = net_.lines()[l];
        const auto& yc = lines_[l].characteristic_admittance();
        for (const auto* ends : {&spec.k_nodes, &spec.m_nodes}) {
            for (std::size_t r = 0; r < ends->size(); ++r) {
                for (std::size_t c = 0; c < ends->size(); ++c) {
                    const int nr = (*ends)[r], nc = (*ends)[c];
                    if (nr > 0 && nc > 0) g_(nr - 1, nc - 1) += yc(r, c);
                }
            }
        }
    }
    for (const auto& src : net_.voltage_sources()) stamp(g_, src.node, 0, 1.0 / src.series_ohms);
    for (const auto& sw : flashover_) {
        if (sw.closed) stamp(g_, sw.node_a, sw.node_b, 1.0 / sw.closed_ohms);
    }
    for (std::size_t s = 0; s < time_state_.size(); ++s) {
        const auto& sw = net_.time_switches()[s];
        if (time_state_[s]) stamp(g_, sw.node_a, sw.node_b, 1.0 / sw.closed_ohms);
    }
    lu_.compute(g_);
    const double scale = g_.cwiseAbs().maxCoeff();
    const auto& u = lu_.matrixLU();
    for (int k = 0; k < n; ++k) {
        if (!(std::abs(u(k, k)) > 1e-13 * scale)) {
            // Report the row that was pivoted into this position.
            const int node = lu_.permutationP().indices()[k];
            throw SingularNetwork("singular: conductance matrix is singular near node " + net_.node_name(node + 1), node + 1);
        }
    }
    refactor_ = false;
}

const Eigen::VectorXd& EmtSolver::step() {
    if (!started_) start();
    const double t = static_cast<double>(steps_ + 1) * dt_;

    for (std::size_t s = 0; s < time_state_.size(); ++s) {
        const bool state = net_.time_switches()[s].conducting(t);
        if (state != time_state_[s]) {
            time_state_[s] = state;
            refactor_ = true;
        }
    }
    if (refactor_) factor();

    const int n = net_.node_count();
    rhs_.setZero(n);
    for (std::size_t i = 0; i < companions_.size(); ++i) {
        const auto& e = net_.elements()[i];
        const double h = companions_[i].history_current;
        inject(rhs_, e.node_a, -h);
        inject(rhs_, e.node_b, h);
    }
    Eigen::VectorXd ik, im;
    for (std::size_t l = 0; l < lines_.size(); ++l) {
        const auto& spec = net_.lines()[l];
        lines_[l].history(ik, im);
        for (std::size_t c = 0; c < spec.k_nodes.size(); ++c) {
            inject(rhs_, spec.k_nodes[c], -ik[c]);
            inject(rhs_, spec.m_nodes[c], -im[c]);
        }
    }
    for (const auto& src : net_.current_sources()) inject(rhs_, src.node, src.current(t));
    for (const auto& src : net_.voltage_sources()) inject(rhs_, src.node, src.emf(t) / src.series_ohms);

    v_.tail(n) = lu_.solve(rhs_);
    v_[0] = 0.0;
    ++steps_;

    for (std::size_t i = 0; i < companions_.size(); ++i) {
        const auto& e = net_.elements()[i];
        const double v = v_[e.node_a] - v_[e.node_b];
        auto& comp = companions_[i];
        element_current_[i] = comp.conductance * v + comp.history_current;
        comp.history_current = next_history(comp, element_current_[i], v);
    }
    for (std::size_t l = 0; l < lines_.size(); ++l) {
        const auto& spec = net_.lines()[l];
        lines_[l].advance(end_voltages(spec.k_nodes), end_voltages(spec.m_nodes));
    }
    for (auto& sw : flashover_) {
        if (sw.closed) continue;
        sw = flashover_eval(sw, v_[sw.node_a] - v_[sw.node_b], t);
        if (sw.closed) refactor_ = true;
    }
    return v_;
}

double EmtSolver::element_current(std::size_t index) const {
    if (index >= element_current_.size()) throw InvalidArgument("unknown element");
    return element_current_[index];
}

bool EmtSolver::any_flashover() const {
    for (const auto& sw : flashover_) {
        if (sw.closed) return true;
    }
    return false;
}

RunResult simulate(const EmtNetwork& net, const TimeGrid& grid, const RunOptions& options) {
    if (options.decimation == 0) throw InvalidArgument("decimation must be at least 1");
    EmtSolver solver(net, grid.dt);
    if (options.initial_voltages.size() > 0) solver.set_initial_voltages(options.initial_voltages);
    for (int p : options.probes) {
        if (p < 0 || p > net.node_count()) throw InvalidArgument("unknown probe node " + std::to_string(p));
    }

    RunResult result;
    result.trace.nodes = options.probes;
    result.trace.volts.resize(options.probes.size());
    result.peak_across.assign(net.flashover_switches().size(), 0.0);
    auto record = [&] {
        result.trace.time.push_back(solver.time());
        for (std::size_t p = 0; p < options.probes.size(); ++p) {
            result.trace.volts[p].push_back(solver.voltages()[options.probes[p]]);
        }
    };
    if (!options.probes.empty()) record();

    const std::size_t steps = grid.step_count();
    for (std::size_t k = 0; k < steps; ++k) {
        const auto& v = solver.step();
        for (std::size_t s = 0; s < result.peak_across.size(); ++s) {
            const auto& sw = net.flashover_switches()[s];
            result.peak_across[s] = std::max(result.peak_across[s], std::abs(v[sw.node_a] - v[sw.node_b]));
        }
        if (!options.probes.empty() && solver.steps() % options.decimation == 0) record();
        if (options.stop_on_flashover && solver.any_flashover()) break;
    }
    result.switches = solver.flashover_switches();
    result.end_time = solver.time();
    result.steps = solver.steps();
    return result;
}

void write_waveform_csv(const std::string& path, const EmtNetwork& net, const ProbeTrace& trace) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write " + path);
    out << "time_s,node,volts\n";
    for (std::size_t k = 0; k < trace.time.size(); ++k) {
        for (std::size_t p = 0; p < trace.nodes.size(); ++p) {
            out << csv::format(trace.time[k]) << ',' << net.node_name(trace.nodes[p]) << ','
                << csv::format(trace.volts[p][k]) << '\n';
        }
    }
}

}  // namespace gridstudies::emt
