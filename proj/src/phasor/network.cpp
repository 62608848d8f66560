#include "gridstudies/phasor/network.hpp"

#include <cmath>

#include "gridstudies/common/error.hpp"

namespace gridstudies::phasor {

PhasorNetwork::PhasorNetwork(int node_count) : node_count_(node_count) {
    if (node_count < 0) throw InvalidArgument("node count must be non-negative");
    names_.resize(static_cast<std::size_t>(node_count) + 1);
    names_[0] = "ground";
}

int PhasorNetwork::add_node(std::string name) {
    if (names_.empty()) names_.push_back("ground");
    names_.push_back(std::move(name));
    return ++node_count_;
}

void PhasorNetwork::set_node_name(int node, std::string name) {
    check_node(node, "node");
    if (names_.size() < static_cast<std::size_t>(node_count_) + 1) names_.resize(node_count_ + 1);
    names_[static_cast<std::size_t>(node)] = std::move(name);
}

const std::string& PhasorNetwork::node_name(int node) const {
    check_node(node, "node");
    static const std::string ground = "ground";
    if (node == 0) return ground;
    return names_.at(static_cast<std::size_t>(node));
}

void PhasorNetwork::check_node(int node, const char* what) const {
    if (node < 0 || node > node_count_) {
        throw InvalidArgument(std::string(what) + " " + std::to_string(node) + " outside 0.." +
                              std::to_string(node_count_));
    }
}

int PhasorNetwork::add_branch(const Branch& branch) {
    check_node(branch.from, "branch endpoint");
    check_node(branch.to, "branch endpoint");
    branches_.push_back(branch);
    return static_cast<int>(branches_.size()) - 1;
}

int PhasorNetwork::add_coupled_branch(CoupledBranch branch) {
    const auto n = static_cast<Eigen::Index>(branch.from_nodes.size());
    if (branch.to_nodes.size() != branch.from_nodes.size() || branch.series_impedance.rows() != n ||
        branch.series_impedance.cols() != n || branch.shunt_admittance_per_end.rows() != n ||
        branch.shunt_admittance_per_end.cols() != n) {
        throw InvalidArgument("coupled branch dimensions disagree");
    }
    for (int node : branch.from_nodes) check_node(node, "coupled branch endpoint");
    for (int node : branch.to_nodes) check_node(node, "coupled branch endpoint");
    coupled_.push_back(std::move(branch));
    return static_cast<int>(coupled_.size()) - 1;
}

void PhasorNetwork::add_source(const Source& source) {
    check_node(source.node, "source node");
    if (source.node == 0) throw InvalidArgument("source cannot be attached to ground");
    if (std::abs(source.internal_impedance) == 0.0) {
        throw InvalidArgument("source internal impedance must be nonzero");
    }
    sources_.push_back(source);
}

void PhasorNetwork::validate() const {
    for (const auto& b : branches_) {
        check_node(b.from, "branch endpoint");
        check_node(b.to, "branch endpoint");
        if (b.series_impedance.real() < 0.0 || b.shunt_admittance_per_end.real() < 0.0) {
            throw InvalidArgument("negative resistance in passive branch");
        }
        if (std::abs(b.series_impedance) == 0.0) throw InvalidArgument("zero series impedance");
    }
    for (const auto& c : coupled_) {
        for (Eigen::Index k = 0; k < c.series_impedance.rows(); ++k) {
            if (c.series_impedance(k, k).real() < 0.0) {
                throw InvalidArgument("negative resistance in coupled branch");
            }
        }
    }
    for (const auto& s : sources_) {
        check_node(s.node, "source node");
        if (s.internal_impedance.real() < 0.0) throw InvalidArgument("negative source resistance");
    }
}

namespace {

void stamp(Eigen::MatrixXcd& y, int a, int b, Complex value) {
    if (a > 0) y(a - 1, a - 1) += value;
    if (b > 0) y(b - 1, b - 1) += value;
    if (a > 0 && b > 0) {
        y(a - 1, b - 1) -= value;
        y(b - 1, a - 1) -= value;
    }
}

void stamp_entry(Eigen::MatrixXcd& y, int row, int col, Complex value) {
    if (row > 0 && col > 0) y(row - 1, col - 1) += value;
}

Eigen::MatrixXcd coupled_series_admittance(const CoupledBranch& c) {
    Eigen::FullPivLU<Eigen::MatrixXcd> lu(c.series_impedance);
    if (!lu.isInvertible()) throw SingularNetwork("coupled branch impedance matrix is singular");
    return lu.inverse();
}

}  // namespace

Eigen::MatrixXcd assemble_admittance(const PhasorNetwork& net, bool include_sources) {
    const int n = net.node_count();
    if (n == 0) throw SingularNetwork("singular: network has no nodes");
    net.validate();
    Eigen::MatrixXcd y = Eigen::MatrixXcd::Zero(n, n);
    std::vector<bool> touched(static_cast<std::size_t>(n) + 1, false);

    for (const auto& b : net.branches()) {
        stamp(y, b.from, b.to, 1.0 / b.series_impedance);
        stamp(y, b.from, 0, b.shunt_admittance_per_end);
        stamp(y, b.to, 0, b.shunt_admittance_per_end);
        touched[b.from] = touched[b.to] = true;
    }
    for (const auto& c : net.coupled_branches()) {
        const Eigen::MatrixXcd ys = coupled_series_admittance(c);
        const auto m = static_cast<Eigen::Index>(c.from_nodes.size());
        for (Eigen::Index i = 0; i < m; ++i) {
            for (Eigen::Index j = 0; j < m; ++j) {
                const int fi = c.from_nodes[i], fj = c.from_nodes[j];
                const int ti = c.to_nodes[i], tj = c.to_nodes[j];
                stamp_entry(y, fi, fj, ys(i, j) + c.shunt_admittance_per_end(i, j));
                stamp_entry(y, ti, tj, ys(i, j) + c.shunt_admittance_per_end(i, j));
                stamp_entry(y, fi, tj, -ys(i, j));
                stamp_entry(y, ti, fj, -ys(i, j));
            }
            touched[c.from_nodes[i]] = touched[c.to_nodes[i]] = true;
        }
    }
    if (include_sources) {
        for (const auto& s : net.sources()) {
            stamp(y, s.node, 0, 1.0 / s.internal_impedance);
            touched[s.node] = true;
        }
    }
    for (int k = 1; k <= n; ++k) {
        if (!touched[k] || std::abs(y(k - 1, k - 1)) == 0.0) {
            throw SingularNetwork("singular: node " + std::to_string(k) + " (" + net.node_name(k) +
                                      ") is isolated",
                                  k);
        }
    }
    return y;
}

PhasorSolution solve_steady_state(const PhasorNetwork& net) {
    if (net.sources().empty()) throw InvalidArgument("network has no source");
    const Eigen::MatrixXcd y = assemble_admittance(net, true);
    const int n = net.node_count();
    Eigen::VectorXcd injection = Eigen::VectorXcd::Zero(n);
    for (const auto& s : net.sources()) injection(s.node - 1) += s.emf / s.internal_impedance;

    Eigen::PartialPivLU<Eigen::MatrixXcd> lu(y);
    const auto& factors = lu.matrixLU();
    const double scale = y.cwiseAbs().maxCoeff();
    for (int k = 0; k < n; ++k) {
        if (std::abs(factors(k, k)) <= 1e-13 * scale) {
            throw SingularNetwork("singular: node " + std::to_string(k + 1) + " (" +
                                      net.node_name(k + 1) + ") is floating",
                                  k + 1);
        }
    }
    const Eigen::VectorXcd v = lu.solve(injection);

    PhasorSolution sol;
    sol.node_voltages.assign(static_cast<std::size_t>(n) + 1, Complex{});
    for (int k = 1; k <= n; ++k) sol.node_voltages[k] = v(k - 1);
    for (const auto& b : net.branches()) {
        sol.branch_currents.push_back((sol.voltage(b.from) - sol.voltage(b.to)) / b.series_impedance);
    }
    for (const auto& c : net.coupled_branches()) {
        const Eigen::MatrixXcd ys = coupled_series_admittance(c);
        const auto m = static_cast<Eigen::Index>(c.from_nodes.size());
        Eigen::VectorXcd dv(m);
        for (Eigen::Index i = 0; i < m; ++i) dv(i) = sol.voltage(c.from_nodes[i]) - sol.voltage(c.to_nodes[i]);
        const Eigen::VectorXcd i_series = ys * dv;
        sol.coupled_currents.emplace_back(i_series.data(), i_series.data() + m);
    }
    for (const auto& s : net.sources()) {
        sol.source_currents.push_back((s.emf - sol.voltage(s.node)) / s.internal_impedance);
    }
    return sol;
}

std::vector<Complex> kcl_residuals(const PhasorNetwork& net, const PhasorSolution& sol) {
    std::vector<Complex> r(static_cast<std::size_t>(net.node_count()) + 1, Complex{});
    auto leave = [&](int node, Complex current) {
        if (node > 0) r[node] -= current;
    };
    for (std::size_t k = 0; k < net.branches().size(); ++k) {
        const auto& b = net.branches()[k];
        const Complex i = (sol.voltage(b.from) - sol.voltage(b.to)) / b.series_impedance;
        leave(b.from, i);
        leave(b.to, -i);
        leave(b.from, sol.voltage(b.from) * b.shunt_admittance_per_end);
        leave(b.to, sol.voltage(b.to) * b.shunt_admittance_per_end);
    }
    for (const auto& c : net.coupled_branches()) {
        const Eigen::MatrixXcd ys = coupled_series_admittance(c);
        const auto m = static_cast<Eigen::Index>(c.from_nodes.size());
        Eigen::VectorXcd dv(m), vf(m), vt(m);
        for (Eigen::Index i = 0; i < m; ++i) {
            vf(i) = sol.voltage(c.from_nodes[i]);
            vt(i) = sol.voltage(c.to_nodes[i]);
        }
        dv = vf - vt;
        const Eigen::VectorXcd series = ys * dv;
        const Eigen::VectorXcd shunt_f = c.shunt_admittance_per_end * vf;
        const Eigen::VectorXcd shunt_t = c.shunt_admittance_per_end * vt;
        for (Eigen::Index i = 0; i < m; ++i) {
            leave(c.from_nodes[i], series(i) + shunt_f(i));
            leave(c.to_nodes[i], -series(i) + shunt_t(i));
        }
    }
    for (const auto& s : net.sources()) {
        r[s.node] += (s.emf - sol.voltage(s.node)) / s.internal_impedance;
    }
    return r;
}

std::vector<double> rms_report(const PhasorSolution& sol, const std::vector<int>& nodes) {
    std::vector<double> out;
    out.reserve(nodes.size());
    for (int node : nodes) {
        if (node < 0 || static_cast<std::size_t>(node) >= sol.node_voltages.size()) {
            throw InvalidArgument("unknown node " + std::to_string(node));
        }
        out.push_back(std::abs(sol.node_voltages[node]));
    }
    return out;
}

}  // namespace gridstudies::phasor
