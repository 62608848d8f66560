#pragma once

#include <complex>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace gridstudies::phasor {

using Complex = std::complex<double>;

/// Two-terminal pi branch. `to == 0` connects to ground.
struct Branch {
    int from = 0;
    int to = 0;
    Complex series_impedance;                     // ohms
    Complex shunt_admittance_per_end{0.0, 0.0};   // siemens at each end
};

/// Magnetically coupled multi-phase pi section (e.g. a three-phase line).
/// Conductor k runs from `from_nodes[k]` to `to_nodes[k]`.
struct CoupledBranch {
    std::vector<int> from_nodes;
    std::vector<int> to_nodes;
    Eigen::MatrixXcd series_impedance;          // ohms, n x n
    Eigen::MatrixXcd shunt_admittance_per_end;  // siemens, n x n
};

/// Ideal emf behind an internal impedance, returning through ground.
struct Source {
    int node = 0;
    Complex emf;                 // volts RMS
    Complex internal_impedance;  // ohms, must be nonzero
};

/// Complex nodal model. Node 0 is ground; electrical nodes are numbered
/// 1..node_count(). Every phase of a bus is its own node.
class PhasorNetwork {
public:
    PhasorNetwork() = default;
    explicit PhasorNetwork(int node_count);

    int node_count() const noexcept { return node_count_; }

    /// Adds a node and returns its id. `name` is used for reporting only.
    int add_node(std::string name = {});
    void set_node_name(int node, std::string name);
    const std::string& node_name(int node) const;

    int add_branch(const Branch& branch);
    int add_coupled_branch(CoupledBranch branch);
    void add_source(const Source& source);

    const std::vector<Branch>& branches() const noexcept { return branches_; }
    const std::vector<CoupledBranch>& coupled_branches() const noexcept { return coupled_; }
    const std::vector<Source>& sources() const noexcept { return sources_; }

    /// Throws InvalidArgument if any endpoint is out of range, a source has
    /// zero internal impedance, or a passive element has negative resistance.
    void validate() const;

private:
    void check_node(int node, const char* what) const;

    int node_count_ = 0;
    std::vector<std::string> names_;
    std::vector<Branch> branches_;
    std::vector<CoupledBranch> coupled_;
    std::vector<Source> sources_;
};

/// Steady-state phasors. `node_voltages[0]` is ground (always 0).
struct PhasorSolution {
    std::vector<Complex> node_voltages;
    /// Current entering each Branch at its `from` end, series part only.
    std::vector<Complex> branch_currents;
    /// Current entering each conductor of each CoupledBranch at its from end.
    std::vector<std::vector<Complex>> coupled_currents;
    /// Current delivered by each source into its node.
    std::vector<Complex> source_currents;

    Complex voltage(int node) const { return node_voltages.at(static_cast<std::size_t>(node)); }
};

/// Nodal admittance matrix over nodes 1..N (row/column k-1 is node k).
/// With `include_sources` the Norton admittance of every source is stamped.
/// Throws SingularNetwork for an empty network or a node with no
/// connection at all.
Eigen::MatrixXcd assemble_admittance(const PhasorNetwork& net, bool include_sources = false);

/// Dense LU solve of Y V = I with source Norton equivalents stamped.
/// Throws SingularNetwork naming the floating node when the factorization
/// breaks down, and InvalidArgument when the network has no source.
PhasorSolution solve_steady_state(const PhasorNetwork& net);

/// Kirchhoff current residual at every node: injected source current minus
/// current leaving through passive elements. Index 0 unused.
std::vector<Complex> kcl_residuals(const PhasorNetwork& net, const PhasorSolution& sol);

/// RMS magnitudes of the requested node voltages. The solver works in RMS
/// phasors so this is |V|. Throws InvalidArgument for an unknown node.
std::vector<double> rms_report(const PhasorSolution& sol, const std::vector<int>& nodes);

}  // namespace gridstudies::phasor
