#pragma once

#include <array>
#include <vector>

#include <Eigen/Dense>

#include "gridstudies/emt/network.hpp"
#include "gridstudies/lightning/egm.hpp"
#include "gridstudies/lightning/sampling.hpp"

namespace gridstudies::lightning {

struct StrikeParams {
    double system_kv = 230.0;  // line-to-line rms
    double dt = 10e-9;
    double t_end = 30e-6;
    int spans_each_side = 4;
    double termination_length_m = 30000.0;
    double insulator_closed_ohms = 1e-3;
    bool stop_on_flashover = true;
};

/// Conical tower: Z = 60 (ln(sqrt(2) * 2h / r) - 1).
double tower_surge_impedance(double height_m, double base_radius_m);

/// Per-metre series inductance and shunt capacitance of the five conductors
/// (shield wires 1-2, phases A-C) over perfectly conducting ground, at the
/// average height h - 2/3 sag.
void line_constants(const LineGeometry& geom, Eigen::MatrixXd& l_per_m, Eigen::MatrixXd& c_per_m);

/// Power-frequency phase voltage of phase k (0..2) at angle `angle_deg`.
double phase_bias_volts(double system_kv, double angle_deg, int phase);

struct InsulatorRef {
    int tower = 0;
    int phase = 0;
};

struct StrikeNetwork {
    emt::EmtNetwork net;
    Eigen::VectorXd initial_voltages;
    int source_node = 0;
    int impact_tower = -1;  // -1 for a midspan impact
    std::vector<int> tower_top;
    std::vector<int> tower_base;
    std::vector<std::array<int, 3>> tower_phase;
    std::vector<InsulatorRef> insulators;  // one per flashover switch, same order
};

/// Line section around the impact point: spans_each_side spans on each side
/// of the struck tower (or of the struck span's midpoint), five-conductor
/// Bergeron spans with both shield wires bonded at the tower top, towers as
/// single-conductor lines over a common footing resistance, insulator
/// flashover switches from tower top to each phase, and long terminating
/// sections held at the sampled phase voltages. `tower_strengths_kv`
/// overrides the sample's strength per tower when non-empty.
StrikeNetwork build_strike_network(const StrokeSample& sample, const Impact& impact, const LineGeometry& geom,
                                   const StrikeParams& params = {},
                                   const std::vector<double>& tower_strengths_kv = {});

struct StrikeOutcome {
    bool flashover = false;
    int tower = -1;
    int phase = -1;
    double time = 0.0;
    double peak_across_kv = 0.0;
    std::size_t steps = 0;
};

StrikeOutcome simulate_strike(const StrikeNetwork& network, const StrikeParams& params = {});

}  // namespace gridstudies::lightning
