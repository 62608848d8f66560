#include "gridstudies/lightning/strike.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "gridstudies/common/error.hpp"
#include "gridstudies/emt/sources.hpp"

namespace gridstudies::lightning {

namespace {

constexpr double kLight = 299792458.0;
constexpr double kMu0 = 4e-7 * std::numbers::pi;
constexpr double kEps0 = 1.0 / (kMu0 * kLight * kLight);

struct Conductor {
    double y, h, r;
};

std::array<Conductor, 5> conductors(const LineGeometry& g) {
    std::array<Conductor, 5> c{};
    for (int s = 0; s < 2; ++s) {
        const auto& w = g.shield_wires[static_cast<std::size_t>(s)];
        c[static_cast<std::size_t>(s)] = {w.y, w.h - 2.0 / 3.0 * g.shield_sag_m, g.shield_radius_m};
    }
    for (int p = 0; p < 3; ++p) {
        const auto& w = g.phases[static_cast<std::size_t>(p)];
        c[static_cast<std::size_t>(2 + p)] = {w.y, w.h - 2.0 / 3.0 * g.phase_sag_m, g.phase_radius_m};
    }
    return c;
}

}  // namespace

double tower_surge_impedance(double height_m, double base_radius_m) {
    if (!(height_m > 0.0 && base_radius_m > 0.0)) throw InvalidArgument("tower dimensions must be positive");
    const double z = 60.0 * (std::log(std::numbers::sqrt2 * 2.0 * height_m / base_radius_m) - 1.0);
    if (!(z > 0.0)) throw InvalidArgument("tower too squat for the conical surge impedance formula");
    return z;
}

void line_constants(const LineGeometry& geom, Eigen::MatrixXd& l_per_m, Eigen::MatrixXd& c_per_m) {
    const auto c = conductors(geom);
    Eigen::MatrixXd m(5, 5);
    for (int i = 0; i < 5; ++i) {
        for (int j = 0; j < 5; ++j) {
            const auto& a = c[static_cast<std::size_t>(i)];
            const auto& b = c[static_cast<std::size_t>(j)];
            if (i == j) {
                m(i, j) = std::log(2.0 * a.h / a.r);
            } else {
                const double d = std::hypot(a.y - b.y, a.h - b.h);
                const double d_image = std::hypot(a.y - b.y, a.h + b.h);
                m(i, j) = std::log(d_image / d);
            }
        }
    }
    l_per_m = kMu0 / (2.0 * std::numbers::pi) * m;
    c_per_m = (m / (2.0 * std::numbers::pi * kEps0)).inverse();
}

double phase_bias_volts(double system_kv, double angle_deg, int phase) {
    const double vpk = system_kv * 1e3 * std::numbers::sqrt2 / std::numbers::sqrt3;
    return vpk * std::cos((angle_deg - 120.0 * phase) * std::numbers::pi / 180.0);
}

StrikeNetwork build_strike_network(const StrokeSample& sample, const Impact& impact, const LineGeometry& geom,
                                   const StrikeParams& params, const std::vector<double>& tower_strengths_kv) {
    if (!impact.on_line()) throw InvalidArgument("stroke to ground has no line network");
    geom.validate();
    if (params.spans_each_side < 1) throw InvalidArgument("at least one span on each side is required");
    if (!(sample.footing_ohms > 0.0)) throw InvalidArgument("footing resistance must be positive");
    if (!(sample.front_us > 0.0 && sample.tail_us > sample.front_us)) {
        throw InvalidArgument("stroke front time must be shorter than its tail time");
    }

    StrikeNetwork out;
    auto& net = out.net;
    const bool at_tower = impact.at_tower();
    const int towers = at_tower ? 2 * params.spans_each_side + 1 : 2 * params.spans_each_side;
    if (!tower_strengths_kv.empty() && static_cast<int>(tower_strengths_kv.size()) != towers) {
        throw InvalidArgument("per-tower strengths must match the tower count");
    }

    Eigen::MatrixXd lpm, cpm;
    line_constants(geom, lpm, cpm);
    const auto span = emt::BergeronLine::from_parameters(lpm, cpm, geom.span_length_m);
    const auto half = emt::BergeronLine::from_parameters(lpm, cpm, 0.5 * geom.span_length_m);
    const auto term = emt::BergeronLine::from_parameters(lpm, cpm, params.termination_length_m);
    const double zt = tower_surge_impedance(geom.tower_height_m, geom.tower_base_radius_m);
    const auto tower_line = emt::BergeronLine::single(zt, geom.tower_height_m / kLight);
    const Eigen::MatrixXd zc = span.characteristic_admittance().inverse();

    std::array<double, 3> bias{};
    for (int p = 0; p < 3; ++p) bias[static_cast<std::size_t>(p)] = phase_bias_volts(params.system_kv, sample.phase_angle_deg, p);

    static constexpr const char* kPhase[] = {"A", "B", "C"};
    std::vector<double> init{0.0};
    auto node = [&](const std::string& name, double v0) {
        init.push_back(v0);
        return net.add_node(name);
    };

    for (int t = 0; t < towers; ++t) {
        const std::string tag = "T" + std::to_string(t);
        out.tower_top.push_back(node(tag + ".top", 0.0));
        out.tower_base.push_back(node(tag + ".base", 0.0));
        std::array<int, 3> ph{};
        for (int p = 0; p < 3; ++p) ph[static_cast<std::size_t>(p)] = node(tag + "." + kPhase[p], bias[static_cast<std::size_t>(p)]);
        out.tower_phase.push_back(ph);
        net.add_line({out.tower_top.back()}, {out.tower_base.back()}, tower_line);
        net.add_resistor(out.tower_base.back(), 0, sample.footing_ohms);
        const double strength = tower_strengths_kv.empty() ? sample.strength_kv : tower_strengths_kv[static_cast<std::size_t>(t)];
        for (int p = 0; p < 3; ++p) {
            net.add_flashover_switch(out.tower_top.back(), ph[static_cast<std::size_t>(p)], strength * 1e3,
                                     params.insulator_closed_ohms);
            out.insulators.push_back({t, p});
        }
    }
    auto ends = [&](int t) {
        const int top = out.tower_top[static_cast<std::size_t>(t)];
        const auto& ph = out.tower_phase[static_cast<std::size_t>(t)];
        return std::vector<int>{top, top, ph[0], ph[1], ph[2]};
    };

    std::vector<int> mid;
    const int split_after = params.spans_each_side - 1;  // midspan impact lies in span (s-1, s)
    for (int t = 0; t + 1 < towers; ++t) {
        if (!at_tower && t == split_after) {
            mid = {node("mid.SW1", 0.0), node("mid.SW2", 0.0)};
            for (int p = 0; p < 3; ++p) mid.push_back(node(std::string("mid.") + kPhase[p], bias[static_cast<std::size_t>(p)]));
            net.add_line(ends(t), mid, half);
            net.add_line(mid, ends(t + 1), half);
        } else {
            net.add_line(ends(t), ends(t + 1), span);
        }
    }

    for (int side = 0; side < 2; ++side) {
        const std::string tag = side == 0 ? "left." : "right.";
        std::vector<int> far;
        far.push_back(node(tag + "SW1", 0.0));
        far.push_back(node(tag + "SW2", 0.0));
        for (int p = 0; p < 3; ++p) far.push_back(node(tag + kPhase[p], bias[static_cast<std::size_t>(p)]));
        net.add_line(ends(side == 0 ? 0 : towers - 1), far, term);
        for (int c = 0; c < 2; ++c) net.add_resistor(far[static_cast<std::size_t>(c)], 0, zc(c, c));
        for (int p = 0; p < 3; ++p) {
            net.add_voltage_source(far[static_cast<std::size_t>(2 + p)], emt::constant(bias[static_cast<std::size_t>(p)]),
                                   zc(2 + p, 2 + p));
        }
    }

    if (at_tower) {
        const int t = params.spans_each_side;
        out.impact_tower = t;
        out.source_node = impact.on_shield() ? out.tower_top[static_cast<std::size_t>(t)]
                                             : out.tower_phase[static_cast<std::size_t>(t)][static_cast<std::size_t>(impact.conductor)];
    } else {
        out.source_node = impact.on_shield() ? mid[static_cast<std::size_t>(impact.conductor)]
                                             : mid[static_cast<std::size_t>(2 + impact.conductor)];
    }
    const emt::DoubleRampSource stroke{sample.peak_ka, sample.front_us, sample.tail_us, out.source_node};
    net.add_current_source(out.source_node, [stroke](double t) { return -emt::double_ramp_eval(stroke, t); });

    out.initial_voltages = Eigen::Map<Eigen::VectorXd>(init.data(), static_cast<Eigen::Index>(init.size()));
    return out;
}

StrikeOutcome simulate_strike(const StrikeNetwork& network, const StrikeParams& params) {
    emt::RunOptions opt;
    opt.stop_on_flashover = params.stop_on_flashover;
    opt.initial_voltages = network.initial_voltages;
    const auto run = emt::simulate(network.net, {params.dt, params.t_end}, opt);
    StrikeOutcome out;
    out.steps = run.steps;
    for (double v : run.peak_across) out.peak_across_kv = std::max(out.peak_across_kv, v * 1e-3);
    for (std::size_t s = 0; s < run.switches.size(); ++s) {
        const auto& sw = run.switches[s];
        if (!sw.closed || !sw.close_time) continue;
        if (!out.flashover || *sw.close_time < out.time) {
            out.flashover = true;
            out.time = *sw.close_time;
            out.tower = network.insulators[s].tower;
            out.phase = network.insulators[s].phase;
        }
    }
    return out;
}

}  // namespace gridstudies::lightning
