#pragma once

#include <vector>

#include <Eigen/Dense>

namespace gridstudies::emt {

/// Lossless multi-conductor line in the Bergeron form, decoupled into modes.
/// Each end k obeys i_k(t) = Yc*v_k(t) + I_k(t), where the history I_k only
/// depends on the far end one modal travel time earlier. Currents are
/// positive into the line.
class BergeronLine {
public:
    /// Single conductor with surge impedance `zc` ohms and travel time `tau` s.
    static BergeronLine single(double zc, double tau);

    /// Per-metre series inductance and shunt capacitance matrices (symmetric,
    /// positive definite) and a length in metres.
    static BergeronLine from_parameters(const Eigen::MatrixXd& l_per_m, const Eigen::MatrixXd& c_per_m,
                                        double length_m);

    int conductors() const { return static_cast<int>(modal_impedance_.size()); }
    const Eigen::MatrixXd& characteristic_admittance() const { return yc_; }
    const Eigen::VectorXd& modal_impedance() const { return modal_impedance_; }
    const Eigen::VectorXd& travel_times() const { return travel_time_; }
    /// Modal current transform: i = Ti * i_mode, v_mode = Ti^T * v.
    const Eigen::MatrixXd& current_transform() const { return ti_; }

    /// Allocate delay buffers for step `dt` and prime them with a current-free
    /// state at the given end voltages. Throws if any travel time is below dt.
    void prepare(double dt, const Eigen::VectorXd& v_k, const Eigen::VectorXd& v_m);

    /// Phase-domain history currents for the step about to be solved.
    void history(Eigen::VectorXd& i_k, Eigen::VectorXd& i_m) const;

    /// Record the solved end voltages of the current step and move on.
    void advance(const Eigen::VectorXd& v_k, const Eigen::VectorXd& v_m);

private:
    double delayed(const std::vector<double>& ring, int mode) const;

    Eigen::MatrixXd ti_;
    Eigen::MatrixXd yc_;
    Eigen::VectorXd modal_impedance_;
    Eigen::VectorXd travel_time_;

    // Per mode: forward quantity b = v/Z + i seen at each end, stored per step.
    std::vector<std::vector<double>> ring_k_;
    std::vector<std::vector<double>> ring_m_;
    std::vector<int> whole_steps_;
    std::vector<double> fraction_;
    std::size_t depth_ = 0;
    std::size_t cursor_ = 0;  // slot of the most recent solved step
    Eigen::VectorXd hist_k_;
    Eigen::VectorXd hist_m_;
};

}  // namespace gridstudies::emt
