#include "gridstudies/emt/line.hpp"

#include <cmath>

#include "gridstudies/common/error.hpp"

namespace gridstudies::emt {

BergeronLine BergeronLine::single(double zc, double tau) {
    if (!(zc > 0.0)) throw InvalidArgument("surge impedance must be positive");
    if (!(tau > 0.0)) throw InvalidArgument("travel time must be positive");
    // L = Zc*tau, C = tau/Zc on a unit length.
    Eigen::MatrixXd l(1, 1), c(1, 1);
    l(0, 0) = zc * tau;
    c(0, 0) = tau / zc;
    return from_parameters(l, c, 1.0);
}

BergeronLine BergeronLine::from_parameters(const Eigen::MatrixXd& l_per_m, const Eigen::MatrixXd& c_per_m,
                                           double length_m) {
    const auto n = l_per_m.rows();
    if (n == 0 || l_per_m.cols() != n || c_per_m.rows() != n || c_per_m.cols() != n) {
        throw InvalidArgument("line parameter matrices must be square and of equal size");
    }
    if (!(length_m > 0.0)) throw InvalidArgument("line length must be positive");

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ceig(0.5 * (c_per_m + c_per_m.transpose()));
    if (ceig.eigenvalues().minCoeff() <= 0.0) throw InvalidArgument("capacitance matrix is not positive definite");
    const Eigen::MatrixXd c_half = ceig.operatorSqrt();
    const Eigen::MatrixXd m = c_half * l_per_m * c_half;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> meig(0.5 * (m + m.transpose()));
    if (meig.eigenvalues().minCoeff() <= 0.0) throw InvalidArgument("inductance matrix is not positive definite");

    BergeronLine line;
    line.ti_ = c_half * meig.eigenvectors();
    line.modal_impedance_ = meig.eigenvalues().array().sqrt();
    line.travel_time_ = line.modal_impedance_ * length_m;
    line.yc_ = line.ti_ * line.modal_impedance_.cwiseInverse().asDiagonal() * line.ti_.transpose();
    return line;
}

void BergeronLine::prepare(double dt, const Eigen::VectorXd& v_k, const Eigen::VectorXd& v_m) {
    const int n = conductors();
    if (v_k.size() != n || v_m.size() != n) throw InvalidArgument("line end voltage size mismatch");
    whole_steps_.assign(n, 0);
    fraction_.assign(n, 0.0);
    int deepest = 0;
    for (int j = 0; j < n; ++j) {
        const double ratio = travel_time_[j] / dt;
        if (ratio < 1.0 - 1e-9) throw InvalidArgument("line travel time shorter than the time step");
        double whole = std::floor(ratio + 1e-9);
        double frac = ratio - whole;
        if (frac < 1e-9) frac = 0.0;
        whole_steps_[j] = static_cast<int>(whole);
        fraction_[j] = frac;
        deepest = std::max(deepest, whole_steps_[j] + 1);
    }
    depth_ = static_cast<std::size_t>(deepest) + 1;
    cursor_ = 0;

    // Current-free state: the forward quantity is v/Z at both ends.
    const Eigen::VectorXd vk = ti_.transpose() * v_k;
    const Eigen::VectorXd vm = ti_.transpose() * v_m;
    ring_k_.assign(n, std::vector<double>(depth_));
    ring_m_.assign(n, std::vector<double>(depth_));
    for (int j = 0; j < n; ++j) {
        std::fill(ring_k_[j].begin(), ring_k_[j].end(), vk[j] / modal_impedance_[j]);
        std::fill(ring_m_[j].begin(), ring_m_[j].end(), vm[j] / modal_impedance_[j]);
    }
    hist_k_.resize(n);
    hist_m_.resize(n);
    for (int j = 0; j < n; ++j) {
        hist_k_[j] = -delayed(ring_m_[j], j);
        hist_m_[j] = -delayed(ring_k_[j], j);
    }
}

double BergeronLine::delayed(const std::vector<double>& ring, int mode) const {
    // Value at (next step - tau): between slots next-whole and next-whole-1.
    const std::size_t next = cursor_ + 1;
    const std::size_t a = (next + depth_ * 4 - whole_steps_[mode]) % depth_;
    const double f = fraction_[mode];
    if (f == 0.0) return ring[a];
    const std::size_t b = (a + depth_ - 1) % depth_;
    return (1.0 - f) * ring[a] + f * ring[b];
}

void BergeronLine::history(Eigen::VectorXd& i_k, Eigen::VectorXd& i_m) const {
    i_k = ti_ * hist_k_;
    i_m = ti_ * hist_m_;
}

void BergeronLine::advance(const Eigen::VectorXd& v_k, const Eigen::VectorXd& v_m) {
    const int n = conductors();
    const Eigen::VectorXd vk = ti_.transpose() * v_k;
    const Eigen::VectorXd vm = ti_.transpose() * v_m;
    cursor_ = (cursor_ + 1) % depth_;
    for (int j = 0; j < n; ++j) {
        // i_mode = v/Z + hist, so b = v/Z + i = 2v/Z + hist.
        ring_k_[j][cursor_] = 2.0 * vk[j] / modal_impedance_[j] + hist_k_[j];
        ring_m_[j][cursor_] = 2.0 * vm[j] / modal_impedance_[j] + hist_m_[j];
    }
    for (int j = 0; j < n; ++j) {
        hist_k_[j] = -delayed(ring_m_[j], j);
        hist_m_[j] = -delayed(ring_k_[j], j);
    }
}

}  // namespace gridstudies::emt
