#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

namespace gridstudies::ml {

/// Feed-forward network with logistic units in every layer, including the
/// output. weights[l] maps layer l to layer l+1.
struct MlpModel {
    std::vector<int> layout;
    std::vector<Eigen::MatrixXd> weights;
    std::vector<Eigen::VectorXd> biases;

    Eigen::VectorXd forward(const Eigen::VectorXd& x) const;
    std::size_t parameter_count() const;
};

/// Weights and biases ~ N(0, 1) from `seed`.
MlpModel mlp_init(const std::vector<int>& layout, std::uint64_t seed);

/// Sum-of-squares loss 0.5 * sum (out - y)^2 over rows of x against rows of y.
double mlp_loss(const MlpModel& model, const Eigen::MatrixXd& x, const Eigen::MatrixXd& y);

/// Flattened analytic gradient of mlp_loss, weights then biases per layer.
Eigen::VectorXd mlp_gradient(const MlpModel& model, const Eigen::MatrixXd& x, const Eigen::MatrixXd& y);

struct MlpParams {
    int epochs = 20000;
    double learning_rate = 0.5;
    double loss_threshold = 0.0;  // stop once the loss falls below
};

struct MlpTrainResult {
    MlpModel model;
    double initial_loss = 0.0;
    double final_loss = 0.0;
    int epochs_run = 0;
};

/// Full-batch gradient descent. A step that raises the loss is rejected and
/// the rate halved; accepted steps grow it by 5%. Throws ConvergenceError
/// naming the epoch if the loss turns non-finite.
MlpTrainResult mlp_train(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y, const std::vector<int>& layout,
                         std::uint64_t seed, const MlpParams& params = {});

/// Class 1 when the single output exceeds 0.5.
int mlp_predict_label(const MlpModel& model, const Eigen::VectorXd& x);

/// Largest relative difference between the analytic gradient and central
/// differences with step h.
double gradient_check(const MlpModel& model, const Eigen::MatrixXd& x, const Eigen::MatrixXd& y,
                      double h = 1e-5);

}  // namespace gridstudies::ml
