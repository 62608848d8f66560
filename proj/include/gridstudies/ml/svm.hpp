#pragma once

#include <vector>

#include <Eigen/Dense>

#include "gridstudies/ml/dataset.hpp"

namespace gridstudies::ml {

enum class KernelKind { Rbf, Linear };

struct SvmParams {
    double c = 1.0;
    double sigma = 0.0;  // RBF width; 0 selects the median pairwise distance
    KernelKind kernel = KernelKind::Rbf;
    double tolerance = 1e-3;
    std::size_t max_iterations = 0;  // 0 selects max(10^7, 100 n)
};

/// One binary machine: f(x) = sum coef_i K(sv_i, x) - rho, positive means
/// `positive_label`.
struct BinarySvm {
    int positive_label = 0;
    int negative_label = 0;
    Eigen::MatrixXd support_vectors;
    Eigen::VectorXd coefficients;  // alpha_i * y_i
    Eigen::VectorXd alphas;
    double rho = 0.0;
    double kkt_residual = 0.0;
    std::size_t iterations = 0;
};

/// One-vs-one ensemble; votes tie to the lowest label.
struct SvmModel {
    KernelKind kernel = KernelKind::Rbf;
    double sigma = 1.0;
    double c = 1.0;
    std::vector<int> classes;
    std::vector<BinarySvm> machines;
};

double kernel_value(KernelKind kind, double sigma, const Eigen::VectorXd& a, const Eigen::VectorXd& b);

/// Median Euclidean distance over row pairs (evenly thinned above 1500 rows).
double median_pairwise_distance(const Eigen::MatrixXd& x);

/// SMO with second-order working-set selection. Throws ConvergenceError when
/// the iteration budget runs out, naming the remaining KKT residual.
SvmModel svm_train(const Dataset& train, const SvmParams& params = {});
double svm_decision(const SvmModel& model, const BinarySvm& machine, const Eigen::VectorXd& x);
int svm_predict(const SvmModel& model, const Eigen::VectorXd& x);
std::vector<int> svm_predict(const SvmModel& model, const Eigen::MatrixXd& x);

}  // namespace gridstudies::ml
