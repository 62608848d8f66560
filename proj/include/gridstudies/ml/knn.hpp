#pragma once

#include <vector>

#include <Eigen/Dense>

#include "gridstudies/ml/dataset.hpp"

namespace gridstudies::ml {

/// k-nearest-neighbour classifier with Euclidean distance. Vote ties go to
/// the label with the smaller mean neighbour distance, then the lower label.
/// Equidistant neighbours are ranked by training row order.
class KnnModel {
public:
    KnnModel(const Dataset& train, int k);

    int k() const { return k_; }
    const Eigen::MatrixXd& features() const { return features_; }
    const std::vector<int>& labels() const { return labels_; }
    int predict(const Eigen::VectorXd& x) const;
    std::vector<int> predict_all(const Eigen::MatrixXd& x) const;

private:
    Eigen::MatrixXd features_;
    std::vector<int> labels_;
    int k_;
};

}  // namespace gridstudies::ml
