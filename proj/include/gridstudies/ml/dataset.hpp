#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace gridstudies::ml {

/// Feature matrix (one row per sample) with integer class labels.
struct Dataset {
    Eigen::MatrixXd features;
    std::vector<int> labels;
    std::vector<std::string> feature_names;
    std::string label_name;

    std::size_t size() const { return labels.size(); }
    int dims() const { return static_cast<int>(features.cols()); }
    /// Throws InvalidArgument on size mismatch, empty data or NaN.
    void validate() const;
    Dataset subset(const std::vector<std::size_t>& rows) const;
};

/// Random disjoint split: the first part gets round(fraction * n) rows.
std::pair<Dataset, Dataset> split(const Dataset& data, double fraction, std::uint64_t seed);

/// Per-column min-max map onto [0, 1], fitted on training data. Constant
/// columns map to 0.
struct MinMaxScaler {
    Eigen::VectorXd lower;
    Eigen::VectorXd upper;

    static MinMaxScaler fit(const Eigen::MatrixXd& x);
    Eigen::MatrixXd transform(const Eigen::MatrixXd& x) const;
    Eigen::MatrixXd inverse(const Eigen::MatrixXd& scaled) const;
};

/// Fractions of matching and mismatching predictions.
struct Agreement {
    double match = 0.0;
    double mismatch = 0.0;
    std::size_t count = 0;
};

Agreement evaluate(const std::vector<int>& predicted, const std::vector<int>& truth);

}  // namespace gridstudies::ml
