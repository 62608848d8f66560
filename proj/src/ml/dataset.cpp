#include "gridstudies/ml/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "gridstudies/common/error.hpp"
#include "gridstudies/common/rng.hpp"

namespace gridstudies::ml {

void Dataset::validate() const {
    if (labels.empty()) throw InvalidArgument("dataset is empty");
    if (static_cast<std::size_t>(features.rows()) != labels.size()) {
        throw InvalidArgument("feature rows and labels differ in count");
    }
    if (!feature_names.empty() && static_cast<int>(feature_names.size()) != dims()) {
        throw InvalidArgument("feature name count does not match columns");
    }
    if (!features.allFinite()) throw InvalidArgument("dataset contains non-finite values");
}

Dataset Dataset::subset(const std::vector<std::size_t>& rows) const {
    Dataset out;
    out.feature_names = feature_names;
    out.label_name = label_name;
    out.features.resize(static_cast<Eigen::Index>(rows.size()), features.cols());
    out.labels.reserve(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i] >= size()) throw InvalidArgument("row index out of range");
        out.features.row(static_cast<Eigen::Index>(i)) = features.row(static_cast<Eigen::Index>(rows[i]));
        out.labels.push_back(labels[rows[i]]);
    }
    return out;
}

std::pair<Dataset, Dataset> split(const Dataset& data, double fraction, std::uint64_t seed) {
    if (!(fraction > 0.0 && fraction < 1.0)) throw InvalidArgument("split fraction must lie in (0, 1)");
    const std::size_t n = data.size();
    const auto first = static_cast<std::size_t>(std::llround(fraction * static_cast<double>(n)));
    if (first == 0 || first == n) throw InvalidArgument("split leaves one side empty");
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    Rng rng(seed);
    for (std::size_t i = n - 1; i > 0; --i) std::swap(order[i], order[rng.below(i + 1)]);
    std::vector<std::size_t> a(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(first));
    std::vector<std::size_t> b(order.begin() + static_cast<std::ptrdiff_t>(first), order.end());
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    return {data.subset(a), data.subset(b)};
}

MinMaxScaler MinMaxScaler::fit(const Eigen::MatrixXd& x) {
    if (x.rows() == 0) throw InvalidArgument("cannot fit a scaler on no rows");
    return {x.colwise().minCoeff().transpose(), x.colwise().maxCoeff().transpose()};
}

Eigen::MatrixXd MinMaxScaler::transform(const Eigen::MatrixXd& x) const {
    if (x.cols() != lower.size()) throw InvalidArgument("scaler column count mismatch");
    Eigen::MatrixXd out(x.rows(), x.cols());
    for (Eigen::Index c = 0; c < x.cols(); ++c) {
        const double span = upper[c] - lower[c];
        if (span > 0.0) {
            out.col(c) = (x.col(c).array() - lower[c]) / span;
        } else {
            out.col(c).setZero();
        }
    }
    return out;
}

Eigen::MatrixXd MinMaxScaler::inverse(const Eigen::MatrixXd& scaled) const {
    if (scaled.cols() != lower.size()) throw InvalidArgument("scaler column count mismatch");
    Eigen::MatrixXd out(scaled.rows(), scaled.cols());
    for (Eigen::Index c = 0; c < scaled.cols(); ++c) {
        out.col(c) = scaled.col(c).array() * (upper[c] - lower[c]) + lower[c];
    }
    return out;
}

Agreement evaluate(const std::vector<int>& predicted, const std::vector<int>& truth) {
    if (truth.empty()) throw InvalidArgument("cannot evaluate on an empty test set");
    if (predicted.size() != truth.size()) throw InvalidArgument("prediction and truth sizes differ");
    std::size_t hits = 0;
    for (std::size_t i = 0; i < truth.size(); ++i) hits += predicted[i] == truth[i] ? 1 : 0;
    Agreement a;
    a.count = truth.size();
    a.match = static_cast<double>(hits) / static_cast<double>(truth.size());
    a.mismatch = static_cast<double>(truth.size() - hits) / static_cast<double>(truth.size());
    return a;
}

}  // namespace gridstudies::ml
