#include "gridstudies/ml/knn.hpp"

#include <algorithm>
#include <map>
#include <numeric>

#include "gridstudies/common/error.hpp"

namespace gridstudies::ml {

KnnModel::KnnModel(const Dataset& train, int k) : features_(train.features), labels_(train.labels), k_(k) {
    train.validate();
    if (k < 1 || static_cast<std::size_t>(k) > train.size()) throw InvalidArgument("k must lie in 1..n_train");
}

int KnnModel::predict(const Eigen::VectorXd& x) const {
    if (x.size() != features_.cols()) throw InvalidArgument("query dimension mismatch");
    const auto n = static_cast<std::size_t>(features_.rows());
    std::vector<double> dist(n);
    for (std::size_t i = 0; i < n; ++i) {
        dist[i] = (features_.row(static_cast<Eigen::Index>(i)).transpose() - x).norm();
    }
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    auto closer = [&](std::size_t a, std::size_t b) { return dist[a] < dist[b] || (dist[a] == dist[b] && a < b); };
    std::partial_sort(order.begin(), order.begin() + k_, order.end(), closer);

    struct Tally {
        int votes = 0;
        double total = 0.0;
    };
    std::map<int, Tally> tally;
    for (int j = 0; j < k_; ++j) {
        auto& t = tally[labels_[order[j]]];
        ++t.votes;
        t.total += dist[order[j]];
    }
    int best = 0;
    const Tally* best_t = nullptr;
    for (const auto& [label, t] : tally) {
        // Map iteration is in ascending label order, so strict comparisons keep the lower label.
        if (!best_t || t.votes > best_t->votes ||
            (t.votes == best_t->votes && t.total / t.votes < best_t->total / best_t->votes)) {
            best = label;
            best_t = &t;
        }
    }
    return best;
}

std::vector<int> KnnModel::predict_all(const Eigen::MatrixXd& x) const {
    std::vector<int> out;
    out.reserve(static_cast<std::size_t>(x.rows()));
    for (Eigen::Index r = 0; r < x.rows(); ++r) out.push_back(predict(Eigen::VectorXd(x.row(r).transpose())));
    return out;
}

}  // namespace gridstudies::ml
