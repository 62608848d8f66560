#include <doctest.h>

#include <algorithm>
#include <map>
#include <numeric>
#include <set>

#include "gridstudies/common/error.hpp"
#include "gridstudies/common/rng.hpp"
#include "gridstudies/ml/dataset.hpp"
#include "gridstudies/ml/knn.hpp"
#include "gridstudies/ml/mlp.hpp"
#include "gridstudies/ml/model_io.hpp"
#include "gridstudies/ml/svm.hpp"

using namespace gridstudies;
using namespace gridstudies::ml;

namespace {

Dataset blobs(std::uint64_t seed, int per_class, const std::vector<Eigen::Vector2d>& centres, double spread) {
    Rng rng(seed);
    Dataset d;
    d.features.resize(per_class * static_cast<int>(centres.size()), 2);
    int row = 0;
    for (std::size_t c = 0; c < centres.size(); ++c) {
        for (int i = 0; i < per_class; ++i, ++row) {
            d.features(row, 0) = centres[c].x() + rng.normal(0.0, spread);
            d.features(row, 1) = centres[c].y() + rng.normal(0.0, spread);
            d.labels.push_back(static_cast<int>(c));
        }
    }
    return d;
}

Dataset xor_set() {
    Dataset d;
    d.features.resize(4, 2);
    d.features << 0, 0, 0, 1, 1, 0, 1, 1;
    d.labels = {0, 1, 1, 0};
    return d;
}

// Exhaustive scan: all distances, stable ordering, explicit vote table.
int brute_knn(const Dataset& train, const Eigen::VectorXd& q, int k) {
    std::vector<std::pair<double, std::size_t>> all;
    for (std::size_t i = 0; i < train.size(); ++i) {
        double s = 0.0;
        for (int c = 0; c < train.dims(); ++c) {
            const double diff = train.features(static_cast<Eigen::Index>(i), c) - q[c];
            s += diff * diff;
        }
        all.emplace_back(std::sqrt(s), i);
    }
    std::sort(all.begin(), all.end());
    std::map<int, std::pair<int, double>> votes;
    for (int j = 0; j < k; ++j) {
        auto& v = votes[train.labels[all[j].second]];
        v.first += 1;
        v.second += all[j].first;
    }
    int best = -1;
    std::pair<int, double> bv{-1, 0.0};
    for (const auto& [label, v] : votes) {
        const bool better = v.first > bv.first || (v.first == bv.first && v.second / v.first < bv.second / bv.first);
        if (better) {
            best = label;
            bv = v;
        }
    }
    return best;
}

Eigen::MatrixXd labels_column(const std::vector<int>& labels) {
    Eigen::MatrixXd y(static_cast<Eigen::Index>(labels.size()), 1);
    for (std::size_t i = 0; i < labels.size(); ++i) y(static_cast<Eigen::Index>(i), 0) = labels[i];
    return y;
}

}  // namespace

TEST_CASE("split sizes, disjointness and determinism") {
    for (auto [n, frac, first] : {std::tuple{4418, 0.5, 2209}, std::tuple{335, 0.8, 268}}) {
        Dataset d;
        d.features.resize(n, 1);
        for (int i = 0; i < n; ++i) {
            d.features(i, 0) = i;
            d.labels.push_back(i % 2);
        }
        const auto [a, b] = split(d, frac, 42);
        CHECK(static_cast<int>(a.size()) == first);
        CHECK(static_cast<int>(b.size()) == n - first);
        std::set<int> seen;
        for (const auto* part : {&a, &b}) {
            for (Eigen::Index r = 0; r < part->features.rows(); ++r) seen.insert(static_cast<int>(part->features(r, 0)));
        }
        CHECK(static_cast<int>(seen.size()) == n);
        const auto again = split(d, frac, 42);
        CHECK(again.first.features == a.features);
        CHECK(again.second.labels == b.labels);
    }
    Dataset tiny;
    tiny.features = Eigen::MatrixXd::Zero(2, 1);
    tiny.labels = {0, 1};
    CHECK_THROWS_AS(split(tiny, 0.1, 1), InvalidArgument);
    CHECK_THROWS_AS(split(tiny, 1.0, 1), InvalidArgument);
}

TEST_CASE("dataset validation") {
    Dataset d;
    CHECK_THROWS_AS(d.validate(), InvalidArgument);
    d.features = Eigen::MatrixXd::Zero(2, 2);
    d.labels = {1};
    CHECK_THROWS_AS(d.validate(), InvalidArgument);
    d.labels = {1, 2};
    d.features(1, 1) = std::nan("");
    CHECK_THROWS_AS(d.validate(), InvalidArgument);
}

TEST_CASE("knn basics") {
    const auto d = blobs(1, 10, {{0, 0}, {3, 3}}, 0.5);
    const KnnModel one(d, 1);
    for (std::size_t i = 0; i < d.size(); ++i) {
        CHECK(one.predict(Eigen::VectorXd(d.features.row(static_cast<Eigen::Index>(i)).transpose())) == d.labels[i]);
    }
    Dataset four;
    four.features.resize(4, 1);
    four.features << 0, 1, 2, 100;
    four.labels = {5, 5, 5, 2};
    const KnnModel all(four, 4);
    for (double q : {-50.0, 0.0, 99.0, 1e6}) CHECK(all.predict(Eigen::VectorXd::Constant(1, q)) == 5);
    CHECK_THROWS_AS(KnnModel(four, 5), InvalidArgument);
    CHECK_THROWS_AS(KnnModel(four, 0), InvalidArgument);
}

TEST_CASE("knn even-k ties go to the closer class, then the lower label") {
    Dataset d;
    d.features.resize(2, 1);
    d.features << 0.0, 1.0;
    d.labels = {7, 3};
    const KnnModel m(d, 2);
    CHECK(m.predict(Eigen::VectorXd::Constant(1, 0.2)) == 7);
    CHECK(m.predict(Eigen::VectorXd::Constant(1, 0.9)) == 3);
    CHECK(m.predict(Eigen::VectorXd::Constant(1, 0.5)) == 3);
}

TEST_CASE("knn matches an exhaustive scan") {
    const auto train = blobs(5, 25, {{0, 0}, {1.5, 1.0}}, 0.8);
    Rng rng(9);
    for (int k = 1; k <= 6; ++k) {
        const KnnModel m(train, k);
        for (int q = 0; q < 100; ++q) {
            Eigen::VectorXd x(2);
            x << rng.uniform(-2, 3), rng.uniform(-2, 3);
            CHECK(m.predict(x) == brute_knn(train, x, k));
        }
    }
}

TEST_CASE("knn is invariant to a common positive rescaling") {
    const auto train = blobs(6, 20, {{0, 0}, {1, 1}, {2, 0}}, 0.6);
    auto scaled = train;
    scaled.features *= 37.5;
    Rng rng(4);
    for (int k : {1, 3, 5}) {
        const KnnModel a(train, k), b(scaled, k);
        for (int q = 0; q < 50; ++q) {
            Eigen::VectorXd x(2);
            x << rng.uniform(-1, 3), rng.uniform(-1, 2);
            CHECK(a.predict(x) == b.predict(Eigen::VectorXd(x * 37.5)));
        }
    }
}

TEST_CASE("svm on separable blobs") {
    const auto d = blobs(2, 30, {{0, 0}, {4, 4}}, 0.5);
    const auto model = svm_train(d);
    CHECK(evaluate(svm_predict(model, d.features), d.labels).match == 1.0);
    for (const auto& m : model.machines) {
        CHECK(m.kkt_residual < 1e-3);
        for (Eigen::Index i = 0; i < m.alphas.size(); ++i) {
            CHECK(m.alphas[i] > 0.0);
            CHECK(m.alphas[i] <= model.c + 1e-12);
        }
        // Equality constraint sum alpha_i y_i = 0.
        CHECK(std::abs(m.coefficients.sum()) < 1e-9);
    }
}

TEST_CASE("xor needs the rbf kernel") {
    const auto d = xor_set();
    SvmParams rbf;
    rbf.c = 10.0;
    rbf.sigma = 0.5;
    CHECK(evaluate(svm_predict(svm_train(d, rbf), d.features), d.labels).match == 1.0);
    SvmParams lin;
    lin.kernel = KernelKind::Linear;
    lin.c = 10.0;
    CHECK(evaluate(svm_predict(svm_train(d, lin), d.features), d.labels).match < 1.0);
}

TEST_CASE("svm verdicts do not depend on row order") {
    const auto d = blobs(3, 40, {{0, 0}, {2, 1}}, 0.7);
    std::vector<std::size_t> order(d.size());
    std::iota(order.begin(), order.end(), 0);
    std::reverse(order.begin(), order.end());
    std::rotate(order.begin(), order.begin() + 17, order.end());
    const auto a = svm_train(d), b = svm_train(d.subset(order));
    Rng rng(12);
    Eigen::MatrixXd q(200, 2);
    for (Eigen::Index r = 0; r < q.rows(); ++r) q.row(r) << rng.uniform(-2, 4), rng.uniform(-2, 3);
    CHECK(svm_predict(a, q) == svm_predict(b, q));
}

TEST_CASE("one-vs-one multi-class svm") {
    const auto d = blobs(8, 20, {{0, 0}, {5, 0}, {0, 5}}, 0.5);
    const auto model = svm_train(d);
    CHECK(model.machines.size() == 3);
    CHECK(evaluate(svm_predict(model, d.features), d.labels).match == 1.0);
    Dataset single = d.subset({0, 1, 2});
    CHECK_THROWS_AS(svm_train(single), InvalidArgument);
}

TEST_CASE("svm iteration budget") {
    const auto d = blobs(3, 40, {{0, 0}, {0.5, 0.5}}, 1.0);
    SvmParams p;
    p.max_iterations = 2;
    CHECK_THROWS_AS(svm_train(d, p), ConvergenceError);
}

TEST_CASE("median pairwise distance") {
    Eigen::MatrixXd x(3, 1);
    x << 0, 1, 3;
    // Distances 1, 3, 2.
    CHECK(median_pairwise_distance(x) == doctest::Approx(2.0));
}

TEST_CASE("mlp learns xor") {
    const auto d = xor_set();
    MlpParams p;
    p.epochs = 20000;
    p.learning_rate = 1.0;
    const auto fit = mlp_train(d.features, labels_column(d.labels), {2, 2, 1}, 3, p);
    CHECK(fit.final_loss < 0.01);
    CHECK(fit.final_loss <= fit.initial_loss);
    for (std::size_t i = 0; i < 4; ++i) {
        CHECK(mlp_predict_label(fit.model, Eigen::VectorXd(d.features.row(static_cast<Eigen::Index>(i)).transpose())) ==
              d.labels[i]);
    }
}

TEST_CASE("zero epochs keep the initial weights") {
    const auto d = xor_set();
    MlpParams p;
    p.epochs = 0;
    const auto fit = mlp_train(d.features, labels_column(d.labels), {2, 3, 1}, 17, p);
    const auto init = mlp_init({2, 3, 1}, 17);
    for (std::size_t l = 0; l < init.weights.size(); ++l) {
        CHECK(fit.model.weights[l] == init.weights[l]);
        CHECK(fit.model.biases[l] == init.biases[l]);
    }
    CHECK(fit.epochs_run == 0);
    CHECK(fit.final_loss == fit.initial_loss);
}

TEST_CASE("analytic gradient agrees with finite differences") {
    Rng rng(2);
    Eigen::MatrixXd x(10, 2), y(10, 1);
    for (int r = 0; r < 10; ++r) {
        x.row(r) << rng.uniform(), rng.uniform();
        y(r, 0) = rng.uniform() > 0.5 ? 1.0 : 0.0;
    }
    const auto model = mlp_init({2, 3, 1}, 5);
    CHECK(gradient_check(model, x, y) < 1e-4);

    auto zero = model;
    for (auto& w : zero.weights) w.setZero();
    for (auto& b : zero.biases) b.setZero();
    CHECK(gradient_check(zero, x, y) < 1e-4);

    double prev = 0.0;
    for (double h : {1e-4, 1e-3, 1e-2}) {
        const double err = gradient_check(model, x, y, h);
        CHECK(err > prev);
        prev = err;
    }
    auto deep = mlp_init({2, 4, 3, 1}, 8);
    CHECK(gradient_check(deep, x, y) < 1e-4);
}

TEST_CASE("min-max scaling") {
    Eigen::MatrixXd x(3, 3);
    x << 1, 10, 5, 2, 20, 5, 4, 15, 5;
    const auto s = MinMaxScaler::fit(x);
    const auto t = s.transform(x);
    CHECK(t.minCoeff() >= 0.0);
    CHECK(t.maxCoeff() <= 1.0);
    CHECK(t(0, 0) == 0.0);
    CHECK(t(2, 0) == 1.0);
    CHECK(t.col(2).isZero());
    const auto back = s.inverse(t);
    CHECK((back.leftCols(2) - x.leftCols(2)).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("agreement table") {
    CHECK(evaluate({1, 2, 3}, {1, 2, 3}).match == 1.0);
    const auto half = evaluate({0, 0, 0, 0}, {0, 1, 0, 1});
    CHECK(half.match == 0.5);
    CHECK(half.match + half.mismatch == 1.0);
    CHECK_THROWS_AS(evaluate({}, {}), InvalidArgument);
    CHECK_THROWS_AS(evaluate({1}, {1, 2}), InvalidArgument);
}

TEST_CASE("model documents round trip") {
    const auto d = blobs(4, 15, {{0, 0}, {2, 2}}, 0.6);
    const KnnModel knn(d, 3);
    const auto knn2 = knn_from_json(to_json(knn));
    CHECK(knn2.k() == 3);
    CHECK(knn2.predict_all(d.features) == knn.predict_all(d.features));

    const auto svm = svm_train(d);
    const auto svm2 = svm_from_json(to_json(svm));
    CHECK(svm_predict(svm2, d.features) == svm_predict(svm, d.features));
    CHECK(svm2.machines[0].rho == svm.machines[0].rho);

    const auto mlp = mlp_init({2, 4, 1}, 6);
    std::optional<MinMaxScaler> scaler = MinMaxScaler::fit(d.features), back;
    const auto mlp2 = mlp_from_json(to_json(mlp, scaler), &back);
    REQUIRE(back.has_value());
    CHECK(back->upper == scaler->upper);
    CHECK(mlp2.weights[1] == mlp.weights[1]);

    CHECK_THROWS_AS(svm_from_json(to_json(knn)), ParseError);
    CHECK_THROWS_AS(mlp_from_json("{not json"), ParseError);
    CHECK_THROWS_AS(mlp_from_json(R"({"model":"mlp","layout":[2,1],"layers":[]})"), ParseError);
}
