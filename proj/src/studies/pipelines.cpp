#include "gridstudies/studies/pipelines.hpp"

#include <algorithm>

#include "gridstudies/common/error.hpp"
#include "gridstudies/ml/knn.hpp"

namespace gridstudies::studies {

ml::Dataset fault_dataset(const std::vector<faultlab::DatasetRow>& rows) {
    ml::Dataset d;
    d.features.resize(static_cast<Eigen::Index>(rows.size()), 9);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto r = static_cast<Eigen::Index>(i);
        for (int p = 0; p < 3; ++p) {
            d.features(r, p) = rows[i].v_bus[static_cast<std::size_t>(p)];
            d.features(r, 3 + p) = rows[i].v_load[static_cast<std::size_t>(p)];
            d.features(r, 6 + p) = rows[i].v_fault[static_cast<std::size_t>(p)];
        }
        d.labels.push_back(rows[i].code);
    }
    d.feature_names = {"VbusA", "VbusB", "VbusC", "VloadA", "VloadB", "VloadC", "VfaultA", "VfaultB", "VfaultC"};
    d.label_name = "Code";
    return d;
}

int KnnCurve::best_k() const {
    if (agreement.empty()) throw InvalidArgument("empty kNN curve");
    return static_cast<int>(std::max_element(agreement.begin(), agreement.end()) - agreement.begin()) + 1;
}

KnnCurve fault_knn_curve(const faultlab::FaultSystem& system, double r_max, std::uint64_t seed, int k_max,
                         unsigned threads) {
    if (k_max < 1) throw InvalidArgument("k_max must be at least 1");
    const auto train = fault_dataset(faultlab::build_dataset(faultlab::enumerate_train_cases(), system, threads));
    const auto test = fault_dataset(faultlab::build_dataset(faultlab::sample_test_cases(seed, r_max), system, threads));
    KnnCurve c{r_max, seed, {}};
    for (int k = 1; k <= k_max; ++k) {
        ml::KnnModel m(train, k);
        c.agreement.push_back(ml::evaluate(m.predict_all(test.features), test.labels).match);
    }
    return c;
}

ml::Dataset stability_dataset(const std::vector<stability::SweepRow>& rows) {
    ml::Dataset d;
    d.features.resize(static_cast<Eigen::Index>(rows.size()), 2);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        d.features(static_cast<Eigen::Index>(i), 0) = rows[i].power_mw;
        d.features(static_cast<Eigen::Index>(i), 1) = rows[i].duration_ms;
        d.labels.push_back(rows[i].stability);
    }
    d.feature_names = {"Power", "Duration"};
    d.label_name = "Stability";
    return d;
}

const ModelScore& StabilityMlResult::score(const std::string& name) const {
    for (const auto& s : scores) {
        if (name == s.name) return s;
    }
    throw InvalidArgument("no model named " + name);
}

namespace {

std::vector<int> layout_for(int inputs, const std::vector<int>& hidden) {
    std::vector<int> l{inputs};
    l.insert(l.end(), hidden.begin(), hidden.end());
    l.push_back(1);
    return l;
}

Eigen::MatrixXd targets(const ml::Dataset& d) {
    Eigen::MatrixXd y(static_cast<Eigen::Index>(d.size()), 1);
    for (std::size_t i = 0; i < d.size(); ++i) {
        const int l = d.labels[i];
        if (l != 0 && l != 1) throw InvalidArgument("MLP classification needs labels 0 and 1");
        y(static_cast<Eigen::Index>(i), 0) = l;
    }
    return y;
}

std::vector<int> mlp_labels(const ml::MlpModel& m, const Eigen::MatrixXd& x) {
    std::vector<int> out;
    for (Eigen::Index i = 0; i < x.rows(); ++i) out.push_back(ml::mlp_predict_label(m, x.row(i).transpose()));
    return out;
}

}  // namespace

StabilityMlResult stability_ml(const ml::Dataset& data, const StabilityMlConfig& config) {
    data.validate();
    StabilityMlResult r;
    auto parts = ml::split(data, config.train_fraction, config.seed);
    r.scaler = ml::MinMaxScaler::fit(parts.first.features);
    r.train = std::move(parts.first);
    r.test = std::move(parts.second);
    r.train.features = r.scaler.transform(r.train.features);
    r.test.features = r.scaler.transform(r.test.features);
    if (r.test.size() == 0) throw InvalidArgument("train fraction leaves no test rows");

    r.svm = ml::svm_train(r.train, config.svm);
    r.scores.push_back({"svm", ml::evaluate(ml::svm_predict(r.svm, r.test.features), r.test.labels)});

    const Eigen::MatrixXd y = targets(r.train);
    const auto deep_layout = layout_for(r.train.dims(), config.deep_hidden);
    r.gradient_error = ml::gradient_check(ml::mlp_init(deep_layout, config.seed), r.train.features, y);
    r.deep = ml::mlp_train(r.train.features, y, deep_layout, config.seed, config.mlp).model;
    r.scores.push_back({"mlp-deep", ml::evaluate(mlp_labels(r.deep, r.test.features), r.test.labels)});
    r.narrow = ml::mlp_train(r.train.features, y, layout_for(r.train.dims(), config.narrow_hidden), config.seed, config.mlp).model;
    r.scores.push_back({"mlp-narrow", ml::evaluate(mlp_labels(r.narrow, r.test.features), r.test.labels)});

    ml::KnnModel knn(r.train, config.knn_k);
    r.scores.push_back({"knn", ml::evaluate(knn.predict_all(r.test.features), r.test.labels)});
    return r;
}

std::vector<stability::SweepRow> reference_stability_grid(const stability::SmibModel& model, unsigned threads) {
    return stability::sweep(model, stability::linspace(70.0, 250.0, 67), {0.6, 0.7, 0.8, 0.9, 1.0}, stability::FaultEvent{},
                            stability::SimOptions{}, threads);
}

}  // namespace gridstudies::studies
