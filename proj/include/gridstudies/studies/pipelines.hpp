#pragma once

#include <cstdint>
#include <vector>

#include "gridstudies/faultlab/faultlab.hpp"
#include "gridstudies/ml/dataset.hpp"
#include "gridstudies/ml/mlp.hpp"
#include "gridstudies/ml/svm.hpp"
#include "gridstudies/stability/smib.hpp"

namespace gridstudies::studies {

/// Nine per-unit voltage features (bus, load, fault for A, B, C) labelled
/// with the location-type code.
ml::Dataset fault_dataset(const std::vector<faultlab::DatasetRow>& rows);

struct KnnCurve {
    double r_max = 0.0;
    std::uint64_t seed = 0;
    std::vector<double> agreement;  // index k-1

    /// Smallest k with the highest agreement.
    int best_k() const;
};

/// Trains on the bolted grid and scores k = 1..k_max on one random test set.
KnnCurve fault_knn_curve(const faultlab::FaultSystem& system, double r_max, std::uint64_t seed, int k_max = 4,
                         unsigned threads = 0);

/// Features Power (MW) and Duration (ms), label Stability.
ml::Dataset stability_dataset(const std::vector<stability::SweepRow>& rows);

struct StabilityMlConfig {
    double train_fraction = 0.8;
    std::uint64_t seed = 1;
    ml::SvmParams svm;
    std::vector<int> deep_hidden{8, 8};
    std::vector<int> narrow_hidden{1};
    ml::MlpParams mlp;
    int knn_k = 1;
};

struct ModelScore {
    const char* name = "";
    ml::Agreement test;
};

struct StabilityMlResult {
    ml::Dataset train;  // scaled to [0, 1]
    ml::Dataset test;
    ml::MinMaxScaler scaler;
    ml::SvmModel svm;
    ml::MlpModel deep;
    ml::MlpModel narrow;
    std::vector<ModelScore> scores;  // svm, mlp-deep, mlp-narrow, knn
    double gradient_error = 0.0;     // relative, deep network at its initial weights

    const ModelScore& score(const std::string& name) const;
};

/// Split, min-max scaling fitted on the training part, then every model.
StabilityMlResult stability_ml(const ml::Dataset& data, const StabilityMlConfig& config);

/// 67 durations over [70, 250] ms times power factors 0.6..1.0.
std::vector<stability::SweepRow> reference_stability_grid(const stability::SmibModel& model = {}, unsigned threads = 0);

}  // namespace gridstudies::studies
