#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include "gridstudies/ml/dataset.hpp"
#include "gridstudies/ml/knn.hpp"
#include "gridstudies/ml/mlp.hpp"
#include "gridstudies/ml/svm.hpp"

namespace gridstudies::ml {

/// JSON documents tagged with "model": "knn" | "svm" | "mlp". Numbers are
/// written with full round-trip precision. Optional scalers are stored along
/// with the model they were used with.
std::string to_json(const KnnModel& model);
std::string to_json(const SvmModel& model);
std::string to_json(const MlpModel& model, const std::optional<MinMaxScaler>& scaler = std::nullopt);

KnnModel knn_from_json(const std::string& text);
SvmModel svm_from_json(const std::string& text);
MlpModel mlp_from_json(const std::string& text, std::optional<MinMaxScaler>* scaler = nullptr);

void save_text(const std::filesystem::path& path, const std::string& text);
std::string load_text(const std::filesystem::path& path);

}  // namespace gridstudies::ml
