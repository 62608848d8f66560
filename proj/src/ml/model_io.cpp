#include "gridstudies/ml/model_io.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "gridstudies/common/error.hpp"

namespace gridstudies::ml {

using nlohmann::json;

namespace {

json matrix_json(const Eigen::MatrixXd& m) {
    json rows = json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        json row = json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
        rows.push_back(row);
    }
    return json{{"rows", m.rows()}, {"cols", m.cols()}, {"data", rows}};
}

Eigen::MatrixXd json_matrix(const json& j) {
    const auto rows = j.at("rows").get<Eigen::Index>();
    const auto cols = j.at("cols").get<Eigen::Index>();
    const auto& data = j.at("data");
    if (static_cast<Eigen::Index>(data.size()) != rows) throw ParseError("matrix row count mismatch");
    Eigen::MatrixXd m(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r) {
        if (static_cast<Eigen::Index>(data[r].size()) != cols) throw ParseError("matrix column count mismatch");
        for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = data[r][c].get<double>();
    }
    return m;
}

json vector_json(const Eigen::VectorXd& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

Eigen::VectorXd json_vector(const json& j) {
    const auto v = j.get<std::vector<double>>();
    return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

json parse(const std::string& text, const char* kind) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("invalid model document: ") + e.what());
    }
    if (!doc.is_object() || doc.value("model", "") != kind) {
        throw ParseError(std::string("document is not a ") + kind + " model");
    }
    return doc;
}

template <typename F>
auto guarded(F&& f) {
    try {
        return f();
    } catch (const json::exception& e) {
        throw ParseError(std::string("malformed model document: ") + e.what());
    }
}

}  // namespace

std::string to_json(const KnnModel& model) {
    json doc{{"model", "knn"}, {"k", model.k()}, {"features", matrix_json(model.features())}, {"labels", model.labels()}};
    return doc.dump(1);
}

KnnModel knn_from_json(const std::string& text) {
    const auto doc = parse(text, "knn");
    return guarded([&] {
        Dataset d;
        d.features = json_matrix(doc.at("features"));
        d.labels = doc.at("labels").get<std::vector<int>>();
        return KnnModel(d, doc.at("k").get<int>());
    });
}

std::string to_json(const SvmModel& model) {
    json machines = json::array();
    for (const auto& m : model.machines) {
        machines.push_back({{"positive", m.positive_label},
                            {"negative", m.negative_label},
                            {"support_vectors", matrix_json(m.support_vectors)},
                            {"coefficients", vector_json(m.coefficients)},
                            {"alphas", vector_json(m.alphas)},
                            {"rho", m.rho},
                            {"kkt_residual", m.kkt_residual},
                            {"iterations", m.iterations}});
    }
    json doc{{"model", "svm"},
             {"kernel", model.kernel == KernelKind::Rbf ? "rbf" : "linear"},
             {"sigma", model.sigma},
             {"c", model.c},
             {"classes", model.classes},
             {"machines", machines}};
    return doc.dump(1);
}

SvmModel svm_from_json(const std::string& text) {
    const auto doc = parse(text, "svm");
    return guarded([&] {
        SvmModel model;
        const auto kernel = doc.at("kernel").get<std::string>();
        if (kernel != "rbf" && kernel != "linear") throw ParseError("unknown kernel " + kernel);
        model.kernel = kernel == "rbf" ? KernelKind::Rbf : KernelKind::Linear;
        model.sigma = doc.at("sigma").get<double>();
        model.c = doc.at("c").get<double>();
        model.classes = doc.at("classes").get<std::vector<int>>();
        for (const auto& j : doc.at("machines")) {
            BinarySvm m;
            m.positive_label = j.at("positive").get<int>();
            m.negative_label = j.at("negative").get<int>();
            m.support_vectors = json_matrix(j.at("support_vectors"));
            m.coefficients = json_vector(j.at("coefficients"));
            m.alphas = json_vector(j.at("alphas"));
            m.rho = j.at("rho").get<double>();
            m.kkt_residual = j.at("kkt_residual").get<double>();
            m.iterations = j.at("iterations").get<std::size_t>();
            model.machines.push_back(std::move(m));
        }
        return model;
    });
}

std::string to_json(const MlpModel& model, const std::optional<MinMaxScaler>& scaler) {
    json layers = json::array();
    for (std::size_t l = 0; l < model.weights.size(); ++l) {
        layers.push_back({{"weights", matrix_json(model.weights[l])}, {"biases", vector_json(model.biases[l])}});
    }
    json doc{{"model", "mlp"}, {"layout", model.layout}, {"layers", layers}};
    if (scaler) doc["scaler"] = {{"lower", vector_json(scaler->lower)}, {"upper", vector_json(scaler->upper)}};
    return doc.dump(1);
}

MlpModel mlp_from_json(const std::string& text, std::optional<MinMaxScaler>* scaler) {
    const auto doc = parse(text, "mlp");
    return guarded([&] {
        MlpModel model;
        model.layout = doc.at("layout").get<std::vector<int>>();
        for (const auto& l : doc.at("layers")) {
            model.weights.push_back(json_matrix(l.at("weights")));
            model.biases.push_back(json_vector(l.at("biases")));
        }
        if (model.weights.size() + 1 != model.layout.size()) throw ParseError("layer count does not match layout");
        for (std::size_t l = 0; l < model.weights.size(); ++l) {
            if (model.weights[l].rows() != model.layout[l + 1] || model.weights[l].cols() != model.layout[l] ||
                model.biases[l].size() != model.layout[l + 1]) {
                throw ParseError("layer " + std::to_string(l) + " shape does not match layout");
            }
        }
        if (scaler) {
            if (doc.contains("scaler")) {
                *scaler = MinMaxScaler{json_vector(doc["scaler"].at("lower")), json_vector(doc["scaler"].at("upper"))};
            } else {
                scaler->reset();
            }
        }
        return model;
    });
}

void save_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write " + path.string());
    out << text << '\n';
}

std::string load_text(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot read " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace gridstudies::ml
