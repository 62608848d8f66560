#include "gridstudies/ml/mlp.hpp"

#include <cmath>
#include <string>

#include "gridstudies/common/error.hpp"
#include "gridstudies/common/rng.hpp"

namespace gridstudies::ml {

namespace {

Eigen::VectorXd logistic(const Eigen::VectorXd& z) { return (1.0 + (-z.array()).exp()).inverse().matrix(); }

Eigen::VectorXd flatten(const MlpModel& m) {
    Eigen::VectorXd out(static_cast<Eigen::Index>(m.parameter_count()));
    Eigen::Index at = 0;
    for (std::size_t l = 0; l < m.weights.size(); ++l) {
        const auto& w = m.weights[l];
        out.segment(at, w.size()) = Eigen::Map<const Eigen::VectorXd>(w.data(), w.size());
        at += w.size();
        out.segment(at, m.biases[l].size()) = m.biases[l];
        at += m.biases[l].size();
    }
    return out;
}

void unflatten(MlpModel& m, const Eigen::VectorXd& p) {
    Eigen::Index at = 0;
    for (std::size_t l = 0; l < m.weights.size(); ++l) {
        auto& w = m.weights[l];
        Eigen::Map<Eigen::VectorXd>(w.data(), w.size()) = p.segment(at, w.size());
        at += w.size();
        m.biases[l] = p.segment(at, m.biases[l].size());
        at += m.biases[l].size();
    }
}

void check_shapes(const MlpModel& m, const Eigen::MatrixXd& x, const Eigen::MatrixXd& y) {
    if (m.layout.size() < 2) throw InvalidArgument("network needs input and output layers");
    if (x.cols() != m.layout.front()) throw InvalidArgument("input width does not match the layout");
    if (y.cols() != m.layout.back()) throw InvalidArgument("target width does not match the layout");
    if (x.rows() != y.rows()) throw InvalidArgument("inputs and targets differ in row count");
}

}  // namespace

Eigen::VectorXd MlpModel::forward(const Eigen::VectorXd& x) const {
    if (layout.empty() || x.size() != layout.front()) throw InvalidArgument("input width does not match the layout");
    Eigen::VectorXd a = x;
    for (std::size_t l = 0; l < weights.size(); ++l) a = logistic(weights[l] * a + biases[l]);
    return a;
}

std::size_t MlpModel::parameter_count() const {
    std::size_t n = 0;
    for (std::size_t l = 0; l < weights.size(); ++l) n += static_cast<std::size_t>(weights[l].size() + biases[l].size());
    return n;
}

MlpModel mlp_init(const std::vector<int>& layout, std::uint64_t seed) {
    if (layout.size() < 2) throw InvalidArgument("network needs input and output layers");
    for (int s : layout) {
        if (s < 1) throw InvalidArgument("layer sizes must be positive");
    }
    Rng rng(seed);
    MlpModel m;
    m.layout = layout;
    for (std::size_t l = 0; l + 1 < layout.size(); ++l) {
        Eigen::MatrixXd w(layout[l + 1], layout[l]);
        Eigen::VectorXd b(layout[l + 1]);
        for (Eigen::Index i = 0; i < w.size(); ++i) w.data()[i] = rng.normal();
        for (Eigen::Index i = 0; i < b.size(); ++i) b[i] = rng.normal();
        m.weights.push_back(std::move(w));
        m.biases.push_back(std::move(b));
    }
    return m;
}

double mlp_loss(const MlpModel& model, const Eigen::MatrixXd& x, const Eigen::MatrixXd& y) {
    check_shapes(model, x, y);
    double loss = 0.0;
    for (Eigen::Index r = 0; r < x.rows(); ++r) {
        loss += 0.5 * (model.forward(x.row(r).transpose()) - y.row(r).transpose()).squaredNorm();
    }
    return loss;
}

Eigen::VectorXd mlp_gradient(const MlpModel& model, const Eigen::MatrixXd& x, const Eigen::MatrixXd& y) {
    check_shapes(model, x, y);
    const std::size_t layers = model.weights.size();
    std::vector<Eigen::MatrixXd> gw(layers);
    std::vector<Eigen::VectorXd> gb(layers);
    for (std::size_t l = 0; l < layers; ++l) {
        gw[l] = Eigen::MatrixXd::Zero(model.weights[l].rows(), model.weights[l].cols());
        gb[l] = Eigen::VectorXd::Zero(model.biases[l].size());
    }
    std::vector<Eigen::VectorXd> act(layers + 1);
    for (Eigen::Index r = 0; r < x.rows(); ++r) {
        act[0] = x.row(r).transpose();
        for (std::size_t l = 0; l < layers; ++l) act[l + 1] = logistic(model.weights[l] * act[l] + model.biases[l]);
        Eigen::VectorXd delta = (act[layers] - y.row(r).transpose()).cwiseProduct(
            act[layers].cwiseProduct((1.0 - act[layers].array()).matrix()));
        for (std::size_t l = layers; l-- > 0;) {
            gw[l] += delta * act[l].transpose();
            gb[l] += delta;
            if (l > 0) {
                delta = (model.weights[l].transpose() * delta)
                            .cwiseProduct(act[l].cwiseProduct((1.0 - act[l].array()).matrix()));
            }
        }
    }
    MlpModel shape = model;
    shape.weights = gw;
    shape.biases = gb;
    return flatten(shape);
}

MlpTrainResult mlp_train(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y, const std::vector<int>& layout,
                         std::uint64_t seed, const MlpParams& params) {
    if (params.epochs < 0) throw InvalidArgument("epoch count must be nonnegative");
    if (!(params.learning_rate > 0.0)) throw InvalidArgument("learning rate must be positive");
    MlpTrainResult out;
    out.model = mlp_init(layout, seed);
    check_shapes(out.model, x, y);
    double loss = mlp_loss(out.model, x, y);
    out.initial_loss = loss;
    double lr = params.learning_rate;
    Eigen::VectorXd p = flatten(out.model);
    MlpModel trial = out.model;
    int epoch = 0;
    for (; epoch < params.epochs && loss >= params.loss_threshold; ++epoch) {
        const Eigen::VectorXd g = mlp_gradient(out.model, x, y);
        if (!g.allFinite()) throw ConvergenceError("training diverged at epoch " + std::to_string(epoch + 1));
        const Eigen::VectorXd candidate = p - lr * g;
        unflatten(trial, candidate);
        const double next = mlp_loss(trial, x, y);
        if (!std::isfinite(next)) throw ConvergenceError("training diverged at epoch " + std::to_string(epoch + 1));
        if (next <= loss) {
            p = candidate;
            out.model = trial;
            loss = next;
            lr *= 1.05;
        } else {
            lr *= 0.5;
            if (lr < 1e-300) break;
        }
    }
    out.final_loss = loss;
    out.epochs_run = epoch;
    return out;
}

int mlp_predict_label(const MlpModel& model, const Eigen::VectorXd& x) {
    return model.forward(x)[0] > 0.5 ? 1 : 0;
}

double gradient_check(const MlpModel& model, const Eigen::MatrixXd& x, const Eigen::MatrixXd& y, double h) {
    if (!(h > 0.0)) throw InvalidArgument("finite-difference step must be positive");
    const Eigen::VectorXd analytic = mlp_gradient(model, x, y);
    const Eigen::VectorXd p = flatten(model);
    MlpModel probe = model;
    double worst = 0.0;
    for (Eigen::Index i = 0; i < p.size(); ++i) {
        Eigen::VectorXd q = p;
        q[i] = p[i] + h;
        unflatten(probe, q);
        const double up = mlp_loss(probe, x, y);
        q[i] = p[i] - h;
        unflatten(probe, q);
        const double down = mlp_loss(probe, x, y);
        const double numeric = (up - down) / (2.0 * h);
        const double scale = std::max(std::abs(analytic[i]) + std::abs(numeric), 1e-6);
        worst = std::max(worst, std::abs(analytic[i] - numeric) / scale);
    }
    return worst;
}

}  // namespace gridstudies::ml
