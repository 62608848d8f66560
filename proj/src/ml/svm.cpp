#include "gridstudies/ml/svm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>
#include <string>

#include "gridstudies/common/error.hpp"

namespace gridstudies::ml {

double kernel_value(KernelKind kind, double sigma, const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
    if (kind == KernelKind::Linear) return a.dot(b);
    return std::exp(-(a - b).squaredNorm() / (2.0 * sigma * sigma));
}

double median_pairwise_distance(const Eigen::MatrixXd& x) {
    const Eigen::Index n = x.rows();
    if (n < 2) throw InvalidArgument("need at least two rows for a pairwise distance");
    const Eigen::Index stride = std::max<Eigen::Index>(1, (n + 1499) / 1500);
    std::vector<double> d;
    for (Eigen::Index i = 0; i < n; i += stride) {
        for (Eigen::Index j = i + stride; j < n; j += stride) d.push_back((x.row(i) - x.row(j)).norm());
    }
    if (d.empty()) d.push_back((x.row(0) - x.row(1)).norm());
    auto mid = d.begin() + static_cast<std::ptrdiff_t>(d.size() / 2);
    std::nth_element(d.begin(), mid, d.end());
    return *mid;
}

namespace {

constexpr double kTau = 1e-12;

BinarySvm solve_binary(const Eigen::MatrixXd& x, const std::vector<double>& y, const SvmParams& p, double sigma) {
    const auto n = static_cast<std::size_t>(x.rows());
    Eigen::MatrixXd k(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        const Eigen::VectorXd xi = x.row(static_cast<Eigen::Index>(i)).transpose();
        for (std::size_t j = i; j < n; ++j) {
            const double v = kernel_value(p.kernel, sigma, xi, x.row(static_cast<Eigen::Index>(j)).transpose());
            k(i, j) = v;
            k(j, i) = v;
        }
    }
    const double c = p.c;
    std::vector<double> alpha(n, 0.0), g(n, -1.0);
    const std::size_t budget = p.max_iterations ? p.max_iterations : std::max<std::size_t>(10000000, 100 * n);

    auto q = [&](std::size_t i, std::size_t j) { return y[i] * y[j] * k(i, j); };
    std::size_t iter = 0;
    double residual = std::numeric_limits<double>::infinity();
    for (;;) {
        double gmax = -std::numeric_limits<double>::infinity();
        std::ptrdiff_t ii = -1;
        for (std::size_t t = 0; t < n; ++t) {
            if (y[t] > 0) {
                if (alpha[t] < c && -g[t] >= gmax) {
                    gmax = -g[t];
                    ii = static_cast<std::ptrdiff_t>(t);
                }
            } else if (alpha[t] > 0 && g[t] >= gmax) {
                gmax = g[t];
                ii = static_cast<std::ptrdiff_t>(t);
            }
        }
        double gmax2 = -std::numeric_limits<double>::infinity();
        std::ptrdiff_t jj = -1;
        double obj_min = std::numeric_limits<double>::infinity();
        if (ii >= 0) {
            const auto i = static_cast<std::size_t>(ii);
            for (std::size_t t = 0; t < n; ++t) {
                double grad_diff = 0.0, quad = 0.0;
                if (y[t] > 0) {
                    if (!(alpha[t] > 0)) continue;
                    gmax2 = std::max(gmax2, g[t]);
                    grad_diff = gmax + g[t];
                    quad = k(i, i) + k(t, t) - 2.0 * y[i] * q(i, t);
                } else {
                    if (!(alpha[t] < c)) continue;
                    gmax2 = std::max(gmax2, -g[t]);
                    grad_diff = gmax - g[t];
                    quad = k(i, i) + k(t, t) + 2.0 * y[i] * q(i, t);
                }
                if (grad_diff > 0) {
                    const double obj = -(grad_diff * grad_diff) / (quad > 0 ? quad : kTau);
                    if (obj <= obj_min) {
                        obj_min = obj;
                        jj = static_cast<std::ptrdiff_t>(t);
                    }
                }
            }
        }
        residual = gmax + gmax2;
        if (ii < 0 || jj < 0 || residual < p.tolerance) break;
        if (++iter > budget) {
            throw ConvergenceError("svm did not converge: KKT residual " + std::to_string(residual));
        }

        const auto i = static_cast<std::size_t>(ii), j = static_cast<std::size_t>(jj);
        const double ai = alpha[i], aj = alpha[j];
        if (y[i] != y[j]) {
            double quad = k(i, i) + k(j, j) + 2.0 * q(i, j);
            if (quad <= 0) quad = kTau;
            const double delta = (-g[i] - g[j]) / quad;
            const double diff = alpha[i] - alpha[j];
            alpha[i] += delta;
            alpha[j] += delta;
            if (diff > 0) {
                if (alpha[j] < 0) {
                    alpha[j] = 0;
                    alpha[i] = diff;
                }
            } else if (alpha[i] < 0) {
                alpha[i] = 0;
                alpha[j] = -diff;
            }
            if (diff > 0) {
                if (alpha[i] > c) {
                    alpha[i] = c;
                    alpha[j] = c - diff;
                }
            } else if (alpha[j] > c) {
                alpha[j] = c;
                alpha[i] = c + diff;
            }
        } else {
            double quad = k(i, i) + k(j, j) - 2.0 * q(i, j);
            if (quad <= 0) quad = kTau;
            const double delta = (g[i] - g[j]) / quad;
            const double sum = alpha[i] + alpha[j];
            alpha[i] -= delta;
            alpha[j] += delta;
            if (sum > c) {
                if (alpha[i] > c) {
                    alpha[i] = c;
                    alpha[j] = sum - c;
                }
            } else if (alpha[j] < 0) {
                alpha[j] = 0;
                alpha[i] = sum;
            }
            if (sum > c) {
                if (alpha[j] > c) {
                    alpha[j] = c;
                    alpha[i] = sum - c;
                }
            } else if (alpha[i] < 0) {
                alpha[i] = 0;
                alpha[j] = sum;
            }
        }
        const double dai = alpha[i] - ai, daj = alpha[j] - aj;
        for (std::size_t t = 0; t < n; ++t) g[t] += q(i, t) * dai + q(j, t) * daj;
    }

    double ub = std::numeric_limits<double>::infinity(), lb = -ub, sum_free = 0.0;
    int free_count = 0;
    for (std::size_t t = 0; t < n; ++t) {
        const double yg = y[t] * g[t];
        if (alpha[t] >= c) {
            if (y[t] < 0) ub = std::min(ub, yg);
            else lb = std::max(lb, yg);
        } else if (alpha[t] <= 0) {
            if (y[t] > 0) ub = std::min(ub, yg);
            else lb = std::max(lb, yg);
        } else {
            ++free_count;
            sum_free += yg;
        }
    }
    BinarySvm m;
    m.rho = free_count > 0 ? sum_free / free_count : 0.5 * (ub + lb);
    m.kkt_residual = std::max(0.0, residual);
    m.iterations = iter;
    std::vector<std::size_t> sv;
    for (std::size_t t = 0; t < n; ++t) {
        if (alpha[t] > 0) sv.push_back(t);
    }
    m.support_vectors.resize(static_cast<Eigen::Index>(sv.size()), x.cols());
    m.coefficients.resize(static_cast<Eigen::Index>(sv.size()));
    m.alphas.resize(static_cast<Eigen::Index>(sv.size()));
    for (std::size_t s = 0; s < sv.size(); ++s) {
        const auto r = static_cast<Eigen::Index>(s);
        m.support_vectors.row(r) = x.row(static_cast<Eigen::Index>(sv[s]));
        m.coefficients[r] = alpha[sv[s]] * y[sv[s]];
        m.alphas[r] = alpha[sv[s]];
    }
    return m;
}

}  // namespace

SvmModel svm_train(const Dataset& train, const SvmParams& params) {
    train.validate();
    if (!(params.c > 0.0)) throw InvalidArgument("svm penalty C must be positive");
    if (params.sigma < 0.0) throw InvalidArgument("svm sigma must be nonnegative");
    SvmModel model;
    model.kernel = params.kernel;
    model.c = params.c;
    const std::set<int> classes(train.labels.begin(), train.labels.end());
    if (classes.size() < 2) throw InvalidArgument("svm needs at least two classes");
    model.classes.assign(classes.begin(), classes.end());
    model.sigma = params.sigma > 0.0 ? params.sigma : median_pairwise_distance(train.features);
    if (!(model.sigma > 0.0)) model.sigma = 1.0;

    for (std::size_t a = 0; a < model.classes.size(); ++a) {
        for (std::size_t b = a + 1; b < model.classes.size(); ++b) {
            std::vector<std::size_t> rows;
            std::vector<double> y;
            for (std::size_t r = 0; r < train.size(); ++r) {
                if (train.labels[r] == model.classes[a] || train.labels[r] == model.classes[b]) {
                    rows.push_back(r);
                    y.push_back(train.labels[r] == model.classes[a] ? 1.0 : -1.0);
                }
            }
            auto m = solve_binary(train.subset(rows).features, y, params, model.sigma);
            m.positive_label = model.classes[a];
            m.negative_label = model.classes[b];
            model.machines.push_back(std::move(m));
        }
    }
    return model;
}

double svm_decision(const SvmModel& model, const BinarySvm& machine, const Eigen::VectorXd& x) {
    double f = -machine.rho;
    for (Eigen::Index s = 0; s < machine.support_vectors.rows(); ++s) {
        f += machine.coefficients[s] *
             kernel_value(model.kernel, model.sigma, machine.support_vectors.row(s).transpose(), x);
    }
    return f;
}

int svm_predict(const SvmModel& model, const Eigen::VectorXd& x) {
    if (model.machines.empty()) throw InvalidArgument("svm model is not trained");
    if (x.size() != model.machines.front().support_vectors.cols() && model.machines.front().support_vectors.rows() > 0) {
        throw InvalidArgument("query dimension mismatch");
    }
    std::map<int, int> votes;
    for (const auto& m : model.machines) ++votes[svm_decision(model, m, x) > 0 ? m.positive_label : m.negative_label];
    int best = model.classes.front(), best_votes = -1;
    for (const auto& [label, v] : votes) {
        if (v > best_votes) {
            best = label;
            best_votes = v;
        }
    }
    return best;
}

std::vector<int> svm_predict(const SvmModel& model, const Eigen::MatrixXd& x) {
    std::vector<int> out;
    out.reserve(static_cast<std::size_t>(x.rows()));
    for (Eigen::Index r = 0; r < x.rows(); ++r) out.push_back(svm_predict(model, Eigen::VectorXd(x.row(r).transpose())));
    return out;
}

}  // namespace gridstudies::ml
