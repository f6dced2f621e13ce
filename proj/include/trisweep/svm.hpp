#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <string>
#include <vector>

#include <json.hpp>

#include "trisweep/matrix.hpp"

namespace trisweep {

struct KernelParams {
    double gamma = 1.0;
    double c = 1.0;
};

inline void validate(const KernelParams& p) {
    if (!(p.gamma > 0.0) || !std::isfinite(p.gamma)) throw input_error("KernelParams: gamma must be positive");
    if (!(p.c > 0.0) || !std::isfinite(p.c)) throw input_error("KernelParams: c must be positive");
}

struct SvmModel {
    Matrix support_vectors;                  // n_sv x n_feat
    std::vector<double> dual_coefficients;   // alpha_i * y_i, |.| <= c
    double bias = 0.0;
    KernelParams params;
    bool converged = true;   // false if the pair-update cap was hit first
    double kkt_gap = 0.0;    // maximal-violating-pair gap at termination
};

// Kernel coefficient from the training features: 1 / (n_feat * Var(X)),
// population variance over all matrix entries.
inline double rbf_gamma(const Matrix& training_features) {
    if (training_features.data.empty()) throw input_error("rbf_gamma: empty feature matrix");
    const double n = static_cast<double>(training_features.data.size());
    double mean = 0.0;
    for (double x : training_features.data) mean += x;
    mean /= n;
    double var = 0.0;
    for (double x : training_features.data) {
        const double d = x - mean;
        var += d * d;
    }
    var /= n;
    if (!(var > 0.0)) throw numerical_error("rbf_gamma: zero variance (constant features)");
    return 1.0 / (static_cast<double>(training_features.cols) * var);
}

inline double rbf_kernel(const double* a, const double* b, std::size_t dim, double gamma) {
    double d2 = 0.0;
    for (std::size_t i = 0; i < dim; ++i) {
        const double d = a[i] - b[i];
        d2 += d * d;
    }
    return std::exp(-gamma * d2);
}

inline double rbf_kernel(const std::vector<double>& a, const std::vector<double>& b, double gamma) {
    if (a.size() != b.size()) throw input_error("rbf_kernel: length mismatch");
    return rbf_kernel(a.data(), b.data(), a.size(), gamma);
}

// Soft-margin dual via SMO with maximal-violating-pair selection.
// KKT tolerance 1e-3, pair-update cap 10*n^2. Deterministic for a fixed
// input order: argmax/argmin ties resolve to the lowest index. If the cap
// is reached the model is still returned, flagged with the achieved gap.
inline SvmModel train(const Matrix& features, const std::vector<int>& labels, const KernelParams& params) {
    validate(params);
    const std::size_t n = features.rows;
    const std::size_t dim = features.cols;
    if (labels.size() != n) throw input_error("svm train: label count does not match sample count");
    if (n < 2) throw input_error("svm train: need at least 2 samples");
    bool has_pos = false, has_neg = false;
    for (int y : labels) {
        if (y == 1) has_pos = true;
        else if (y == -1) has_neg = true;
        else throw input_error("svm train: labels must be -1 or +1");
    }
    if (!has_pos || !has_neg) throw input_error("svm train: need at least one sample of each class");

    const double C = params.c;
    constexpr double tol = 1e-3;
    constexpr double tau = 1e-12;

    std::vector<double> kernel(n * n);
    for (std::size_t i = 0; i < n; ++i) {
        kernel[i * n + i] = 1.0;
        for (std::size_t j = i + 1; j < n; ++j) {
            const double k = rbf_kernel(features.row(i), features.row(j), dim, params.gamma);
            kernel[i * n + j] = k;
            kernel[j * n + i] = k;
        }
    }
    auto q = [&](std::size_t i, std::size_t j) {
        return static_cast<double>(labels[i] * labels[j]) * kernel[i * n + j];
    };

    std::vector<double> alpha(n, 0.0);
    std::vector<double> grad(n, -1.0);  // gradient of 1/2 a'Qa - sum(a)

    const std::size_t max_updates = 10 * n * n;
    double gap = std::numeric_limits<double>::infinity();
    bool converged = false;

    for (std::size_t update = 0; update < max_updates; ++update) {
        // maximal violating pair
        std::size_t i = n, j = n;
        double m_up = -std::numeric_limits<double>::infinity();
        double m_low = std::numeric_limits<double>::infinity();
        for (std::size_t t = 0; t < n; ++t) {
            const double v = -static_cast<double>(labels[t]) * grad[t];
            const bool in_up = (labels[t] == 1 && alpha[t] < C) || (labels[t] == -1 && alpha[t] > 0.0);
            const bool in_low = (labels[t] == 1 && alpha[t] > 0.0) || (labels[t] == -1 && alpha[t] < C);
            if (in_up && v > m_up) {
                m_up = v;
                i = t;
            }
            if (in_low && v < m_low) {
                m_low = v;
                j = t;
            }
        }
        gap = m_up - m_low;
        if (gap <= tol) {
            converged = true;
            break;
        }

        const double old_ai = alpha[i];
        const double old_aj = alpha[j];
        if (labels[i] != labels[j]) {
            double quad = kernel[i * n + i] + kernel[j * n + j] + 2.0 * q(i, j);
            if (quad <= 0.0) quad = tau;
            const double delta = (-grad[i] - grad[j]) / quad;
            const double diff = alpha[i] - alpha[j];
            alpha[i] += delta;
            alpha[j] += delta;
            if (diff > 0.0) {
                if (alpha[j] < 0.0) {
                    alpha[j] = 0.0;
                    alpha[i] = diff;
                }
            } else {
                if (alpha[i] < 0.0) {
                    alpha[i] = 0.0;
                    alpha[j] = -diff;
                }
            }
            if (diff > 0.0) {
                if (alpha[i] > C) {
                    alpha[i] = C;
                    alpha[j] = C - diff;
                }
            } else {
                if (alpha[j] > C) {
                    alpha[j] = C;
                    alpha[i] = C + diff;
                }
            }
        } else {
            double quad = kernel[i * n + i] + kernel[j * n + j] - 2.0 * q(i, j);
            if (quad <= 0.0) quad = tau;
            const double delta = (grad[i] - grad[j]) / quad;
            const double sum = alpha[i] + alpha[j];
            alpha[i] -= delta;
            alpha[j] += delta;
            if (sum > C) {
                if (alpha[i] > C) {
                    alpha[i] = C;
                    alpha[j] = sum - C;
                }
            } else {
                if (alpha[j] < 0.0) {
                    alpha[j] = 0.0;
                    alpha[i] = sum;
                }
            }
            if (sum > C) {
                if (alpha[j] > C) {
                    alpha[j] = C;
                    alpha[i] = sum - C;
                }
            } else {
                if (alpha[i] < 0.0) {
                    alpha[i] = 0.0;
                    alpha[j] = sum;
                }
            }
        }

        const double dai = alpha[i] - old_ai;
        const double daj = alpha[j] - old_aj;
        for (std::size_t t = 0; t < n; ++t) grad[t] += q(i, t) * dai + q(j, t) * daj;
    }

    // bias from unbounded support vectors, midpoint of the violating-pair
    // bounds when none are unbounded
    double bias = 0.0;
    std::size_t n_free = 0;
    double free_sum = 0.0;
    double m_up = -std::numeric_limits<double>::infinity();
    double m_low = std::numeric_limits<double>::infinity();
    for (std::size_t t = 0; t < n; ++t) {
        const double v = -static_cast<double>(labels[t]) * grad[t];
        if (alpha[t] > 0.0 && alpha[t] < C) {
            free_sum += v;
            ++n_free;
        }
        const bool in_up = (labels[t] == 1 && alpha[t] < C) || (labels[t] == -1 && alpha[t] > 0.0);
        const bool in_low = (labels[t] == 1 && alpha[t] > 0.0) || (labels[t] == -1 && alpha[t] < C);
        if (in_up) m_up = std::max(m_up, v);
        if (in_low) m_low = std::min(m_low, v);
    }
    bias = n_free > 0 ? free_sum / static_cast<double>(n_free) : (m_up + m_low) / 2.0;

    SvmModel model;
    model.params = params;
    model.bias = bias;
    model.converged = converged;
    model.kkt_gap = gap;
    std::size_t n_sv = 0;
    for (double a : alpha)
        if (a > 0.0) ++n_sv;
    model.support_vectors = Matrix(n_sv, dim);
    model.dual_coefficients.reserve(n_sv);
    std::size_t row = 0;
    for (std::size_t t = 0; t < n; ++t) {
        if (alpha[t] <= 0.0) continue;
        for (std::size_t d = 0; d < dim; ++d) model.support_vectors(row, d) = features(t, d);
        model.dual_coefficients.push_back(alpha[t] * static_cast<double>(labels[t]));
        ++row;
    }
    return model;
}

struct Prediction {
    int label = 1;
    double decision_value = 0.0;
};

// sign(sum_i dual_coef_i * k(sv_i, x) + bias); sign(0) is +1.
inline Prediction predict(const SvmModel& model, const double* x, std::size_t dim) {
    if (dim != model.support_vectors.cols) throw input_error("svm predict: feature length mismatch");
    double f = model.bias;
    for (std::size_t i = 0; i < model.support_vectors.rows; ++i)
        f += model.dual_coefficients[i] * rbf_kernel(model.support_vectors.row(i), x, dim, model.params.gamma);
    return {f >= 0.0 ? 1 : -1, f};
}

inline Prediction predict(const SvmModel& model, const std::vector<double>& x) {
    return predict(model, x.data(), x.size());
}

// Dual objective sum(alpha) - 1/2 sum_ij a_i a_j y_i y_j K_ij, recoverable
// from the stored support vectors alone because alpha_i = |dual_coef_i|.
inline double dual_objective(const SvmModel& model) {
    const std::size_t n = model.support_vectors.rows;
    const std::size_t dim = model.support_vectors.cols;
    double obj = 0.0;
    for (double dc : model.dual_coefficients) obj += std::abs(dc);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            obj -= 0.5 * model.dual_coefficients[i] * model.dual_coefficients[j] *
                   rbf_kernel(model.support_vectors.row(i), model.support_vectors.row(j), dim,
                              model.params.gamma);
    return obj;
}

namespace detail {

inline std::string format_g17(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace detail

// Model JSON with 17-significant-digit decimal floats so reload is
// bit-exact: {gamma, c, bias, support_vectors[][], dual_coefficients[]}.
inline std::string model_to_json(const SvmModel& model) {
    std::string out = "{\n";
    out += "  \"gamma\": " + detail::format_g17(model.params.gamma) + ",\n";
    out += "  \"c\": " + detail::format_g17(model.params.c) + ",\n";
    out += "  \"bias\": " + detail::format_g17(model.bias) + ",\n";
    out += "  \"support_vectors\": [";
    for (std::size_t i = 0; i < model.support_vectors.rows; ++i) {
        out += i == 0 ? "\n    [" : ",\n    [";
        for (std::size_t j = 0; j < model.support_vectors.cols; ++j) {
            if (j) out += ", ";
            out += detail::format_g17(model.support_vectors(i, j));
        }
        out += "]";
    }
    out += model.support_vectors.rows ? "\n  ],\n" : "],\n";
    out += "  \"dual_coefficients\": [";
    for (std::size_t i = 0; i < model.dual_coefficients.size(); ++i) {
        if (i) out += ", ";
        out += detail::format_g17(model.dual_coefficients[i]);
    }
    out += "]\n}\n";
    return out;
}

inline SvmModel model_from_json(const nlohmann::json& j) {
    SvmModel model;
    try {
        model.params.gamma = j.at("gamma").get<double>();
        model.params.c = j.at("c").get<double>();
        model.bias = j.at("bias").get<double>();
        const auto& svs = j.at("support_vectors");
        const auto& dcs = j.at("dual_coefficients");
        if (svs.size() != dcs.size()) throw input_error("svm model: support vector / coefficient count mismatch");
        const std::size_t n = svs.size();
        const std::size_t dim = n == 0 ? 0 : svs.at(0).size();
        model.support_vectors = Matrix(n, dim);
        for (std::size_t i = 0; i < n; ++i) {
            if (svs.at(i).size() != dim) throw input_error("svm model: ragged support vectors");
            for (std::size_t d = 0; d < dim; ++d) model.support_vectors(i, d) = svs.at(i).at(d).get<double>();
        }
        model.dual_coefficients = dcs.get<std::vector<double>>();
    } catch (const nlohmann::json::exception& e) {
        throw input_error("svm model: " + std::string(e.what()));
    }
    validate(model.params);
    return model;
}

inline void save_model(const SvmModel& model, const std::filesystem::path& path) {
    std::ofstream f(path);
    if (!f) throw input_error("save_model: cannot write " + path.string());
    f << model_to_json(model);
}

inline SvmModel load_model(const std::filesystem::path& path) {
    std::ifstream f(path);
    if (!f) throw input_error("load_model: cannot open " + path.string());
    nlohmann::json j;
    try {
        f >> j;
    } catch (const nlohmann::json::exception& e) {
        throw input_error("load_model: malformed JSON: " + std::string(e.what()));
    }
    return model_from_json(j);
}

}  // namespace trisweep
