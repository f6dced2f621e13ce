#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <vector>

#include "trisweep/features.hpp"
#include "trisweep/matrix.hpp"
#include "trisweep/signal.hpp"

namespace trisweep {

// Functional-connectivity graph: symmetric, zero diagonal, entries in [0, 1].
struct AdjacencyMatrix {
    Matrix values;
    std::size_t n_channels() const { return values.rows; }
};

struct LaplacianMatrix {
    Matrix values;
    std::size_t n_channels() const { return values.rows; }
};

// channel -> cluster index in 0..n_clusters-1, every cluster nonempty.
struct ClusterAssignment {
    std::vector<int> group_index;
    int n_clusters = 0;
};

inline void validate(const ClusterAssignment& ca) {
    std::vector<bool> seen(static_cast<std::size_t>(ca.n_clusters), false);
    for (int g : ca.group_index) {
        if (g < 0 || g >= ca.n_clusters) throw input_error("ClusterAssignment: index out of range");
        seen[static_cast<std::size_t>(g)] = true;
    }
    for (bool s : seen)
        if (!s) throw input_error("ClusterAssignment: empty cluster");
}

namespace detail {

// Pearson correlation magnitudes between channels of one sample, diagonal
// zeroed. A channel pair involving a zero-variance channel contributes 0;
// has_variance_out (when given) records which channels had any variance.
inline Matrix abs_correlation(const SignalSample& s, std::vector<char>* has_variance_out = nullptr) {
    const std::size_t nc = s.n_channels();
    const std::size_t nt = s.n_time();
    std::vector<double> mean(nc, 0.0), sd(nc, 0.0);
    for (std::size_t c = 0; c < nc; ++c) {
        const double* row = s.data.row(c);
        double acc = 0.0;
        for (std::size_t t = 0; t < nt; ++t) acc += row[t];
        mean[c] = acc / static_cast<double>(nt);
        double var = 0.0;
        for (std::size_t t = 0; t < nt; ++t) {
            const double d = row[t] - mean[c];
            var += d * d;
        }
        sd[c] = std::sqrt(var);
    }
    if (has_variance_out) {
        has_variance_out->resize(nc);
        for (std::size_t c = 0; c < nc; ++c) (*has_variance_out)[c] = sd[c] > 0.0 ? 1 : 0;
    }
    Matrix corr(nc, nc);
    for (std::size_t a = 0; a < nc; ++a) {
        for (std::size_t b = a + 1; b < nc; ++b) {
            double cov = 0.0;
            const double* ra = s.data.row(a);
            const double* rb = s.data.row(b);
            for (std::size_t t = 0; t < nt; ++t) cov += (ra[t] - mean[a]) * (rb[t] - mean[b]);
            const double denom = sd[a] * sd[b];
            double r = denom > 0.0 ? std::abs(cov / denom) : 0.0;
            r = std::min(r, 1.0);  // guard rounding just above 1
            corr(a, b) = r;
            corr(b, a) = r;
        }
    }
    return corr;
}

}  // namespace detail

// Elementwise mean of per-sample |Pearson correlation| matrices over the
// training samples, in the given sample order.
inline AdjacencyMatrix training_adjacency(const std::vector<const SignalSample*>& training_samples) {
    if (training_samples.empty()) throw input_error("training_adjacency: no training samples");
    const std::size_t nc = training_samples.front()->n_channels();
    for (const auto* s : training_samples)
        if (s->n_channels() != nc) throw input_error("training_adjacency: inconsistent channel counts");
    if (nc < 2) throw input_error("training_adjacency: need at least 2 channels");

    // a channel constant in every sample has no defined correlation anywhere
    for (std::size_t c = 0; c < nc; ++c) {
        bool has_variance = false;
        for (const auto* s : training_samples) {
            const double* row = s->data.row(c);
            for (std::size_t t = 1; t < s->n_time(); ++t)
                if (row[t] != row[0]) {
                    has_variance = true;
                    break;
                }
            if (has_variance) break;
        }
        if (!has_variance)
            throw input_error("training_adjacency: channel " + std::to_string(c) + " constant in every sample");
    }

    AdjacencyMatrix out;
    out.values = Matrix(nc, nc);
    for (const auto* s : training_samples) {
        const Matrix corr = detail::abs_correlation(*s);
        for (std::size_t k = 0; k < corr.data.size(); ++k) out.values.data[k] += corr.data[k];
    }
    const double inv = 1.0 / static_cast<double>(training_samples.size());
    for (double& v : out.values.data) v *= inv;
    return out;
}

inline AdjacencyMatrix training_adjacency(const std::vector<SignalSample>& samples) {
    std::vector<const SignalSample*> ptrs;
    ptrs.reserve(samples.size());
    for (const auto& s : samples) ptrs.push_back(&s);
    return training_adjacency(ptrs);
}

// L = diag(A*1) - A.
inline LaplacianMatrix laplacian(const AdjacencyMatrix& a) {
    const std::size_t n = a.n_channels();
    LaplacianMatrix l;
    l.values = Matrix(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        double degree = 0.0;
        for (std::size_t j = 0; j < n; ++j) degree += a.values(i, j);
        for (std::size_t j = 0; j < n; ++j) l.values(i, j) = -a.values(i, j);
        l.values(i, i) += degree;
    }
    return l;
}

struct EigenDecomposition {
    std::vector<double> eigenvalues;  // ascending
    Matrix eigenvectors;              // unit-norm columns matching eigenvalues
};

// Cyclic Jacobi eigensolver for symmetric matrices. The rotation sequence is
// the fixed row-major upper-triangle sweep, so results are deterministic;
// ties in the eigenvalue sort keep the solver's column order (stable sort).
inline EigenDecomposition jacobi_eigensymmetric(Matrix a, double off_tolerance = 1e-10, int max_sweeps = 100) {
    const std::size_t n = a.rows;
    if (n == 0 || a.cols != n) throw input_error("jacobi_eigensymmetric: matrix must be square and nonempty");
    Matrix v = Matrix::identity(n);

    auto off_norm = [&]() {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j) s += 2.0 * a(i, j) * a(i, j);
        return std::sqrt(s);
    };

    bool converged = n == 1 || off_norm() <= off_tolerance;
    for (int sweep = 0; sweep < max_sweeps && !converged; ++sweep) {
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const double apq = a(p, q);
                if (apq == 0.0) continue;
                const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
                const double t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;

                for (std::size_t k = 0; k < n; ++k) {
                    const double akp = a(k, p);
                    const double akq = a(k, q);
                    a(k, p) = c * akp - s * akq;
                    a(k, q) = s * akp + c * akq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double apk = a(p, k);
                    const double aqk = a(q, k);
                    a(p, k) = c * apk - s * aqk;
                    a(q, k) = s * apk + c * aqk;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double vkp = v(k, p);
                    const double vkq = v(k, q);
                    v(k, p) = c * vkp - s * vkq;
                    v(k, q) = s * vkp + c * vkq;
                }
            }
        }
        converged = off_norm() <= off_tolerance;
    }
    if (!converged)
        throw numerical_error("jacobi_eigensymmetric: no convergence within " + std::to_string(max_sweeps) +
                              " sweeps");

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return a(x, x) < a(y, y); });

    EigenDecomposition out;
    out.eigenvalues.resize(n);
    out.eigenvectors = Matrix(n, n);
    for (std::size_t col = 0; col < n; ++col) {
        const std::size_t src = order[col];
        out.eigenvalues[col] = a(src, src);
        double norm = 0.0;
        for (std::size_t k = 0; k < n; ++k) norm += v(k, src) * v(k, src);
        norm = std::sqrt(norm);
        // sign convention: largest-magnitude entry positive, ties -> lowest index
        std::size_t arg = 0;
        double best = -1.0;
        for (std::size_t k = 0; k < n; ++k)
            if (std::abs(v(k, src)) > best) {
                best = std::abs(v(k, src));
                arg = k;
            }
        const double flip = v(arg, src) < 0.0 ? -1.0 : 1.0;
        for (std::size_t k = 0; k < n; ++k) out.eigenvectors(k, col) = flip * v(k, src) / norm;
    }
    return out;
}

// Rows of the matrix of the k lowest-eigenvalue eigenvectors; row i is the
// embedding point of channel i.
inline Matrix spectral_embed(const LaplacianMatrix& l, int k) {
    const std::size_t n = l.n_channels();
    if (k < 1 || static_cast<std::size_t>(k) > n)
        throw input_error("spectral_embed: need 1 <= k <= channel count");
    const EigenDecomposition eig = jacobi_eigensymmetric(l.values);
    Matrix points(n, static_cast<std::size_t>(k));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < static_cast<std::size_t>(k); ++j) points(i, j) = eig.eigenvectors(i, j);
    return points;
}

// In analogy to the temporal assignment: n_c x n_clusters group-averaging
// matrix from a channel clustering.
inline AssignmentMatrix spatial_assignment(const ClusterAssignment& ca, int n_c) {
    if (static_cast<std::size_t>(n_c) != ca.group_index.size())
        throw input_error("spatial_assignment: cluster assignment does not cover all channels");
    validate(ca);
    std::vector<std::size_t> group_sizes(static_cast<std::size_t>(ca.n_clusters), 0);
    for (int g : ca.group_index) ++group_sizes[static_cast<std::size_t>(g)];

    AssignmentMatrix a;
    a.group_index = ca.group_index;
    a.values = Matrix(static_cast<std::size_t>(n_c), static_cast<std::size_t>(ca.n_clusters));
    for (std::size_t i = 0; i < a.values.rows; ++i) {
        const auto g = static_cast<std::size_t>(ca.group_index[i]);
        a.values(i, g) = 1.0 / static_cast<double>(group_sizes[g]);
    }
    return a;
}

// Contract the channel axis: out[l, m, n] = sum_i in[i, m, n] * s[i, l].
inline Tensor3 pool_spatial(const Tensor3& x, const AssignmentMatrix& s) {
    if (s.n_in() != x.d0) throw input_error("pool_spatial: assignment rows must match channel count");
    Tensor3 out(s.n_out(), x.d1, x.d2);
    for (std::size_t i = 0; i < x.d0; ++i) {
        const auto l = static_cast<std::size_t>(s.group_index[i]);
        const double weight = s.values(i, l);
        for (std::size_t m = 0; m < x.d1; ++m)
            for (std::size_t n = 0; n < x.d2; ++n) out(l, m, n) += x(i, m, n) * weight;
    }
    return out;
}

}  // namespace trisweep
