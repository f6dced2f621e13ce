#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "trisweep/matrix.hpp"
#include "trisweep/signal.hpp"

namespace trisweep {

// One resolution configuration: spectral x temporal x spatial feature counts
// whose product is the fixed feature budget.
struct FeatureConfig {
    int n_f_feat = 1;
    int n_t_feat = 1;
    int n_g_feat = 1;
    double f_max = 45.0;
    int n_feat_budget = 1;
};

inline void validate(const FeatureConfig& c) {
    if (c.n_f_feat < 1 || c.n_t_feat < 1 || c.n_g_feat < 1)
        throw input_error("FeatureConfig: feature counts must be >= 1");
    if (c.n_f_feat * c.n_t_feat * c.n_g_feat != c.n_feat_budget)
        throw input_error("FeatureConfig: counts do not multiply to the feature budget");
    if (!(c.f_max > 0.0)) throw input_error("FeatureConfig: f_max must be positive");
}

// Segments of one sample stacked into channels x segments x segment_length.
struct SegmentTensor {
    Tensor3 values;
    double fs = 0.0;

    std::size_t n_channels() const { return values.d0; }
    std::size_t n_segments() const { return values.d1; }
    std::size_t segment_length() const { return values.d2; }
};

// Group-averaging matrix: one nonzero entry 1/groupsize per row, columns sum
// to 1. Right-multiplication averages within groups.
struct AssignmentMatrix {
    Matrix values;  // n_in x n_out
    std::vector<int> group_index;

    std::size_t n_in() const { return values.rows; }
    std::size_t n_out() const { return values.cols; }
};

inline void validate(const AssignmentMatrix& a) {
    if (a.group_index.size() != a.values.rows) throw input_error("AssignmentMatrix: group index size mismatch");
    std::vector<std::size_t> group_sizes(a.values.cols, 0);
    for (int g : a.group_index) {
        if (g < 0 || static_cast<std::size_t>(g) >= a.values.cols)
            throw input_error("AssignmentMatrix: group index out of range");
        ++group_sizes[static_cast<std::size_t>(g)];
    }
    for (std::size_t g = 0; g < group_sizes.size(); ++g)
        if (group_sizes[g] == 0) throw input_error("AssignmentMatrix: empty group");
    for (std::size_t i = 0; i < a.values.rows; ++i) {
        std::size_t nonzero = 0;
        for (std::size_t j = 0; j < a.values.cols; ++j) {
            const double v = a.values(i, j);
            if (v != 0.0) {
                ++nonzero;
                const std::size_t expected_group = static_cast<std::size_t>(a.group_index[i]);
                if (j != expected_group || v != 1.0 / static_cast<double>(group_sizes[j]))
                    throw input_error("AssignmentMatrix: entry inconsistent with group index");
            }
        }
        if (nonzero != 1) throw input_error("AssignmentMatrix: rows must have exactly one nonzero entry");
    }
}

// Segment length from the spectral feature count: round-half-away-from-zero
// of n_f_feat * fs / f_max. The bin spacing then puts the n_f_feat retained
// DFT bins exactly on [0, f_max).
inline int segment_length(int n_f_feat, double fs, double f_max) {
    if (n_f_feat < 1 || !(fs > 0.0) || !(f_max > 0.0))
        throw input_error("segment_length: arguments must be positive");
    const double exact = static_cast<double>(n_f_feat) * fs / f_max;
    const int n = static_cast<int>(std::llround(exact));  // llround = half away from zero
    if (n < 2) throw input_error("segment_length: degenerate segment of length " + std::to_string(n));
    return n;
}

// Half-overlapping segmentation: segment j covers
// [j*floor(L/2), j*floor(L/2) + L). Only complete segments are kept.
inline SegmentTensor segment(const SignalSample& sample, int n_t_seg) {
    if (n_t_seg < 2) throw input_error("segment: segment length must be >= 2");
    const std::size_t len = static_cast<std::size_t>(n_t_seg);
    if (len > sample.n_time()) throw input_error("segment: segment length exceeds recording length");
    const std::size_t hop = len / 2;
    const std::size_t n_seg = (sample.n_time() - len) / hop + 1;

    SegmentTensor out;
    out.fs = sample.fs;
    out.values = Tensor3(sample.n_channels(), n_seg, len);
    for (std::size_t c = 0; c < sample.n_channels(); ++c) {
        const double* src = sample.data.row(c);
        for (std::size_t j = 0; j < n_seg; ++j)
            for (std::size_t k = 0; k < len; ++k) out.values(c, j, k) = src[j * hop + k];
    }
    return out;
}

// w_i = (1/n) * sin(i*pi/(n-1))^2; endpoints are exactly zero.
inline std::vector<double> hanning_window(int n) {
    if (n < 2) throw input_error("hanning_window: length must be >= 2");
    std::vector<double> w(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        const double s = std::sin(static_cast<double>(i) * M_PI / static_cast<double>(n - 1));
        w[static_cast<std::size_t>(i)] = s * s / static_cast<double>(n);
    }
    w.front() = 0.0;
    w.back() = 0.0;
    return w;
}

// Per-segment windowed periodogram, not averaged across segments: window
// each segment, take the first n_f_feat DFT bins by direct summation, and
// normalize the squared magnitude by sum(w^2). Output is
// channels x segments x n_f_feat, all entries >= 0.
inline Tensor3 psd(const SegmentTensor& segments, int n_f_feat) {
    const std::size_t len = segments.segment_length();
    if (n_f_feat < 1) throw input_error("psd: need at least one frequency bin");
    if (static_cast<std::size_t>(n_f_feat) > len)
        throw input_error("psd: more frequency bins than segment samples");

    const auto window = hanning_window(static_cast<int>(len));
    double w2 = 0.0;
    for (double w : window) w2 += w * w;

    const std::size_t bins = static_cast<std::size_t>(n_f_feat);
    // DFT kernel exp(-2*pi*i*k*n/len) tabulated once per call.
    std::vector<double> cos_table(bins * len);
    std::vector<double> sin_table(bins * len);
    for (std::size_t n = 0; n < bins; ++n)
        for (std::size_t k = 0; k < len; ++k) {
            const double angle = -2.0 * M_PI * static_cast<double>(k) * static_cast<double>(n) /
                                 static_cast<double>(len);
            cos_table[n * len + k] = std::cos(angle);
            sin_table[n * len + k] = std::sin(angle);
        }

    Tensor3 out(segments.n_channels(), segments.n_segments(), bins);
    std::vector<double> windowed(len);
    for (std::size_t c = 0; c < segments.n_channels(); ++c) {
        for (std::size_t j = 0; j < segments.n_segments(); ++j) {
            for (std::size_t k = 0; k < len; ++k) windowed[k] = segments.values(c, j, k) * window[k];
            for (std::size_t n = 0; n < bins; ++n) {
                const double* ct = cos_table.data() + n * len;
                const double* st = sin_table.data() + n * len;
                double re = 0.0, im = 0.0;
                for (std::size_t k = 0; k < len; ++k) {
                    re += windowed[k] * ct[k];
                    im += windowed[k] * st[k];
                }
                out(c, j, n) = (re * re + im * im) / w2;
            }
        }
    }
    return out;
}

// Group index of segment j when n_seg segments are pooled into n_t_feat
// groups of equal size; trailing remainder segments are clamped into the
// last group, so all n_t_feat groups are nonempty.
inline int temporal_group_index(int j, int n_seg, int n_t_feat) {
    if (n_t_feat < 1 || n_t_feat > n_seg)
        throw input_error("temporal_group_index: need 1 <= n_t_feat <= n_seg");
    if (j < 0 || j >= n_seg) throw input_error("temporal_group_index: segment index out of range");
    const int base = n_seg / n_t_feat;
    return std::min(j / base, n_t_feat - 1);
}

inline AssignmentMatrix temporal_assignment(int n_seg, int n_t_feat) {
    if (n_t_feat < 1 || n_t_feat > n_seg)
        throw input_error("temporal_assignment: need 1 <= n_t_feat <= n_seg");
    std::vector<int> index(static_cast<std::size_t>(n_seg));
    std::vector<std::size_t> group_sizes(static_cast<std::size_t>(n_t_feat), 0);
    for (int j = 0; j < n_seg; ++j) {
        const int g = temporal_group_index(j, n_seg, n_t_feat);
        index[static_cast<std::size_t>(j)] = g;
        ++group_sizes[static_cast<std::size_t>(g)];
    }
    AssignmentMatrix a;
    a.group_index = std::move(index);
    a.values = Matrix(static_cast<std::size_t>(n_seg), static_cast<std::size_t>(n_t_feat));
    for (int j = 0; j < n_seg; ++j) {
        const auto g = static_cast<std::size_t>(a.group_index[static_cast<std::size_t>(j)]);
        a.values(static_cast<std::size_t>(j), g) = 1.0 / static_cast<double>(group_sizes[g]);
    }
    return a;
}

// Contract the segment axis: out[i, m, n] = sum_j in[i, j, n] * s[j, m].
inline Tensor3 pool_temporal(const Tensor3& psd_tensor, const AssignmentMatrix& s) {
    if (s.n_in() != psd_tensor.d1) throw input_error("pool_temporal: assignment rows must match segment count");
    Tensor3 out(psd_tensor.d0, s.n_out(), psd_tensor.d2);
    for (std::size_t i = 0; i < psd_tensor.d0; ++i)
        for (std::size_t j = 0; j < psd_tensor.d1; ++j) {
            const auto m = static_cast<std::size_t>(s.group_index[j]);
            const double weight = s.values(j, m);
            for (std::size_t n = 0; n < psd_tensor.d2; ++n) out(i, m, n) += psd_tensor(i, j, n) * weight;
        }
    return out;
}

}  // namespace trisweep
