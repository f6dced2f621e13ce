#pragma once

#include <cmath>
#include <cstddef>
#include <set>
#include <string>
#include <vector>

#include "trisweep/matrix.hpp"

namespace trisweep {

// One multivariate recording: channels x time amplitudes plus metadata.
// Label is binary: 0 = control, 1 = patient.
struct SignalSample {
    Matrix data;  // n_channels x n_time
    double fs = 0.0;
    std::string subject_id;
    int label = 0;

    std::size_t n_channels() const { return data.rows; }
    std::size_t n_time() const { return data.cols; }
};

inline void validate(const SignalSample& s) {
    if (s.data.rows < 1 || s.data.cols < 2)
        throw input_error("SignalSample: need at least 1 channel and 2 time points");
    if (!(s.fs > 0.0)) throw input_error("SignalSample: sampling rate must be positive");
    if (s.label != 0 && s.label != 1) throw input_error("SignalSample: label must be 0 or 1");
    if (s.subject_id.empty()) throw input_error("SignalSample: empty subject_id");
    if (!all_finite(s.data.data)) throw input_error("SignalSample: non-finite values");
}

// An ordered collection of samples sharing channel count and sampling rate.
// keep[i] marks sample i as usable for evaluation (importers can flag
// artefact windows false); save/load preserve it, the harness filters on it.
struct DatasetBundle {
    std::string name;
    std::vector<std::string> channel_names;
    std::vector<SignalSample> samples;
    std::vector<bool> keep;  // parallel to samples; empty means all true

    std::size_t n_channels() const { return samples.empty() ? channel_names.size() : samples.front().n_channels(); }
    double fs() const { return samples.empty() ? 0.0 : samples.front().fs; }

    bool kept(std::size_t i) const { return keep.empty() ? true : keep[i]; }

    std::vector<std::string> subjects() const {
        std::set<std::string> seen;
        std::vector<std::string> out;
        for (const auto& s : samples)
            if (seen.insert(s.subject_id).second) out.push_back(s.subject_id);
        return out;
    }
};

inline void validate(const DatasetBundle& b) {
    if (!b.keep.empty() && b.keep.size() != b.samples.size())
        throw input_error("DatasetBundle: keep flags do not match sample count");
    for (const auto& s : b.samples) validate(s);
    if (b.samples.empty()) return;
    const std::size_t nc = b.samples.front().n_channels();
    const double fs = b.samples.front().fs;
    for (const auto& s : b.samples) {
        if (s.n_channels() != nc) throw input_error("DatasetBundle: inconsistent channel count across samples");
        if (s.fs != fs) throw input_error("DatasetBundle: inconsistent sampling rate across samples");
    }
    if (!b.channel_names.empty() && b.channel_names.size() != nc)
        throw input_error("DatasetBundle: channel_names do not match channel count");
}

// Block-mean downsampling: each output point is the arithmetic mean of a
// factor-length input block; trailing remainder samples are dropped.
// factor = 1 is the identity.
inline SignalSample decimate(const SignalSample& s, std::size_t factor) {
    if (factor == 0) throw input_error("decimate: factor must be positive");
    if (factor > s.n_time()) throw input_error("decimate: factor exceeds recording length");
    if (factor == 1) return s;
    const std::size_t nt_out = s.n_time() / factor;
    SignalSample out;
    out.fs = s.fs / static_cast<double>(factor);
    out.subject_id = s.subject_id;
    out.label = s.label;
    out.data = Matrix(s.n_channels(), nt_out);
    for (std::size_t c = 0; c < s.n_channels(); ++c) {
        const double* src = s.data.row(c);
        double* dst = out.data.row(c);
        for (std::size_t t = 0; t < nt_out; ++t) {
            double acc = 0.0;
            for (std::size_t k = 0; k < factor; ++k) acc += src[t * factor + k];
            dst[t] = acc / static_cast<double>(factor);
        }
    }
    return out;
}

// Cut a recording into consecutive non-overlapping windows of
// round(window_seconds * fs) points. A trailing partial window is dropped;
// a window longer than the recording yields an empty list.
inline std::vector<SignalSample> partition(const SignalSample& s, double window_seconds) {
    const double exact = window_seconds * s.fs;
    if (!(exact >= 2.0)) throw input_error("partition: window must span at least 2 samples");
    const std::size_t win = static_cast<std::size_t>(std::llround(exact));
    std::vector<SignalSample> out;
    if (win > s.n_time()) return out;
    const std::size_t n_windows = s.n_time() / win;
    out.reserve(n_windows);
    for (std::size_t w = 0; w < n_windows; ++w) {
        SignalSample piece;
        piece.fs = s.fs;
        piece.subject_id = s.subject_id;
        piece.label = s.label;
        piece.data = Matrix(s.n_channels(), win);
        for (std::size_t c = 0; c < s.n_channels(); ++c) {
            const double* src = s.data.row(c) + w * win;
            double* dst = piece.data.row(c);
            for (std::size_t t = 0; t < win; ++t) dst[t] = src[t];
        }
        out.push_back(std::move(piece));
    }
    return out;
}

}  // namespace trisweep
