#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "trisweep/common.hpp"
#include "trisweep/signal.hpp"

namespace trisweep {

// Which feature dimension carries the planted class difference.
enum class EffectDimension { spectral, spatial, temporal, none };

inline std::string to_string(EffectDimension e) {
    switch (e) {
        case EffectDimension::spectral: return "spectral";
        case EffectDimension::spatial: return "spatial";
        case EffectDimension::temporal: return "temporal";
        case EffectDimension::none: return "none";
    }
    return "none";
}

inline EffectDimension effect_from_string(const std::string& s) {
    if (s == "spectral") return EffectDimension::spectral;
    if (s == "spatial") return EffectDimension::spatial;
    if (s == "temporal") return EffectDimension::temporal;
    if (s == "none") return EffectDimension::none;
    throw input_error("unknown effect dimension '" + s + "'");
}

struct SynthSpec {
    int n_subjects_per_class = 1;
    int samples_per_subject = 1;
    std::size_t n_channels = 4;
    std::size_t n_time = 256;
    double fs = 128.0;
    EffectDimension effect = EffectDimension::none;
    double effect_size = 0.0;  // 0 means classes are statistically identical
    std::uint64_t seed = 0;
};

inline void validate(const SynthSpec& spec) {
    if (spec.n_subjects_per_class < 1) throw input_error("SynthSpec: need at least one subject per class");
    if (spec.samples_per_subject < 1) throw input_error("SynthSpec: need at least one sample per subject");
    if (spec.n_channels < 1 || spec.n_time < 2) throw input_error("SynthSpec: degenerate sample shape");
    if (!(spec.fs > 0.0)) throw input_error("SynthSpec: sampling rate must be positive");
    if (!(spec.effect_size >= 0.0)) throw input_error("SynthSpec: effect size must be >= 0");
    if (spec.effect == EffectDimension::spatial && spec.n_channels < 2)
        throw input_error("SynthSpec: spatial effect needs at least 2 channels");
}

// Band where the spectral effect plants extra power.
inline constexpr double planted_band_low_hz = 18.0;
inline constexpr double planted_band_high_hz = 22.0;
inline constexpr double planted_band_center_hz = 20.0;

namespace detail {

// Unit-variance AR(1) series: x_t = a*x_{t-1} + sqrt(1-a^2)*eps_t, with x_0
// drawn from the stationary distribution.
inline std::vector<double> ar1_series(Rng& rng, std::size_t n, double a) {
    std::vector<double> x(n);
    const double drive = std::sqrt(1.0 - a * a);
    x[0] = normal01(rng);
    for (std::size_t t = 1; t < n; ++t) x[t] = a * x[t - 1] + drive * normal01(rng);
    return x;
}

// Carrier with a slowly varying random power envelope; E[s^2] = 1. The
// envelope makes per-sample band power fluctuate, which is what the spatial
// block structure modulates across channels.
inline std::vector<double> envelope_source(Rng& rng, std::size_t n, double fs) {
    const double a_carrier = 0.9;
    const double tau_seconds = 0.75;
    const double a_env = std::exp(-1.0 / (fs * tau_seconds));
    const double sigma = 1.0;
    std::vector<double> eta = ar1_series(rng, n, a_env);
    std::vector<double> carrier = ar1_series(rng, n, a_carrier);
    std::vector<double> s(n);
    for (std::size_t t = 0; t < n; ++t) {
        const double g2 = std::exp(sigma * eta[t] - 0.5 * sigma * sigma);  // E[g2] = 1
        s[t] = std::sqrt(g2) * carrier[t];
    }
    return s;
}

}  // namespace detail

// Deterministic synthetic dataset with a class effect planted in exactly one
// feature dimension. Baseline for every channel: shared envelope-modulated
// source plus independent AR(1) noise, unit marginal power.
//
//   spectral: class 1 swaps a fraction of power into a narrow band around
//             20 Hz (per-channel independent phase); total power matched.
//   spatial:  class 1 replaces the shared source by two per-block sources
//             (first half of channels vs rest); per-channel marginal power
//             and spectral shape are unchanged, only cross-channel
//             correlation structure differs.
//   temporal: class 1 scales the first half of the recording up and the
//             second half down with matched average power.
//   none:     classes identically distributed.
inline DatasetBundle synthesize(const SynthSpec& spec) {
    validate(spec);
    const std::size_t nc = spec.n_channels;
    const std::size_t nt = spec.n_time;

    const double shared_weight = std::sqrt(0.6);
    const double noise_weight = std::sqrt(0.4);

    DatasetBundle bundle;
    bundle.name = "synth-" + to_string(spec.effect);
    for (std::size_t c = 0; c < nc; ++c) {
        char buf[16];
        std::snprintf(buf, sizeof(buf), "ch%02u", static_cast<unsigned>(c));
        bundle.channel_names.emplace_back(buf);
    }

    for (int cls = 0; cls < 2; ++cls) {
        for (int subj = 0; subj < spec.n_subjects_per_class; ++subj) {
            char sid[32];
            std::snprintf(sid, sizeof(sid), "c%d_s%03d", cls, subj);
            for (int m = 0; m < spec.samples_per_subject; ++m) {
                Rng rng(hash_combine(hash_combine(hash_combine(spec.seed, static_cast<std::uint64_t>(cls)),
                                                  static_cast<std::uint64_t>(subj)),
                                     static_cast<std::uint64_t>(m)));
                const auto src_global = detail::envelope_source(rng, nt, spec.fs);
                const auto src_block_a = detail::envelope_source(rng, nt, spec.fs);
                const auto src_block_b = detail::envelope_source(rng, nt, spec.fs);

                SignalSample s;
                s.fs = spec.fs;
                s.subject_id = sid;
                s.label = cls;
                s.data = Matrix(nc, nt);

                const bool planted = cls == 1 && spec.effect != EffectDimension::none && spec.effect_size > 0.0;

                // spatial: interpolate the shared source toward a per-block one
                const double w = planted && spec.effect == EffectDimension::spatial
                                     ? std::min(1.0, spec.effect_size)
                                     : 0.0;
                const double mix_norm = std::sqrt((1.0 - w) * (1.0 - w) + w * w);

                // spectral: fraction of power moved into the planted band
                const double e = planted && spec.effect == EffectDimension::spectral
                                     ? std::min(0.9, spec.effect_size / (1.0 + spec.effect_size))
                                     : 0.0;

                // temporal: first-half/second-half power imbalance
                const double d = planted && spec.effect == EffectDimension::temporal
                                     ? 0.9 * spec.effect_size / (1.0 + spec.effect_size)
                                     : 0.0;
                const double env_first = std::sqrt(1.0 + d);
                const double env_second = std::sqrt(1.0 - d);

                for (std::size_t c = 0; c < nc; ++c) {
                    const auto noise = detail::ar1_series(rng, nt, 0.9);
                    const double phase = 2.0 * M_PI * uniform01(rng);
                    const auto& block_src = c < nc / 2 ? src_block_a : src_block_b;
                    double* row = s.data.row(c);
                    for (std::size_t t = 0; t < nt; ++t) {
                        const double mixed = ((1.0 - w) * src_global[t] + w * block_src[t]) / mix_norm;
                        double x = shared_weight * mixed + noise_weight * noise[t];
                        if (e > 0.0) {
                            const double tone = std::sqrt(2.0) *
                                std::sin(2.0 * M_PI * planted_band_center_hz * static_cast<double>(t) / spec.fs + phase);
                            x = std::sqrt(1.0 - e) * x + std::sqrt(e) * tone;
                        }
                        if (d > 0.0) x *= t < nt / 2 ? env_first : env_second;
                        row[t] = x;
                    }
                }
                bundle.samples.push_back(std::move(s));
                bundle.keep.push_back(true);
            }
        }
    }
    return bundle;
}

inline SynthSpec synth_spec_from_json(const nlohmann::json& j) {
    SynthSpec spec;
    try {
        spec.n_subjects_per_class = j.at("n_subjects_per_class").get<int>();
        spec.samples_per_subject = j.at("samples_per_subject").get<int>();
        spec.n_channels = j.at("n_channels").get<std::size_t>();
        spec.n_time = j.at("n_time").get<std::size_t>();
        spec.fs = j.at("fs").get<double>();
        spec.effect = effect_from_string(j.at("effect").get<std::string>());
        spec.effect_size = j.at("effect_size").get<double>();
        spec.seed = j.at("seed").get<std::uint64_t>();
    } catch (const nlohmann::json::exception& e) {
        throw input_error("synth spec: " + std::string(e.what()));
    }
    validate(spec);
    return spec;
}

}  // namespace trisweep
