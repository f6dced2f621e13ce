#pragma once

#include <algorithm>
#include <array>
#include <atomic>
#include <cstdint>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include <json.hpp>

#include "trisweep/features.hpp"
#include "trisweep/graph.hpp"
#include "trisweep/kmeans.hpp"
#include "trisweep/signal.hpp"
#include "trisweep/svm.hpp"

namespace trisweep {

// All feasible resolution triples under a budget, with the dataset
// constraints they were filtered against.
struct ConfigGrid {
    int budget = 0;
    std::vector<FeatureConfig> configs;  // sorted lexicographically by (f, t, g)
    int n_c = 0;
    double fs = 0.0;
    double f_max = 0.0;
    std::size_t min_n_t = 0;
};

// Ordered triples (n_f, n_t, n_g) with product = budget, filtered by:
// n_g <= n_c, segment_length(n_f) <= min_n_t, and n_t no larger than the
// segment count that segment length yields on the shortest sample.
inline ConfigGrid enumerate_configs(int budget, int n_c, std::size_t min_n_t, double fs, double f_max) {
    if (budget < 1) throw input_error("enumerate_configs: budget must be >= 1");
    if (n_c < 1) throw input_error("enumerate_configs: channel count must be >= 1");

    ConfigGrid grid;
    grid.budget = budget;
    grid.n_c = n_c;
    grid.fs = fs;
    grid.f_max = f_max;
    grid.min_n_t = min_n_t;

    for (int f = 1; f <= budget; ++f) {
        if (budget % f != 0) continue;
        std::size_t len = 0;
        try {
            len = static_cast<std::size_t>(segment_length(f, fs, f_max));
        } catch (const input_error&) {
            continue;  // degenerate segment, triple infeasible
        }
        if (len > min_n_t) continue;
        const std::size_t n_seg = (min_n_t - len) / (len / 2) + 1;
        const int rest = budget / f;
        for (int t = 1; t <= rest; ++t) {
            if (rest % t != 0) continue;
            const int g = rest / t;
            if (g > n_c) continue;
            if (static_cast<std::size_t>(t) > n_seg) continue;
            grid.configs.push_back(FeatureConfig{f, t, g, f_max, budget});
        }
    }
    if (grid.configs.empty()) throw input_error("enumerate_configs: no feasible configuration under the constraints");
    return grid;
}

// Subject-level fold assignment: every sample of a subject lands in the
// same fold.
struct FoldSpec {
    std::map<std::string, int> fold_assignments;
    int k = 0;
    std::uint64_t seed = 0;
};

inline void validate(const FoldSpec& spec) {
    if (spec.k < 1) throw input_error("FoldSpec: fold count must be >= 1");
    std::vector<bool> nonempty(static_cast<std::size_t>(spec.k), false);
    for (const auto& [subject, fold] : spec.fold_assignments) {
        if (fold < 0 || fold >= spec.k) throw input_error("FoldSpec: fold index out of range for " + subject);
        nonempty[static_cast<std::size_t>(fold)] = true;
    }
    for (bool f : nonempty)
        if (!f) throw input_error("FoldSpec: empty fold");
}

// Distinct subjects of the kept samples with their labels, sorted by id.
// A subject with conflicting labels is an input error.
inline std::vector<std::pair<std::string, int>> subject_labels(const DatasetBundle& bundle) {
    std::map<std::string, int> labels;
    for (std::size_t i = 0; i < bundle.samples.size(); ++i) {
        if (!bundle.kept(i)) continue;
        const auto& s = bundle.samples[i];
        auto [it, inserted] = labels.emplace(s.subject_id, s.label);
        if (!inserted && it->second != s.label)
            throw input_error("subject_labels: subject " + s.subject_id + " has conflicting labels");
    }
    return {labels.begin(), labels.end()};
}

// Deterministic grouped k-fold: subjects are sorted, shuffled by the seed,
// then drawn alternating classes (larger class first) and assigned to the
// fold with the fewest subjects, ties broken by fewest same-class subjects,
// then lowest fold index.
inline FoldSpec grouped_kfold(const std::vector<std::pair<std::string, int>>& subjects, int k,
                              std::uint64_t seed) {
    if (k < 1) throw input_error("grouped_kfold: fold count must be >= 1");
    if (static_cast<std::size_t>(k) > subjects.size())
        throw input_error("grouped_kfold: more folds than subjects");

    std::vector<std::pair<std::string, int>> order(subjects);
    std::sort(order.begin(), order.end());
    for (std::size_t i = 0; i + 1 < order.size(); ++i)
        if (order[i].first == order[i + 1].first)
            throw input_error("grouped_kfold: duplicate subject " + order[i].first);

    Rng rng(seed);
    for (std::size_t i = order.size(); i > 1; --i) {
        const std::size_t j = uniform_index(rng, i);
        std::swap(order[i - 1], order[j]);
    }

    std::vector<std::pair<std::string, int>> by_class[2];
    for (auto& s : order) {
        if (s.second != 0 && s.second != 1) throw input_error("grouped_kfold: labels must be 0 or 1");
        by_class[s.second].push_back(s);
    }

    const int first = by_class[1].size() > by_class[0].size() ? 1 : 0;
    std::vector<std::size_t> fold_size(static_cast<std::size_t>(k), 0);
    std::vector<std::size_t> fold_class_count[2] = {
        std::vector<std::size_t>(static_cast<std::size_t>(k), 0),
        std::vector<std::size_t>(static_cast<std::size_t>(k), 0)};

    FoldSpec spec;
    spec.k = k;
    spec.seed = seed;

    std::size_t cursor[2] = {0, 0};
    int turn = first;
    while (cursor[0] < by_class[0].size() || cursor[1] < by_class[1].size()) {
        if (cursor[turn] >= by_class[turn].size()) turn = 1 - turn;
        const auto& [subject, label] = by_class[turn][cursor[turn]++];
        std::size_t best = 0;
        for (std::size_t f = 1; f < static_cast<std::size_t>(k); ++f) {
            const auto key = std::make_pair(fold_size[f], fold_class_count[label][f]);
            const auto best_key = std::make_pair(fold_size[best], fold_class_count[label][best]);
            if (key < best_key) best = f;
        }
        spec.fold_assignments[subject] = static_cast<int>(best);
        ++fold_size[best];
        ++fold_class_count[label][best];
        turn = 1 - turn;
    }
    validate(spec);
    return spec;
}

namespace detail {

struct SampleCorrelation {
    Matrix values;
    std::vector<char> channel_has_variance;
};

// Per-sample quantities that depend only on the sample and the config,
// never on other samples: cached once, reused across folds.
struct PreparedData {
    std::vector<std::size_t> sample_index;  // bundle indices of kept samples
    std::vector<int> fold_of;
    std::vector<int> label_of;  // 0/1
    std::vector<Tensor3> pooled_ft;          // channels x n_t_feat x n_f_feat
    const std::vector<SampleCorrelation>* abs_corr = nullptr;  // per kept sample
    std::vector<SampleCorrelation> abs_corr_storage;
    std::size_t n_channels = 0;
};

inline std::vector<SampleCorrelation> sample_correlations(const DatasetBundle& bundle,
                                                          const std::vector<std::size_t>& kept) {
    std::vector<SampleCorrelation> out;
    out.reserve(kept.size());
    for (std::size_t i : kept) {
        SampleCorrelation sc;
        sc.values = abs_correlation(bundle.samples[i], &sc.channel_has_variance);
        out.push_back(std::move(sc));
    }
    return out;
}

inline std::vector<std::size_t> kept_indices(const DatasetBundle& bundle) {
    std::vector<std::size_t> kept;
    for (std::size_t i = 0; i < bundle.samples.size(); ++i)
        if (bundle.kept(i)) kept.push_back(i);
    return kept;
}

inline PreparedData prepare(const DatasetBundle& bundle, const FeatureConfig& config, const FoldSpec& folds,
                            const std::vector<SampleCorrelation>* shared_corr) {
    validate(config);
    validate(folds);

    PreparedData prep;
    prep.sample_index = kept_indices(bundle);
    if (prep.sample_index.empty()) throw input_error("evaluate: bundle has no kept samples");
    prep.n_channels = bundle.samples[prep.sample_index.front()].n_channels();
    if (config.n_g_feat > static_cast<int>(prep.n_channels))
        throw input_error("evaluate: more spatial features than channels");

    const int len = segment_length(config.n_f_feat, bundle.fs(), config.f_max);

    for (std::size_t i : prep.sample_index) {
        const SignalSample& s = bundle.samples[i];
        const auto it = folds.fold_assignments.find(s.subject_id);
        if (it == folds.fold_assignments.end())
            throw input_error("evaluate: subject " + s.subject_id + " missing from fold assignment");
        prep.fold_of.push_back(it->second);
        prep.label_of.push_back(s.label);

        const SegmentTensor seg = segment(s, len);
        if (seg.n_segments() < static_cast<std::size_t>(config.n_t_feat))
            throw input_error("evaluate: sample too short for " + std::to_string(config.n_t_feat) +
                              " temporal features");
        const Tensor3 p = psd(seg, config.n_f_feat);
        const AssignmentMatrix ta = temporal_assignment(static_cast<int>(seg.n_segments()), config.n_t_feat);
        prep.pooled_ft.push_back(pool_temporal(p, ta));
    }

    if (shared_corr) {
        if (shared_corr->size() != prep.sample_index.size())
            throw input_error("evaluate: correlation cache does not match kept samples");
        prep.abs_corr = shared_corr;
    } else {
        prep.abs_corr_storage = sample_correlations(bundle, prep.sample_index);
        prep.abs_corr = &prep.abs_corr_storage;
    }
    return prep;
}

inline std::uint64_t fold_task_seed(const FoldSpec& folds, const FeatureConfig& config, int fold) {
    std::uint64_t h = folds.seed;
    h = hash_combine(h, static_cast<std::uint64_t>(config.n_f_feat));
    h = hash_combine(h, static_cast<std::uint64_t>(config.n_t_feat));
    h = hash_combine(h, static_cast<std::uint64_t>(config.n_g_feat));
    h = hash_combine(h, static_cast<std::uint64_t>(fold));
    return h;
}

}  // namespace detail

// Everything one cross-validation fold produced, exposed for diagnostics
// and leakage checks. Test indices refer to bundle.samples.
struct FoldEvaluation {
    int fold = 0;
    AdjacencyMatrix adjacency;
    std::vector<double> eigenvalues;  // full Laplacian spectrum
    ClusterAssignment clusters;
    double gamma = 0.0;
    SvmModel model;
    std::vector<std::size_t> test_indices;
    std::vector<double> decision_values;
    std::vector<int> predicted_labels;  // 0/1
    double accuracy = 0.0;
};

namespace detail {

inline FoldEvaluation evaluate_fold_prepared(const PreparedData& prep, const FeatureConfig& config,
                                             const FoldSpec& folds, int fold) {
    const std::size_t n_kept = prep.sample_index.size();
    std::vector<std::size_t> train_rows, test_rows;
    for (std::size_t i = 0; i < n_kept; ++i) (prep.fold_of[i] == fold ? test_rows : train_rows).push_back(i);
    if (test_rows.empty()) throw input_error("evaluate: fold " + std::to_string(fold) + " has no test samples");
    if (train_rows.empty())
        throw input_error("evaluate: fold " + std::to_string(fold) + " has no training samples");
    bool has0 = false, has1 = false;
    for (std::size_t i : train_rows) (prep.label_of[i] == 0 ? has0 : has1) = true;
    if (!has0 || !has1)
        throw input_error("evaluate: degenerate fold " + std::to_string(fold) + " (single-class training set)");

    FoldEvaluation out;
    out.fold = fold;

    // graph structure from the training fold only
    const std::size_t nc = prep.n_channels;
    out.adjacency.values = Matrix(nc, nc);
    for (std::size_t i : train_rows)
        for (std::size_t k = 0; k < nc * nc; ++k)
            out.adjacency.values.data[k] += (*prep.abs_corr)[i].values.data[k];
    const double inv = 1.0 / static_cast<double>(train_rows.size());
    for (double& v : out.adjacency.values.data) v *= inv;
    for (std::size_t c = 0; c < nc; ++c) {
        bool has_variance = false;
        for (std::size_t i : train_rows)
            if ((*prep.abs_corr)[i].channel_has_variance[c]) {
                has_variance = true;
                break;
            }
        if (!has_variance)
            throw input_error("evaluate: channel " + std::to_string(c) +
                              " constant in every training sample of fold " + std::to_string(fold));
    }

    const LaplacianMatrix lap = laplacian(out.adjacency);
    const EigenDecomposition eig = jacobi_eigensymmetric(lap.values);
    out.eigenvalues = eig.eigenvalues;

    Matrix points(nc, static_cast<std::size_t>(config.n_g_feat));
    for (std::size_t i = 0; i < nc; ++i)
        for (std::size_t j = 0; j < static_cast<std::size_t>(config.n_g_feat); ++j)
            points(i, j) = eig.eigenvectors(i, j);

    out.clusters = kmeans(points, config.n_g_feat, fold_task_seed(folds, config, fold));
    const AssignmentMatrix sa = spatial_assignment(out.clusters, static_cast<int>(nc));

    // flattened feature rows in (spatial, temporal, spectral) order
    const std::size_t dim = static_cast<std::size_t>(config.n_feat_budget);
    Matrix train_features(train_rows.size(), dim);
    std::vector<int> train_labels(train_rows.size());
    for (std::size_t r = 0; r < train_rows.size(); ++r) {
        const Tensor3 full = pool_spatial(prep.pooled_ft[train_rows[r]], sa);
        std::copy(full.data.begin(), full.data.end(), train_features.row(r));
        train_labels[r] = prep.label_of[train_rows[r]] == 1 ? 1 : -1;
    }

    out.gamma = rbf_gamma(train_features);
    out.model = train(train_features, train_labels, KernelParams{out.gamma, 1.0});

    std::size_t correct = 0;
    for (std::size_t i : test_rows) {
        const Tensor3 full = pool_spatial(prep.pooled_ft[i], sa);
        const Prediction pred = predict(out.model, full.data.data(), full.data.size());
        out.test_indices.push_back(prep.sample_index[i]);
        out.decision_values.push_back(pred.decision_value);
        const int predicted01 = pred.label == 1 ? 1 : 0;
        out.predicted_labels.push_back(predicted01);
        if (predicted01 == prep.label_of[i]) ++correct;
    }
    out.accuracy = static_cast<double>(correct) / static_cast<double>(test_rows.size());
    return out;
}

}  // namespace detail

// Full detail for one fold of one configuration.
inline FoldEvaluation evaluate_fold(const DatasetBundle& bundle, const FeatureConfig& config,
                                    const FoldSpec& folds, int fold) {
    const auto prep = detail::prepare(bundle, config, folds, nullptr);
    return detail::evaluate_fold_prepared(prep, config, folds, fold);
}

// Per-fold test accuracies for one configuration. Training-fold data alone
// determines the graph, the clustering, gamma, and the SVM.
inline std::vector<double> evaluate_config(const DatasetBundle& bundle, const FeatureConfig& config,
                                           const FoldSpec& folds) {
    const auto prep = detail::prepare(bundle, config, folds, nullptr);
    std::vector<double> accuracies;
    accuracies.reserve(static_cast<std::size_t>(folds.k));
    for (int f = 0; f < folds.k; ++f)
        accuracies.push_back(detail::evaluate_fold_prepared(prep, config, folds, f).accuracy);
    return accuracies;
}

struct ConfigOutcome {
    FeatureConfig config;
    std::vector<double> fold_accuracies;
    double mean_accuracy = 0.0;
};

struct ConfigFailure {
    FeatureConfig config;
    std::string reason;
};

struct SweepResult {
    std::string dataset_name;
    int budget = 0;
    std::uint64_t seed = 0;
    std::string timestamp;
    double f_max = 0.0;
    int k_folds = 0;
    int n_c = 0;
    double fs = 0.0;
    std::size_t min_n_t = 0;
    std::map<std::string, int> fold_assignments;
    std::vector<ConfigOutcome> results;  // grid order, successful configs
    std::vector<ConfigFailure> failed;   // grid order
    nlohmann::json flags;                // CLI flag echo; null for library runs
};

inline std::string utc_timestamp() {
    const std::time_t now = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

// Evaluate every configuration of the grid. Configurations are independent
// tasks; with jobs > 1 they run on a small worker pool. Results are keyed
// by grid index and per-task seeds depend only on (seed, config, fold), so
// the outcome is identical at any parallelism level.
inline SweepResult run_sweep(const DatasetBundle& bundle, const ConfigGrid& grid, const FoldSpec& folds,
                             int jobs = 1) {
    if (grid.configs.empty()) throw input_error("run_sweep: empty configuration grid");
    if (jobs < 1) jobs = 1;

    SweepResult result;
    result.dataset_name = bundle.name;
    result.budget = grid.budget;
    result.seed = folds.seed;
    result.timestamp = utc_timestamp();
    result.f_max = grid.f_max;
    result.k_folds = folds.k;
    result.n_c = grid.n_c;
    result.fs = grid.fs;
    result.min_n_t = grid.min_n_t;
    result.fold_assignments = folds.fold_assignments;

    // per-sample correlation matrices are config-independent; share them
    const auto kept = detail::kept_indices(bundle);
    const std::vector<detail::SampleCorrelation> corr = detail::sample_correlations(bundle, kept);

    const std::size_t n_configs = grid.configs.size();
    std::vector<std::optional<ConfigOutcome>> outcomes(n_configs);
    std::vector<std::optional<ConfigFailure>> failures(n_configs);

    auto run_task = [&](std::size_t idx) {
        const FeatureConfig& config = grid.configs[idx];
        try {
            const auto prep = detail::prepare(bundle, config, folds, &corr);
            ConfigOutcome outcome;
            outcome.config = config;
            double sum = 0.0;
            for (int f = 0; f < folds.k; ++f) {
                const double acc = detail::evaluate_fold_prepared(prep, config, folds, f).accuracy;
                outcome.fold_accuracies.push_back(acc);
                sum += acc;
            }
            outcome.mean_accuracy = sum / static_cast<double>(folds.k);
            outcomes[idx] = std::move(outcome);
        } catch (const std::exception& e) {
            failures[idx] = ConfigFailure{config, e.what()};
        }
    };

    if (jobs == 1) {
        for (std::size_t idx = 0; idx < n_configs; ++idx) run_task(idx);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> pool;
        const std::size_t n_workers = std::min<std::size_t>(static_cast<std::size_t>(jobs), n_configs);
        pool.reserve(n_workers);
        for (std::size_t w = 0; w < n_workers; ++w)
            pool.emplace_back([&]() {
                for (;;) {
                    const std::size_t idx = next.fetch_add(1);
                    if (idx >= n_configs) return;
                    run_task(idx);
                }
            });
        for (auto& t : pool) t.join();
    }

    for (std::size_t idx = 0; idx < n_configs; ++idx) {
        if (outcomes[idx]) result.results.push_back(std::move(*outcomes[idx]));
        if (failures[idx]) result.failed.push_back(std::move(*failures[idx]));
    }
    return result;
}

struct EdgePoint {
    FeatureConfig config;
    double accuracy = 0.0;
};

// Configurations where at least one dimension sits at its minimal value in
// the result set, ordered along the triangle perimeter: from the
// maximal-spectral vertex toward maximal-temporal, then maximal-spatial,
// then back toward the start.
inline std::vector<EdgePoint> edge_traversal(const SweepResult& result) {
    if (result.results.empty()) throw input_error("edge_traversal: empty sweep result");
    int f_min = result.results.front().config.n_f_feat;
    int t_min = result.results.front().config.n_t_feat;
    int g_min = result.results.front().config.n_g_feat;
    for (const auto& r : result.results) {
        f_min = std::min(f_min, r.config.n_f_feat);
        t_min = std::min(t_min, r.config.n_t_feat);
        g_min = std::min(g_min, r.config.n_g_feat);
    }

    auto collect = [&](auto&& member_is_min, auto&& desc_key) {
        std::vector<const ConfigOutcome*> picked;
        for (const auto& r : result.results)
            if (member_is_min(r.config)) picked.push_back(&r);
        std::sort(picked.begin(), picked.end(), [&](const ConfigOutcome* a, const ConfigOutcome* b) {
            return desc_key(a->config) > desc_key(b->config);
        });
        return picked;
    };

    const auto edge_spectral_to_temporal =
        collect([&](const FeatureConfig& c) { return c.n_g_feat == g_min; },
                [](const FeatureConfig& c) { return c.n_f_feat; });
    const auto edge_temporal_to_spatial =
        collect([&](const FeatureConfig& c) { return c.n_f_feat == f_min; },
                [](const FeatureConfig& c) { return c.n_t_feat; });
    const auto edge_spatial_to_spectral =
        collect([&](const FeatureConfig& c) { return c.n_t_feat == t_min; },
                [](const FeatureConfig& c) { return c.n_g_feat; });

    std::vector<EdgePoint> path;
    std::vector<std::array<int, 3>> seen;
    auto push_unique = [&](const ConfigOutcome* r) {
        const std::array<int, 3> key{r->config.n_f_feat, r->config.n_t_feat, r->config.n_g_feat};
        if (std::find(seen.begin(), seen.end(), key) != seen.end()) return;
        seen.push_back(key);
        path.push_back(EdgePoint{r->config, r->mean_accuracy});
    };
    for (const auto* r : edge_spectral_to_temporal) push_unique(r);
    for (const auto* r : edge_temporal_to_spatial) push_unique(r);
    for (const auto* r : edge_spatial_to_spectral) push_unique(r);
    return path;
}

namespace detail {

inline std::string format_fixed6(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.6f", v);
    return buf;
}

}  // namespace detail

inline nlohmann::json sweep_result_to_json(const SweepResult& result) {
    nlohmann::json j;
    j["dataset"] = result.dataset_name;
    j["budget"] = result.budget;
    j["seed"] = result.seed;
    j["timestamp"] = result.timestamp;
    j["fmax"] = result.f_max;
    j["folds"] = result.k_folds;
    j["constraints"] = {{"n_channels", result.n_c}, {"fs", result.fs}, {"min_n_time", result.min_n_t}};
    j["fold_assignments"] = result.fold_assignments;
    j["flags"] = result.flags;
    j["results"] = nlohmann::json::array();
    for (const auto& r : result.results) {
        nlohmann::json entry;
        entry["config"] = {r.config.n_f_feat, r.config.n_t_feat, r.config.n_g_feat};
        entry["mean_accuracy"] = r.mean_accuracy;
        entry["fold_accuracies"] = r.fold_accuracies;
        j["results"].push_back(entry);
    }
    j["failed"] = nlohmann::json::array();
    for (const auto& f : result.failed) {
        nlohmann::json entry;
        entry["config"] = {f.config.n_f_feat, f.config.n_t_feat, f.config.n_g_feat};
        entry["reason"] = f.reason;
        j["failed"].push_back(entry);
    }
    return j;
}

inline SweepResult sweep_result_from_json(const nlohmann::json& j) {
    SweepResult result;
    try {
        result.dataset_name = j.at("dataset").get<std::string>();
        result.budget = j.at("budget").get<int>();
        result.seed = j.at("seed").get<std::uint64_t>();
        result.timestamp = j.at("timestamp").get<std::string>();
        result.f_max = j.at("fmax").get<double>();
        result.k_folds = j.at("folds").get<int>();
        result.n_c = j.at("constraints").at("n_channels").get<int>();
        result.fs = j.at("constraints").at("fs").get<double>();
        result.min_n_t = j.at("constraints").at("min_n_time").get<std::size_t>();
        result.fold_assignments = j.at("fold_assignments").get<std::map<std::string, int>>();
        result.flags = j.value("flags", nlohmann::json());
        for (const auto& entry : j.at("results")) {
            ConfigOutcome r;
            r.config.n_f_feat = entry.at("config").at(0).get<int>();
            r.config.n_t_feat = entry.at("config").at(1).get<int>();
            r.config.n_g_feat = entry.at("config").at(2).get<int>();
            r.config.f_max = result.f_max;
            r.config.n_feat_budget = result.budget;
            r.mean_accuracy = entry.at("mean_accuracy").get<double>();
            r.fold_accuracies = entry.at("fold_accuracies").get<std::vector<double>>();
            result.results.push_back(std::move(r));
        }
        for (const auto& entry : j.at("failed")) {
            ConfigFailure f;
            f.config.n_f_feat = entry.at("config").at(0).get<int>();
            f.config.n_t_feat = entry.at("config").at(1).get<int>();
            f.config.n_g_feat = entry.at("config").at(2).get<int>();
            f.config.f_max = result.f_max;
            f.config.n_feat_budget = result.budget;
            f.reason = entry.at("reason").get<std::string>();
            result.failed.push_back(std::move(f));
        }
    } catch (const nlohmann::json::exception& e) {
        throw input_error("sweep result: " + std::string(e.what()));
    }
    return result;
}

inline SweepResult load_sweep_result(const std::filesystem::path& path) {
    std::ifstream f(path);
    if (!f) throw input_error("load_sweep_result: cannot open " + path.string());
    nlohmann::json j;
    try {
        f >> j;
    } catch (const nlohmann::json::exception& e) {
        throw input_error("load_sweep_result: malformed JSON: " + std::string(e.what()));
    }
    return sweep_result_from_json(j);
}

inline void write_edge_csv(const std::vector<EdgePoint>& path, const std::filesystem::path& file) {
    std::ofstream f(file);
    if (!f) throw input_error("write_edge_csv: cannot write " + file.string());
    f << "path_position,config,accuracy\n";
    for (std::size_t i = 0; i < path.size(); ++i)
        f << i << "," << path[i].config.n_f_feat << "x" << path[i].config.n_t_feat << "x"
          << path[i].config.n_g_feat << "," << detail::format_fixed6(path[i].accuracy) << "\n";
}

// Writes sweep.csv (6 fractional digits), sweep.json (full precision), and
// edge.csv into the directory.
inline void export_report(const SweepResult& result, const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw input_error("export_report: cannot create directory " + dir.string());

    {
        std::ofstream f(dir / "sweep.csv");
        if (!f) throw input_error("export_report: cannot write sweep.csv");
        f << "n_f_feat,n_t_feat,n_g_feat,mean_accuracy";
        for (int k = 0; k < result.k_folds; ++k) f << ",fold_" << k;
        f << "\n";
        for (const auto& r : result.results) {
            f << r.config.n_f_feat << "," << r.config.n_t_feat << "," << r.config.n_g_feat << ","
              << detail::format_fixed6(r.mean_accuracy);
            for (double acc : r.fold_accuracies) f << "," << detail::format_fixed6(acc);
            f << "\n";
        }
    }
    {
        std::ofstream f(dir / "sweep.json");
        if (!f) throw input_error("export_report: cannot write sweep.json");
        f << sweep_result_to_json(result).dump(2) << "\n";
    }
    write_edge_csv(edge_traversal(result), dir / "edge.csv");
}

}  // namespace trisweep
