// Command-line front end: synthesize/import bundles, reshape them, run
// resolution sweeps, and export the accuracy grids.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "trisweep/bundle_io.hpp"
#include "trisweep/signal.hpp"
#include "trisweep/sweep.hpp"
#include "trisweep/synth.hpp"

namespace {

using namespace trisweep;

FeatureConfig parse_config_triple(const std::string& text, int budget_hint, double fmax) {
    int f = 0, t = 0, g = 0;
    if (std::sscanf(text.c_str(), "%d,%d,%d", &f, &t, &g) != 3)
        throw input_error("--config expects F,T,G (e.g. 12,5,1)");
    FeatureConfig config{f, t, g, fmax, f * t * g};
    if (budget_hint > 0 && config.n_feat_budget != budget_hint)
        throw input_error("--config product does not match --budget");
    validate(config);
    return config;
}

std::size_t min_kept_n_time(const DatasetBundle& bundle) {
    std::size_t min_nt = 0;
    bool any = false;
    for (std::size_t i = 0; i < bundle.samples.size(); ++i) {
        if (!bundle.kept(i)) continue;
        min_nt = any ? std::min(min_nt, bundle.samples[i].n_time()) : bundle.samples[i].n_time();
        any = true;
    }
    if (!any) throw input_error("bundle has no kept samples");
    return min_nt;
}

nlohmann::json fold_diagnostics(const DatasetBundle& bundle, const FeatureConfig& config,
                                const FoldSpec& folds) {
    nlohmann::json out = nlohmann::json::array();
    for (int f = 0; f < folds.k; ++f) {
        const FoldEvaluation fe = evaluate_fold(bundle, config, folds, f);
        nlohmann::json entry;
        entry["fold"] = f;
        nlohmann::json adj = nlohmann::json::array();
        for (std::size_t r = 0; r < fe.adjacency.values.rows; ++r) {
            nlohmann::json row = nlohmann::json::array();
            for (std::size_t c = 0; c < fe.adjacency.values.cols; ++c) row.push_back(fe.adjacency.values(r, c));
            adj.push_back(row);
        }
        entry["adjacency"] = adj;
        entry["eigenvalues"] = fe.eigenvalues;
        entry["clusters"] = fe.clusters.group_index;
        entry["accuracy"] = fe.accuracy;
        out.push_back(entry);
    }
    return out;
}

int run(int argc, char** argv) {
    CLI::App app{"resolution-balanced feature extraction and sweep for multivariate signals"};
    app.require_subcommand(1);

    // synth
    auto* synth_cmd = app.add_subcommand("synth", "generate a synthetic bundle from a JSON spec");
    std::string synth_spec_path, synth_out;
    synth_cmd->add_option("--spec", synth_spec_path, "synthesis spec JSON file")->required();
    synth_cmd->add_option("--out", synth_out, "output bundle directory")->required();

    // import-csv
    auto* import_cmd = app.add_subcommand("import-csv", "build a bundle from CSV sample files");
    double import_fs = 0.0;
    std::vector<std::string> import_subjects;
    std::vector<int> import_labels;
    std::vector<std::string> import_files;
    std::string import_out, import_name = "imported";
    import_cmd->add_option("--fs", import_fs, "sampling rate in Hz")->required();
    import_cmd->add_option("--subject", import_subjects, "subject id (one total or one per file)")->required();
    import_cmd->add_option("--label", import_labels, "label 0/1 (one total or one per file)")->required();
    import_cmd->add_option("--name", import_name, "bundle name");
    import_cmd->add_option("files", import_files, "CSV files, one per sample")->required();
    import_cmd->add_option("--out", import_out, "output bundle directory")->required();

    // decimate
    auto* decimate_cmd = app.add_subcommand("decimate", "block-mean downsample every sample of a bundle");
    std::string decimate_bundle, decimate_out;
    std::size_t decimate_factor = 1;
    decimate_cmd->add_option("--bundle", decimate_bundle, "input bundle directory")->required();
    decimate_cmd->add_option("--factor", decimate_factor, "integer decimation factor")->required();
    decimate_cmd->add_option("--out", decimate_out, "output bundle directory")->required();

    // partition
    auto* partition_cmd = app.add_subcommand("partition", "cut every sample into fixed windows");
    std::string partition_bundle, partition_out;
    double partition_window = 0.0;
    partition_cmd->add_option("--bundle", partition_bundle, "input bundle directory")->required();
    partition_cmd->add_option("--window-seconds", partition_window, "window length in seconds")->required();
    partition_cmd->add_option("--out", partition_out, "output bundle directory")->required();

    // sweep
    auto* sweep_cmd = app.add_subcommand("sweep", "evaluate every feasible resolution configuration");
    std::string sweep_bundle, sweep_out;
    int sweep_budget = 60, sweep_folds = 10, sweep_jobs = 1;
    double sweep_fmax = 45.0;
    std::uint64_t sweep_seed = 0;
    sweep_cmd->add_option("--bundle", sweep_bundle, "input bundle directory")->required();
    sweep_cmd->add_option("--budget", sweep_budget, "total feature budget (e.g. 60 or 180)");
    sweep_cmd->add_option("--fmax", sweep_fmax, "maximum analysis frequency in Hz");
    sweep_cmd->add_option("--folds", sweep_folds, "cross-validation fold count");
    sweep_cmd->add_option("--seed", sweep_seed, "base seed for folds and clustering");
    sweep_cmd->add_option("--jobs", sweep_jobs, "parallel configurations");
    sweep_cmd->add_option("--out", sweep_out, "output report directory")->required();

    // edge
    auto* edge_cmd = app.add_subcommand("edge", "extract the triangle-edge traversal from a sweep result");
    std::string edge_result, edge_out;
    edge_cmd->add_option("--result", edge_result, "path to sweep.json")->required();
    edge_cmd->add_option("--out", edge_out, "output edge CSV file")->required();

    // eval
    auto* eval_cmd = app.add_subcommand("eval", "cross-validate a single configuration");
    std::string eval_bundle, eval_config_text, eval_graph_out, eval_models_out;
    int eval_folds = 10;
    double eval_fmax = 45.0;
    std::uint64_t eval_seed = 0;
    eval_cmd->add_option("--bundle", eval_bundle, "input bundle directory")->required();
    eval_cmd->add_option("--config", eval_config_text, "configuration triple F,T,G")->required();
    eval_cmd->add_option("--fmax", eval_fmax, "maximum analysis frequency in Hz");
    eval_cmd->add_option("--folds", eval_folds, "cross-validation fold count");
    eval_cmd->add_option("--seed", eval_seed, "base seed for folds and clustering");
    eval_cmd->add_option("--graph-out", eval_graph_out, "write per-fold adjacency/eigenvalue/cluster JSON");
    eval_cmd->add_option("--models-out", eval_models_out, "directory for per-fold SVM model JSON");

    CLI11_PARSE(app, argc, argv);

    if (synth_cmd->parsed()) {
        std::ifstream f(synth_spec_path);
        if (!f) throw input_error("cannot open spec " + synth_spec_path);
        nlohmann::json j;
        try {
            f >> j;
        } catch (const nlohmann::json::exception& e) {
            throw input_error("malformed spec JSON: " + std::string(e.what()));
        }
        const DatasetBundle bundle = synthesize(synth_spec_from_json(j));
        save_bundle(bundle, synth_out);
        std::cout << "wrote " << bundle.samples.size() << " samples to " << synth_out << "\n";
        return 0;
    }

    if (import_cmd->parsed()) {
        if (import_subjects.size() != 1 && import_subjects.size() != import_files.size())
            throw input_error("--subject count must be 1 or match the file count");
        if (import_labels.size() != 1 && import_labels.size() != import_files.size())
            throw input_error("--label count must be 1 or match the file count");
        DatasetBundle bundle;
        bundle.name = import_name;
        for (std::size_t i = 0; i < import_files.size(); ++i) {
            const std::string& subject = import_subjects.size() == 1 ? import_subjects[0] : import_subjects[i];
            const int label = import_labels.size() == 1 ? import_labels[0] : import_labels[i];
            std::vector<std::string> names;
            SignalSample s = import_csv_sample(import_files[i], import_fs, subject, label, &names);
            if (bundle.channel_names.empty())
                bundle.channel_names = names;
            else if (bundle.channel_names != names)
                throw input_error("channel headers differ between " + import_files[0] + " and " +
                                  import_files[i]);
            bundle.samples.push_back(std::move(s));
            bundle.keep.push_back(true);
        }
        save_bundle(bundle, import_out);
        std::cout << "imported " << bundle.samples.size() << " samples to " << import_out << "\n";
        return 0;
    }

    if (decimate_cmd->parsed()) {
        DatasetBundle bundle = load_bundle(decimate_bundle);
        for (auto& s : bundle.samples) s = decimate(s, decimate_factor);
        save_bundle(bundle, decimate_out);
        std::cout << "decimated by " << decimate_factor << " to " << decimate_out << "\n";
        return 0;
    }

    if (partition_cmd->parsed()) {
        const DatasetBundle bundle = load_bundle(partition_bundle);
        DatasetBundle out;
        out.name = bundle.name;
        out.channel_names = bundle.channel_names;
        for (std::size_t i = 0; i < bundle.samples.size(); ++i) {
            for (auto& piece : partition(bundle.samples[i], partition_window)) {
                out.samples.push_back(std::move(piece));
                out.keep.push_back(bundle.kept(i));
            }
        }
        save_bundle(out, partition_out);
        std::cout << "partitioned into " << out.samples.size() << " windows at " << partition_out << "\n";
        return 0;
    }

    if (sweep_cmd->parsed()) {
        const DatasetBundle bundle = load_bundle(sweep_bundle);
        const std::size_t min_nt = min_kept_n_time(bundle);
        const ConfigGrid grid = enumerate_configs(sweep_budget, static_cast<int>(bundle.n_channels()), min_nt,
                                                  bundle.fs(), sweep_fmax);
        const FoldSpec folds = grouped_kfold(subject_labels(bundle), sweep_folds, sweep_seed);
        SweepResult result = run_sweep(bundle, grid, folds, sweep_jobs);
        result.flags = {{"bundle", sweep_bundle}, {"budget", sweep_budget}, {"fmax", sweep_fmax},
                        {"folds", sweep_folds},   {"seed", sweep_seed},     {"jobs", sweep_jobs},
                        {"out", sweep_out}};
        export_report(result, sweep_out);
        std::cout << "swept " << grid.configs.size() << " configurations (" << result.results.size()
                  << " ok, " << result.failed.size() << " failed) -> " << sweep_out << "\n";
        return 0;
    }

    if (edge_cmd->parsed()) {
        const SweepResult result = load_sweep_result(edge_result);
        write_edge_csv(edge_traversal(result), edge_out);
        std::cout << "wrote edge traversal to " << edge_out << "\n";
        return 0;
    }

    if (eval_cmd->parsed()) {
        const DatasetBundle bundle = load_bundle(eval_bundle);
        const FeatureConfig config = parse_config_triple(eval_config_text, 0, eval_fmax);
        const FoldSpec folds = grouped_kfold(subject_labels(bundle), eval_folds, eval_seed);

        if (!eval_models_out.empty()) std::filesystem::create_directories(eval_models_out);

        double sum = 0.0;
        for (int f = 0; f < folds.k; ++f) {
            const FoldEvaluation fe = evaluate_fold(bundle, config, folds, f);
            std::printf("fold %d: accuracy %.6f (%zu test samples)\n", f, fe.accuracy,
                        fe.test_indices.size());
            sum += fe.accuracy;
            if (!eval_models_out.empty()) {
                char name[32];
                std::snprintf(name, sizeof(name), "model_fold_%d.json", f);
                save_model(fe.model, std::filesystem::path(eval_models_out) / name);
            }
        }
        std::printf("mean accuracy %.6f\n", sum / folds.k);

        if (!eval_graph_out.empty()) {
            std::ofstream f(eval_graph_out);
            if (!f) throw input_error("cannot write " + eval_graph_out);
            f << fold_diagnostics(bundle, config, folds).dump(2) << "\n";
        }
        return 0;
    }

    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const trisweep::numerical_error& e) {
        std::cerr << "numerical error: " << e.what() << "\n";
        return 2;
    } catch (const trisweep::input_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
