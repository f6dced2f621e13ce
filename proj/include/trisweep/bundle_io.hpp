#pragma once

#include <bit>
#include <charconv>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "trisweep/signal.hpp"

namespace trisweep {

static_assert(std::endian::native == std::endian::little,
              "bundle payloads are little-endian; big-endian hosts are unsupported");

// On-disk bundle layout: a directory holding manifest.json plus one payload
// file per sample. Payloads are row-major (channel-major) little-endian
// 32-bit floats, exactly n_channels * n_time values. Arithmetic everywhere
// else is double; storage is float.

inline void save_bundle(const DatasetBundle& bundle, const std::filesystem::path& dir) {
    validate(bundle);
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw input_error("save_bundle: cannot create directory " + dir.string());

    nlohmann::json manifest;
    manifest["name"] = bundle.name;
    manifest["fs"] = bundle.samples.empty() ? 0.0 : bundle.fs();
    manifest["n_channels"] = bundle.n_channels();
    manifest["channel_names"] = bundle.channel_names;
    manifest["samples"] = nlohmann::json::array();

    for (std::size_t i = 0; i < bundle.samples.size(); ++i) {
        const SignalSample& s = bundle.samples[i];
        char fname[32];
        std::snprintf(fname, sizeof(fname), "sample_%05zu.f32", i);

        std::vector<float> payload(s.data.data.size());
        for (std::size_t k = 0; k < payload.size(); ++k) payload[k] = static_cast<float>(s.data.data[k]);

        std::ofstream f(dir / fname, std::ios::binary);
        if (!f) throw input_error("save_bundle: cannot write " + (dir / fname).string());
        f.write(reinterpret_cast<const char*>(payload.data()),
                static_cast<std::streamsize>(payload.size() * sizeof(float)));
        if (!f) throw input_error("save_bundle: write failure on " + (dir / fname).string());

        nlohmann::json entry;
        entry["file"] = fname;
        entry["subject_id"] = s.subject_id;
        entry["label"] = s.label;
        entry["n_time"] = s.n_time();
        entry["keep"] = bundle.kept(i);
        manifest["samples"].push_back(entry);
    }

    std::ofstream mf(dir / "manifest.json");
    if (!mf) throw input_error("save_bundle: cannot write manifest in " + dir.string());
    mf << manifest.dump(2) << "\n";
}

inline DatasetBundle load_bundle(const std::filesystem::path& dir) {
    const auto manifest_path = dir / "manifest.json";
    std::ifstream mf(manifest_path);
    if (!mf) throw input_error("load_bundle: missing manifest " + manifest_path.string());
    nlohmann::json manifest;
    try {
        mf >> manifest;
    } catch (const nlohmann::json::exception& e) {
        throw input_error("load_bundle: malformed manifest: " + std::string(e.what()));
    }

    DatasetBundle bundle;
    try {
        bundle.name = manifest.at("name").get<std::string>();
        const double fs = manifest.at("fs").get<double>();
        const std::size_t nc = manifest.at("n_channels").get<std::size_t>();
        bundle.channel_names = manifest.at("channel_names").get<std::vector<std::string>>();

        for (const auto& entry : manifest.at("samples")) {
            SignalSample s;
            s.fs = fs;
            s.subject_id = entry.at("subject_id").get<std::string>();
            s.label = entry.at("label").get<int>();
            const std::size_t nt = entry.at("n_time").get<std::size_t>();
            const std::string fname = entry.at("file").get<std::string>();

            std::ifstream pf(dir / fname, std::ios::binary);
            if (!pf) throw input_error("load_bundle: missing payload " + (dir / fname).string());
            pf.seekg(0, std::ios::end);
            const auto bytes = static_cast<std::size_t>(pf.tellg());
            pf.seekg(0, std::ios::beg);
            if (bytes != nc * nt * sizeof(float))
                throw input_error("load_bundle: payload size mismatch in " + fname + " (expected " +
                                  std::to_string(nc * nt * sizeof(float)) + " bytes, found " +
                                  std::to_string(bytes) + ")");
            std::vector<float> payload(nc * nt);
            pf.read(reinterpret_cast<char*>(payload.data()), static_cast<std::streamsize>(bytes));
            if (!pf) throw input_error("load_bundle: read failure on " + fname);

            s.data = Matrix(nc, nt);
            for (std::size_t k = 0; k < payload.size(); ++k) s.data.data[k] = static_cast<double>(payload[k]);
            bundle.samples.push_back(std::move(s));
            bundle.keep.push_back(entry.value("keep", true));
        }
    } catch (const nlohmann::json::exception& e) {
        throw input_error("load_bundle: manifest field error: " + std::string(e.what()));
    }
    validate(bundle);
    return bundle;
}

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    std::stringstream ss(line);
    while (std::getline(ss, field, ',')) {
        while (!field.empty() && (field.back() == '\r' || field.back() == ' ')) field.pop_back();
        std::size_t start = 0;
        while (start < field.size() && field[start] == ' ') ++start;
        fields.push_back(field.substr(start));
    }
    if (!line.empty() && line.back() == ',') fields.push_back("");
    return fields;
}

inline double parse_double(const std::string& text, const std::string& context) {
    double value = 0.0;
    const char* begin = text.data();
    const char* end = begin + text.size();
    auto [ptr, err] = std::from_chars(begin, end, value);
    if (err != std::errc() || ptr != end)
        throw input_error("import_csv: bad numeric value '" + text + "' in " + context);
    return value;
}

}  // namespace detail

// One CSV file per sample: header row of channel names, then one row per
// time point with one column per channel. fs/subject/label come from flags.
inline SignalSample import_csv_sample(const std::filesystem::path& file, double fs,
                                      const std::string& subject_id, int label,
                                      std::vector<std::string>* channel_names_out = nullptr) {
    std::ifstream f(file);
    if (!f) throw input_error("import_csv: cannot open " + file.string());
    std::string line;
    if (!std::getline(f, line)) throw input_error("import_csv: empty file " + file.string());
    const auto names = detail::split_csv_line(line);
    if (names.empty()) throw input_error("import_csv: missing header in " + file.string());

    std::vector<std::vector<double>> rows;
    while (std::getline(f, line)) {
        if (line.empty()) continue;
        const auto fields = detail::split_csv_line(line);
        if (fields.size() != names.size())
            throw input_error("import_csv: row with " + std::to_string(fields.size()) + " columns, expected " +
                              std::to_string(names.size()) + " in " + file.string());
        std::vector<double> row(fields.size());
        for (std::size_t c = 0; c < fields.size(); ++c) row[c] = detail::parse_double(fields[c], file.string());
        rows.push_back(std::move(row));
    }

    SignalSample s;
    s.fs = fs;
    s.subject_id = subject_id;
    s.label = label;
    s.data = Matrix(names.size(), rows.size());
    for (std::size_t t = 0; t < rows.size(); ++t)
        for (std::size_t c = 0; c < names.size(); ++c) s.data(c, t) = rows[t][c];
    validate(s);
    if (channel_names_out) *channel_names_out = names;
    return s;
}

}  // namespace trisweep
