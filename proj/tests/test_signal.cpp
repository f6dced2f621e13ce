#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "trisweep/bundle_io.hpp"
#include "trisweep/signal.hpp"
#include "trisweep/synth.hpp"

#include "test_util.hpp"

using namespace trisweep;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir(const std::string& tag) {
    const fs::path dir = fs::temp_directory_path() / ("trisweep_test_" + tag);
    fs::remove_all(dir);
    return dir;
}

}  // namespace

TEST_CASE("decimate factor 1 is the identity") {
    Rng rng(1);
    const SignalSample s = testutil::random_sample(rng, 3, 50, 100.0);
    const SignalSample out = decimate(s, 1);
    CHECK(out.data == s.data);
    CHECK(out.fs == s.fs);
}

TEST_CASE("decimate reproduces the 2048 to 512 Hz shape") {
    Rng rng(2);
    const SignalSample s = testutil::random_sample(rng, 23, 24580, 2048.0);
    const SignalSample out = decimate(s, 4);
    CHECK(out.n_channels() == 23);
    CHECK(out.n_time() == 6145);
    CHECK(out.fs == Catch::Approx(512.0));
}

TEST_CASE("decimate takes block means") {
    SignalSample s;
    s.fs = 8.0;
    s.subject_id = "s0";
    s.data = Matrix(1, 8);
    const double values[] = {1, 3, 5, 7, 2, 4, 6, 8};
    for (std::size_t i = 0; i < 8; ++i) s.data(0, i) = values[i];
    const SignalSample out = decimate(s, 2);
    REQUIRE(out.n_time() == 4);
    CHECK(out.data(0, 0) == 2.0);
    CHECK(out.data(0, 1) == 6.0);
    CHECK(out.data(0, 2) == 3.0);
    CHECK(out.data(0, 3) == 7.0);
}

TEST_CASE("decimate rejects bad factors") {
    Rng rng(3);
    const SignalSample s = testutil::random_sample(rng, 2, 10, 10.0);
    CHECK_THROWS_AS(decimate(s, 0), input_error);
    CHECK_THROWS_AS(decimate(s, 11), input_error);
}

TEST_CASE("decimate composes when the factors divide the length") {
    Rng rng(4);
    const SignalSample s = testutil::random_sample(rng, 2, 60, 120.0);
    const SignalSample once = decimate(s, 6);
    const SignalSample twice = decimate(decimate(s, 2), 3);
    REQUIRE(once.n_time() == twice.n_time());
    for (std::size_t k = 0; k < once.data.data.size(); ++k)
        CHECK(once.data.data[k] == Catch::Approx(twice.data.data[k]).margin(1e-12));
}

TEST_CASE("partition keeps a window exactly the recording length") {
    Rng rng(5);
    const SignalSample s = testutil::random_sample(rng, 19, 30000, 500.0);
    const auto windows = partition(s, 60.0);
    REQUIRE(windows.size() == 1);
    CHECK(windows[0].data == s.data);
}

TEST_CASE("partition drops the trailing remainder") {
    Rng rng(6);
    const SignalSample s = testutil::random_sample(rng, 1, 100, 10.0);
    const auto windows = partition(s, 3.0);
    REQUIRE(windows.size() == 3);
    for (const auto& w : windows) CHECK(w.n_time() == 30);
    // disjoint, ordered, concatenating to a prefix of the input
    for (std::size_t w = 0; w < windows.size(); ++w)
        for (std::size_t t = 0; t < 30; ++t) CHECK(windows[w].data(0, t) == s.data(0, w * 30 + t));
}

TEST_CASE("partition with an oversized window yields no samples") {
    Rng rng(7);
    const SignalSample s = testutil::random_sample(rng, 2, 600, 10.0);  // 60 s recording
    CHECK(partition(s, 1000.0).empty());
}

TEST_CASE("partition rejects windows under two samples") {
    Rng rng(8);
    const SignalSample s = testutil::random_sample(rng, 2, 600, 10.0);
    CHECK_THROWS_AS(partition(s, 0.1), input_error);
}

TEST_CASE("partition inherits subject and label") {
    Rng rng(9);
    const SignalSample s = testutil::random_sample(rng, 2, 100, 10.0, "patient7", 1);
    const auto windows = partition(s, 2.0);
    REQUIRE_FALSE(windows.empty());
    for (const auto& w : windows) {
        CHECK(w.subject_id == "patient7");
        CHECK(w.label == 1);
        CHECK(w.fs == s.fs);
    }
}

TEST_CASE("bundle round-trip preserves shape and metadata") {
    Rng rng(10);
    DatasetBundle b = testutil::random_bundle(rng, 2, 4, 100, 500.0);
    b.name = "pair";
    const fs::path dir = temp_dir("roundtrip_small");
    save_bundle(b, dir);
    const DatasetBundle loaded = load_bundle(dir);
    REQUIRE(loaded.samples.size() == 2);
    CHECK(loaded.n_channels() == 4);
    CHECK(loaded.fs() == 500.0);
    CHECK(loaded.name == "pair");
    CHECK(loaded.samples[0].subject_id == b.samples[0].subject_id);
    fs::remove_all(dir);
}

TEST_CASE("bundle payloads at paper scale load back with declared shape") {
    Rng rng(11);
    DatasetBundle b = testutil::random_bundle(rng, 1, 19, 30000, 500.0);
    const fs::path dir = temp_dir("roundtrip_large");
    save_bundle(b, dir);
    const DatasetBundle loaded = load_bundle(dir);
    REQUIRE(loaded.samples.size() == 1);
    CHECK(loaded.samples[0].n_channels() == 19);
    CHECK(loaded.samples[0].n_time() == 30000);
    fs::remove_all(dir);
}

TEST_CASE("truncated payload is a payload size mismatch") {
    Rng rng(12);
    DatasetBundle b = testutil::random_bundle(rng, 1, 3, 40, 100.0);
    const fs::path dir = temp_dir("truncated");
    save_bundle(b, dir);
    fs::resize_file(dir / "sample_00000.f32", 3 * 40 * 4 - 4);
    CHECK_THROWS_WITH(load_bundle(dir), Catch::Matchers::ContainsSubstring("payload size mismatch"));
    fs::remove_all(dir);
}

TEST_CASE("missing manifest is reported") {
    const fs::path dir = temp_dir("missing_manifest");
    fs::create_directories(dir);
    CHECK_THROWS_WITH(load_bundle(dir), Catch::Matchers::ContainsSubstring("manifest"));
    fs::remove_all(dir);
}

TEST_CASE("non-finite payload values are rejected") {
    Rng rng(13);
    DatasetBundle b = testutil::random_bundle(rng, 1, 2, 16, 32.0);
    const fs::path dir = temp_dir("nonfinite");
    save_bundle(b, dir);
    {
        std::fstream f(dir / "sample_00000.f32", std::ios::binary | std::ios::in | std::ios::out);
        const float bad = std::numeric_limits<float>::quiet_NaN();
        f.write(reinterpret_cast<const char*>(&bad), sizeof(bad));
    }
    CHECK_THROWS_WITH(load_bundle(dir), Catch::Matchers::ContainsSubstring("non-finite"));
    fs::remove_all(dir);
}

TEST_CASE("empty bundle round-trips") {
    DatasetBundle b;
    b.name = "empty";
    const fs::path dir = temp_dir("empty_bundle");
    save_bundle(b, dir);
    const DatasetBundle loaded = load_bundle(dir);
    CHECK(loaded.samples.empty());
    CHECK(loaded.name == "empty");
    fs::remove_all(dir);
}

TEST_CASE("one-sample bundle writes one payload plus manifest") {
    Rng rng(14);
    DatasetBundle b = testutil::random_bundle(rng, 1, 2, 16, 32.0);
    const fs::path dir = temp_dir("single");
    save_bundle(b, dir);
    CHECK(fs::exists(dir / "manifest.json"));
    CHECK(fs::exists(dir / "sample_00000.f32"));
    std::size_t files = 0;
    for (const auto& entry : fs::directory_iterator(dir)) {
        (void)entry;
        ++files;
    }
    CHECK(files == 2);
    fs::remove_all(dir);
}

TEST_CASE("random bundles round-trip losslessly at 32-bit storage precision") {
    Rng rng(15);
    for (int trial = 0; trial < 10; ++trial) {
        const std::size_t nc = 1 + uniform_index(rng, 5);
        const std::size_t nt = 2 + uniform_index(rng, 64);
        const std::size_t n = 1 + uniform_index(rng, 4);
        DatasetBundle b = testutil::random_bundle(rng, n, nc, nt, 64.0);
        const fs::path dir = temp_dir("property_" + std::to_string(trial));
        save_bundle(b, dir);
        const DatasetBundle loaded = load_bundle(dir);
        REQUIRE(loaded.samples.size() == b.samples.size());
        for (std::size_t i = 0; i < b.samples.size(); ++i) {
            for (std::size_t k = 0; k < b.samples[i].data.data.size(); ++k) {
                const double stored = static_cast<double>(static_cast<float>(b.samples[i].data.data[k]));
                CHECK(loaded.samples[i].data.data[k] == stored);
            }
        }
        // a second save of the loaded bundle reproduces the payload bytes
        const fs::path dir2 = temp_dir("property_again_" + std::to_string(trial));
        save_bundle(loaded, dir2);
        for (std::size_t i = 0; i < b.samples.size(); ++i) {
            char name[32];
            std::snprintf(name, sizeof(name), "sample_%05zu.f32", i);
            std::ifstream f1(dir / name, std::ios::binary);
            std::ifstream f2(dir2 / name, std::ios::binary);
            const std::string c1((std::istreambuf_iterator<char>(f1)), std::istreambuf_iterator<char>());
            const std::string c2((std::istreambuf_iterator<char>(f2)), std::istreambuf_iterator<char>());
            CHECK(c1 == c2);
        }
        fs::remove_all(dir);
        fs::remove_all(dir2);
    }
}

TEST_CASE("keep flags survive the round trip") {
    Rng rng(16);
    DatasetBundle b = testutil::random_bundle(rng, 3, 2, 16, 32.0);
    b.keep = {true, false, true};
    const fs::path dir = temp_dir("keepflags");
    save_bundle(b, dir);
    const DatasetBundle loaded = load_bundle(dir);
    CHECK(loaded.kept(0));
    CHECK_FALSE(loaded.kept(1));
    CHECK(loaded.kept(2));
    fs::remove_all(dir);
}

TEST_CASE("csv import reads header names and channel-major data") {
    const fs::path file = fs::temp_directory_path() / "trisweep_import.csv";
    {
        std::ofstream f(file);
        f << "Fp1,Fp2\n";
        f << "0.5,1.5\n";
        f << "0.25,-2.0\n";
        f << "1.0,3.0\n";
    }
    std::vector<std::string> names;
    const SignalSample s = import_csv_sample(file, 250.0, "subjA", 1, &names);
    CHECK(names == std::vector<std::string>{"Fp1", "Fp2"});
    REQUIRE(s.n_channels() == 2);
    REQUIRE(s.n_time() == 3);
    CHECK(s.data(0, 1) == 0.25);
    CHECK(s.data(1, 2) == 3.0);
    CHECK(s.label == 1);
    fs::remove(file);
}

TEST_CASE("csv import rejects ragged rows") {
    const fs::path file = fs::temp_directory_path() / "trisweep_bad.csv";
    {
        std::ofstream f(file);
        f << "a,b\n1,2\n3\n";
    }
    CHECK_THROWS_AS(import_csv_sample(file, 100.0, "s", 0), input_error);
    fs::remove(file);
}

TEST_CASE("synthesize is a pure function of its spec") {
    SynthSpec spec;
    spec.n_subjects_per_class = 2;
    spec.samples_per_subject = 2;
    spec.n_channels = 4;
    spec.n_time = 256;
    spec.fs = 128.0;
    spec.effect = EffectDimension::spatial;
    spec.effect_size = 1.0;
    spec.seed = 99;
    const DatasetBundle a = synthesize(spec);
    const DatasetBundle b = synthesize(spec);
    REQUIRE(a.samples.size() == b.samples.size());
    for (std::size_t i = 0; i < a.samples.size(); ++i) CHECK(a.samples[i].data == b.samples[i].data);
}

TEST_CASE("synthesize shapes, labels, and subjects") {
    SynthSpec spec;
    spec.n_subjects_per_class = 3;
    spec.samples_per_subject = 2;
    spec.n_channels = 5;
    spec.n_time = 128;
    spec.fs = 64.0;
    spec.seed = 5;
    const DatasetBundle b = synthesize(spec);
    validate(b);
    CHECK(b.samples.size() == 12);
    CHECK(b.subjects().size() == 6);
    std::size_t patients = 0;
    for (const auto& s : b.samples) patients += s.label;
    CHECK(patients == 6);
}

TEST_CASE("zero effect size leaves classes statistically identical") {
    SynthSpec spec;
    spec.n_subjects_per_class = 10;
    spec.samples_per_subject = 2;
    spec.n_channels = 4;
    spec.n_time = 512;
    spec.fs = 128.0;
    spec.effect = EffectDimension::spectral;
    spec.effect_size = 0.0;
    spec.seed = 321;
    const DatasetBundle b = synthesize(spec);
    std::vector<double> feature;
    std::vector<int> labels;
    for (const auto& s : b.samples) {
        feature.push_back(testutil::mean_power(s));
        labels.push_back(s.label);
    }
    const double p = testutil::permutation_test(feature, labels, 1000, 777);
    CHECK(p > 0.01);
}

TEST_CASE("a large spectral effect separates classes by planted band power") {
    SynthSpec spec;
    spec.n_subjects_per_class = 10;
    spec.samples_per_subject = 2;
    spec.n_channels = 4;
    spec.n_time = 1024;
    spec.fs = 128.0;
    spec.effect = EffectDimension::spectral;
    spec.effect_size = 2.0;
    spec.seed = 4242;
    const DatasetBundle b = synthesize(spec);
    std::vector<double> scores;
    std::vector<int> labels;
    for (const auto& s : b.samples) {
        scores.push_back(testutil::band_power(s, planted_band_low_hz, planted_band_high_hz));
        labels.push_back(s.label);
    }
    CHECK(testutil::auc(scores, labels) > 0.9);
}

TEST_CASE("invalid synth specs are rejected") {
    SynthSpec spec;
    spec.n_subjects_per_class = 0;
    CHECK_THROWS_AS(synthesize(spec), input_error);
    spec.n_subjects_per_class = 1;
    spec.effect_size = -1.0;
    CHECK_THROWS_AS(synthesize(spec), input_error);
}
