#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "trisweep/features.hpp"

#include "test_util.hpp"

using namespace trisweep;

namespace {

SignalSample ramp_sample(std::size_t nt, double fs) {
    SignalSample s;
    s.fs = fs;
    s.subject_id = "s0";
    s.data = Matrix(1, nt);
    for (std::size_t t = 0; t < nt; ++t) s.data(0, t) = static_cast<double>(t);
    return s;
}

SignalSample sinusoid_sample(std::size_t nt, double fs, double freq_hz, std::size_t nc = 1) {
    SignalSample s;
    s.fs = fs;
    s.subject_id = "s0";
    s.data = Matrix(nc, nt);
    for (std::size_t c = 0; c < nc; ++c)
        for (std::size_t t = 0; t < nt; ++t)
            s.data(c, t) = std::sin(2.0 * M_PI * freq_hz * static_cast<double>(t) / fs);
    return s;
}

}  // namespace

TEST_CASE("segment_length evaluates the rounding rule") {
    CHECK(segment_length(60, 512.0, 45.0) == 683);  // 30720/45 = 682.67
    CHECK(segment_length(60, 500.0, 45.0) == 667);  // 30000/45 = 666.67
    CHECK(segment_length(45, 45.0, 45.0) == 45);
}

TEST_CASE("segment_length rejects degenerate segments") {
    CHECK_THROWS_AS(segment_length(1, 45.0, 45.0), input_error);  // length 1
    CHECK_THROWS_AS(segment_length(0, 100.0, 45.0), input_error);
    CHECK_THROWS_AS(segment_length(4, -1.0, 45.0), input_error);
}

TEST_CASE("segmentation counts and covers half-overlapping windows") {
    const SignalSample s = ramp_sample(6145, 512.0);
    const SegmentTensor seg = segment(s, 683);
    CHECK(seg.n_segments() == 17);
    CHECK(seg.segment_length() == 683);
    // last segment covers [5456, 6139)
    CHECK(seg.values(0, 16, 0) == 5456.0);
    CHECK(seg.values(0, 16, 682) == 6138.0);
}

TEST_CASE("segment equal to the recording yields one segment") {
    const SignalSample s = ramp_sample(100, 100.0);
    const SegmentTensor seg = segment(s, 100);
    REQUIRE(seg.n_segments() == 1);
    for (std::size_t t = 0; t < 100; ++t) CHECK(seg.values(0, 0, t) == s.data(0, t));
}

TEST_CASE("segments start at multiples of the hop") {
    const SignalSample s = ramp_sample(10, 10.0);
    const SegmentTensor seg = segment(s, 4);
    REQUIRE(seg.n_segments() == 4);
    for (std::size_t j = 0; j < 4; ++j)
        for (std::size_t k = 0; k < 4; ++k) CHECK(seg.values(0, j, k) == static_cast<double>(j * 2 + k));
}

TEST_CASE("segment rejects windows longer than the recording") {
    const SignalSample s = ramp_sample(10, 10.0);
    CHECK_THROWS_AS(segment(s, 11), input_error);
    CHECK_THROWS_AS(segment(s, 1), input_error);
}

TEST_CASE("hanning window matches the closed form") {
    const auto w4 = hanning_window(4);
    REQUIRE(w4.size() == 4);
    CHECK(w4[0] == 0.0);
    CHECK(w4[1] == Catch::Approx(0.1875).margin(1e-15));
    CHECK(w4[2] == Catch::Approx(0.1875).margin(1e-15));
    CHECK(w4[3] == 0.0);

    const auto w3 = hanning_window(3);
    CHECK(w3[0] == 0.0);
    CHECK(w3[1] == Catch::Approx(1.0 / 3.0).margin(1e-15));
    CHECK(w3[2] == 0.0);
}

TEST_CASE("hanning window endpoints and symmetry") {
    for (int n : {2, 5, 16, 301}) {
        const auto w = hanning_window(n);
        CHECK(w.front() == 0.0);
        CHECK(w.back() == 0.0);
        for (int i = 0; i < n; ++i)
            CHECK(w[static_cast<std::size_t>(i)] ==
                  Catch::Approx(w[static_cast<std::size_t>(n - 1 - i)]).margin(1e-15));
    }
    CHECK_THROWS_AS(hanning_window(1), input_error);
}

TEST_CASE("psd of silence is zero") {
    SignalSample s = ramp_sample(64, 64.0);
    for (double& v : s.data.data) v = 0.0;
    const Tensor3 p = psd(segment(s, 16), 8);
    for (double v : p.data) CHECK(v == 0.0);
}

TEST_CASE("psd of a constant concentrates in the zero bin") {
    const double c = 2.5;
    SignalSample s = ramp_sample(64, 64.0);
    for (double& v : s.data.data) v = c;
    const int len = 16;
    const Tensor3 p = psd(segment(s, len), 8);

    const auto w = hanning_window(len);
    double w_sum = 0.0, w2_sum = 0.0;
    for (double x : w) {
        w_sum += x;
        w2_sum += x * x;
    }
    const double expected = c * c * w_sum * w_sum / w2_sum;
    for (std::size_t j = 0; j < p.d1; ++j) {
        CHECK(p(0, j, 0) == Catch::Approx(expected).margin(1e-9));
        std::size_t argmax = 0;
        for (std::size_t n = 1; n < p.d2; ++n)
            if (p(0, j, n) > p(0, j, argmax)) argmax = n;
        CHECK(argmax == 0);
    }
}

TEST_CASE("pure sinusoids localize to their bin in every segment") {
    const std::size_t len = 64;
    const double fs = 128.0;
    Rng rng(11);
    for (int trial = 0; trial < 6; ++trial) {
        const std::size_t k = 1 + uniform_index(rng, 30);  // bins 1..30, all below Nyquist
        const double freq = static_cast<double>(k) * fs / static_cast<double>(len);
        const SignalSample s = sinusoid_sample(640, fs, freq, 2);
        const Tensor3 p = psd(segment(s, static_cast<int>(len)), 32);
        for (std::size_t c = 0; c < p.d0; ++c)
            for (std::size_t j = 0; j < p.d1; ++j) {
                std::size_t argmax = 1;
                for (std::size_t n = 2; n < p.d2; ++n)
                    if (p(c, j, n) > p(c, j, argmax)) argmax = n;
                CHECK(argmax == k);
            }
    }
}

TEST_CASE("psd is nonnegative and scales quadratically") {
    Rng rng(12);
    SignalSample s = testutil::random_sample(rng, 3, 200, 100.0);
    const Tensor3 p1 = psd(segment(s, 32), 16);
    for (double v : p1.data) CHECK(v >= 0.0);

    const double alpha = 3.0;
    SignalSample scaled = s;
    for (double& v : scaled.data.data) v *= alpha;
    const Tensor3 p2 = psd(segment(scaled, 32), 16);
    for (std::size_t i = 0; i < p1.data.size(); ++i)
        CHECK(p2.data[i] == Catch::Approx(alpha * alpha * p1.data[i]).margin(1e-9));
}

TEST_CASE("psd rejects more bins than segment samples") {
    const SignalSample s = ramp_sample(64, 64.0);
    CHECK_THROWS_AS(psd(segment(s, 16), 17), input_error);
}

TEST_CASE("temporal grouping clamps the remainder into the last group") {
    std::vector<int> sizes(5, 0);
    for (int j = 0; j < 17; ++j) ++sizes[static_cast<std::size_t>(temporal_group_index(j, 17, 5))];
    CHECK(sizes == std::vector<int>{3, 3, 3, 3, 5});
}

TEST_CASE("temporal grouping degenerate cases") {
    for (int j = 0; j < 9; ++j) CHECK(temporal_group_index(j, 9, 1) == 0);
    for (int j = 0; j < 9; ++j) CHECK(temporal_group_index(j, 9, 9) == j);
    CHECK_THROWS_AS(temporal_group_index(0, 4, 5), input_error);
    CHECK_THROWS_AS(temporal_group_index(4, 4, 2), input_error);
}

TEST_CASE("temporal assignment averages within groups") {
    const AssignmentMatrix a = temporal_assignment(2, 1);
    CHECK(a.values(0, 0) == 0.5);
    CHECK(a.values(1, 0) == 0.5);

    const AssignmentMatrix b = temporal_assignment(17, 5);
    validate(b);
    for (std::size_t col = 0; col < 5; ++col) {
        double sum = 0.0;
        for (std::size_t row = 0; row < 17; ++row) {
            const double v = b.values(row, col);
            if (v != 0.0) CHECK((v == Catch::Approx(1.0 / 3.0) || v == Catch::Approx(1.0 / 5.0)));
            sum += v;
        }
        CHECK(sum == Catch::Approx(1.0).margin(1e-12));
    }

    const AssignmentMatrix c = temporal_assignment(4, 4);
    CHECK(c.values == Matrix::identity(4));
}

TEST_CASE("assignment matrices satisfy their invariants for random sizes") {
    Rng rng(13);
    for (int trial = 0; trial < 30; ++trial) {
        const int n_seg = 1 + static_cast<int>(uniform_index(rng, 40));
        const int n_t = 1 + static_cast<int>(uniform_index(rng, static_cast<std::size_t>(n_seg)));
        const AssignmentMatrix a = temporal_assignment(n_seg, n_t);
        validate(a);  // row nonzero count, column sums, nonempty groups
        // surjectivity: groups partition 0..n_seg-1
        std::vector<bool> seen(static_cast<std::size_t>(n_t), false);
        for (int g : a.group_index) seen[static_cast<std::size_t>(g)] = true;
        for (bool s : seen) CHECK(s);
    }
}

TEST_CASE("pool_temporal averages segments per group") {
    Tensor3 p(1, 4, 1);
    p(0, 0, 0) = 1.0;
    p(0, 1, 0) = 2.0;
    p(0, 2, 0) = 3.0;
    p(0, 3, 0) = 4.0;
    const Tensor3 pooled = pool_temporal(p, temporal_assignment(4, 2));
    REQUIRE(pooled.d1 == 2);
    CHECK(pooled(0, 0, 0) == Catch::Approx(1.5));
    CHECK(pooled(0, 1, 0) == Catch::Approx(3.5));
}

TEST_CASE("pool_temporal preserves constants and identity") {
    Tensor3 p(2, 6, 3, 7.25);
    const Tensor3 pooled = pool_temporal(p, temporal_assignment(6, 2));
    for (double v : pooled.data) CHECK(v == Catch::Approx(7.25).margin(1e-12));

    Rng rng(14);
    Tensor3 q(2, 5, 3);
    for (double& v : q.data) v = uniform01(rng);
    const Tensor3 same = pool_temporal(q, temporal_assignment(5, 5));
    for (std::size_t i = 0; i < q.data.size(); ++i)
        CHECK(same.data[i] == Catch::Approx(q.data[i]).margin(1e-15));
}

TEST_CASE("pooling is linear and preserves total mass") {
    Rng rng(15);
    Tensor3 a(3, 11, 4), b(3, 11, 4);
    for (double& v : a.data) v = uniform01(rng);
    for (double& v : b.data) v = uniform01(rng);
    const AssignmentMatrix s = temporal_assignment(11, 4);

    const double alpha = 2.5, beta = -1.25;
    Tensor3 combo(3, 11, 4);
    for (std::size_t i = 0; i < combo.data.size(); ++i) combo.data[i] = alpha * a.data[i] + beta * b.data[i];
    const Tensor3 pooled_combo = pool_temporal(combo, s);
    const Tensor3 pa = pool_temporal(a, s);
    const Tensor3 pb = pool_temporal(b, s);
    for (std::size_t i = 0; i < pooled_combo.data.size(); ++i)
        CHECK(pooled_combo.data[i] == Catch::Approx(alpha * pa.data[i] + beta * pb.data[i]).margin(1e-12));

    // sum over groups weighted by group size equals sum over segments
    std::vector<double> group_sizes(s.n_out(), 0.0);
    for (int g : s.group_index) group_sizes[static_cast<std::size_t>(g)] += 1.0;
    for (std::size_t i = 0; i < a.d0; ++i)
        for (std::size_t n = 0; n < a.d2; ++n) {
            double lhs = 0.0;
            for (std::size_t m = 0; m < pa.d1; ++m) lhs += group_sizes[m] * pa(i, m, n);
            double rhs = 0.0;
            for (std::size_t j = 0; j < a.d1; ++j) rhs += a(i, j, n);
            CHECK(lhs == Catch::Approx(rhs).margin(1e-12));
        }
}

TEST_CASE("feature config validation") {
    FeatureConfig ok{3, 4, 5, 45.0, 60};
    CHECK_NOTHROW(validate(ok));
    FeatureConfig wrong{3, 4, 5, 45.0, 61};
    CHECK_THROWS_AS(validate(wrong), input_error);
    FeatureConfig zero{0, 4, 5, 45.0, 0};
    CHECK_THROWS_AS(validate(zero), input_error);
}
