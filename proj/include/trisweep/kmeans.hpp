#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include "trisweep/common.hpp"
#include "trisweep/graph.hpp"
#include "trisweep/matrix.hpp"

namespace trisweep {

namespace detail {

inline double squared_distance(const double* a, const double* b, std::size_t dim) {
    double s = 0.0;
    for (std::size_t i = 0; i < dim; ++i) {
        const double d = a[i] - b[i];
        s += d * d;
    }
    return s;
}

struct LloydRun {
    std::vector<int> assignment;
    double wcss = std::numeric_limits<double>::infinity();
};

// k-means++ seeding. If all remaining D^2 mass is zero (duplicate points),
// fall back to the lowest-index point that is not already a center.
inline std::vector<std::size_t> kmeanspp_centers(const Matrix& points, std::size_t k, Rng& rng) {
    const std::size_t n = points.rows;
    std::vector<std::size_t> centers;
    centers.push_back(uniform_index(rng, n));
    std::vector<double> d2(n, std::numeric_limits<double>::infinity());
    while (centers.size() < k) {
        const double* last = points.row(centers.back());
        double total = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            d2[i] = std::min(d2[i], squared_distance(points.row(i), last, points.cols));
            total += d2[i];
        }
        std::size_t pick = n;
        if (total > 0.0) {
            const double r = uniform01(rng) * total;
            double acc = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                acc += d2[i];
                if (acc > r) {
                    pick = i;
                    break;
                }
            }
            if (pick == n) {  // r landed on the last sliver of rounding
                for (std::size_t i = n; i-- > 0;)
                    if (d2[i] > 0.0) {
                        pick = i;
                        break;
                    }
            }
        }
        if (pick == n) {
            for (std::size_t i = 0; i < n; ++i)
                if (std::find(centers.begin(), centers.end(), i) == centers.end()) {
                    pick = i;
                    break;
                }
        }
        centers.push_back(pick);
    }
    return centers;
}

inline LloydRun lloyd(const Matrix& points, std::size_t k, Rng& rng, int max_iterations) {
    const std::size_t n = points.rows;
    const std::size_t dim = points.cols;

    Matrix centroids(k, dim);
    const auto seeds = kmeanspp_centers(points, k, rng);
    for (std::size_t c = 0; c < k; ++c)
        for (std::size_t j = 0; j < dim; ++j) centroids(c, j) = points(seeds[c], j);

    std::vector<int> assignment(n, -1);
    for (int iter = 0; iter < max_iterations; ++iter) {
        // assign, ties broken by lowest cluster index
        bool changed = false;
        for (std::size_t i = 0; i < n; ++i) {
            int best = 0;
            double best_d = squared_distance(points.row(i), centroids.row(0), dim);
            for (std::size_t c = 1; c < k; ++c) {
                const double d = squared_distance(points.row(i), centroids.row(c), dim);
                if (d < best_d) {
                    best_d = d;
                    best = static_cast<int>(c);
                }
            }
            if (assignment[i] != best) {
                assignment[i] = best;
                changed = true;
            }
        }

        // empty clusters take the point farthest from its current centroid
        std::vector<std::size_t> counts(k, 0);
        for (int a : assignment) ++counts[static_cast<std::size_t>(a)];
        for (std::size_t c = 0; c < k; ++c) {
            if (counts[c] > 0) continue;
            std::size_t farthest = 0;
            double far_d = -1.0;
            for (std::size_t i = 0; i < n; ++i) {
                const auto ci = static_cast<std::size_t>(assignment[i]);
                if (counts[ci] <= 1) continue;  // do not empty another cluster
                const double d = squared_distance(points.row(i), centroids.row(ci), dim);
                if (d > far_d) {
                    far_d = d;
                    farthest = i;
                }
            }
            --counts[static_cast<std::size_t>(assignment[farthest])];
            assignment[farthest] = static_cast<int>(c);
            ++counts[c];
            changed = true;
        }

        // update centroids
        Matrix sums(k, dim);
        for (std::size_t i = 0; i < n; ++i) {
            const auto c = static_cast<std::size_t>(assignment[i]);
            for (std::size_t j = 0; j < dim; ++j) sums(c, j) += points(i, j);
        }
        for (std::size_t c = 0; c < k; ++c)
            for (std::size_t j = 0; j < dim; ++j) centroids(c, j) = sums(c, j) / static_cast<double>(counts[c]);

        if (!changed) break;
    }

    LloydRun run;
    run.assignment = assignment;
    run.wcss = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        run.wcss += squared_distance(points.row(i), centroids.row(static_cast<std::size_t>(assignment[i])), dim);
    return run;
}

}  // namespace detail

// Deterministic k-means: k-means++ seeding, 10 restarts with seeds derived
// from the base seed, at most 300 Lloyd iterations each, best restart by
// within-cluster sum of squares (ties keep the earlier restart). Output
// labels are canonical: clusters numbered by their smallest member index.
inline ClusterAssignment kmeans(const Matrix& points, int n_clusters, std::uint64_t seed) {
    const std::size_t n = points.rows;
    if (n_clusters < 1) throw input_error("kmeans: need at least one cluster");
    if (static_cast<std::size_t>(n_clusters) > n)
        throw input_error("kmeans: more clusters than points");

    constexpr int n_restarts = 10;
    constexpr int max_iterations = 300;

    detail::LloydRun best;
    for (int r = 0; r < n_restarts; ++r) {
        Rng rng(hash_combine(seed, static_cast<std::uint64_t>(r)));
        detail::LloydRun run = detail::lloyd(points, static_cast<std::size_t>(n_clusters), rng, max_iterations);
        if (run.wcss < best.wcss) best = std::move(run);
    }

    // canonical relabeling by smallest member index per cluster
    std::vector<int> relabel(static_cast<std::size_t>(n_clusters), -1);
    int next = 0;
    for (std::size_t i = 0; i < n; ++i) {
        auto& slot = relabel[static_cast<std::size_t>(best.assignment[i])];
        if (slot < 0) slot = next++;
    }
    ClusterAssignment out;
    out.n_clusters = n_clusters;
    out.group_index.resize(n);
    for (std::size_t i = 0; i < n; ++i)
        out.group_index[i] = relabel[static_cast<std::size_t>(best.assignment[i])];
    validate(out);
    return out;
}

}  // namespace trisweep
