#pragma once

// Mini-batch k-means (web-scale k-means with per-center learning rates)
// seeded by k-means++ on a uniformly sampled subset.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "qpass/error.hpp"
#include "qpass/scaling.hpp"

namespace qpass {

struct KMeansConfig {
    std::size_t batch_size = 1024;
    std::size_t max_iterations = 300;
    /// Stop once no centroid moves more than this within one batch step.
    double tolerance = 1e-4;
    /// k-means++ sample size; 0 picks max(3 * batch_size, 3 * c).
    std::size_t init_size = 0;
    std::uint64_t seed = 0;
};

template <typename Scalar, int Dim = Eigen::Dynamic>
struct KMeansResult {
    PointMatrix<Scalar, Dim> centroids;
    Scalar inertia = 0;
    Scalar init_inertia = 0;
    std::size_t iterations = 0;
    bool converged = false;
    /// Nearest returned centroid of every input point.
    std::vector<Eigen::Index> labels;
};

/// Index of the nearest row of `centroids` to `query`; ties go to the lowest index.
template <typename CDerived, typename QDerived>
Eigen::Index nearest_centroid(const Eigen::MatrixBase<CDerived>& centroids, const Eigen::MatrixBase<QDerived>& query) {
    using Scalar = typename CDerived::Scalar;
    Eigen::Index best = 0;
    Scalar best_d = std::numeric_limits<Scalar>::infinity();
    for (Eigen::Index k = 0; k < centroids.rows(); ++k) {
        const Scalar d = (centroids.row(k) - query).squaredNorm();
        if (d < best_d) {
            best_d = d;
            best = k;
        }
    }
    return best;
}

/// Nearest centroid for every row of `points`, with the squared distance; ties go to
/// the lowest index. Centroids are held feature-major so one point's distances to all
/// of them come from contiguous, vectorizable loops.
template <typename PDerived, typename CDerived>
void assign_nearest(const Eigen::MatrixBase<PDerived>& points, const Eigen::MatrixBase<CDerived>& centroids,
                    std::vector<Eigen::Index>& labels, std::vector<typename PDerived::Scalar>& sq_dist) {
    using Scalar = typename PDerived::Scalar;
    const Eigen::Index n = points.rows();
    const Eigen::Index c = centroids.rows();
    labels.assign(n, 0);
    sq_dist.assign(n, Scalar(0));
    if (n == 0 || c == 0) return;

    const Eigen::Array<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> ct = centroids.transpose();
    Eigen::Array<Scalar, Eigen::Dynamic, 1> d(c);
    for (Eigen::Index i = 0; i < n; ++i) {
        d = (ct.row(0).transpose() - points(i, 0)).square();
        for (Eigen::Index j = 1; j < ct.rows(); ++j) d += (ct.row(j).transpose() - points(i, j)).square();
        const Scalar best = d.minCoeff();
        Eigen::Index k = 0;
        while (d(k) != best) ++k;
        labels[i] = k;
        sq_dist[i] = best;
    }
}

template <typename PDerived, typename CDerived>
typename PDerived::Scalar inertia(const Eigen::MatrixBase<PDerived>& points, const Eigen::MatrixBase<CDerived>& centroids) {
    std::vector<Eigen::Index> labels;
    std::vector<typename PDerived::Scalar> d;
    assign_nearest(points, centroids, labels, d);
    return std::accumulate(d.begin(), d.end(), typename PDerived::Scalar(0));
}

/// k-means++ seeding over the rows of `points`, with greedy local trials.
/// Throws when fewer than `c` distinct points are available.
template <typename Derived>
PointMatrix<typename Derived::Scalar, Derived::ColsAtCompileTime> kmeans_plus_plus(
    const Eigen::MatrixBase<Derived>& points, std::size_t c, std::mt19937_64& rng) {
    using Scalar = typename Derived::Scalar;
    const Eigen::Index n = points.rows();
    PointMatrix<Scalar, Derived::ColsAtCompileTime> centers(static_cast<Eigen::Index>(c), points.cols());
    if (c == 0) return centers;

    std::uniform_int_distribution<Eigen::Index> pick(0, n - 1);
    centers.row(0) = points.row(pick(rng));

    std::vector<Scalar> closest(n);
    for (Eigen::Index i = 0; i < n; ++i) closest[i] = (points.row(i) - centers.row(0)).squaredNorm();

    const std::size_t trials = 2 + static_cast<std::size_t>(std::log(static_cast<double>(c)));
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<Scalar> cumulative(n);
    std::vector<Scalar> candidate(n), best_candidate(n);

    for (std::size_t k = 1; k < c; ++k) {
        std::partial_sum(closest.begin(), closest.end(), cumulative.begin());
        const Scalar total = cumulative.back();
        if (!(total > Scalar(0)))
            throw validation_error("k-means++: only " + std::to_string(k) + " distinct points, cannot place " +
                                   std::to_string(c) + " centroids; lower c");

        Eigen::Index best_index = -1;
        Scalar best_potential = std::numeric_limits<Scalar>::infinity();
        for (std::size_t t = 0; t < trials; ++t) {
            const Scalar r = static_cast<Scalar>(unit(rng)) * total;
            auto it = std::upper_bound(cumulative.begin(), cumulative.end(), r);
            Eigen::Index idx = std::min<Eigen::Index>(it - cumulative.begin(), n - 1);
            while (closest[idx] == Scalar(0) && idx + 1 < n) ++idx;  // never reuse an existing center
            if (closest[idx] == Scalar(0)) continue;
            Scalar potential = 0;
            for (Eigen::Index i = 0; i < n; ++i) {
                candidate[i] = std::min(closest[i], (points.row(i) - points.row(idx)).squaredNorm());
                potential += candidate[i];
            }
            if (potential < best_potential) {
                best_potential = potential;
                best_index = idx;
                best_candidate.swap(candidate);
            }
        }
        if (best_index < 0) {
            // every sampled trial hit an exhausted tail; fall back to the farthest point
            best_index = static_cast<Eigen::Index>(std::max_element(closest.begin(), closest.end()) - closest.begin());
            for (Eigen::Index i = 0; i < n; ++i)
                best_candidate[i] = std::min(closest[i], (points.row(i) - points.row(best_index)).squaredNorm());
        }
        centers.row(static_cast<Eigen::Index>(k)) = points.row(best_index);
        closest.swap(best_candidate);
    }
    return centers;
}

/// Clusters the rows of `points` (already scaled) into `c` groups. Deterministic for a fixed seed.
/// The returned centroids never have higher full-data inertia than the k-means++ seeding.
template <typename Derived>
KMeansResult<typename Derived::Scalar, Derived::ColsAtCompileTime> mini_batch_kmeans(
    const Eigen::MatrixBase<Derived>& points, std::size_t c, const KMeansConfig& cfg) {
    using Scalar = typename Derived::Scalar;
    constexpr int Dim = Derived::ColsAtCompileTime;
    const auto n = static_cast<std::size_t>(points.rows());
    if (c == 0) throw config_error("mini_batch_kmeans: cluster count must be positive");
    if (n < c)
        throw validation_error("mini_batch_kmeans: " + std::to_string(n) + " points cannot form " +
                               std::to_string(c) + " clusters; lower c");

    std::mt19937_64 rng(cfg.seed);

    // k-means++ on a uniform subset
    std::size_t init_size = cfg.init_size != 0 ? cfg.init_size : std::max(3 * cfg.batch_size, 3 * c);
    init_size = std::clamp(init_size, c, n);
    PointMatrix<Scalar, Dim> centroids;
    if (init_size == n) {
        centroids = kmeans_plus_plus(points, c, rng);
    } else {
        std::vector<Eigen::Index> idx(n);
        std::iota(idx.begin(), idx.end(), Eigen::Index{0});
        for (std::size_t i = 0; i < init_size; ++i) {
            std::uniform_int_distribution<std::size_t> d(i, n - 1);
            std::swap(idx[i], idx[d(rng)]);
        }
        PointMatrix<Scalar, Dim> subset(static_cast<Eigen::Index>(init_size), points.cols());
        for (std::size_t i = 0; i < init_size; ++i) subset.row(static_cast<Eigen::Index>(i)) = points.row(idx[i]);
        try {
            centroids = kmeans_plus_plus(subset, c, rng);
        } catch (const Error&) {
            // subset too degenerate; seed from the full data instead
            centroids = kmeans_plus_plus(points, c, rng);
        }
    }
    const PointMatrix<Scalar, Dim> init = centroids;

    KMeansResult<Scalar, Dim> result;
    std::vector<Scalar> counts(c, Scalar(0));
    const bool full_batch = n <= cfg.batch_size;
    const std::size_t batch = full_batch ? n : cfg.batch_size;
    PointMatrix<Scalar, Dim> batch_points(static_cast<Eigen::Index>(batch), points.cols());
    std::uniform_int_distribution<Eigen::Index> pick(0, static_cast<Eigen::Index>(n) - 1);
    std::vector<Eigen::Index> labels;
    std::vector<Scalar> sq;

    for (std::size_t it = 0; it < cfg.max_iterations; ++it) {
        if (full_batch) {
            batch_points = points;
        } else {
            for (std::size_t i = 0; i < batch; ++i) batch_points.row(static_cast<Eigen::Index>(i)) = points.row(pick(rng));
        }
        assign_nearest(batch_points, centroids, labels, sq);

        const PointMatrix<Scalar, Dim> before = centroids;
        for (std::size_t i = 0; i < batch; ++i) {
            const auto k = labels[i];
            counts[k] += Scalar(1);
            const Scalar lr = Scalar(1) / counts[k];
            centroids.row(k) += lr * (batch_points.row(static_cast<Eigen::Index>(i)) - centroids.row(k));
        }
        result.iterations = it + 1;
        const Scalar moved = (centroids - before).rowwise().norm().maxCoeff();
        if (moved < static_cast<Scalar>(cfg.tolerance)) {
            result.converged = true;
            break;
        }
    }

    std::vector<Eigen::Index> init_labels;
    assign_nearest(points, init, init_labels, sq);
    result.init_inertia = std::accumulate(sq.begin(), sq.end(), Scalar(0));
    assign_nearest(points, centroids, result.labels, sq);
    result.inertia = std::accumulate(sq.begin(), sq.end(), Scalar(0));
    if (result.inertia > result.init_inertia) {
        result.centroids = init;
        result.inertia = result.init_inertia;
        result.labels = std::move(init_labels);
    } else {
        result.centroids = std::move(centroids);
    }
    return result;
}

}  // namespace qpass
