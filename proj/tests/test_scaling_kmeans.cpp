#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>
#include <set>

#include "qpass/error.hpp"
#include "qpass/kmeans.hpp"
#include "qpass/scaling.hpp"

using namespace qpass;
using Points3 = PointMatrix<double, 3>;

namespace {

// Full-batch Lloyd iteration to convergence, seeded at the given centroids.
Points3 lloyd(const Points3& pts, Points3 cent) {
    for (int it = 0; it < 1000; ++it) {
        Points3 sum = Points3::Zero(cent.rows(), 3);
        std::vector<int> count(static_cast<std::size_t>(cent.rows()), 0);
        for (Eigen::Index i = 0; i < pts.rows(); ++i) {
            Eigen::Index best = 0;
            double bd = 1e300;
            for (Eigen::Index k = 0; k < cent.rows(); ++k) {
                const double d = (pts.row(i) - cent.row(k)).squaredNorm();
                if (d < bd) bd = d, best = k;
            }
            sum.row(best) += pts.row(i);
            ++count[static_cast<std::size_t>(best)];
        }
        Points3 next = cent;
        for (Eigen::Index k = 0; k < cent.rows(); ++k)
            if (count[static_cast<std::size_t>(k)] > 0) next.row(k) = sum.row(k) / count[static_cast<std::size_t>(k)];
        if ((next - cent).cwiseAbs().maxCoeff() < 1e-14) return next;
        cent = next;
    }
    return cent;
}

Points3 two_blobs(std::size_t per_blob, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> noise(0.0, 0.03);
    Points3 p(static_cast<Eigen::Index>(2 * per_blob), 3);
    for (Eigen::Index i = 0; i < p.rows(); ++i) {
        const double cx = i % 2 == 0 ? 0.2 : 0.8;
        p.row(i) << cx + noise(rng), 0.5 + noise(rng), (i % 2 == 0 ? 0.3 : 0.7) + noise(rng);
    }
    return p;
}

}  // namespace

TEST_CASE("min-max scaling") {
    Eigen::Matrix<double, Eigen::Dynamic, 3, Eigen::RowMajor> p(3, 3);
    p << 0, 7, 1, 5, 7, 2, 10, 7, 3;
    auto s = min_max_scale(p);
    CHECK(s.points(0, 0) == 0.0);
    CHECK(s.points(1, 0) == 0.5);
    CHECK(s.points(2, 0) == 1.0);
    CHECK(s.points.col(1).isZero());
    CHECK(s.scaler.scale(1, 7.0) == 0.0);
    CHECK(s.scaler.scale(0, 2.5) == doctest::Approx(0.25));
    CHECK(s.scaler.unscale(0, 0.25) == doctest::Approx(2.5));

    Points3 empty(0, 3);
    CHECK_THROWS_AS(min_max_scale(empty), Error);
}

TEST_CASE("scaling is idempotent on its own output") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-50, 50);
    for (int t = 0; t < 20; ++t) {
        Points3 p(50, 3);
        for (Eigen::Index i = 0; i < p.rows(); ++i) p.row(i) << u(rng), u(rng), u(rng);
        const auto once = min_max_scale(p);
        const auto twice = min_max_scale(once.points);
        CHECK((twice.points - once.points).cwiseAbs().maxCoeff() <= 1e-12);
        CHECK((once.scaler.inverse_transform(once.points) - p).cwiseAbs().maxCoeff() <= 1e-12);
    }
}

TEST_CASE("nearest centroid ties go to the lowest index") {
    Points3 c(5, 3);
    c << 0, 0, 0, 1, 0, 0, 5, 5, 5, 7, 7, 7, -1, 0, 0;
    Eigen::RowVector3d q(0, 0, 0);
    CHECK(nearest_centroid(c, q) == 0);
    // equidistant from 1 and 4
    Eigen::Matrix<double, 1, 3> mid(0, 0, 0);
    c.row(0) << 9, 9, 9;
    CHECK(nearest_centroid(c, mid) == 1);

    std::vector<Eigen::Index> labels;
    std::vector<double> d;
    Points3 q2(1, 3);
    q2 << 0, 0, 0;
    assign_nearest(q2, c, labels, d);
    CHECK(labels[0] == 1);
    CHECK(d[0] == 1.0);
    q2 << 5, 5, 5;
    assign_nearest(q2, c, labels, d);
    CHECK(labels[0] == 2);
}

TEST_CASE("batched assignment agrees with exhaustive comparison") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(0, 1);
    Points3 pts(3000, 3), cent(37, 3);
    for (Eigen::Index i = 0; i < pts.rows(); ++i) pts.row(i) << u(rng), u(rng), u(rng);
    for (Eigen::Index i = 0; i < cent.rows(); ++i) cent.row(i) << u(rng), u(rng), u(rng);
    // duplicate centroids and points on centroids exercise ties
    cent.row(20) = cent.row(3);
    pts.row(5) = cent.row(3);
    std::vector<Eigen::Index> labels;
    std::vector<double> d;
    assign_nearest(pts, cent, labels, d);
    for (Eigen::Index i = 0; i < pts.rows(); ++i) {
        Eigen::Index best = 0;
        double bd = 1e300;
        for (Eigen::Index k = 0; k < cent.rows(); ++k) {
            const double dk = (pts.row(i) - cent.row(k)).squaredNorm();
            if (dk < bd) bd = dk, best = k;
        }
        CHECK(labels[static_cast<std::size_t>(i)] == best);
    }
    CHECK(labels[5] == 3);
}

TEST_CASE("k-means with c = 1 returns the mean") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(0, 1);
    Points3 pts(500, 3);
    for (Eigen::Index i = 0; i < pts.rows(); ++i) pts.row(i) << u(rng), u(rng), u(rng);
    KMeansConfig cfg;
    cfg.seed = 1;
    const auto r = mini_batch_kmeans(pts, 1, cfg);
    CHECK((r.centroids.row(0) - pts.colwise().mean()).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("k-means with c = n covers every point") {
    std::mt19937_64 rng(6);
    std::uniform_real_distribution<double> u(0, 1);
    Points3 pts(40, 3);
    for (Eigen::Index i = 0; i < pts.rows(); ++i) pts.row(i) << u(rng), u(rng), u(rng);
    KMeansConfig cfg;
    const auto r = mini_batch_kmeans(pts, 40, cfg);
    CHECK(r.inertia == doctest::Approx(0.0));
    std::set<std::vector<double>> distinct;
    for (Eigen::Index k = 0; k < r.centroids.rows(); ++k)
        distinct.insert({r.centroids(k, 0), r.centroids(k, 1), r.centroids(k, 2)});
    CHECK(distinct.size() == 40);
}

TEST_CASE("k-means errors") {
    Points3 pts(3, 3);
    pts << 0, 0, 0, 1, 1, 1, 2, 2, 2;
    CHECK_THROWS_AS(mini_batch_kmeans(pts, 4, KMeansConfig{}), Error);
    Points3 dup(5, 3);
    dup.setZero();
    CHECK_THROWS_AS(mini_batch_kmeans(dup, 2, KMeansConfig{}), Error);
}

TEST_CASE("two blobs match the Lloyd oracle") {
    for (std::size_t per : {200u, 3000u}) {
        const Points3 pts = two_blobs(per, 21);
        KMeansConfig cfg;
        cfg.seed = 9;
        const auto r = mini_batch_kmeans(pts, 2, cfg);

        Points3 start(2, 3);
        start.row(0) = pts.row(0);
        start.row(1) = pts.row(1);
        const Points3 oracle = lloyd(pts, start);
        for (Eigen::Index k = 0; k < 2; ++k) {
            double best = 1e300;
            for (Eigen::Index j = 0; j < 2; ++j) best = std::min(best, (r.centroids.row(k) - oracle.row(j)).norm());
            CHECK(best < 0.05);
        }
        CHECK(r.inertia <= r.init_inertia);
    }
}

TEST_CASE("k-means is deterministic per seed and never worse than its seeding") {
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> u(0, 1);
    Points3 pts(5000, 3);
    for (Eigen::Index i = 0; i < pts.rows(); ++i) pts.row(i) << u(rng), u(rng), 0.0;
    KMeansConfig cfg;
    cfg.seed = 77;
    const auto a = mini_batch_kmeans(pts, 25, cfg);
    const auto b = mini_batch_kmeans(pts, 25, cfg);
    CHECK(a.centroids == b.centroids);
    CHECK(a.inertia <= a.init_inertia);
    CHECK(a.inertia == doctest::Approx(inertia(pts, a.centroids)));
    cfg.seed = 78;
    const auto c = mini_batch_kmeans(pts, 25, cfg);
    CHECK(c.centroids != a.centroids);
}
