#include "qpass/partition.hpp"

#include <iomanip>

#include "qpass/csv.hpp"
#include "qpass/error.hpp"

namespace qpass {

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t tag) {
    std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (tag + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

Clustering fit_clustering(const PointMatrix<double, 3>& raw_points, std::size_t c, const KMeansConfig& cfg,
                          std::vector<Eigen::Index>* labels) {
    auto scaled = min_max_scale(raw_points);
    auto km = mini_batch_kmeans(scaled.points, c, cfg);
    if (labels) *labels = std::move(km.labels);
    return Clustering{std::move(km.centroids), scaled.scaler, cfg.seed};
}

std::size_t assign_full(const Clustering& cl, const Feature3& raw) {
    Feature3 q;
    for (int j = 0; j < 3; ++j) q(j) = cl.scaler.scale(j, raw(j));
    return static_cast<std::size_t>(nearest_centroid(cl.centroids, q));
}

std::size_t assign_spatial(const Clustering& cl, Point p) {
    const Eigen::RowVector2d q(cl.scaler.scale(0, p.x), cl.scaler.scale(1, p.y));
    return static_cast<std::size_t>(nearest_centroid(cl.centroids.leftCols<2>(), q));
}

void PartitionConfig::validate() const {
    if (c_step == 0) throw config_error("c_step must be positive");
    if (c_min == 0) throw config_error("c_min must be positive");
    if (c_min > c_max) throw config_error("c_min must not exceed c_max");
    if ((c_max - c_min) % c_step != 0) throw config_error("c_max - c_min must be a multiple of c_step");
}

std::size_t PartitionConfig::iteration_count() const {
    validate();
    return (c_max - c_min) / c_step + 1;
}

std::vector<std::size_t> PartitionConfig::schedule() const {
    std::vector<std::size_t> cs;
    for (std::size_t i = 0, n = iteration_count(); i < n; ++i) cs.push_back(c_max - i * c_step);
    return cs;
}

bool needs_turnover_cluster(const PassRecord& p) {
    return !p.successful || (p.is_last_of_possession && !p.possession_ends_in_shot);
}

namespace {

PointMatrix<double, 3> endpoint_features(const std::vector<PassRecord>& passes, const std::vector<double>* f_start,
                                         const std::vector<double>* f_end) {
    const auto n = static_cast<Eigen::Index>(passes.size());
    PointMatrix<double, 3> pts(2 * n, 3);
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto& p = passes[static_cast<std::size_t>(i)];
        pts.row(i) << p.start.x, p.start.y, f_start ? (*f_start)[static_cast<std::size_t>(i)] : 0.0;
        pts.row(n + i) << p.end.x, p.end.y, f_end ? (*f_end)[static_cast<std::size_t>(i)] : 0.0;
    }
    return pts;
}

std::vector<Eigen::Index> spatial_labels(const Clustering& cl, const std::vector<Point>& pts) {
    PointMatrix<double, 2> q(static_cast<Eigen::Index>(pts.size()), 2);
    for (std::size_t i = 0; i < pts.size(); ++i)
        q.row(static_cast<Eigen::Index>(i)) << cl.scaler.scale(0, pts[i].x), cl.scaler.scale(1, pts[i].y);
    std::vector<Eigen::Index> labels;
    std::vector<double> sq;
    const PointMatrix<double, 2> cent = cl.centroids.leftCols<2>();
    assign_nearest(q, cent, labels, sq);
    return labels;
}

std::vector<ClusterAssignment> assign_passes(const std::vector<PassRecord>& passes, const PointMatrix<double, 3>& raw,
                                             const std::vector<Eigen::Index>& labels, const Clustering& other) {
    const auto n = passes.size();
    std::vector<ClusterAssignment> out(n);

    std::vector<Point> turnover_points;
    std::vector<std::size_t> turnover_index;
    for (std::size_t i = 0; i < n; ++i) {
        auto& a = out[i];
        a.c_s = static_cast<std::size_t>(labels[i]);
        a.c_e = static_cast<std::size_t>(labels[n + i]);
        a.f_s = raw(static_cast<Eigen::Index>(i), 2);
        a.f_e = raw(static_cast<Eigen::Index>(n + i), 2);
        if (needs_turnover_cluster(passes[i])) {
            turnover_points.push_back(mirror(passes[i].end));
            turnover_index.push_back(i);
        }
    }
    const auto l = spatial_labels(other, turnover_points);
    for (std::size_t j = 0; j < turnover_index.size(); ++j) out[turnover_index[j]].l_e = static_cast<std::size_t>(l[j]);
    return out;
}

std::vector<std::size_t> shot_clusters(const std::vector<ShotRecord>& shots, const Clustering& cl) {
    std::vector<Point> pts;
    pts.reserve(shots.size());
    for (const auto& s : shots) pts.push_back(s.location);
    const auto labels = spatial_labels(cl, pts);
    return {labels.begin(), labels.end()};
}

}  // namespace

TeamPartition build_partition(const TeamEventSet& events, const PointValues* prev, std::size_t c,
                              const PartitionConfig& cfg) {
    if (events.own_passes.empty()) throw validation_error("team " + events.team_id + " has no passes");
    if (events.opp_passes.empty()) throw validation_error("opponents of team " + events.team_id + " have no passes");

    const auto own_raw = endpoint_features(events.own_passes, prev ? &prev->own_start : nullptr,
                                           prev ? &prev->own_end : nullptr);
    const auto opp_raw = endpoint_features(events.opp_passes, prev ? &prev->opp_start : nullptr,
                                           prev ? &prev->opp_end : nullptr);

    TeamPartition part;
    part.c = c;
    KMeansConfig km = cfg.kmeans;
    km.seed = mix_seed(cfg.seed, 2 * c);
    std::vector<Eigen::Index> own_labels, opp_labels;
    part.own = fit_clustering(own_raw, c, km, &own_labels);
    km.seed = mix_seed(cfg.seed, 2 * c + 1);
    part.opp = fit_clustering(opp_raw, c, km, &opp_labels);

    part.own_assignments = assign_passes(events.own_passes, own_raw, own_labels, part.opp);
    part.opp_assignments = assign_passes(events.opp_passes, opp_raw, opp_labels, part.own);
    part.own_shot_clusters = shot_clusters(events.own_shots, part.own);
    part.opp_shot_clusters = shot_clusters(events.opp_shots, part.opp);
    return part;
}

void write_partition_csv(std::ostream& out, const Clustering& cl) {
    out << "cluster_id,x_centroid,y_centroid,f_centroid\n";
    const auto raw = cl.raw_centroids();
    for (Eigen::Index k = 0; k < raw.rows(); ++k) {
        out << k << ',' << csv::format_double(raw(k, 0)) << ',' << csv::format_double(raw(k, 1)) << ','
            << csv::format_double(raw(k, 2)) << '\n';
    }
}

void write_scaler_csv(std::ostream& out, const ScalerParams& scaler) {
    static constexpr const char* names[] = {"x", "y", "f"};
    out << "feature,min,max\n";
    for (int j = 0; j < 3; ++j)
        out << names[j] << ',' << csv::format_double(scaler.min(j)) << ',' << csv::format_double(scaler.max(j)) << '\n';
}

}  // namespace qpass
