#pragma once

// Team-specific field partition: two clusterings over (x, y, field value)
// features, one for the team's own passes and one for its opponents', plus
// the cluster assignments of every pass and shot.

#include <cstdint>
#include <optional>
#include <ostream>
#include <vector>

#include <Eigen/Dense>

#include "qpass/events.hpp"
#include "qpass/kmeans.hpp"
#include "qpass/scaling.hpp"

namespace qpass {

using Feature3 = Eigen::Matrix<double, 1, 3>;
using ScalerParams = MinMaxScaler<double, 3>;

struct Clustering {
    /// One row per cluster, in scaled feature space.
    PointMatrix<double, 3> centroids;
    ScalerParams scaler;
    std::uint64_t rng_seed = 0;

    std::size_t size() const { return static_cast<std::size_t>(centroids.rows()); }

    /// Centroids mapped back to raw (x, y, f) units.
    PointMatrix<double, 3> raw_centroids() const { return scaler.inverse_transform(centroids); }
};

/// Clusters raw (x, y, f) rows: min-max scaling then mini-batch k-means.
/// `labels`, when given, receives the nearest centroid of every row.
Clustering fit_clustering(const PointMatrix<double, 3>& raw_points, std::size_t c, const KMeansConfig& cfg,
                          std::vector<Eigen::Index>* labels = nullptr);

/// Nearest centroid of a raw (x, y, f) point in scaled space; ties go to the lowest index.
std::size_t assign_full(const Clustering& cl, const Feature3& raw);

/// Nearest centroid using only the spatial features (scaled x, y).
std::size_t assign_spatial(const Clustering& cl, Point p);

struct PartitionConfig {
    std::size_t c_max = 1000;
    std::size_t c_min = 100;
    std::size_t c_step = 50;
    KMeansConfig kmeans;
    std::uint64_t seed = 0;

    /// Throws a config error unless c_min <= c_max, c_step > 0 and the step divides the range.
    void validate() const;

    /// Number of clusterings from c_max down to c_min.
    std::size_t iteration_count() const;

    /// Cluster counts in iteration order.
    std::vector<std::size_t> schedule() const;
};

struct ClusterAssignment {
    std::size_t c_s = 0;
    std::size_t c_e = 0;
    /// Cluster of the mirrored end point in the other side's clustering.
    std::optional<std::size_t> l_e;
    /// Field values attached to the endpoints as clustering features.
    double f_s = 0.0;
    double f_e = 0.0;
};

/// Per-pass endpoint field values carried into the next clustering.
struct PointValues {
    std::vector<double> own_start, own_end, opp_start, opp_end;
};

struct TeamPartition {
    std::size_t c = 0;
    Clustering own;
    Clustering opp;
    /// Parallel to TeamEventSet::own_passes / opp_passes.
    std::vector<ClusterAssignment> own_assignments;
    std::vector<ClusterAssignment> opp_assignments;
    /// Spatial cluster of each shot in the shooter's clustering.
    std::vector<std::size_t> own_shot_clusters;
    std::vector<std::size_t> opp_shot_clusters;
};

/// True when the pass hands possession to the other side: unsuccessful, or last of a
/// possession that does not end in a shot.
bool needs_turnover_cluster(const PassRecord& p);

/// Builds both clusterings for cluster count `c` and assigns every event.
/// Without `prev`, every field-value feature is 0.
TeamPartition build_partition(const TeamEventSet& events, const PointValues* prev, std::size_t c,
                              const PartitionConfig& cfg);

/// `cluster_id,x_centroid,y_centroid,f_centroid` in raw units.
void write_partition_csv(std::ostream& out, const Clustering& cl);

/// `feature,min,max` for x, y and f.
void write_scaler_csv(std::ostream& out, const ScalerParams& scaler);

/// splitmix64 step; derives independent seeds from a base seed and a tag.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t tag);

}  // namespace qpass
