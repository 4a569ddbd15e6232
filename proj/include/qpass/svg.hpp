#pragma once

// Static SVG figures: cluster maps, field-value heatmaps, pass trajectories
// and the unsuccessful-pass CDF. Pitch drawn with the attack left to right.

#include <array>
#include <span>
#include <string>
#include <vector>

#include "qpass/field_value.hpp"
#include "qpass/partition.hpp"
#include "qpass/scoring.hpp"

namespace qpass::svg {

struct Rgb {
    int r = 255, g = 255, b = 255;
    std::string hex() const;
    friend bool operator==(const Rgb&, const Rgb&) = default;
};

/// Blue at -1, white at 0, red at +1; values outside [-1, 1] saturate.
Rgb diverging_color(double value);

using Polygon = std::vector<Point>;

/// Voronoi cells of `sites` clipped to the pitch. Coincident sites share a cell.
std::vector<Polygon> voronoi_cells(std::span<const Point> sites);

/// Spatial projections of the centroids in raw pitch units.
std::vector<Point> centroid_sites(const Clustering& cl);

enum class Side { own, opp };

/// One region per cluster of the chosen clustering.
std::string render_partition_map(const TeamPartition& partition, Side side = Side::own,
                                 const std::string& title = {});

/// Own side colors clusters by values [0, c); opp side by [c, 2c) on the opponent clustering.
std::string render_value_heatmap(const TeamPartition& partition, const FieldValues& fv, Side side,
                                 const std::string& title = {});

/// One arrow per record; unsuccessful passes dashed, zero-length passes as dots.
std::string render_pass_trajectories(std::span<const QPassRecord> records, const std::string& title = {});

/// Step curves of the per-position empirical CDFs.
std::string render_cdf(const UnsuccessfulCdf& cdf, const std::string& title = {});

}  // namespace qpass::svg
