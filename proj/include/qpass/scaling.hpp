#pragma once

#include <Eigen/Dense>

#include "qpass/error.hpp"

namespace qpass {

template <typename Scalar, int Dim = Eigen::Dynamic>
using PointMatrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Dim, Dim == 1 ? Eigen::ColMajor : Eigen::RowMajor>;

/// Per-feature affine map onto [0,1]. A constant feature (max == min) maps every value to 0.
template <typename Scalar, int Dim = Eigen::Dynamic>
struct MinMaxScaler {
    using Row = Eigen::Matrix<Scalar, 1, Dim>;

    Row min;
    Row max;

    Eigen::Index features() const { return min.size(); }

    Scalar scale(Eigen::Index feature, Scalar v) const {
        const Scalar range = max(feature) - min(feature);
        return range > Scalar(0) ? (v - min(feature)) / range : Scalar(0);
    }

    Scalar unscale(Eigen::Index feature, Scalar v) const { return min(feature) + v * (max(feature) - min(feature)); }

    /// Rows are points.
    template <typename Derived>
    PointMatrix<Scalar, Dim> transform(const Eigen::MatrixBase<Derived>& points) const {
        PointMatrix<Scalar, Dim> out(points.rows(), points.cols());
        for (Eigen::Index j = 0; j < points.cols(); ++j) {
            const Scalar range = max(j) - min(j);
            if (range > Scalar(0))
                out.col(j) = (points.col(j).array() - min(j)) / range;
            else
                out.col(j).setZero();
        }
        return out;
    }

    template <typename Derived>
    PointMatrix<Scalar, Dim> inverse_transform(const Eigen::MatrixBase<Derived>& scaled) const {
        PointMatrix<Scalar, Dim> out(scaled.rows(), scaled.cols());
        for (Eigen::Index j = 0; j < scaled.cols(); ++j)
            out.col(j) = scaled.col(j).array() * (max(j) - min(j)) + min(j);
        return out;
    }
};

template <typename Scalar, int Dim>
struct ScaledPoints {
    PointMatrix<Scalar, Dim> points;
    MinMaxScaler<Scalar, Dim> scaler;
};

/// Fits a MinMaxScaler over the rows of `points` and applies it.
template <typename Derived>
auto min_max_scale(const Eigen::MatrixBase<Derived>& points) {
    using Scalar = typename Derived::Scalar;
    constexpr int Dim = Derived::ColsAtCompileTime;
    if (points.rows() == 0) throw validation_error("min_max_scale: empty point collection");

    MinMaxScaler<Scalar, Dim> scaler;
    scaler.min = points.colwise().minCoeff();
    scaler.max = points.colwise().maxCoeff();
    return ScaledPoints<Scalar, Dim>{scaler.transform(points), scaler};
}

}  // namespace qpass
