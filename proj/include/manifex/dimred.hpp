#pragma once

#include <Eigen/Core>

#include <cstdint>

namespace manifex {

/// Ordered set of ambient-space sample points, one row per point.
struct PointCloud {
    Eigen::MatrixXd points; // k x n

    Eigen::Index size() const { return points.rows(); }
    Eigen::Index dim() const { return points.cols(); }
};

/// Uniform draws from the hypercube [-half_width, half_width]^n.
struct ReferenceSet {
    Eigen::MatrixXd points; // m x n
    double half_width = 0.0;

    Eigen::Index size() const { return points.rows(); }
    Eigen::Index dim() const { return points.cols(); }
};

ReferenceSet draw_reference(Eigen::Index m, Eigen::Index n, double half_width,
                            std::uint64_t seed);

/// Top right singular vectors of the sample/reference difference matrix plus
/// the full singular spectrum. Immutable once built; safe to share.
struct ProjectionBasis {
    Eigen::MatrixXd right_vectors;   // n x n_bar, orthonormal columns
    Eigen::VectorXd singular_values; // full spectrum, non-increasing

    Eigen::Index ambient_dim() const { return right_vectors.rows(); }
    Eigen::Index target_dim() const { return right_vectors.cols(); }
};

/// Stacks the pairwise differences x_i - z_j into an (mk x n) matrix;
/// row i*m + j holds X[i] - Z[j].
Eigen::MatrixXd build_a1(const PointCloud& X, const ReferenceSet& Z);

/// SVD of a1 keeping the top n_bar right singular vectors and the whole
/// spectrum. Deterministic: vectors are sign-fixed so the first component
/// above 1e-12 in magnitude is positive. For more than kGramRowThreshold
/// rows the n x n Gram matrix is eigendecomposed instead (same spectrum,
/// same right vectors).
ProjectionBasis svd_basis(const Eigen::MatrixXd& a1, Eigen::Index n_bar);

inline constexpr Eigen::Index kGramRowThreshold = 10000;

/// Coordinates of x in the basis: c_l = <x, v_l>.
Eigen::VectorXd project(const Eigen::VectorXd& x, const ProjectionBasis& basis);

/// Row-wise projection of a whole cloud -> (k x n_bar).
Eigen::MatrixXd project_rows(const Eigen::MatrixXd& points, const ProjectionBasis& basis);

} // namespace manifex
