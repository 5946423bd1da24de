#pragma once

#include "manifex/dimred.hpp"

#include <Eigen/Core>

#include <cstdint>

namespace manifex {

/// Sample values, one row per training point (p columns; p = 1 for scalar
/// data). Column-major storage keeps each component contiguous so one weight
/// vector sweeps all components of a query.
struct SampleValues {
    Eigen::MatrixXd values; // k x p

    Eigen::Index size() const { return values.rows(); }
    Eigen::Index dim() const { return values.cols(); }
};

struct Bandwidth {
    double epsilon = 0.0;
};

/// Frozen training state: everything a query-time evaluation needs.
/// Immutable except through online::update, which appends samples.
struct ExtenderModel {
    PointCloud train_points;      // k x n
    Eigen::MatrixXd train_coords; // k x n_bar
    SampleValues values;          // k x p
    ProjectionBasis basis;
    double delta = 0.1;
    double half_width = 1.0;

    Eigen::Index sample_count() const { return train_points.size(); }
    Eigen::Index ambient_dim() const { return train_points.dim(); }
    Eigen::Index target_dim() const { return basis.target_dim(); }
    Eigen::Index value_dim() const { return values.dim(); }
};

/// Queries whose projected distance to a training point falls below this are
/// answered with the stored value verbatim.
inline constexpr double kCoincidenceTol = 1e-12;

/// exp(-sq_dist / epsilon^2).
double gaussian_kernel(double sq_dist, Bandwidth epsilon);

struct AdaptiveBandwidth {
    Bandwidth bandwidth;         // meaningful only when !exact_hit
    Eigen::Index nearest = -1;   // index of the nearest training sample
    double nearest_distance = 0; // projected distance to it
    bool exact_hit = false;
};

/// Per-query bandwidth: epsilon = -min_j ||c - c_j|| / log(delta), computed
/// in projected coordinates. Flags coincident queries instead of producing a
/// bandwidth.
AdaptiveBandwidth adaptive_epsilon(const Eigen::VectorXd& query_coord,
                                   const ExtenderModel& model);

/// Raw kernel-weight sums over one block of samples, at fixed bandwidth.
/// Computed with max-exponent shifting and rescaled back, so the result is
/// the plain sums nm = sum_i w_i and weighted = sum_i w_i * g_i.
struct WeightSums {
    double nm = 0.0;
    Eigen::VectorXd weighted; // p-vector
};

WeightSums accumulate_weights(const Eigen::VectorXd& query_coord,
                              const Eigen::MatrixXd& coords, // rows x n_bar
                              const Eigen::MatrixXd& values, // rows x p
                              Bandwidth epsilon);

struct Extension {
    Eigen::VectorXd value; // p-vector
    double epsilon = 0.0;  // bandwidth used (0 on exact hit)
    double nm = 0.0;       // normalization (0 on exact hit)
    bool exact_hit = false;
};

/// Normalized kernel estimate at an ambient query point with the adaptive
/// bandwidth; returns the stored value verbatim on an exact sample hit.
Extension extend(const Eigen::VectorXd& query, const ExtenderModel& model);

/// Same estimate at a caller-pinned bandwidth (online updates and the
/// equivalence checks evaluate at frozen epsilon).
Extension extend_fixed(const Eigen::VectorXd& query, const ExtenderModel& model,
                       Bandwidth epsilon);

/// Element-wise extend over a cloud of queries -> (q x p).
Eigen::MatrixXd extend_batch(const PointCloud& queries, const ExtenderModel& model);

/// Builds the model: draws the reference set (seeded), stacks the difference
/// matrix, computes the projection basis, and precomputes the projected
/// training coordinates. No iterative training.
ExtenderModel fit(const PointCloud& X, const SampleValues& values,
                  Eigen::Index n_bar, Eigen::Index m, double half_width,
                  double delta, std::uint64_t seed);

} // namespace manifex
