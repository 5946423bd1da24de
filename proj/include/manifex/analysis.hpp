#pragma once

#include "manifex/tomo.hpp"

#include <Eigen/Core>

#include <cstddef>
#include <string>
#include <vector>

namespace manifex {

/// One result row: Frobenius norm of the difference between a reconstruction
/// (or prediction set) and its target.
struct ErrorReport {
    std::string method;
    int batch = 0;
    double error = 0.0;
    double runtime_s = 0.0;
};

/// sqrt(sum (A_ij - B_ij)^2); rejects shape mismatches.
double frobenius_error(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b);

/// Natural cubic spline through (x_i, y_i), x strictly ascending, >= 4 knots.
/// Queries are clamped to [x_front, x_back].
class NaturalCubicSpline {
public:
    NaturalCubicSpline(std::vector<double> x, std::vector<double> y);

    double operator()(double q) const;

private:
    std::vector<double> x_, y_, m_; // knots, values, second derivatives
};

/// Interpolates each detector row independently over angle with a natural
/// cubic spline; exact at knots. Query angles outside the training range are
/// clamped to the boundary knots; *clamped (when given) receives how many.
Sinogram spline_interpolate_sinogram(const Sinogram& train,
                                     const std::vector<double>& query_angles,
                                     std::size_t* clamped = nullptr);

/// Direct FBP on the sparse training sinogram.
ImageGrid training_only_reconstruction(const Sinogram& train, int d);

} // namespace manifex
