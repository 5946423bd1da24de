#include "manifex/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace manifex {

double frobenius_error(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols())
        throw std::invalid_argument("frobenius_error: shapes " + std::to_string(a.rows()) +
                                    "x" + std::to_string(a.cols()) + " and " +
                                    std::to_string(b.rows()) + "x" + std::to_string(b.cols()) +
                                    " differ");
    return (a - b).norm();
}

NaturalCubicSpline::NaturalCubicSpline(std::vector<double> x, std::vector<double> y)
    : x_(std::move(x)), y_(std::move(y)) {
    const std::size_t n = x_.size();
    if (n < 4)
        throw std::invalid_argument("NaturalCubicSpline: need at least 4 knots, got " +
                                    std::to_string(n));
    if (y_.size() != n)
        throw std::invalid_argument("NaturalCubicSpline: knot/value count mismatch");
    for (std::size_t i = 1; i < n; ++i)
        if (!(x_[i] > x_[i - 1]))
            throw std::invalid_argument("NaturalCubicSpline: knots must strictly ascend");

    // Second derivatives with natural end conditions, interior tridiagonal
    // system solved by the Thomas algorithm.
    m_.assign(n, 0.0);
    std::vector<double> diag(n, 0.0), rhs(n, 0.0);
    for (std::size_t i = 1; i + 1 < n; ++i) {
        const double h0 = x_[i] - x_[i - 1];
        const double h1 = x_[i + 1] - x_[i];
        diag[i] = 2.0 * (h0 + h1);
        rhs[i] = 6.0 * ((y_[i + 1] - y_[i]) / h1 - (y_[i] - y_[i - 1]) / h0);
    }
    for (std::size_t i = 2; i + 1 < n; ++i) {
        const double h0 = x_[i] - x_[i - 1];
        const double w = h0 / diag[i - 1];
        diag[i] -= w * h0;
        rhs[i] -= w * rhs[i - 1];
    }
    for (std::size_t i = n - 2; i >= 1; --i) {
        const double h1 = x_[i + 1] - x_[i];
        m_[i] = (rhs[i] - h1 * m_[i + 1]) / diag[i];
    }
}

double NaturalCubicSpline::operator()(double q) const {
    q = std::clamp(q, x_.front(), x_.back());
    const auto it = std::upper_bound(x_.begin(), x_.end(), q);
    const std::size_t i =
        std::min(x_.size() - 2, static_cast<std::size_t>(std::max<std::ptrdiff_t>(
                                    0, std::distance(x_.begin(), it) - 1)));
    const double h = x_[i + 1] - x_[i];
    const double a = (x_[i + 1] - q) / h;
    const double b = (q - x_[i]) / h;
    return a * y_[i] + b * y_[i + 1] +
           ((a * a * a - a) * m_[i] + (b * b * b - b) * m_[i + 1]) * h * h / 6.0;
}

Sinogram spline_interpolate_sinogram(const Sinogram& train,
                                     const std::vector<double>& query_angles,
                                     std::size_t* clamped) {
    if (train.views() < 4)
        throw std::invalid_argument("spline_interpolate_sinogram: need at least 4 training "
                                    "angles, got " + std::to_string(train.views()));
    for (std::size_t i = 1; i < query_angles.size(); ++i)
        if (query_angles[i] < query_angles[i - 1])
            throw std::invalid_argument("spline_interpolate_sinogram: query angles must ascend");

    if (clamped) {
        *clamped = 0;
        for (double q : query_angles)
            if (q < train.angles_deg.front() || q > train.angles_deg.back()) ++(*clamped);
    }

    Sinogram out;
    out.angles_deg = query_angles;
    out.data.resize(train.bins(), static_cast<Eigen::Index>(query_angles.size()));
    const auto nq = static_cast<Eigen::Index>(query_angles.size());
#pragma omp parallel for schedule(static)
    for (Eigen::Index b = 0; b < train.bins(); ++b) {
        std::vector<double> row(static_cast<std::size_t>(train.views()));
        for (Eigen::Index j = 0; j < train.views(); ++j)
            row[static_cast<std::size_t>(j)] = train.data(b, j);
        const NaturalCubicSpline spline(train.angles_deg, row);
        for (Eigen::Index q = 0; q < nq; ++q)
            out.data(b, q) = spline(query_angles[static_cast<std::size_t>(q)]);
    }
    return out;
}

ImageGrid training_only_reconstruction(const Sinogram& train, int d) {
    return fbp(train, d);
}

} // namespace manifex
