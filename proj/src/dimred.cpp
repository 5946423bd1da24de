#include "manifex/dimred.hpp"

#include "manifex/rng.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>
#include <string>

namespace manifex {

namespace {

// First component above 1e-12 in magnitude is made positive. Columns of an
// orthonormal basis always have one (norm is 1), so this terminates.
void fix_signs(Eigen::MatrixXd& vectors) {
    for (Eigen::Index c = 0; c < vectors.cols(); ++c) {
        for (Eigen::Index r = 0; r < vectors.rows(); ++r) {
            const double v = vectors(r, c);
            if (std::abs(v) > 1e-12) {
                if (v < 0.0) vectors.col(c) = -vectors.col(c);
                break;
            }
        }
    }
}

} // namespace

ReferenceSet draw_reference(Eigen::Index m, Eigen::Index n, double half_width,
                            std::uint64_t seed) {
    if (m < 1 || n < 1)
        throw std::invalid_argument("draw_reference: need m >= 1 and n >= 1");
    if (!(half_width > 0.0))
        throw std::invalid_argument("draw_reference: half-width must be positive");
    SeededRng rng(seed);
    Eigen::MatrixXd pts(m, n);
    for (Eigen::Index i = 0; i < m; ++i)
        for (Eigen::Index j = 0; j < n; ++j)
            pts(i, j) = rng.uniform(-half_width, half_width);
    return {std::move(pts), half_width};
}

Eigen::MatrixXd build_a1(const PointCloud& X, const ReferenceSet& Z) {
    if (X.size() == 0 || Z.size() == 0)
        throw std::invalid_argument("build_a1: sample and reference sets must be non-empty");
    if (X.dim() != Z.dim())
        throw std::invalid_argument(
            "build_a1: dimension mismatch, samples have dim " + std::to_string(X.dim()) +
            " but reference points have dim " + std::to_string(Z.dim()));
    const Eigen::Index k = X.size(), m = Z.size(), n = X.dim();
    Eigen::MatrixXd a1(m * k, n);
    for (Eigen::Index i = 0; i < k; ++i)
        a1.middleRows(i * m, m) = (-Z.points).rowwise() + X.points.row(i);
    return a1;
}

ProjectionBasis svd_basis(const Eigen::MatrixXd& a1, Eigen::Index n_bar) {
    const Eigen::Index n = a1.cols();
    if (a1.rows() == 0 || n == 0)
        throw std::invalid_argument("svd_basis: empty matrix");
    if (n_bar < 1 || n_bar > n)
        throw std::invalid_argument("svd_basis: target dimension " + std::to_string(n_bar) +
                                    " must lie in [1, " + std::to_string(n) + "]");

    Eigen::MatrixXd vectors;   // n x n
    Eigen::VectorXd spectrum;  // min(rows, n), non-increasing, >= 0

    if (a1.rows() <= kGramRowThreshold) {
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(a1, Eigen::ComputeFullV);
        vectors = svd.matrixV();
        spectrum = svd.singularValues();
    } else {
        // Right singular vectors and squared singular values of a1 are the
        // eigenpairs of the n x n Gram matrix.
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(a1.transpose() * a1);
        if (eig.info() != Eigen::Success)
            throw std::runtime_error("svd_basis: eigendecomposition failed");
        vectors = eig.eigenvectors().rowwise().reverse();
        spectrum = eig.eigenvalues().reverse().cwiseMax(0.0).cwiseSqrt();
    }
    fix_signs(vectors);
    return {vectors.leftCols(n_bar), std::move(spectrum)};
}

Eigen::VectorXd project(const Eigen::VectorXd& x, const ProjectionBasis& basis) {
    if (x.size() != basis.ambient_dim())
        throw std::invalid_argument("project: point has dim " + std::to_string(x.size()) +
                                    ", basis expects " + std::to_string(basis.ambient_dim()));
    return basis.right_vectors.transpose() * x;
}

Eigen::MatrixXd project_rows(const Eigen::MatrixXd& points, const ProjectionBasis& basis) {
    if (points.cols() != basis.ambient_dim())
        throw std::invalid_argument("project_rows: points have dim " +
                                    std::to_string(points.cols()) + ", basis expects " +
                                    std::to_string(basis.ambient_dim()));
    return points * basis.right_vectors;
}

} // namespace manifex
