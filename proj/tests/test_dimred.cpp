#include "manifex/dimred.hpp"
#include "manifex/rng.hpp"

#include <doctest.h>

#include <Eigen/Dense>

#include <cmath>

using namespace manifex;

namespace {

PointCloud random_cloud(Eigen::Index k, Eigen::Index n, SeededRng& rng, double scale = 1.0) {
    PointCloud cloud;
    cloud.points.resize(k, n);
    for (Eigen::Index i = 0; i < k; ++i)
        for (Eigen::Index j = 0; j < n; ++j) cloud.points(i, j) = rng.uniform(-scale, scale);
    return cloud;
}

} // namespace

TEST_CASE("build_a1 block layout") {
    SUBCASE("coincident points give a zero row") {
        PointCloud x{Eigen::MatrixXd::Zero(1, 2)};
        ReferenceSet z{Eigen::MatrixXd::Zero(1, 2), 1.0};
        const Eigen::MatrixXd a1 = build_a1(x, z);
        REQUIRE(a1.rows() == 1);
        REQUIRE(a1.cols() == 2);
        CHECK(a1.isZero(0.0));
    }

    SUBCASE("z at origin reproduces the samples") {
        PointCloud x;
        x.points.resize(2, 2);
        x.points << 1, 0, 0, 1;
        ReferenceSet z{Eigen::MatrixXd::Zero(1, 2), 1.0};
        const Eigen::MatrixXd a1 = build_a1(x, z);
        CHECK(a1 == Eigen::MatrixXd::Identity(2, 2));
    }

    SUBCASE("row (i*m + j) holds x_i - z_j") {
        SeededRng rng(11);
        const PointCloud x = random_cloud(5, 4, rng);
        ReferenceSet z;
        z.half_width = 1.0;
        z.points = random_cloud(3, 4, rng).points;
        const Eigen::MatrixXd a1 = build_a1(x, z);
        REQUIRE(a1.rows() == 15);
        for (Eigen::Index i = 0; i < 5; ++i)
            for (Eigen::Index j = 0; j < 3; ++j)
                CHECK((a1.row(i * 3 + j) - (x.points.row(i) - z.points.row(j))).norm() == 0.0);
    }

    SUBCASE("squared Frobenius equals the pairwise distance sum") {
        SeededRng rng(12);
        const PointCloud x = random_cloud(5, 4, rng);
        ReferenceSet z;
        z.half_width = 1.0;
        z.points = random_cloud(3, 4, rng).points;
        const Eigen::MatrixXd a1 = build_a1(x, z);
        double by_hand = 0.0; // independent double loop
        for (Eigen::Index i = 0; i < 5; ++i)
            for (Eigen::Index j = 0; j < 3; ++j)
                by_hand += (x.points.row(i) - z.points.row(j)).squaredNorm();
        CHECK(a1.squaredNorm() == doctest::Approx(by_hand).epsilon(1e-12));
    }

    SUBCASE("rejections") {
        PointCloud x{Eigen::MatrixXd::Zero(1, 2)};
        ReferenceSet z3{Eigen::MatrixXd::Zero(1, 3), 1.0};
        CHECK_THROWS_AS(build_a1(x, z3), std::invalid_argument);
        PointCloud empty;
        ReferenceSet z2{Eigen::MatrixXd::Zero(1, 2), 1.0};
        CHECK_THROWS_AS(build_a1(empty, z2), std::invalid_argument);
    }
}

TEST_CASE("svd_basis spectrum and basis") {
    SUBCASE("identity matrix") {
        const ProjectionBasis basis = svd_basis(Eigen::MatrixXd::Identity(2, 2), 2);
        REQUIRE(basis.singular_values.size() == 2);
        CHECK(basis.singular_values(0) == doctest::Approx(1.0).epsilon(1e-14));
        CHECK(basis.singular_values(1) == doctest::Approx(1.0).epsilon(1e-14));
        CHECK((basis.right_vectors.transpose() * basis.right_vectors -
               Eigen::MatrixXd::Identity(2, 2))
                  .cwiseAbs()
                  .maxCoeff() < 1e-10);
    }

    SUBCASE("zero matrix is accepted with a deterministic orthonormal basis") {
        const ProjectionBasis a = svd_basis(Eigen::MatrixXd::Zero(4, 3), 2);
        const ProjectionBasis b = svd_basis(Eigen::MatrixXd::Zero(4, 3), 2);
        CHECK(a.singular_values.isZero(0.0));
        CHECK(a.right_vectors == b.right_vectors);
        CHECK((a.right_vectors.transpose() * a.right_vectors -
               Eigen::MatrixXd::Identity(2, 2))
                  .cwiseAbs()
                  .maxCoeff() < 1e-10);
    }

    SUBCASE("energy identity on a random 15x4 matrix") {
        SeededRng rng(13);
        Eigen::MatrixXd a1(15, 4);
        for (Eigen::Index i = 0; i < a1.size(); ++i) a1(i) = rng.uniform(-2.0, 2.0);
        const ProjectionBasis basis = svd_basis(a1, 4);
        double frob_sq = 0.0; // direct elementwise sum
        for (Eigen::Index i = 0; i < a1.rows(); ++i)
            for (Eigen::Index j = 0; j < a1.cols(); ++j) frob_sq += a1(i, j) * a1(i, j);
        CHECK(basis.singular_values.squaredNorm() ==
              doctest::Approx(frob_sq).epsilon(1e-9));
    }

    SUBCASE("energy identity holds for every generated A1") {
        SeededRng rng(14);
        for (int rep = 0; rep < 10; ++rep) {
            const auto k = static_cast<Eigen::Index>(2 + rng.raw() % 6);
            const auto m = static_cast<Eigen::Index>(1 + rng.raw() % 5);
            const auto n = static_cast<Eigen::Index>(1 + rng.raw() % 5);
            const PointCloud x = random_cloud(k, n, rng);
            const ReferenceSet z = draw_reference(m, n, 1.0, rng.raw());
            const Eigen::MatrixXd a1 = build_a1(x, z);
            const ProjectionBasis basis = svd_basis(a1, n);
            double dist_sum = 0.0;
            for (Eigen::Index i = 0; i < k; ++i)
                for (Eigen::Index j = 0; j < m; ++j)
                    dist_sum += (x.points.row(i) - z.points.row(j)).squaredNorm();
            CHECK(basis.singular_values.squaredNorm() ==
                  doctest::Approx(dist_sum).epsilon(1e-8));
        }
    }

    SUBCASE("sign convention and determinism") {
        SeededRng rng(15);
        Eigen::MatrixXd a1(8, 3);
        for (Eigen::Index i = 0; i < a1.size(); ++i) a1(i) = rng.uniform(-1.0, 1.0);
        const ProjectionBasis a = svd_basis(a1, 3);
        const ProjectionBasis b = svd_basis(a1, 3);
        CHECK(a.right_vectors == b.right_vectors);
        CHECK(a.singular_values == b.singular_values);
        for (Eigen::Index c = 0; c < a.right_vectors.cols(); ++c) {
            for (Eigen::Index r = 0; r < a.right_vectors.rows(); ++r) {
                if (std::abs(a.right_vectors(r, c)) > 1e-12) {
                    CHECK(a.right_vectors(r, c) > 0.0);
                    break;
                }
            }
        }
        for (Eigen::Index i = 1; i < a.singular_values.size(); ++i)
            CHECK(a.singular_values(i) <= a.singular_values(i - 1));
    }

    SUBCASE("target dimension out of range") {
        CHECK_THROWS_AS(svd_basis(Eigen::MatrixXd::Identity(3, 3), 4), std::invalid_argument);
        CHECK_THROWS_AS(svd_basis(Eigen::MatrixXd::Identity(3, 3), 0), std::invalid_argument);
    }

    SUBCASE("tall matrices take the Gram route and agree with the direct SVD") {
        SeededRng rng(19);
        Eigen::MatrixXd a1(kGramRowThreshold + 100, 3);
        for (Eigen::Index i = 0; i < a1.size(); ++i) a1(i) = rng.uniform(-1.0, 1.0);
        const ProjectionBasis gram = svd_basis(a1, 3);
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(a1, Eigen::ComputeFullV);
        Eigen::MatrixXd direct = svd.matrixV();
        for (Eigen::Index c = 0; c < 3; ++c) {
            for (Eigen::Index r = 0; r < 3; ++r) {
                if (std::abs(direct(r, c)) > 1e-12) {
                    if (direct(r, c) < 0.0) direct.col(c) = -direct.col(c);
                    break;
                }
            }
        }
        CHECK((gram.singular_values - svd.singularValues()).cwiseAbs().maxCoeff() <
              1e-8 * svd.singularValues()(0));
        CHECK((gram.right_vectors - direct).cwiseAbs().maxCoeff() < 1e-8);
        CHECK((gram.right_vectors.transpose() * gram.right_vectors -
               Eigen::MatrixXd::Identity(3, 3))
                  .cwiseAbs()
                  .maxCoeff() < 1e-10);
    }
}

TEST_CASE("project") {
    SeededRng rng(16);

    SUBCASE("full projection is an isometry") {
        Eigen::MatrixXd a1(40, 5);
        for (Eigen::Index i = 0; i < a1.size(); ++i) a1(i) = rng.uniform(-1.0, 1.0);
        const ProjectionBasis basis = svd_basis(a1, 5);
        for (int rep = 0; rep < 100; ++rep) {
            Eigen::VectorXd x(5);
            for (Eigen::Index i = 0; i < 5; ++i) x(i) = rng.uniform(-3.0, 3.0);
            CHECK(project(x, basis).norm() == doctest::Approx(x.norm()).epsilon(1e-10));
        }
    }

    SUBCASE("coordinate selection against the canonical basis") {
        ProjectionBasis basis;
        basis.right_vectors = Eigen::MatrixXd::Identity(3, 2);
        basis.singular_values = Eigen::Vector3d(3, 2, 1);
        Eigen::Vector3d x(3, 4, 5);
        const Eigen::VectorXd c = project(x, basis);
        REQUIRE(c.size() == 2);
        CHECK(c(0) == 3.0);
        CHECK(c(1) == 4.0);
    }

    SUBCASE("orthogonal input projects to zero") {
        ProjectionBasis basis;
        basis.right_vectors = Eigen::MatrixXd::Identity(3, 2);
        basis.singular_values = Eigen::Vector3d(3, 2, 1);
        const Eigen::VectorXd c = project(Eigen::Vector3d(0, 0, 7), basis);
        CHECK(c.isZero(0.0));
    }

    SUBCASE("contraction and linearity") {
        Eigen::MatrixXd a1(30, 4);
        for (Eigen::Index i = 0; i < a1.size(); ++i) a1(i) = rng.uniform(-1.0, 1.0);
        const ProjectionBasis basis = svd_basis(a1, 2);
        for (int rep = 0; rep < 50; ++rep) {
            Eigen::VectorXd x(4), y(4);
            for (Eigen::Index i = 0; i < 4; ++i) {
                x(i) = rng.uniform(-2.0, 2.0);
                y(i) = rng.uniform(-2.0, 2.0);
            }
            const double alpha = rng.uniform(-2.0, 2.0), beta = rng.uniform(-2.0, 2.0);
            CHECK(project(x, basis).norm() <= x.norm() + 1e-12);
            const Eigen::VectorXd lhs = project(alpha * x + beta * y, basis);
            const Eigen::VectorXd rhs = alpha * project(x, basis) + beta * project(y, basis);
            CHECK((lhs - rhs).cwiseAbs().maxCoeff() < 1e-10);
        }
    }

    SUBCASE("dimension mismatch rejected") {
        ProjectionBasis basis;
        basis.right_vectors = Eigen::MatrixXd::Identity(3, 2);
        basis.singular_values = Eigen::Vector3d(3, 2, 1);
        CHECK_THROWS_AS(project(Eigen::Vector2d(1, 2), basis), std::invalid_argument);
    }
}

TEST_CASE("draw_reference stays in the hypercube and is seed-deterministic") {
    const ReferenceSet a = draw_reference(40, 3, 2.5, 99);
    const ReferenceSet b = draw_reference(40, 3, 2.5, 99);
    const ReferenceSet c = draw_reference(40, 3, 2.5, 100);
    CHECK(a.points == b.points);
    CHECK(a.points != c.points);
    CHECK((a.points.array().abs() <= 2.5).all());
}
