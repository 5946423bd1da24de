#include "manifex/analysis.hpp"
#include "manifex/rng.hpp"

#include <doctest.h>

#include <cmath>
#include <vector>

using namespace manifex;

namespace {

std::vector<double> uniform_angles(int n) {
    std::vector<double> angles(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) angles[static_cast<std::size_t>(i)] = 180.0 * i / n;
    return angles;
}

} // namespace

TEST_CASE("frobenius_error") {
    SUBCASE("identical matrices") {
        const Eigen::MatrixXd a = Eigen::MatrixXd::Random(6, 4);
        CHECK(frobenius_error(a, a) == 0.0);
    }

    SUBCASE("direct arithmetic") {
        Eigen::MatrixXd a(2, 2), b(2, 2);
        a << 1, 0, 0, 2;
        b.setZero();
        CHECK(frobenius_error(a, b) == doctest::Approx(std::sqrt(5.0)).epsilon(1e-12));
        CHECK(frobenius_error(a, b) == doctest::Approx(2.2360679).epsilon(1e-7));
    }

    SUBCASE("matches the elementwise oracle") {
        SeededRng rng(71);
        Eigen::MatrixXd a(10, 10), b(10, 10);
        for (Eigen::Index i = 0; i < a.size(); ++i) {
            a(i) = rng.uniform(-5.0, 5.0);
            b(i) = rng.uniform(-5.0, 5.0);
        }
        double sq = 0.0;
        for (Eigen::Index r = 0; r < 10; ++r)
            for (Eigen::Index c = 0; c < 10; ++c)
                sq += (a(r, c) - b(r, c)) * (a(r, c) - b(r, c));
        CHECK(frobenius_error(a, b) == doctest::Approx(std::sqrt(sq)).epsilon(1e-12));
    }

    SUBCASE("metric properties on random triples") {
        SeededRng rng(73);
        for (int rep = 0; rep < 20; ++rep) {
            Eigen::MatrixXd a(4, 4), b(4, 4), c(4, 4);
            for (Eigen::Index i = 0; i < a.size(); ++i) {
                a(i) = rng.uniform(-1.0, 1.0);
                b(i) = rng.uniform(-1.0, 1.0);
                c(i) = rng.uniform(-1.0, 1.0);
            }
            CHECK(frobenius_error(a, b) == frobenius_error(b, a));
            CHECK(frobenius_error(a, a) <= 1e-15);
            CHECK(frobenius_error(a, c) <= frobenius_error(a, b) + frobenius_error(b, c) + 1e-12);
        }
    }

    SUBCASE("shape mismatch rejected") {
        CHECK_THROWS_AS(frobenius_error(Eigen::MatrixXd::Zero(2, 2), Eigen::MatrixXd::Zero(2, 3)),
                        std::invalid_argument);
    }
}

TEST_CASE("natural cubic spline") {
    SUBCASE("exact at knots") {
        std::vector<double> x{0.0, 1.0, 2.5, 4.0, 5.0};
        std::vector<double> y{1.0, -2.0, 0.5, 3.0, 2.0};
        const NaturalCubicSpline s(x, y);
        for (std::size_t i = 0; i < x.size(); ++i)
            CHECK(s(x[i]) == doctest::Approx(y[i]).epsilon(1e-12));
    }

    SUBCASE("reproduces linear data") {
        std::vector<double> x{0.0, 1.0, 2.0, 3.5, 5.0};
        std::vector<double> y;
        for (double xi : x) y.push_back(2.0 * xi - 1.0);
        const NaturalCubicSpline s(x, y);
        for (double q : {0.5, 1.7, 2.9, 4.2})
            CHECK(s(q) == doctest::Approx(2.0 * q - 1.0).epsilon(1e-8));
    }

    SUBCASE("fewer than four knots rejected") {
        CHECK_THROWS_AS(NaturalCubicSpline({0, 1, 2}, {0, 1, 2}), std::invalid_argument);
    }
}

TEST_CASE("spline_interpolate_sinogram") {
    const ImageGrid img = shepp_logan(96);
    const Sinogram train = radon_forward(img, uniform_angles(40), 137);

    SUBCASE("knot queries return the knot columns") {
        const Sinogram out = spline_interpolate_sinogram(train, train.angles_deg);
        CHECK((out.data - train.data).cwiseAbs().maxCoeff() <= 1e-12);
    }

    SUBCASE("rows linear in angle are reproduced in the interior") {
        Sinogram linear;
        linear.angles_deg = {0.0, 20.0, 50.0, 90.0, 120.0, 160.0};
        linear.data.resize(5, 6);
        for (Eigen::Index b = 0; b < 5; ++b)
            for (Eigen::Index j = 0; j < 6; ++j)
                linear.data(b, j) =
                    0.3 * static_cast<double>(b) + 0.01 * linear.angles_deg[static_cast<std::size_t>(j)];
        const std::vector<double> queries{25.0, 60.0, 100.0, 140.0};
        const Sinogram out = spline_interpolate_sinogram(linear, queries);
        for (Eigen::Index b = 0; b < 5; ++b)
            for (std::size_t j = 0; j < queries.size(); ++j)
                CHECK(out.data(b, static_cast<Eigen::Index>(j)) ==
                      doctest::Approx(0.3 * static_cast<double>(b) + 0.01 * queries[j])
                          .epsilon(1e-8));
    }

    SUBCASE("dense-angle oracle comparison stays finite and is recorded") {
        const Sinogram dense = radon_forward(img, uniform_angles(200), 137);
        const Sinogram predicted = spline_interpolate_sinogram(train, dense.angles_deg);
        const double err = frobenius_error(predicted.data, dense.data);
        CHECK(std::isfinite(err));
        MESSAGE("spline vs dense forward projection error: ", err);
    }

    SUBCASE("out-of-range queries clamp to the boundary knots") {
        std::size_t clamped = 0;
        const std::vector<double> queries{0.0, 90.0, 178.0, 179.5};
        const Sinogram out = spline_interpolate_sinogram(train, queries, &clamped);
        CHECK(clamped == 2); // training angles stop at 175.5
        CHECK((out.data.col(2) - train.data.col(train.views() - 1)).cwiseAbs().maxCoeff() <=
              1e-12);
        CHECK((out.data.col(3) - out.data.col(2)).cwiseAbs().maxCoeff() <= 1e-12);
    }

    SUBCASE("too few knots rejected") {
        Sinogram tiny;
        tiny.angles_deg = {0.0, 60.0, 120.0};
        tiny.data.setZero(5, 3);
        CHECK_THROWS_AS(spline_interpolate_sinogram(tiny, {30.0}), std::invalid_argument);
    }
}

TEST_CASE("training_only_reconstruction") {
    const ImageGrid img = shepp_logan(64);

    SUBCASE("identical input matches plain fbp bitwise") {
        const Sinogram sino = radon_forward(img, uniform_angles(180), 93);
        CHECK(training_only_reconstruction(sino, 64).pixels == fbp(sino, 64).pixels);
    }

    SUBCASE("sparse views lose against dense views") {
        const Sinogram dense = radon_forward(img, uniform_angles(360), 93);
        const Sinogram sparse = radon_forward(img, uniform_angles(50), 93);
        const double dense_err =
            frobenius_error(training_only_reconstruction(dense, 64).pixels, img.pixels);
        const double sparse_err =
            frobenius_error(training_only_reconstruction(sparse, 64).pixels, img.pixels);
        CHECK(sparse_err > dense_err);
    }

    SUBCASE("empty sinogram rejected") {
        Sinogram empty;
        empty.data.resize(93, 0);
        CHECK_THROWS_AS(training_only_reconstruction(empty, 64), std::invalid_argument);
    }
}
