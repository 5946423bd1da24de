#include "manifex/tomo.hpp"

#include "manifex/rng.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

namespace manifex {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kSqrt2 = std::numbers::sqrt2;

// Modified Shepp-Logan ten-ellipse table: intensity, semi-axes a/b, center,
// rotation (degrees, counterclockwise).
struct Ellipse {
    double intensity, a, b, x0, y0, phi_deg;
};

constexpr Ellipse kSheppLogan[] = {
    {1.0, 0.69, 0.92, 0.0, 0.0, 0.0},
    {-0.8, 0.6624, 0.8740, 0.0, -0.0184, 0.0},
    {-0.2, 0.1100, 0.3100, 0.22, 0.0, -18.0},
    {-0.2, 0.1600, 0.4100, -0.22, 0.0, 18.0},
    {0.1, 0.2100, 0.2500, 0.0, 0.35, 0.0},
    {0.1, 0.0460, 0.0460, 0.0, 0.1, 0.0},
    {0.1, 0.0460, 0.0460, 0.0, -0.1, 0.0},
    {0.1, 0.0460, 0.0230, -0.08, -0.605, 0.0},
    {0.1, 0.0230, 0.0230, 0.0, -0.606, 0.0},
    {0.1, 0.0230, 0.0460, 0.06, -0.605, 0.0},
};

void check_angles(const std::vector<double>& angles_deg, const char* where) {
    if (angles_deg.empty())
        throw std::invalid_argument(std::string(where) + ": no angles given");
    double prev = -1.0;
    for (double a : angles_deg) {
        if (!(a >= 0.0 && a < 180.0))
            throw std::invalid_argument(std::string(where) + ": angle " + std::to_string(a) +
                                        " outside [0, 180)");
        if (a < prev)
            throw std::invalid_argument(std::string(where) + ": angles must ascend");
        prev = a;
    }
}

// Image value at physical (x, y) by bilinear interpolation, zero outside.
double sample_bilinear(const Eigen::MatrixXd& pixels, double x, double y) {
    const Eigen::Index d = pixels.rows();
    const double h = 2.0 / static_cast<double>(d);
    const double cf = (x + 1.0) / h - 0.5;
    const double rf = (1.0 - y) / h - 0.5;
    const auto c0 = static_cast<Eigen::Index>(std::floor(cf));
    const auto r0 = static_cast<Eigen::Index>(std::floor(rf));
    if (c0 < -1 || c0 >= d || r0 < -1 || r0 >= d) return 0.0;
    const double wc = cf - static_cast<double>(c0);
    const double wr = rf - static_cast<double>(r0);
    auto at = [&](Eigen::Index r, Eigen::Index c) {
        return (r >= 0 && r < d && c >= 0 && c < d) ? pixels(r, c) : 0.0;
    };
    return (1.0 - wr) * ((1.0 - wc) * at(r0, c0) + wc * at(r0, c0 + 1)) +
           wr * ((1.0 - wc) * at(r0 + 1, c0) + wc * at(r0 + 1, c0 + 1));
}

} // namespace

double detector_position(int j, int nb) {
    return -kSqrt2 + static_cast<double>(j) * (2.0 * kSqrt2 / static_cast<double>(nb - 1));
}

ImageGrid shepp_logan(int d) {
    if (d < 16) throw std::invalid_argument("shepp_logan: side must be >= 16");
    ImageGrid img;
    img.pixels.setZero(d, d);
    const double h = 2.0 / static_cast<double>(d);
    for (int r = 0; r < d; ++r) {
        const double y = 1.0 - (r + 0.5) * h;
        for (int c = 0; c < d; ++c) {
            const double x = -1.0 + (c + 0.5) * h;
            double v = 0.0;
            for (const Ellipse& e : kSheppLogan) {
                const double phi = e.phi_deg * kPi / 180.0;
                const double dx = x - e.x0, dy = y - e.y0;
                const double xr = dx * std::cos(phi) + dy * std::sin(phi);
                const double yr = -dx * std::sin(phi) + dy * std::cos(phi);
                if ((xr * xr) / (e.a * e.a) + (yr * yr) / (e.b * e.b) <= 1.0)
                    v += e.intensity;
            }
            img.pixels(r, c) = std::max(v, 0.0);
        }
    }
    return img;
}

ImageGrid add_noise(const ImageGrid& img, double level, std::uint64_t seed) {
    if (level < 0.0) throw std::invalid_argument("add_noise: level must be >= 0");
    if (level == 0.0) return img;
    SeededRng rng(seed);
    ImageGrid out = img;
    for (Eigen::Index r = 0; r < out.pixels.rows(); ++r)
        for (Eigen::Index c = 0; c < out.pixels.cols(); ++c)
            out.pixels(r, c) += level * rng.uniform();
    return out;
}

Sinogram radon_forward(const ImageGrid& img, const std::vector<double>& angles_deg,
                       int n_bins) {
    check_angles(angles_deg, "radon_forward");
    if (n_bins < 3 || n_bins % 2 == 0)
        throw std::invalid_argument("radon_forward: detector bin count must be odd and >= 3");
    const int d = img.side();
    const double h = 2.0 / static_cast<double>(d);
    const int nt = static_cast<int>(std::ceil(2.0 * kSqrt2 / h));
    const auto na = static_cast<Eigen::Index>(angles_deg.size());

    Sinogram sino;
    sino.angles_deg = angles_deg;
    sino.data.setZero(n_bins, na);
#pragma omp parallel for schedule(static)
    for (Eigen::Index j = 0; j < na; ++j) {
        const double theta = angles_deg[static_cast<std::size_t>(j)] * kPi / 180.0;
        const double ct = std::cos(theta), st = std::sin(theta);
        for (int b = 0; b < n_bins; ++b) {
            const double s = detector_position(b, n_bins);
            double acc = 0.0;
            for (int i = 0; i < nt; ++i) {
                const double t = -kSqrt2 + (i + 0.5) * h;
                acc += sample_bilinear(img.pixels, s * ct - t * st, s * st + t * ct);
            }
            sino.data(b, j) = acc * h;
        }
    }
    return sino;
}

PointCloud embed_angles(const std::vector<double>& angles_deg, AngleEmbeddingMode mode) {
    for (double a : angles_deg)
        if (!(a >= 0.0 && a < 180.0))
            throw std::invalid_argument("embed_angles: angle " + std::to_string(a) +
                                        " outside [0, 180)");
    const auto n = static_cast<Eigen::Index>(angles_deg.size());
    PointCloud cloud;
    switch (mode) {
    case AngleEmbeddingMode::HalfCircle:
        cloud.points.resize(n, 2);
        for (Eigen::Index i = 0; i < n; ++i) {
            const double t = angles_deg[static_cast<std::size_t>(i)] * kPi / 180.0;
            cloud.points(i, 0) = std::cos(t);
            cloud.points(i, 1) = std::sin(t);
        }
        break;
    case AngleEmbeddingMode::Scalar:
        cloud.points.resize(n, 1);
        for (Eigen::Index i = 0; i < n; ++i)
            cloud.points(i, 0) = angles_deg[static_cast<std::size_t>(i)] / 180.0;
        break;
    case AngleEmbeddingMode::FullWrap:
        cloud.points.resize(n, 2);
        for (Eigen::Index i = 0; i < n; ++i) {
            const double t = 2.0 * angles_deg[static_cast<std::size_t>(i)] * kPi / 180.0;
            cloud.points(i, 0) = std::cos(t);
            cloud.points(i, 1) = std::sin(t);
        }
        break;
    }
    return cloud;
}

namespace {

std::size_t next_pow2(std::size_t n) {
    std::size_t p = 1;
    while (p < n) p <<= 1;
    return p;
}

// Frequency response of the band-limited ramp: FFT of the real-space kernel
// g[0] = 1/(4 ds^2), g[n odd] = -1/(pi n ds)^2, laid out circularly.
std::vector<double> ramp_filter(std::size_t nfft, double ds) {
    std::vector<double> kernel(nfft, 0.0);
    kernel[0] = 1.0 / (4.0 * ds * ds);
    for (std::size_t i = 1; i < nfft / 2 + 1; i += 2) {
        const double v = -1.0 / (kPi * kPi * static_cast<double>(i * i) * ds * ds);
        kernel[i] = v;
        kernel[nfft - i] = v;
    }
    std::vector<double> in(nfft), response(nfft / 2 + 1);
    auto* out = static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * (nfft / 2 + 1)));
    fftw_plan plan = fftw_plan_dft_r2c_1d(static_cast<int>(nfft), in.data(), out, FFTW_ESTIMATE);
    std::copy(kernel.begin(), kernel.end(), in.begin());
    fftw_execute(plan);
    for (std::size_t i = 0; i < response.size(); ++i) response[i] = out[i][0];
    fftw_destroy_plan(plan);
    fftw_free(out);
    return response;
}

} // namespace

ImageGrid fbp(const Sinogram& sino, int d) {
    if (sino.views() < 2) throw std::invalid_argument("fbp: need at least 2 views");
    if (d < 16) throw std::invalid_argument("fbp: side must be >= 16");
    const auto nb = static_cast<std::size_t>(sino.bins());
    const auto na = sino.views();
    const double ds = 2.0 * kSqrt2 / static_cast<double>(nb - 1);
    const std::size_t nfft = next_pow2(2 * nb);
    const std::vector<double> response = ramp_filter(nfft, ds);

    // Ramp-filter every projection: q = ds * conv(p, g), via zero-padded FFT.
    Eigen::MatrixXd filtered(static_cast<Eigen::Index>(nb), na);
    {
        std::vector<double> in(nfft);
        auto* spec =
            static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * (nfft / 2 + 1)));
        fftw_plan fwd =
            fftw_plan_dft_r2c_1d(static_cast<int>(nfft), in.data(), spec, FFTW_ESTIMATE);
        fftw_plan inv =
            fftw_plan_dft_c2r_1d(static_cast<int>(nfft), spec, in.data(), FFTW_ESTIMATE);
        for (Eigen::Index j = 0; j < na; ++j) {
            std::fill(in.begin(), in.end(), 0.0);
            for (std::size_t b = 0; b < nb; ++b) in[b] = sino.data(static_cast<Eigen::Index>(b), j);
            fftw_execute(fwd);
            for (std::size_t i = 0; i < nfft / 2 + 1; ++i) {
                spec[i][0] *= response[i];
                spec[i][1] *= response[i];
            }
            fftw_execute(inv);
            const double scale = ds / static_cast<double>(nfft); // c2r is unnormalized
            for (std::size_t b = 0; b < nb; ++b)
                filtered(static_cast<Eigen::Index>(b), j) = in[b] * scale;
        }
        fftw_destroy_plan(fwd);
        fftw_destroy_plan(inv);
        fftw_free(spec);
    }

    std::vector<double> ct(static_cast<std::size_t>(na)), st(static_cast<std::size_t>(na));
    for (Eigen::Index j = 0; j < na; ++j) {
        const double theta = sino.angles_deg[static_cast<std::size_t>(j)] * kPi / 180.0;
        ct[static_cast<std::size_t>(j)] = std::cos(theta);
        st[static_cast<std::size_t>(j)] = std::sin(theta);
    }

    ImageGrid img;
    img.pixels.setZero(d, d);
    const double h = 2.0 / static_cast<double>(d);
    const double weight = kPi / static_cast<double>(na);
    const auto last_bin = static_cast<double>(nb - 1);
#pragma omp parallel for schedule(static)
    for (int r = 0; r < d; ++r) {
        const double y = 1.0 - (r + 0.5) * h;
        for (int c = 0; c < d; ++c) {
            const double x = -1.0 + (c + 0.5) * h;
            if (x * x + y * y > 1.0) continue; // inscribed disk support
            double acc = 0.0;
            for (Eigen::Index j = 0; j < na; ++j) {
                const double s = x * ct[static_cast<std::size_t>(j)] +
                                 y * st[static_cast<std::size_t>(j)];
                const double u = (s + kSqrt2) / ds;
                if (u < 0.0 || u > last_bin) continue;
                const auto b0 = static_cast<Eigen::Index>(u);
                const double frac = u - static_cast<double>(b0);
                const double q0 = filtered(b0, j);
                const double q1 = (b0 + 1 < static_cast<Eigen::Index>(nb))
                                      ? filtered(b0 + 1, j)
                                      : q0;
                acc += q0 + frac * (q1 - q0);
            }
            img.pixels(r, c) = acc * weight;
        }
    }
    return img;
}

} // namespace manifex
