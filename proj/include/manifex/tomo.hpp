#pragma once

#include "manifex/dimred.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <vector>

namespace manifex {

/// Square pixel grid over the physical extent [-1,1]^2. Row 0 is the top of
/// the image: pixel (r, c) is centered at x = -1 + (c+0.5)*2/d,
/// y = 1 - (r+0.5)*2/d.
struct ImageGrid {
    Eigen::MatrixXd pixels; // d x d

    int side() const { return static_cast<int>(pixels.rows()); }
};

/// Detector-by-angle matrix. Column j holds the projection at
/// angles_deg[j]; angles ascend. Detector bins sample [-sqrt(2), sqrt(2)]
/// uniformly, bin count odd so the center bin sits on the rotation axis.
struct Sinogram {
    Eigen::MatrixXd data; // nb x na
    std::vector<double> angles_deg;

    Eigen::Index bins() const { return data.rows(); }
    Eigen::Index views() const { return data.cols(); }
};

inline constexpr int kDefaultDetectorBins = 367;

/// Detector offset of bin j among nb bins.
double detector_position(int j, int nb);

enum class AngleEmbeddingMode {
    HalfCircle, // theta -> (cos(pi*theta/180), sin(pi*theta/180))
    Scalar,     // theta -> theta/180
    FullWrap,   // theta -> (cos(2*pi*theta/180), sin(2*pi*theta/180))
};

/// Modified Shepp-Logan head phantom (standard ten-ellipse table), d >= 16.
/// Pixel value is the sum of intensities of ellipses containing its center,
/// clamped to >= 0.
ImageGrid shepp_logan(int d);

/// out = img + level * Z with Z i.i.d. uniform on [0,1], seeded.
ImageGrid add_noise(const ImageGrid& img, double level, std::uint64_t seed);

/// Parallel-beam forward projection. Line integrals are approximated by
/// bilinear sampling of the image along each ray at step h = 2/d, summed
/// and scaled by h. Angles in [0, 180), ascending.
Sinogram radon_forward(const ImageGrid& img, const std::vector<double>& angles_deg,
                       int n_bins = kDefaultDetectorBins);

/// Maps projection angles onto the manifold coordinates the extender sees.
PointCloud embed_angles(const std::vector<double>& angles_deg,
                        AngleEmbeddingMode mode);

/// Filtered back projection: per-column ramp (Ram-Lak) filtering in the
/// frequency domain, back projection with linear detector interpolation,
/// scaled by pi/na, support clipped to the inscribed disk.
ImageGrid fbp(const Sinogram& sino, int d);

} // namespace manifex
