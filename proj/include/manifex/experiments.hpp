#pragma once

#include "manifex/analysis.hpp"
#include "manifex/tomo.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace manifex {

inline constexpr const char* kVersionString = "manifex v0.1.0";

struct ExperimentConfig {
    std::string experiment;                     // "spiral" or "ct"
    std::vector<int> batch_sizes = {50, 100, 150};
    int eval_count = 10000;
    int n_bar = 2;
    double delta = 0.1;
    int m_reference = 50;
    double half_width = 0.0; // 0 -> experiment default (e for spiral, 1 for ct)
    double noise_level = 0.2;
    int d = 256;
    std::uint64_t seed = 7;
    std::filesystem::path output_dir = "out";
    bool arclength_uniform = false; // spiral: sample t uniform in arclength
    AngleEmbeddingMode angle_embedding = AngleEmbeddingMode::HalfCircle;

    void validate() const; // throws config_error
    double resolved_half_width() const;
};

/// Holds <output_dir>/.lock for the duration of a run; a second concurrent
/// run on the same directory fails.
class DirectoryLock {
public:
    explicit DirectoryLock(const std::filesystem::path& dir);
    ~DirectoryLock();
    DirectoryLock(const DirectoryLock&) = delete;
    DirectoryLock& operator=(const DirectoryLock&) = delete;

private:
    std::filesystem::path path_;
};

/// Logarithmic spiral point at parameter t: e^t (cos 2 pi t, sin 2 pi t).
Eigen::Vector2d spiral_point(double t);

/// Fits on k on-curve samples per batch size, rasters the extension over the
/// enclosing square, and scores 10^4 fresh on-curve points against their
/// exact parameter values. Writes report.csv, manifest.txt, PGM/MXF rasters.
std::vector<ErrorReport> run_spiral(const ExperimentConfig& cfg);

/// Sparse-view CT pipeline: noisy phantom, per-batch training sinogram,
/// angle-manifold fit, sinogram interpolation at eval_count angles, FBP of
/// the training-only, learned and spline sinograms, errors against the
/// noiseless (and noisy) phantom.
std::vector<ErrorReport> run_ct(const ExperimentConfig& cfg);

} // namespace manifex
