#include "manifex/experiments.hpp"

#include "manifex/errors.hpp"
#include "manifex/extender.hpp"
#include "manifex/io.hpp"
#include "manifex/rng.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

namespace manifex {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Seed-stream tags; per-batch fit streams start at kSeedFitBase.
enum : std::uint64_t { kSeedTrain = 1, kSeedEval = 2, kSeedNoise = 3, kSeedFitBase = 16 };

double elapsed_s(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

class ManifestWriter {
public:
    void line(const std::string& s) { lines_ << s << "\n"; }
    void kv(const std::string& key, const std::string& value) { line(key + " " + value); }
    void save(const std::filesystem::path& path) {
        std::ofstream out(path, std::ios::binary);
        if (!out) throw io_error("cannot open for writing: " + path.string());
        out << lines_.str();
        if (!out) throw io_error("write failed: " + path.string());
    }

private:
    std::ostringstream lines_;
};

void echo_config(ManifestWriter& mf, const ExperimentConfig& cfg) {
    mf.kv("version", kVersionString);
    mf.kv("experiment", cfg.experiment);
    std::string batches;
    for (std::size_t i = 0; i < cfg.batch_sizes.size(); ++i)
        batches += (i ? "," : "") + std::to_string(cfg.batch_sizes[i]);
    mf.kv("batch-sizes", batches);
    mf.kv("eval-count", std::to_string(cfg.eval_count));
    mf.kv("n-bar", std::to_string(cfg.n_bar));
    mf.kv("delta", fmt(cfg.delta));
    mf.kv("m-reference", std::to_string(cfg.m_reference));
    mf.kv("M", fmt(cfg.resolved_half_width()));
    mf.kv("noise-level", fmt(cfg.noise_level));
    mf.kv("d", std::to_string(cfg.d));
    mf.kv("seed", std::to_string(cfg.seed));
    mf.kv("arclength-uniform", cfg.arclength_uniform ? "true" : "false");
    const char* emb = cfg.angle_embedding == AngleEmbeddingMode::HalfCircle ? "half-circle"
                      : cfg.angle_embedding == AngleEmbeddingMode::Scalar   ? "scalar"
                                                                            : "full-wrap";
    mf.kv("angle-embedding", emb);
    mf.kv("derived-seed-train", std::to_string(derive_seed(cfg.seed, kSeedTrain)));
    mf.kv("derived-seed-eval", std::to_string(derive_seed(cfg.seed, kSeedEval)));
    mf.kv("derived-seed-noise", std::to_string(derive_seed(cfg.seed, kSeedNoise)));
}

std::string batch_tag(int k) {
    char buf[24];
    std::snprintf(buf, sizeof(buf), "b%03d", k);
    return buf;
}

} // namespace

void ExperimentConfig::validate() const {
    if (experiment != "spiral" && experiment != "ct")
        throw config_error("experiment must be 'spiral' or 'ct', got '" + experiment + "'");
    if (batch_sizes.empty()) throw config_error("batch-sizes must be non-empty");
    for (int k : batch_sizes)
        if (k < 1) throw config_error("batch sizes must be positive");
    if (eval_count < 1) throw config_error("eval-count must be positive");
    if (n_bar < 1) throw config_error("n-bar must be positive");
    if (!(delta > 0.0 && delta < 1.0))
        throw config_error("delta = " + fmt(delta) +
                           " is outside (0,1); the adaptive bandwidth needs log(delta) "
                           "finite and negative");
    if (m_reference < 1) throw config_error("m-reference must be positive");
    if (half_width < 0.0) throw config_error("M must be >= 0 (0 selects the default)");
    if (noise_level < 0.0) throw config_error("noise-level must be >= 0");
    if (d < 16) throw config_error("d must be >= 16");
    if (experiment == "ct" && angle_embedding == AngleEmbeddingMode::Scalar && n_bar > 1)
        throw config_error("scalar angle embedding is one-dimensional; set n-bar to 1");
}

double ExperimentConfig::resolved_half_width() const {
    if (half_width > 0.0) return half_width;
    return experiment == "spiral" ? std::exp(1.0) : 1.0;
}

DirectoryLock::DirectoryLock(const std::filesystem::path& dir) : path_(dir / ".lock") {
    const int fd = ::open(path_.c_str(), O_CREAT | O_EXCL | O_WRONLY, 0644);
    if (fd < 0)
        throw io_error("output directory is locked (remove stale " + path_.string() +
                       " if no run is active)");
    ::close(fd);
}

DirectoryLock::~DirectoryLock() {
    std::error_code ec;
    std::filesystem::remove(path_, ec);
}

Eigen::Vector2d spiral_point(double t) {
    return std::exp(t) * Eigen::Vector2d(std::cos(kTwoPi * t), std::sin(kTwoPi * t));
}

std::vector<ErrorReport> run_spiral(const ExperimentConfig& cfg) {
    cfg.validate();
    const double M = cfg.resolved_half_width();
    std::filesystem::create_directories(cfg.output_dir);
    DirectoryLock lock(cfg.output_dir);
    ManifestWriter mf;
    echo_config(mf, cfg);

    // One nested draw: batch k uses the first k training parameters.
    const int k_max = *std::max_element(cfg.batch_sizes.begin(), cfg.batch_sizes.end());
    SeededRng train_rng(derive_seed(cfg.seed, kSeedTrain));
    std::vector<double> t_train(static_cast<std::size_t>(k_max));
    for (double& t : t_train) {
        const double u = train_rng.uniform();
        // Arclength grows like e^t - 1; invert to sample uniformly along it.
        t = cfg.arclength_uniform ? std::log1p(u * (std::exp(1.0) - 1.0)) : u;
    }

    SeededRng eval_rng(derive_seed(cfg.seed, kSeedEval));
    std::vector<double> t_eval(static_cast<std::size_t>(cfg.eval_count));
    for (double& t : t_eval) t = eval_rng.uniform();

    PointCloud eval_points;
    eval_points.points.resize(cfg.eval_count, 2);
    Eigen::MatrixXd eval_truth(cfg.eval_count, 1);
    for (int i = 0; i < cfg.eval_count; ++i) {
        eval_points.points.row(i) = spiral_point(t_eval[static_cast<std::size_t>(i)]).transpose();
        eval_truth(i, 0) = t_eval[static_cast<std::size_t>(i)];
    }

    // Square raster over the enclosing cube, eval_count cells.
    const int g = std::max(2, static_cast<int>(std::lround(std::sqrt(cfg.eval_count))));
    PointCloud grid_points;
    grid_points.points.resize(static_cast<Eigen::Index>(g) * g, 2);
    for (int r = 0; r < g; ++r) {
        const double y = M - (r + 0.5) * (2.0 * M / g);
        for (int c = 0; c < g; ++c) {
            const double x = -M + (c + 0.5) * (2.0 * M / g);
            grid_points.points.row(static_cast<Eigen::Index>(r) * g + c) << x, y;
        }
    }

    std::vector<ErrorReport> reports;
    std::uint64_t batch_index = 0;
    for (int k : cfg.batch_sizes) {
        const auto t0 = std::chrono::steady_clock::now();
        PointCloud X;
        X.points.resize(k, 2);
        SampleValues values;
        values.values.resize(k, 1);
        for (int i = 0; i < k; ++i) {
            X.points.row(i) = spiral_point(t_train[static_cast<std::size_t>(i)]).transpose();
            values.values(i, 0) = t_train[static_cast<std::size_t>(i)];
        }
        const ExtenderModel model =
            fit(X, values, cfg.n_bar, cfg.m_reference, M, cfg.delta,
                derive_seed(cfg.seed, kSeedFitBase + batch_index));
        mf.kv("timing fit_" + batch_tag(k) + "_s", fmt(elapsed_s(t0)));

        const auto t1 = std::chrono::steady_clock::now();
        const Eigen::MatrixXd grid_pred = extend_batch(grid_points, model);
        Eigen::MatrixXd raster(g, g);
        for (int r = 0; r < g; ++r)
            for (int c = 0; c < g; ++c)
                raster(r, c) = grid_pred(static_cast<Eigen::Index>(r) * g + c, 0);
        const std::string tag = batch_tag(k);
        write_pgm16(cfg.output_dir / ("cube_" + tag + ".pgm"), raster);
        write_mxf(cfg.output_dir / ("cube_" + tag + ".mxf"), raster);

        const Eigen::MatrixXd eval_pred = extend_batch(eval_points, model);
        const double err = frobenius_error(eval_pred, eval_truth);
        if (!std::isfinite(err))
            throw numeric_error("non-finite evaluation error at batch " + std::to_string(k));
        mf.kv("timing eval_" + batch_tag(k) + "_s", fmt(elapsed_s(t1)));
        reports.push_back({"learned", k, err, 0.0});
        ++batch_index;
    }

    write_reports_csv(cfg.output_dir / "report.csv", reports);
    mf.save(cfg.output_dir / "manifest.txt");
    return reports;
}

std::vector<ErrorReport> run_ct(const ExperimentConfig& cfg) {
    cfg.validate();
    const double M = cfg.resolved_half_width();
    std::filesystem::create_directories(cfg.output_dir);
    DirectoryLock lock(cfg.output_dir);
    ManifestWriter mf;
    echo_config(mf, cfg);

    const ImageGrid phantom = shepp_logan(cfg.d);
    const ImageGrid noisy =
        add_noise(phantom, cfg.noise_level, derive_seed(cfg.seed, kSeedNoise));
    write_pgm16(cfg.output_dir / "phantom.pgm", phantom.pixels);
    write_mxf(cfg.output_dir / "phantom.mxf", phantom.pixels);
    write_pgm16(cfg.output_dir / "phantom_noisy.pgm", noisy.pixels);
    write_mxf(cfg.output_dir / "phantom_noisy.mxf", noisy.pixels);

    // Shared evaluation angles: one sorted draw for every batch size.
    SeededRng eval_rng(derive_seed(cfg.seed, kSeedEval));
    std::vector<double> eval_angles(static_cast<std::size_t>(cfg.eval_count));
    for (double& a : eval_angles) a = eval_rng.uniform(0.0, 180.0);
    std::sort(eval_angles.begin(), eval_angles.end());
    const PointCloud eval_cloud = embed_angles(eval_angles, cfg.angle_embedding);

    // Training angles: one nested uniform draw, batch k uses the first k.
    const int k_max = *std::max_element(cfg.batch_sizes.begin(), cfg.batch_sizes.end());
    SeededRng train_rng(derive_seed(cfg.seed, kSeedTrain));
    std::vector<double> angle_pool(static_cast<std::size_t>(k_max));
    for (double& a : angle_pool) a = train_rng.uniform(0.0, 180.0);

    std::vector<ErrorReport> reports;
    std::uint64_t batch_index = 0;
    for (int k : cfg.batch_sizes) {
        const std::string tag = batch_tag(k);
        const auto t0 = std::chrono::steady_clock::now();

        std::vector<double> train_angles(angle_pool.begin(), angle_pool.begin() + k);
        std::sort(train_angles.begin(), train_angles.end());
        const Sinogram train_sino = radon_forward(noisy, train_angles);
        write_pgm16(cfg.output_dir / ("sino_training_" + tag + ".pgm"), train_sino.data);
        write_mxf(cfg.output_dir / ("sino_training_" + tag + ".mxf"), train_sino.data);
        write_angles(cfg.output_dir / ("sino_training_" + tag + ".mxf.angles.txt"),
                     train_sino.angles_deg);
        mf.kv("timing project_" + tag + "_s", fmt(elapsed_s(t0)));

        const auto t1 = std::chrono::steady_clock::now();
        const PointCloud X = embed_angles(train_angles, cfg.angle_embedding);
        SampleValues values;
        values.values = train_sino.data.transpose(); // one row per angle
        const ExtenderModel model =
            fit(X, values, cfg.n_bar, cfg.m_reference, M, cfg.delta,
                derive_seed(cfg.seed, kSeedFitBase + batch_index));
        mf.kv("timing fit_" + tag + "_s", fmt(elapsed_s(t1)));

        const auto t2 = std::chrono::steady_clock::now();
        Sinogram learned_sino;
        learned_sino.angles_deg = eval_angles;
        learned_sino.data = extend_batch(eval_cloud, model).transpose();
        mf.kv("timing predict_" + tag + "_s", fmt(elapsed_s(t2)));
        write_pgm16(cfg.output_dir / ("sino_learned_" + tag + ".pgm"), learned_sino.data);
        write_mxf(cfg.output_dir / ("sino_learned_" + tag + ".mxf"), learned_sino.data);
        write_angles(cfg.output_dir / ("sino_learned_" + tag + ".mxf.angles.txt"),
                     learned_sino.angles_deg);

        const auto t3 = std::chrono::steady_clock::now();
        std::size_t clamps = 0;
        const Sinogram spline_sino = spline_interpolate_sinogram(train_sino, eval_angles, &clamps);
        mf.kv("timing spline_" + tag + "_s", fmt(elapsed_s(t3)));
        mf.kv("spline-clamped-queries " + tag, std::to_string(clamps));
        write_pgm16(cfg.output_dir / ("sino_spline_" + tag + ".pgm"), spline_sino.data);
        write_mxf(cfg.output_dir / ("sino_spline_" + tag + ".mxf"), spline_sino.data);
        write_angles(cfg.output_dir / ("sino_spline_" + tag + ".mxf.angles.txt"),
                     spline_sino.angles_deg);

        const auto t4 = std::chrono::steady_clock::now();
        const ImageGrid recon_training = training_only_reconstruction(train_sino, cfg.d);
        const ImageGrid recon_learned = fbp(learned_sino, cfg.d);
        const ImageGrid recon_spline = fbp(spline_sino, cfg.d);
        mf.kv("timing fbp_" + tag + "_s", fmt(elapsed_s(t4)));
        write_pgm16(cfg.output_dir / ("recon_training_" + tag + ".pgm"), recon_training.pixels);
        write_mxf(cfg.output_dir / ("recon_training_" + tag + ".mxf"), recon_training.pixels);
        write_pgm16(cfg.output_dir / ("recon_learned_" + tag + ".pgm"), recon_learned.pixels);
        write_mxf(cfg.output_dir / ("recon_learned_" + tag + ".mxf"), recon_learned.pixels);
        write_pgm16(cfg.output_dir / ("recon_spline_" + tag + ".pgm"), recon_spline.pixels);
        write_mxf(cfg.output_dir / ("recon_spline_" + tag + ".mxf"), recon_spline.pixels);

        const double err_training = frobenius_error(recon_training.pixels, phantom.pixels);
        const double err_learned = frobenius_error(recon_learned.pixels, phantom.pixels);
        const double err_spline = frobenius_error(recon_spline.pixels, phantom.pixels);
        if (!std::isfinite(err_training) || !std::isfinite(err_learned) ||
            !std::isfinite(err_spline))
            throw numeric_error("non-finite reconstruction error at batch " + std::to_string(k));
        reports.push_back({"training", k, err_training, 0.0});
        reports.push_back({"learned", k, err_learned, 0.0});
        reports.push_back({"spline", k, err_spline, 0.0});
        reports.push_back({"training_vs_noisy", k, frobenius_error(recon_training.pixels, noisy.pixels), 0.0});
        reports.push_back({"learned_vs_noisy", k, frobenius_error(recon_learned.pixels, noisy.pixels), 0.0});
        reports.push_back({"spline_vs_noisy", k, frobenius_error(recon_spline.pixels, noisy.pixels), 0.0});
        ++batch_index;
    }

    write_reports_csv(cfg.output_dir / "report.csv", reports);
    mf.save(cfg.output_dir / "manifest.txt");
    return reports;
}

} // namespace manifex
