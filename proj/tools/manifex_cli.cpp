#include "manifex/errors.hpp"
#include "manifex/experiments.hpp"
#include "manifex/extender.hpp"
#include "manifex/io.hpp"
#include "manifex/online.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace {

using namespace manifex;

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitIo = 3;
constexpr int kExitNumeric = 4;

void add_experiment_flags(CLI::App* cmd, ExperimentConfig& cfg) {
    cmd->add_option("--batch-sizes", cfg.batch_sizes, "training batch sizes")
        ->delimiter(',');
    cmd->add_option("--eval-count", cfg.eval_count, "evaluation set size");
    cmd->add_option("--n-bar", cfg.n_bar, "projection target dimension");
    cmd->add_option("--delta", cfg.delta, "stabilizer parameter in (0,1)");
    cmd->add_option("--m-reference", cfg.m_reference, "reference points drawn per fit");
    cmd->add_option("--M", cfg.half_width, "hypercube half-width (0 = experiment default)");
    cmd->add_option("--noise-level", cfg.noise_level, "additive image noise level");
    cmd->add_option("--d", cfg.d, "image side length in pixels");
    cmd->add_option("--seed", cfg.seed, "master seed");
    cmd->add_option("--output-dir", cfg.output_dir, "artifact directory");
    cmd->add_flag("--arclength-uniform", cfg.arclength_uniform,
                  "spiral: sample training parameters uniformly in arclength");
    std::map<std::string, AngleEmbeddingMode> modes{
        {"half-circle", AngleEmbeddingMode::HalfCircle},
        {"scalar", AngleEmbeddingMode::Scalar},
        {"full-wrap", AngleEmbeddingMode::FullWrap}};
    cmd->add_option("--angle-embedding", cfg.angle_embedding, "ct: angle manifold embedding")
        ->transform(CLI::CheckedTransformer(modes, CLI::ignore_case));
}

void print_reports(const std::vector<ErrorReport>& reports) {
    for (const ErrorReport& r : reports)
        std::printf("%-18s batch %3d  error %.6g\n", r.method.c_str(), r.batch, r.error);
}

int run(int argc, char** argv) {
    CLI::App app{"function extension on sampled manifolds, with a sparse-view CT pipeline"};
    app.require_subcommand(1);
    app.fallthrough(); // experiment flags live here and follow the subcommand
    app.set_version_flag("--version", kVersionString);

    ExperimentConfig cfg;
    app.set_config("--config", "", "flat key=value config file; flags override it");
    add_experiment_flags(&app, cfg);
    CLI::App* spiral = app.add_subcommand("spiral", "logarithmic-spiral experiment");
    CLI::App* ct = app.add_subcommand("ct", "sparse-view CT experiment");

    std::string points_path, values_path, queries_path, model_path, out_path;
    bool use_cache = false;
    int fit_n_bar = 2, fit_m = 50;
    double fit_M = 1.0, fit_delta = 0.1;
    std::uint64_t fit_seed = 7;

    CLI::App* fit_cmd = app.add_subcommand("fit", "fit a model from point/value matrices");
    fit_cmd->add_option("--points", points_path, "training points (MXF, one row per point)")
        ->required();
    fit_cmd->add_option("--values", values_path, "training values (MXF, one row per point)")
        ->required();
    fit_cmd->add_option("--out", out_path, "model file to write")->required();
    fit_cmd->add_option("--n-bar", fit_n_bar, "projection target dimension");
    fit_cmd->add_option("--m-reference", fit_m, "reference points to draw");
    fit_cmd->add_option("--M", fit_M, "hypercube half-width");
    fit_cmd->add_option("--delta", fit_delta, "stabilizer parameter in (0,1)");
    fit_cmd->add_option("--seed", fit_seed, "reference-draw seed");

    CLI::App* predict_cmd = app.add_subcommand("predict", "evaluate a model at query points");
    predict_cmd->add_option("--model", model_path, "model file")->required();
    predict_cmd->add_option("--queries", queries_path, "query points (MXF)")->required();
    predict_cmd->add_option("--out", out_path, "predictions to write (MXF)")->required();
    predict_cmd->add_flag("--cache", use_cache,
                          "reuse and persist the evaluation cache embedded in the model "
                          "file (query id = row index)");

    CLI::App* update_cmd =
        app.add_subcommand("update", "fold new samples into a model (and its cache)");
    update_cmd->add_option("--model", model_path, "model file, rewritten in place")->required();
    update_cmd->add_option("--points", points_path, "new points (MXF)")->required();
    update_cmd->add_option("--values", values_path, "new values (MXF)")->required();
    update_cmd->add_option("--out", out_path, "write updated model here instead of in place");

    CLI::App* info_cmd = app.add_subcommand("info", "describe a model file");
    info_cmd->add_option("--model", model_path, "model file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitConfig;
    }

    if (spiral->parsed() || ct->parsed()) {
        cfg.experiment = spiral->parsed() ? "spiral" : "ct";
        const auto reports = cfg.experiment == "spiral" ? run_spiral(cfg) : run_ct(cfg);
        print_reports(reports);
        std::printf("artifacts written to %s\n", cfg.output_dir.string().c_str());
    } else if (fit_cmd->parsed()) {
        PointCloud X{read_mxf(points_path)};
        SampleValues values{read_mxf(values_path)};
        const ExtenderModel model = fit(X, values, fit_n_bar, fit_m, fit_M, fit_delta, fit_seed);
        save_model(out_path, model);
        std::printf("model: %lld samples, n=%lld, n_bar=%lld, p=%lld -> %s\n",
                    static_cast<long long>(model.sample_count()),
                    static_cast<long long>(model.ambient_dim()),
                    static_cast<long long>(model.target_dim()),
                    static_cast<long long>(model.value_dim()), out_path.c_str());
    } else if (predict_cmd->parsed()) {
        EvaluationCache cache;
        ExtenderModel model = load_model(model_path, use_cache ? &cache : nullptr);
        const Eigen::MatrixXd queries = read_mxf(queries_path);
        Eigen::MatrixXd pred(queries.rows(), model.value_dim());
        if (use_cache) {
            for (Eigen::Index i = 0; i < queries.rows(); ++i)
                pred.row(i) =
                    evaluate_cached(queries.row(i).transpose(), model, cache,
                                    static_cast<std::uint64_t>(i))
                        .transpose();
        } else {
            pred = extend_batch(PointCloud{queries}, model);
        }
        if (!pred.allFinite()) throw numeric_error("non-finite prediction");
        write_mxf(out_path, pred);
        if (use_cache) save_model(model_path, model, &cache);
        std::printf("%lld predictions -> %s\n", static_cast<long long>(pred.rows()),
                    out_path.c_str());
    } else if (update_cmd->parsed()) {
        EvaluationCache cache;
        ExtenderModel model = load_model(model_path, &cache);
        PointCloud new_points{read_mxf(points_path)};
        SampleValues new_values{read_mxf(values_path)};
        update(model, cache, new_points, new_values);
        const auto target = out_path.empty() ? model_path : out_path;
        save_model(target, model, cache.size() ? &cache : nullptr);
        std::printf("model now holds %lld samples -> %s\n",
                    static_cast<long long>(model.sample_count()), target.c_str());
    } else if (info_cmd->parsed()) {
        EvaluationCache cache;
        const ExtenderModel model = load_model(model_path, &cache);
        std::printf("samples      %lld\n", static_cast<long long>(model.sample_count()));
        std::printf("ambient dim  %lld\n", static_cast<long long>(model.ambient_dim()));
        std::printf("target dim   %lld\n", static_cast<long long>(model.target_dim()));
        std::printf("value dim    %lld\n", static_cast<long long>(model.value_dim()));
        std::printf("delta        %.17g\n", model.delta);
        std::printf("half-width   %.17g\n", model.half_width);
        std::printf("spectrum    ");
        const Eigen::Index show = std::min<Eigen::Index>(8, model.basis.singular_values.size());
        for (Eigen::Index i = 0; i < show; ++i)
            std::printf(" %.6g", model.basis.singular_values(i));
        if (show < model.basis.singular_values.size()) std::printf(" ...");
        std::printf("\ncache        %zu entries\n", cache.size());
    }
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const config_error& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return kExitConfig;
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return kExitConfig;
    } catch (const io_error& e) {
        std::fprintf(stderr, "io error: %s\n", e.what());
        return kExitIo;
    } catch (const numeric_error& e) {
        std::fprintf(stderr, "numeric error: %s\n", e.what());
        return kExitNumeric;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}
