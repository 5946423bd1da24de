#include "manifex/extender.hpp"
#include "manifex/io.hpp"

#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <numbers>
#include <string>
#include <sys/wait.h>

using namespace manifex;
namespace fs = std::filesystem;

namespace {

int run_cli(const std::string& args) {
    const std::string cmd = std::string(MANIFEX_CLI_PATH) + " " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    REQUIRE(status != -1);
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

fs::path work_dir() {
    const auto dir = fs::temp_directory_path() / "manifex_cli_test";
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

} // namespace

TEST_CASE("exit codes are table-driven") {
    const auto dir = work_dir();

    // Staging: a valid tiny model via the fit subcommand.
    Eigen::MatrixXd points(6, 2);
    points << 0.1, 0.2, -0.4, 0.3, 0.7, -0.2, -0.6, -0.7, 0.0, 0.9, 0.5, 0.5;
    Eigen::MatrixXd values(6, 1);
    values << 1, 2, 3, 4, 5, 6;
    write_mxf(dir / "points.mxf", points);
    write_mxf(dir / "values.mxf", values);
    Eigen::MatrixXd queries(3, 2);
    queries << 0.0, 0.0, 0.2, 0.2, -0.1, 0.4;
    write_mxf(dir / "queries.mxf", queries);
    Eigen::MatrixXd nan_queries = queries;
    nan_queries(1, 0) = std::numeric_limits<double>::quiet_NaN();
    write_mxf(dir / "nan_queries.mxf", nan_queries);

    const std::string model = (dir / "model.mfxm").string();

    struct Row {
        std::string args;
        int expected;
    };
    const Row table[] = {
        {"--help", 0},
        {"--version", 0},
        {"", 2},               // a subcommand is required
        {"frobnicate", 2},     // unknown subcommand
        {"spiral --delta 1.0 --output-dir " + (dir / "out_bad_delta").string(), 2},
        {"spiral --no-such-flag 1", 2},
        {"ct --d 4 --output-dir " + (dir / "out_bad_d").string(), 2},
        {"info --model " + (dir / "missing.mfxm").string(), 3},
        {"fit --points " + (dir / "absent.mxf").string() + " --values " +
             (dir / "values.mxf").string() + " --out " + model,
         3},
        {"fit --points " + (dir / "points.mxf").string() + " --values " +
             (dir / "values.mxf").string() + " --out " + model + " --delta 2.0",
         2},
        {"fit --points " + (dir / "points.mxf").string() + " --values " +
             (dir / "values.mxf").string() + " --out " + model,
         0},
        {"info --model " + model, 0},
        {"predict --model " + model + " --queries " + (dir / "queries.mxf").string() +
             " --out " + (dir / "pred.mxf").string(),
         0},
        {"predict --model " + model + " --queries " + (dir / "nan_queries.mxf").string() +
             " --out " + (dir / "pred_nan.mxf").string(),
         4},
    };
    for (const Row& row : table) {
        CAPTURE(row.args);
        CHECK(run_cli(row.args) == row.expected);
    }
}

TEST_CASE("fit and predict through files match the in-process pipeline") {
    const auto dir = work_dir();
    Eigen::MatrixXd points(30, 2), values(30, 1);
    for (int i = 0; i < 30; ++i) {
        const double t = (i + 0.5) / 30.0;
        points.row(i) << std::exp(t) * std::cos(2 * std::numbers::pi * t),
            std::exp(t) * std::sin(2 * std::numbers::pi * t);
        values(i, 0) = t;
    }
    Eigen::MatrixXd queries(5, 2);
    queries << 0.4, 0.4, -1.0, 0.3, 2.0, -2.0, 0.0, 1.5, -0.7, -0.7;
    write_mxf(dir / "points.mxf", points);
    write_mxf(dir / "values.mxf", values);
    write_mxf(dir / "queries.mxf", queries);

    const double M = std::exp(1.0);
    char m_flag[40];
    std::snprintf(m_flag, sizeof(m_flag), "%.17g", M);
    REQUIRE(run_cli("fit --points " + (dir / "points.mxf").string() + " --values " +
                    (dir / "values.mxf").string() + " --out " + (dir / "m.mfxm").string() +
                    " --M " + m_flag + " --delta 0.1 --seed 29") == 0);
    REQUIRE(run_cli("predict --model " + (dir / "m.mfxm").string() + " --queries " +
                    (dir / "queries.mxf").string() + " --out " + (dir / "p.mxf").string()) ==
            0);

    const ExtenderModel direct =
        fit(PointCloud{points}, SampleValues{values}, 2, 50, M, 0.1, 29);
    const Eigen::MatrixXd pred = read_mxf(dir / "p.mxf");
    for (Eigen::Index i = 0; i < queries.rows(); ++i)
        CHECK(pred(i, 0) == extend(queries.row(i).transpose(), direct).value(0));
}

TEST_CASE("config file feeds flags, command line overrides it") {
    const auto dir = work_dir();
    {
        std::ofstream cfg(dir / "run.cfg");
        cfg << "batch-sizes=12\n"
            << "eval-count=100\n"
            << "seed=5\n"
            << "output-dir=" << (dir / "from_file").string() << "\n";
    }
    REQUIRE(run_cli("spiral --config " + (dir / "run.cfg").string()) == 0);
    CHECK(fs::exists(dir / "from_file" / "report.csv"));
    CHECK(fs::exists(dir / "from_file" / "cube_b012.pgm"));

    // the flag wins over the file
    REQUIRE(run_cli("spiral --config " + (dir / "run.cfg").string() + " --output-dir " +
                    (dir / "from_flag").string() + " --batch-sizes 9") == 0);
    CHECK(fs::exists(dir / "from_flag" / "cube_b009.pgm"));
    CHECK_FALSE(fs::exists(dir / "from_flag" / "cube_b012.pgm"));

    // malformed config file is a config error
    {
        std::ofstream bad(dir / "bad.cfg");
        bad << "eval-count=notanumber\n";
    }
    CHECK(run_cli("spiral --config " + (dir / "bad.cfg").string()) == 2);
}

TEST_CASE("a held lock blocks a second run") {
    const auto dir = work_dir();
    const auto out = dir / "locked_out";
    fs::create_directories(out);
    std::ofstream(out / ".lock") << "";
    const int code = run_cli("spiral --batch-sizes 10 --eval-count 50 --output-dir " +
                             out.string());
    CHECK(code == 3);
}

TEST_CASE("predict with the cache persists and replays") {
    const auto dir = work_dir();
    Eigen::MatrixXd points(8, 2), values(8, 1);
    for (int i = 0; i < 8; ++i) {
        const double t = (i + 0.5) / 8.0;
        points.row(i) << std::cos(2 * std::numbers::pi * t), std::sin(2 * std::numbers::pi * t);
        values(i, 0) = t;
    }
    write_mxf(dir / "points.mxf", points);
    write_mxf(dir / "values.mxf", values);
    Eigen::MatrixXd queries(2, 2);
    queries << 0.2, 0.3, -0.5, 0.1;
    write_mxf(dir / "queries.mxf", queries);
    const std::string model = (dir / "model.mfxm").string();

    REQUIRE(run_cli("fit --points " + (dir / "points.mxf").string() + " --values " +
                    (dir / "values.mxf").string() + " --out " + model) == 0);
    REQUIRE(run_cli("predict --model " + model + " --queries " +
                    (dir / "queries.mxf").string() + " --out " + (dir / "p1.mxf").string() +
                    " --cache") == 0);
    EvaluationCache cache;
    load_model(model, &cache);
    CHECK(cache.size() == 2);
    REQUIRE(run_cli("predict --model " + model + " --queries " +
                    (dir / "queries.mxf").string() + " --out " + (dir / "p2.mxf").string() +
                    " --cache") == 0);
    CHECK(read_mxf(dir / "p1.mxf") == read_mxf(dir / "p2.mxf"));

    // update then predict again: still finite, model grows
    Eigen::MatrixXd more_points(2, 2), more_values(2, 1);
    more_points << 0.9, 0.1, -0.9, -0.1;
    more_values << 0.11, 0.61;
    write_mxf(dir / "more_points.mxf", more_points);
    write_mxf(dir / "more_values.mxf", more_values);
    REQUIRE(run_cli("update --model " + model + " --points " +
                    (dir / "more_points.mxf").string() + " --values " +
                    (dir / "more_values.mxf").string()) == 0);
    const ExtenderModel updated = load_model(model);
    CHECK(updated.sample_count() == 10);
}
