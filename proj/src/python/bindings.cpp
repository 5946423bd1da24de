#include "manifex/analysis.hpp"
#include "manifex/experiments.hpp"
#include "manifex/extender.hpp"
#include "manifex/io.hpp"
#include "manifex/online.hpp"
#include "manifex/tomo.hpp"

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <cstdint>
#include <memory>
#include <string>

namespace py = pybind11;
using namespace manifex;

PYBIND11_MODULE(_core, m) {
    m.doc() = "function extension on sampled manifolds: normalized Gaussian-kernel "
              "estimator with SVD projection, online updates, and a sparse-view CT "
              "pipeline";

    py::class_<ProjectionBasis>(m, "ProjectionBasis")
        .def_readonly("right_vectors", &ProjectionBasis::right_vectors)
        .def_readonly("singular_values", &ProjectionBasis::singular_values)
        .def_property_readonly("ambient_dim", &ProjectionBasis::ambient_dim)
        .def_property_readonly("target_dim", &ProjectionBasis::target_dim);

    py::class_<ExtenderModel>(m, "ExtenderModel")
        .def_property_readonly("sample_count", &ExtenderModel::sample_count)
        .def_property_readonly("ambient_dim", &ExtenderModel::ambient_dim)
        .def_property_readonly("target_dim", &ExtenderModel::target_dim)
        .def_property_readonly("value_dim", &ExtenderModel::value_dim)
        .def_readonly("delta", &ExtenderModel::delta)
        .def_readonly("half_width", &ExtenderModel::half_width)
        .def_readonly("basis", &ExtenderModel::basis)
        .def_property_readonly(
            "train_points",
            [](const ExtenderModel& model) { return model.train_points.points; })
        .def_readonly("train_coords", &ExtenderModel::train_coords)
        .def_property_readonly(
            "values", [](const ExtenderModel& model) { return model.values.values; });

    py::class_<EvaluationCache, std::shared_ptr<EvaluationCache>>(m, "EvaluationCache")
        .def(py::init<>())
        .def("__len__", &EvaluationCache::size)
        .def("ids", &EvaluationCache::ids)
        .def_property_readonly("kernel_evals", &EvaluationCache::kernel_evals);

    m.def(
        "fit",
        [](const Eigen::MatrixXd& points, const Eigen::MatrixXd& values, Eigen::Index n_bar,
           Eigen::Index m_reference, double half_width, double delta, std::uint64_t seed) {
            return fit(PointCloud{points}, SampleValues{values}, n_bar, m_reference,
                       half_width, delta, seed);
        },
        py::arg("points"), py::arg("values"), py::arg("n_bar") = 2,
        py::arg("m_reference") = 50, py::arg("half_width") = 1.0, py::arg("delta") = 0.1,
        py::arg("seed") = 7,
        "Fit an extender model: one row per training point / value vector.");

    m.def(
        "extend",
        [](const Eigen::VectorXd& query, const ExtenderModel& model) {
            const Extension e = extend(query, model);
            return py::make_tuple(e.value, e.epsilon, e.nm, e.exact_hit);
        },
        py::arg("query"), py::arg("model"),
        "Evaluate at one ambient point; returns (value, epsilon, nm, exact_hit).");

    m.def(
        "extend_batch",
        [](const Eigen::MatrixXd& queries, const ExtenderModel& model) {
            return extend_batch(PointCloud{queries}, model);
        },
        py::arg("queries"), py::arg("model"));

    m.def(
        "evaluate_cached",
        [](const Eigen::VectorXd& query, const ExtenderModel& model, EvaluationCache& cache,
           std::uint64_t id) { return evaluate_cached(query, model, cache, id); },
        py::arg("query"), py::arg("model"), py::arg("cache"), py::arg("id"));

    m.def(
        "update",
        [](ExtenderModel& model, EvaluationCache& cache, const Eigen::MatrixXd& new_points,
           const Eigen::MatrixXd& new_values) {
            update(model, cache, PointCloud{new_points}, SampleValues{new_values});
        },
        py::arg("model"), py::arg("cache"), py::arg("new_points"), py::arg("new_values"),
        "Append samples and fold them into every cached query at its frozen bandwidth.");

    m.def(
        "save_model",
        [](const std::filesystem::path& path, const ExtenderModel& model,
           const EvaluationCache* cache) { save_model(path, model, cache); },
        py::arg("path"), py::arg("model"), py::arg("cache") = nullptr);
    m.def(
        "load_model",
        [](const std::filesystem::path& path, EvaluationCache* cache) {
            return load_model(path, cache);
        },
        py::arg("path"), py::arg("cache") = nullptr);

    py::class_<Sinogram>(m, "Sinogram")
        .def(py::init([](const Eigen::MatrixXd& data, const std::vector<double>& angles) {
                 return Sinogram{data, angles};
             }),
             py::arg("data"), py::arg("angles_deg"))
        .def_readonly("data", &Sinogram::data)
        .def_readonly("angles_deg", &Sinogram::angles_deg);

    m.def("shepp_logan",
          [](int d) { return shepp_logan(d).pixels; }, py::arg("d") = 256);
    m.def(
        "add_noise",
        [](const Eigen::MatrixXd& img, double level, std::uint64_t seed) {
            return add_noise(ImageGrid{img}, level, seed).pixels;
        },
        py::arg("image"), py::arg("level"), py::arg("seed"));
    m.def(
        "radon_forward",
        [](const Eigen::MatrixXd& img, const std::vector<double>& angles_deg, int n_bins) {
            return radon_forward(ImageGrid{img}, angles_deg, n_bins);
        },
        py::arg("image"), py::arg("angles_deg"), py::arg("n_bins") = kDefaultDetectorBins);
    m.def(
        "fbp", [](const Sinogram& sino, int d) { return fbp(sino, d).pixels; },
        py::arg("sinogram"), py::arg("d") = 256);
    m.def(
        "embed_angles",
        [](const std::vector<double>& angles_deg, const std::string& mode) {
            AngleEmbeddingMode m_ = AngleEmbeddingMode::HalfCircle;
            if (mode == "scalar") m_ = AngleEmbeddingMode::Scalar;
            else if (mode == "full-wrap") m_ = AngleEmbeddingMode::FullWrap;
            else if (mode != "half-circle")
                throw std::invalid_argument("embed_angles: unknown mode '" + mode + "'");
            return embed_angles(angles_deg, m_).points;
        },
        py::arg("angles_deg"), py::arg("mode") = "half-circle");
    m.def(
        "spline_interpolate_sinogram",
        [](const Sinogram& train, const std::vector<double>& query_angles) {
            return spline_interpolate_sinogram(train, query_angles);
        },
        py::arg("train"), py::arg("query_angles"));
    m.def("frobenius_error", &frobenius_error, py::arg("a"), py::arg("b"));

    py::class_<ErrorReport>(m, "ErrorReport")
        .def_readonly("method", &ErrorReport::method)
        .def_readonly("batch", &ErrorReport::batch)
        .def_readonly("error", &ErrorReport::error)
        .def_readonly("runtime_s", &ErrorReport::runtime_s);

    py::class_<ExperimentConfig>(m, "ExperimentConfig")
        .def(py::init<>())
        .def_readwrite("experiment", &ExperimentConfig::experiment)
        .def_readwrite("batch_sizes", &ExperimentConfig::batch_sizes)
        .def_readwrite("eval_count", &ExperimentConfig::eval_count)
        .def_readwrite("n_bar", &ExperimentConfig::n_bar)
        .def_readwrite("delta", &ExperimentConfig::delta)
        .def_readwrite("m_reference", &ExperimentConfig::m_reference)
        .def_readwrite("half_width", &ExperimentConfig::half_width)
        .def_readwrite("noise_level", &ExperimentConfig::noise_level)
        .def_readwrite("d", &ExperimentConfig::d)
        .def_readwrite("seed", &ExperimentConfig::seed)
        .def_readwrite("output_dir", &ExperimentConfig::output_dir);

    m.def("run_spiral", &run_spiral, py::arg("config"));
    m.def("run_ct", &run_ct, py::arg("config"));

    m.attr("__version__") = "0.1.0";
}
