#include "manifex/extender.hpp"

#include "manifex/errors.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace manifex {

double gaussian_kernel(double sq_dist, Bandwidth epsilon) {
    return std::exp(-sq_dist / (epsilon.epsilon * epsilon.epsilon));
}

AdaptiveBandwidth adaptive_epsilon(const Eigen::VectorXd& query_coord,
                                   const ExtenderModel& model) {
    if (model.sample_count() == 0)
        throw std::invalid_argument("adaptive_epsilon: model holds no samples");
    if (query_coord.size() != model.target_dim())
        throw std::invalid_argument("adaptive_epsilon: coordinate has dim " +
                                    std::to_string(query_coord.size()) + ", model expects " +
                                    std::to_string(model.target_dim()));
    Eigen::Index nearest = 0;
    const double min_sq = (model.train_coords.rowwise() - query_coord.transpose())
                              .rowwise()
                              .squaredNorm()
                              .minCoeff(&nearest);
    const double dist = std::sqrt(min_sq);

    AdaptiveBandwidth out;
    out.nearest = nearest;
    out.nearest_distance = dist;
    if (dist <= kCoincidenceTol) {
        out.exact_hit = true;
        return out;
    }
    out.bandwidth.epsilon = -dist / std::log(model.delta);
    return out;
}

WeightSums accumulate_weights(const Eigen::VectorXd& query_coord,
                              const Eigen::MatrixXd& coords,
                              const Eigen::MatrixXd& values, Bandwidth epsilon) {
    const double inv_eps_sq = 1.0 / (epsilon.epsilon * epsilon.epsilon);
    Eigen::VectorXd exponents =
        (coords.rowwise() - query_coord.transpose()).rowwise().squaredNorm() * (-inv_eps_sq);
    // Shift by the largest exponent before exponentiating, then scale back:
    // identical sums, no underflow when every distance is large next to eps.
    const double shift = exponents.maxCoeff();
    const Eigen::VectorXd w = (exponents.array() - shift).exp();
    const double scale = std::exp(shift);
    WeightSums sums;
    sums.nm = scale * w.sum();
    sums.weighted = scale * (values.transpose() * w);
    return sums;
}

namespace {

Extension stored_value(const ExtenderModel& model, Eigen::Index index) {
    Extension out;
    out.value = model.values.values.row(index).transpose();
    out.exact_hit = true;
    return out;
}

void check_query(const Eigen::VectorXd& query, const ExtenderModel& model,
                 const char* where) {
    if (model.sample_count() == 0)
        throw std::invalid_argument(std::string(where) + ": model holds no samples");
    if (query.size() != model.ambient_dim())
        throw std::invalid_argument(std::string(where) + ": query has dim " +
                                    std::to_string(query.size()) + ", model expects " +
                                    std::to_string(model.ambient_dim()));
}

} // namespace

Extension extend(const Eigen::VectorXd& query, const ExtenderModel& model) {
    check_query(query, model, "extend");
    const Eigen::VectorXd coord = project(query, model.basis);
    const AdaptiveBandwidth bw = adaptive_epsilon(coord, model);
    if (bw.exact_hit) return stored_value(model, bw.nearest);

    WeightSums sums =
        accumulate_weights(coord, model.train_coords, model.values.values, bw.bandwidth);
    Extension out;
    out.value = sums.weighted / sums.nm;
    out.epsilon = bw.bandwidth.epsilon;
    out.nm = sums.nm;
    return out;
}

Extension extend_fixed(const Eigen::VectorXd& query, const ExtenderModel& model,
                       Bandwidth epsilon) {
    check_query(query, model, "extend_fixed");
    if (!(epsilon.epsilon > 0.0) || !std::isfinite(epsilon.epsilon))
        throw std::invalid_argument("extend_fixed: bandwidth must be positive and finite");
    const Eigen::VectorXd coord = project(query, model.basis);
    WeightSums sums =
        accumulate_weights(coord, model.train_coords, model.values.values, epsilon);
    Extension out;
    out.value = sums.weighted / sums.nm;
    out.epsilon = epsilon.epsilon;
    out.nm = sums.nm;
    return out;
}

Eigen::MatrixXd extend_batch(const PointCloud& queries, const ExtenderModel& model) {
    if (model.sample_count() == 0)
        throw std::invalid_argument("extend_batch: model holds no samples");
    if (queries.size() > 0 && queries.dim() != model.ambient_dim())
        throw std::invalid_argument("extend_batch: queries have dim " +
                                    std::to_string(queries.dim()) + ", model expects " +
                                    std::to_string(model.ambient_dim()));
    Eigen::MatrixXd out(queries.size(), model.value_dim());
#pragma omp parallel for schedule(static)
    for (Eigen::Index i = 0; i < queries.size(); ++i)
        out.row(i) = extend(queries.points.row(i).transpose(), model).value.transpose();
    return out;
}

ExtenderModel fit(const PointCloud& X, const SampleValues& values, Eigen::Index n_bar,
                  Eigen::Index m, double half_width, double delta, std::uint64_t seed) {
    if (X.size() == 0)
        throw std::invalid_argument("fit: sample set is empty");
    if (values.size() != X.size())
        throw std::invalid_argument("fit: " + std::to_string(X.size()) + " points but " +
                                    std::to_string(values.size()) + " value rows");
    if (!(delta > 0.0 && delta < 1.0))
        throw std::invalid_argument(
            "fit: stabilizer delta = " + std::to_string(delta) +
            " is outside (0,1); the adaptive bandwidth -dist/log(delta) needs "
            "log(delta) finite and negative");
    if (n_bar < 1 || n_bar > X.dim())
        throw std::invalid_argument("fit: target dimension " + std::to_string(n_bar) +
                                    " must lie in [1, " + std::to_string(X.dim()) + "]");
    if (!(half_width > 0.0))
        throw std::invalid_argument("fit: hypercube half-width must be positive");
    if ((X.points.array().abs() > half_width).any())
        throw std::invalid_argument("fit: samples fall outside the hypercube [-" +
                                    std::to_string(half_width) + ", " +
                                    std::to_string(half_width) + "]^n");

    ExtenderModel model;
    model.train_points = X;
    model.values = values;
    model.delta = delta;
    model.half_width = half_width;
    const ReferenceSet Z = draw_reference(m, X.dim(), half_width, seed);
    model.basis = svd_basis(build_a1(X, Z), n_bar);
    model.train_coords = project_rows(X.points, model.basis);
    return model;
}

} // namespace manifex
