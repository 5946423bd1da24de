#include "manifex/online.hpp"

#include <mutex>
#include <stdexcept>
#include <string>

namespace manifex {

bool EvaluationCache::contains(std::uint64_t id) const {
    std::shared_lock lock(mutex_);
    return entries_.count(id) != 0;
}

const CacheEntry& EvaluationCache::at(std::uint64_t id) const {
    std::shared_lock lock(mutex_);
    auto it = entries_.find(id);
    if (it == entries_.end())
        throw std::invalid_argument("EvaluationCache: unknown query id " + std::to_string(id));
    return it->second;
}

void EvaluationCache::put(std::uint64_t id, CacheEntry entry) {
    std::unique_lock lock(mutex_);
    entries_[id] = std::move(entry);
}

std::size_t EvaluationCache::size() const {
    std::shared_lock lock(mutex_);
    return entries_.size();
}

std::vector<std::uint64_t> EvaluationCache::ids() const {
    std::shared_lock lock(mutex_);
    std::vector<std::uint64_t> out;
    out.reserve(entries_.size());
    for (const auto& [id, entry] : entries_) out.push_back(id);
    return out;
}

namespace {

Eigen::VectorXd entry_value(const CacheEntry& entry) {
    if (entry.exact_hit) return entry.weighted_sum;
    return entry.weighted_sum / entry.nm;
}

} // namespace

Eigen::VectorXd evaluate_cached(const Eigen::VectorXd& query, const ExtenderModel& model,
                                EvaluationCache& cache, std::uint64_t id) {
    if (cache.contains(id)) return entry_value(cache.at(id));

    const Eigen::VectorXd coord = project(query, model.basis);
    const AdaptiveBandwidth bw = adaptive_epsilon(coord, model);
    CacheEntry entry;
    entry.query_coord = coord;
    entry.k_seen = model.sample_count();
    if (bw.exact_hit) {
        entry.exact_hit = true;
        entry.nm = 1.0;
        entry.weighted_sum = model.values.values.row(bw.nearest).transpose();
    } else {
        const WeightSums sums = accumulate_weights(coord, model.train_coords,
                                                   model.values.values, bw.bandwidth);
        entry.epsilon = bw.bandwidth.epsilon;
        entry.nm = sums.nm;
        entry.weighted_sum = sums.weighted;
        cache.add_kernel_evals(static_cast<std::uint64_t>(model.sample_count()));
    }
    Eigen::VectorXd value = entry_value(entry);
    cache.put(id, std::move(entry));
    return value;
}

void update(ExtenderModel& model, EvaluationCache& cache, const PointCloud& new_points,
            const SampleValues& new_values) {
    if (new_points.size() == 0 && new_values.size() == 0) return;
    if (new_points.size() != new_values.size())
        throw std::invalid_argument("update: " + std::to_string(new_points.size()) +
                                    " new points but " + std::to_string(new_values.size()) +
                                    " value rows");
    if (new_points.dim() != model.ambient_dim())
        throw std::invalid_argument("update: new points have dim " +
                                    std::to_string(new_points.dim()) + ", model expects " +
                                    std::to_string(model.ambient_dim()));
    if (new_values.dim() != model.value_dim())
        throw std::invalid_argument("update: new values have dim " +
                                    std::to_string(new_values.dim()) + ", model expects " +
                                    std::to_string(model.value_dim()));
    if ((new_points.points.array().abs() > model.half_width).any())
        throw std::invalid_argument("update: new points fall outside the hypercube [-" +
                                    std::to_string(model.half_width) + ", " +
                                    std::to_string(model.half_width) + "]^n");

    // New samples are projected with the original basis; the basis is never
    // recomputed here (a full refit is the path to refresh it).
    const Eigen::MatrixXd new_coords = project_rows(new_points.points, model.basis);
    const Eigen::Index k_old = model.sample_count();
    const Eigen::Index m_new = new_points.size();

    model.train_points.points.conservativeResize(k_old + m_new, Eigen::NoChange);
    model.train_points.points.bottomRows(m_new) = new_points.points;
    model.train_coords.conservativeResize(k_old + m_new, Eigen::NoChange);
    model.train_coords.bottomRows(m_new) = new_coords;
    model.values.values.conservativeResize(k_old + m_new, Eigen::NoChange);
    model.values.values.bottomRows(m_new) = new_values.values;

    for (std::uint64_t id : cache.ids()) {
        CacheEntry entry = cache.at(id);
        const double coincident_sq =
            (new_coords.rowwise() - entry.query_coord.transpose())
                .rowwise()
                .squaredNorm()
                .minCoeff();
        if (std::sqrt(coincident_sq) <= kCoincidenceTol || entry.exact_hit) {
            // A training point now sits on this query: re-pin the entry to
            // the stored value (degenerate bandwidth case).
            const AdaptiveBandwidth bw = adaptive_epsilon(entry.query_coord, model);
            entry.exact_hit = true;
            entry.epsilon = 0.0;
            entry.nm = 1.0;
            entry.weighted_sum = model.values.values.row(bw.nearest).transpose();
        } else {
            const WeightSums sums = accumulate_weights(
                entry.query_coord, new_coords, new_values.values, {entry.epsilon});
            entry.nm += sums.nm;
            entry.weighted_sum += sums.weighted;
            cache.add_kernel_evals(static_cast<std::uint64_t>(m_new));
        }
        entry.k_seen = k_old + m_new;
        cache.put(id, std::move(entry));
    }
}

} // namespace manifex
