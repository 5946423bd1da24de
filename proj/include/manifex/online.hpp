#pragma once

#include "manifex/extender.hpp"

#include <atomic>
#include <cstdint>
#include <map>
#include <shared_mutex>
#include <vector>

namespace manifex {

/// Per-query state frozen at first evaluation: bandwidth, accumulated
/// normalization and weighted sum. Enough to fold new samples in without
/// touching the old ones.
struct CacheEntry {
    Eigen::VectorXd query_coord;  // n_bar
    double epsilon = 0.0;         // frozen at first evaluation
    double nm = 0.0;              // accumulated sum of kernel weights
    Eigen::VectorXd weighted_sum; // p-vector, accumulated sum of w_i * g_i
    Eigen::Index k_seen = 0;      // model sample count at last sync
    bool exact_hit = false;       // entry pinned to a stored sample value
};

/// Keyed by caller-supplied identifiers (never by coordinate hashing).
/// Single writer, multiple readers; reads of existing entries and first-time
/// insertions are both guarded internally.
class EvaluationCache {
public:
    bool contains(std::uint64_t id) const;
    const CacheEntry& at(std::uint64_t id) const;
    void put(std::uint64_t id, CacheEntry entry);
    std::size_t size() const;
    std::vector<std::uint64_t> ids() const; // ascending

    /// Total Gaussian-kernel evaluations spent on cold evaluations and
    /// updates; cache hits add nothing.
    std::uint64_t kernel_evals() const { return kernel_evals_.load(); }
    void add_kernel_evals(std::uint64_t n) { kernel_evals_.fetch_add(n); }

private:
    mutable std::shared_mutex mutex_;
    std::map<std::uint64_t, CacheEntry> entries_;
    std::atomic<std::uint64_t> kernel_evals_{0};
};

/// First call computes and caches epsilon(x), nm and the weighted sum;
/// later calls replay weighted_sum / nm without touching training data.
Eigen::VectorXd evaluate_cached(const Eigen::VectorXd& query,
                                const ExtenderModel& model,
                                EvaluationCache& cache, std::uint64_t id);

/// Appends new samples to the model (projected with the original basis) and
/// folds their kernel weights into every cached entry at its frozen epsilon.
/// Each cached query costs new_points.size() kernel evaluations, independent
/// of how many samples the model already holds. A new point coinciding with
/// a cached query re-pins that entry to the stored value.
void update(ExtenderModel& model, EvaluationCache& cache,
            const PointCloud& new_points, const SampleValues& new_values);

} // namespace manifex
