#pragma once

#include <algorithm>
#include <cmath>
#include <random>
#include <span>
#include <vector>

#include "gbc/granules.hpp"
#include "gbc/matrix.hpp"

namespace gbc {

struct FcmConfig {
    double kappa = 2.0;     // fuzziness coefficient, > 1
    double tol = 1e-9;      // stop when max prototype change drops below this
    int max_iters = 500;
    int restarts = 0;       // extra seeded random initializations (0 = deterministic quantile init only)
    std::uint64_t seed = 0; // used when restarts > 0
};

/**
 * Converged fuzzy c-means state for a single 1-D gene series: memberships
 * mu[j*M + t], prototype values, and the objective value after each
 * alternating-optimization iteration.
 */
struct FcmState {
    int clusters = 0;  // C
    int points = 0;    // M
    double kappa = 2.0;
    std::vector<double> prototypes;       // length C, cluster order as fitted
    std::vector<double> partition;        // C x M row-major memberships
    std::vector<double> objective_trace;  // one entry per iteration
    double max_column_sum_error = 0.0;    // worst |sum_j mu_jt - 1| seen across all iterations
    int iterations = 0;

    double membership(int j, int t) const { return partition[static_cast<std::size_t>(j) * points + t]; }
};

namespace detail {

// Linear-interpolation quantile over an ascending vector, q in [0, 1].
inline double quantile(const std::vector<double>& sorted, double q) {
    const std::size_t n = sorted.size();
    if (n == 1) return sorted[0];
    const double pos = q * static_cast<double>(n - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min(lo + 1, n - 1);
    const double frac = pos - static_cast<double>(lo);
    return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

inline void fcm_update_memberships(std::span<const double> row, const std::vector<double>& protos,
                                   double kappa, std::vector<double>& mu) {
    const int c = static_cast<int>(protos.size());
    const int m = static_cast<int>(row.size());
    const double expo = 2.0 / (kappa - 1.0);
    std::vector<double> dist(static_cast<std::size_t>(c));
    for (int t = 0; t < m; ++t) {
        int zero_count = 0;
        for (int j = 0; j < c; ++j) {
            dist[j] = std::abs(row[t] - protos[j]);
            if (dist[j] == 0.0) ++zero_count;
        }
        if (zero_count > 0) {
            // Coincident prototype(s): unit membership split across them.
            for (int j = 0; j < c; ++j)
                mu[static_cast<std::size_t>(j) * m + t] = dist[j] == 0.0 ? 1.0 / zero_count : 0.0;
            continue;
        }
        for (int j = 0; j < c; ++j) {
            double denom = 0.0;
            for (int l = 0; l < c; ++l) denom += std::pow(dist[j] / dist[l], expo);
            mu[static_cast<std::size_t>(j) * m + t] = 1.0 / denom;
        }
    }
}

// Prototype update V = Q U^kappa g with Q the per-cluster normalization
// diagonal 1 / sum_t mu_jt^kappa.
inline void fcm_update_prototypes(std::span<const double> row, const std::vector<double>& mu,
                                  double kappa, std::vector<double>& protos) {
    const int c = static_cast<int>(protos.size());
    const int m = static_cast<int>(row.size());
    for (int j = 0; j < c; ++j) {
        double num = 0.0, den = 0.0;
        for (int t = 0; t < m; ++t) {
            const double w = std::pow(mu[static_cast<std::size_t>(j) * m + t], kappa);
            num += w * row[t];
            den += w;
        }
        if (den > 0.0) protos[j] = num / den;
    }
}

inline double fcm_objective(std::span<const double> row, const std::vector<double>& mu,
                            const std::vector<double>& protos, double kappa) {
    const int c = static_cast<int>(protos.size());
    const int m = static_cast<int>(row.size());
    double obj = 0.0;
    for (int j = 0; j < c; ++j) {
        for (int t = 0; t < m; ++t) {
            const double d = row[t] - protos[j];
            obj += std::pow(mu[static_cast<std::size_t>(j) * m + t], kappa) * d * d;
        }
    }
    return obj;
}

inline FcmState fcm_run(std::span<const double> row, std::vector<double> init_protos, const FcmConfig& cfg) {
    const int c = static_cast<int>(init_protos.size());
    const int m = static_cast<int>(row.size());
    FcmState st;
    st.clusters = c;
    st.points = m;
    st.kappa = cfg.kappa;
    st.prototypes = std::move(init_protos);
    st.partition.assign(static_cast<std::size_t>(c) * m, 0.0);

    for (int it = 0; it < cfg.max_iters; ++it) {
        fcm_update_memberships(row, st.prototypes, cfg.kappa, st.partition);
        for (int t = 0; t < m; ++t) {
            double col = 0.0;
            for (int j = 0; j < c; ++j) col += st.membership(j, t);
            st.max_column_sum_error = std::max(st.max_column_sum_error, std::abs(col - 1.0));
        }
        const std::vector<double> prev = st.prototypes;
        fcm_update_prototypes(row, st.partition, cfg.kappa, st.prototypes);
        st.objective_trace.push_back(fcm_objective(row, st.partition, st.prototypes, cfg.kappa));
        st.iterations = it + 1;

        double delta = 0.0;
        for (int j = 0; j < c; ++j) delta = std::max(delta, std::abs(st.prototypes[j] - prev[j]));
        if (delta < cfg.tol) break;
    }
    return st;
}

}  // namespace detail

/// Number of granules for the FCM path: C = ceil(0.5 * distinct count).
inline int granule_count(const SortedDistinctSeries& series) {
    const int t = series.distinct_count();
    if (t < 3) throw InternalError("granule_count: degenerate series should be handled upstream");
    return (t + 1) / 2;
}

/**
 * Fits 1-D fuzzy c-means to one gene row by alternating optimization.
 *
 * Initialization is deterministic: prototype j starts at the (j-0.5)/C
 * quantile of the row's distinct values. When cfg.restarts > 0, that run
 * competes against seeded random initializations (C distinct values sampled
 * without replacement) and the lowest final objective wins.
 */
inline FcmState fcm_fit(std::span<const double> row, int clusters, const FcmConfig& cfg = {}) {
    if (clusters < 1) throw InputError("fcm_fit: cluster count must be positive");
    if (cfg.kappa <= 1.0) throw InputError("fcm_fit: fuzziness coefficient must exceed 1");
    std::vector<double> distinct(row.begin(), row.end());
    std::sort(distinct.begin(), distinct.end());
    distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
    if (static_cast<std::size_t>(clusters) > distinct.size())
        throw InputError("fcm_fit: cluster count exceeds number of distinct values");

    std::vector<double> init(static_cast<std::size_t>(clusters));
    for (int j = 0; j < clusters; ++j)
        init[j] = detail::quantile(distinct, (j + 0.5) / clusters);
    FcmState best = detail::fcm_run(row, std::move(init), cfg);

    if (cfg.restarts > 0 && static_cast<std::size_t>(clusters) <= distinct.size()) {
        std::mt19937_64 rng(cfg.seed);
        for (int r = 0; r < cfg.restarts; ++r) {
            std::vector<double> pool = distinct;
            std::vector<double> start;
            start.reserve(static_cast<std::size_t>(clusters));
            for (int j = 0; j < clusters; ++j) {
                std::uniform_int_distribution<std::size_t> pick(0, pool.size() - 1);
                const std::size_t k = pick(rng);
                start.push_back(pool[k]);
                pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(k));
            }
            std::sort(start.begin(), start.end());
            FcmState cand = detail::fcm_run(row, std::move(start), cfg);
            if (cand.objective_trace.back() < best.objective_trace.back()) best = std::move(cand);
        }
    }
    return best;
}

/**
 * Sorts the augmented matrix Z = [U V] by ascending prototype value and
 * assigns labels 1..C in that order. Prototype ties keep the original
 * cluster index order (stable sort).
 */
inline GranuleSet build_ordered_granules_fcm(const FcmState& state) {
    std::vector<int> order(static_cast<std::size_t>(state.clusters));
    for (int j = 0; j < state.clusters; ++j) order[j] = j;
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return state.prototypes[a] < state.prototypes[b]; });

    GranuleSet set;
    set.kind = GranuleKind::FcmPrototype;
    set.granules.reserve(order.size());
    for (std::size_t k = 0; k < order.size(); ++k) {
        const int j = order[k];
        Granule g;
        g.label = static_cast<int>(k) + 1;
        g.prototype = state.prototypes[j];
        g.membership.assign(state.partition.begin() + static_cast<std::ptrdiff_t>(j) * state.points,
                            state.partition.begin() + static_cast<std::ptrdiff_t>(j + 1) * state.points);
        set.granules.push_back(std::move(g));
    }
    return set;
}

}  // namespace gbc
