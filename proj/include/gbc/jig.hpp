#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <vector>

#include "gbc/granules.hpp"
#include "gbc/matrix.hpp"
#include "gbc/pso.hpp"

namespace gbc {

/**
 * An interval granule justified on one temporal window: the bounds maximize
 * coverage x specificity around the window median, with specificity
 * f2(u) = exp(-tau * u) decaying in the distance u from the median.
 */
struct JustifiableInterval {
    double alpha = 0.0;   // lower bound
    double beta = 0.0;    // upper bound
    double median = 0.0;
    int coverage_lo = 0;  // card{ alpha <= x < med }
    int coverage_hi = 0;  // card{ med < x <= beta }
    double score_lo = 0.0;
    double score_hi = 0.0;
};

/**
 * Segmentation of the sorted distinct series into P windows. cut_points holds
 * the start index of windows 2..P (strictly increasing values in [1, t-1]);
 * window p spans [cut_{p-1}, cut_p).
 */
struct WindowPartition {
    std::vector<int> cut_points;
    int window_count = 1;
};

/**
 * Maximizes V(beta) = card{med < x <= beta} * exp(-tau*(beta - med)) and the
 * mirrored V(alpha) over the window's data points. The optimum of a
 * count-times-decaying-exponential lies at a data point, so the scan is
 * exact. Ties prefer the tighter bound.
 */
inline JustifiableInterval optimize_interval(std::span<const double> window, double tau) {
    if (window.empty()) throw InputError("optimize_interval: empty window");
    if (tau < 0.0) throw InputError("optimize_interval: tau must be non-negative");
    const std::size_t n = window.size();
    JustifiableInterval out;
    out.median = n % 2 == 1 ? window[n / 2] : (window[n / 2 - 1] + window[n / 2]) / 2.0;
    out.alpha = out.median;
    out.beta = out.median;

    int count = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double x = window[i];
        if (x <= out.median) continue;
        ++count;
        const double v = count * std::exp(-tau * (x - out.median));
        if (v > out.score_hi) {
            out.score_hi = v;
            out.beta = x;
            out.coverage_hi = count;
        }
    }
    count = 0;
    for (std::size_t i = n; i-- > 0;) {
        const double x = window[i];
        if (x >= out.median) continue;
        ++count;
        const double v = count * std::exp(-tau * (out.median - x));
        if (v > out.score_lo) {
            out.score_lo = v;
            out.alpha = x;
            out.coverage_lo = count;
        }
    }
    return out;
}

/// Vol of an interval granule: temporal extent of its window times interval
/// length.
inline double granule_volume(int window_len, const JustifiableInterval& interval) {
    if (window_len < 1) throw InputError("granule_volume: window length must be positive");
    return static_cast<double>(window_len) * (interval.beta - interval.alpha);
}

namespace detail {

inline double window_volume(std::span<const double> values, int begin, int end, double tau) {
    const auto window = values.subspan(static_cast<std::size_t>(begin), static_cast<std::size_t>(end - begin));
    return granule_volume(end - begin, optimize_interval(window, tau));
}

}  // namespace detail

/// Objective of Eq. 13 for a given segmentation: sum of per-window volumes.
inline double partition_volume(const SortedDistinctSeries& series, const WindowPartition& partition, double tau) {
    const int t = series.distinct_count();
    int begin = 0;
    double total = 0.0;
    for (int cut : partition.cut_points) {
        if (cut <= begin || cut >= t) throw InputError("partition_volume: invalid cut point");
        total += detail::window_volume(series.values, begin, cut, tau);
        begin = cut;
    }
    total += detail::window_volume(series.values, begin, t, tau);
    return total;
}

/// Exact minimizer over all C(t-1, P-1) segmentations. Tie-breaks to the
/// lexicographically smallest cut vector.
inline WindowPartition exhaustive_partition(const SortedDistinctSeries& series, int window_count, double tau) {
    const int t = series.distinct_count();
    if (window_count < 1 || window_count > t) throw InputError("exhaustive_partition: invalid window count");
    WindowPartition best;
    best.window_count = window_count;
    if (window_count == 1) return best;

    std::vector<int> cuts(static_cast<std::size_t>(window_count - 1));
    for (int i = 0; i < window_count - 1; ++i) cuts[i] = i + 1;
    double best_vol = std::numeric_limits<double>::infinity();

    for (;;) {
        WindowPartition cand{cuts, window_count};
        const double vol = partition_volume(series, cand, tau);
        if (vol < best_vol) {
            best_vol = vol;
            best = std::move(cand);
        }
        // next combination of cut positions in lexicographic order
        int i = window_count - 2;
        while (i >= 0 && cuts[i] == t - (window_count - 1 - i)) --i;
        if (i < 0) break;
        ++cuts[i];
        for (int k = i + 1; k < window_count - 1; ++k) cuts[k] = cuts[k - 1] + 1;
    }
    return best;
}

namespace detail {

// Rounds continuous PSO positions to strictly increasing integer cuts in
// [1, t-1]; colliding cuts shift to the nearest free index.
inline std::vector<int> decode_cuts(std::span<const double> positions, int t) {
    std::vector<double> tmp(positions.begin(), positions.end());
    std::sort(tmp.begin(), tmp.end());
    std::vector<bool> used(static_cast<std::size_t>(t), false);
    std::vector<int> cuts;
    cuts.reserve(positions.size());
    for (double p : tmp) {
        int c = std::clamp(static_cast<int>(std::llround(p)), 1, t - 1);
        if (used[static_cast<std::size_t>(c)]) {
            int found = -1;
            for (int off = 1; off < t; ++off) {
                if (c + off <= t - 1 && !used[static_cast<std::size_t>(c + off)]) { found = c + off; break; }
                if (c - off >= 1 && !used[static_cast<std::size_t>(c - off)]) { found = c - off; break; }
            }
            if (found < 0) throw InternalError("decode_cuts: no free cut index");
            c = found;
        }
        used[static_cast<std::size_t>(c)] = true;
        cuts.push_back(c);
    }
    std::sort(cuts.begin(), cuts.end());
    return cuts;
}

inline std::vector<double> uniform_cut_seed(int t, int window_count) {
    std::vector<double> seed(static_cast<std::size_t>(window_count - 1));
    for (int k = 1; k < window_count; ++k)
        seed[static_cast<std::size_t>(k - 1)] = static_cast<double>(k) * t / window_count;
    return seed;
}

}  // namespace detail

/**
 * Finds the segmentation minimizing the total granule volume. Small series
 * (t <= exhaustive_max) are solved exactly; larger ones run global-best PSO
 * over continuous cut positions, seeded with the uniform equal-count
 * partition so the result is never worse than that baseline.
 */
inline WindowPartition optimize_partition(const SortedDistinctSeries& series, int window_count, double tau,
                                          const PsoConfig& pso = {}, bool force_pso = false,
                                          int exhaustive_max = 12) {
    const int t = series.distinct_count();
    if (window_count < 1) throw InputError("optimize_partition: window count must be positive");
    if (window_count > t) throw InputError("optimize_partition: window count exceeds distinct value count");

    WindowPartition result;
    result.window_count = window_count;
    if (window_count == 1) return result;
    if (window_count == t) {
        result.cut_points.resize(static_cast<std::size_t>(t - 1));
        for (int i = 1; i < t; ++i) result.cut_points[static_cast<std::size_t>(i - 1)] = i;
        return result;
    }
    if (!force_pso && t <= exhaustive_max) return exhaustive_partition(series, window_count, tau);

    const int dim = window_count - 1;
    const std::vector<double> lo(static_cast<std::size_t>(dim), 1.0);
    const std::vector<double> hi(static_cast<std::size_t>(dim), static_cast<double>(t - 1));
    auto objective = [&](std::span<const double> x) {
        WindowPartition cand{detail::decode_cuts(x, t), window_count};
        return partition_volume(series, cand, tau);
    };

    // Each restart is an independent swarm seeded with the uniform-partition
    // particle; the best decoded segmentation across restarts wins.
    const int runs = std::max(1, pso.restarts);
    double best_vol = std::numeric_limits<double>::infinity();
    for (int r = 0; r < runs; ++r) {
        PsoConfig swarm = pso;
        swarm.seed = runs == 1 ? pso.seed : derive_seed(pso.seed, stage_tag("pso-restart"), static_cast<std::uint64_t>(r));
        const PsoResult best = pso_minimize(dim, lo, hi, 0.5 * t, objective, swarm,
                                            {detail::uniform_cut_seed(t, window_count)});
        std::vector<int> cuts = detail::decode_cuts(best.position, t);
        const double vol = partition_volume(series, {cuts, window_count}, tau);
        if (vol < best_vol) {
            best_vol = vol;
            result.cut_points = std::move(cuts);
        }
    }
    return result;
}

/**
 * Builds the P contiguous interval granules of Eq.-14 form. The segmentation
 * value between adjacent windows is the midpoint of the last value of one and
 * the first value of the next, so the intervals tile [min, max] exactly.
 */
inline GranuleSet build_interval_granules(const SortedDistinctSeries& series, const WindowPartition& partition) {
    const int t = series.distinct_count();
    if (partition.window_count != static_cast<int>(partition.cut_points.size()) + 1)
        throw InputError("build_interval_granules: window count does not match cut points");
    GranuleSet set;
    set.kind = GranuleKind::Interval;

    double lower = series.values.front();
    int prev_cut = 0;
    for (std::size_t k = 0; k < partition.cut_points.size(); ++k) {
        const int cut = partition.cut_points[k];
        if (cut <= prev_cut || cut >= t) throw InputError("build_interval_granules: invalid cut point");
        const double seg = (series.values[static_cast<std::size_t>(cut - 1)] +
                            series.values[static_cast<std::size_t>(cut)]) / 2.0;
        set.granules.push_back({static_cast<int>(k) + 1, lower, seg, 0.0, {}});
        lower = seg;
        prev_cut = cut;
    }
    set.granules.push_back({partition.window_count, lower, series.values.back(), 0.0, {}});
    return set;
}

/// Window count for the JIG path; mirrors the Eq.-8 rule used by the FCM
/// path so both granulation methods yield comparable label alphabets.
inline int jig_window_count(const SortedDistinctSeries& series, int override_count = 0) {
    const int t = series.distinct_count();
    if (override_count > 0) return std::min(override_count, t);
    return (t + 1) / 2;
}

}  // namespace gbc
