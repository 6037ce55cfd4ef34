#pragma once

#include <optional>
#include <span>
#include <vector>

#include "gbc/matrix.hpp"

namespace gbc {

enum class GranuleKind { Interval, FcmPrototype };

/**
 * One ordered information granule. Interval granules carry [lower, upper]
 * bounds; prototype granules carry the cluster center plus its membership
 * vector over the M conditions.
 */
struct Granule {
    int label = 0;                   // 1-based, ascending with value
    double lower = 0.0;              // interval kind
    double upper = 0.0;              // interval kind
    double prototype = 0.0;          // fcm kind
    std::vector<double> membership;  // fcm kind, length M
};

/**
 * The ordered granules of one gene row. Interval granules tile the row's
 * value range contiguously: granule k's upper bound equals granule k+1's
 * lower bound.
 */
struct GranuleSet {
    GranuleKind kind = GranuleKind::Interval;
    std::vector<Granule> granules;  // sorted by label = 1..K

    int count() const { return static_cast<int>(granules.size()); }
};

/// Handles rows whose sorted distinct series has one or two values: a single
/// point granule, or two granules split at (max+min)/2. Returns nullopt when
/// a full granulation method is required.
inline std::optional<GranuleSet> degenerate_granules(const SortedDistinctSeries& series) {
    const int t = series.distinct_count();
    if (t < 1) throw InternalError("degenerate_granules: empty series");
    if (t > 2) return std::nullopt;

    GranuleSet set;
    set.kind = GranuleKind::Interval;
    if (t == 1) {
        const double g = series.values[0];
        set.granules.push_back({1, g, g, 0.0, {}});
    } else {
        const double lo = series.values[0];
        const double hi = series.values[1];
        const double mid = (hi + lo) / 2.0;
        set.granules.push_back({1, lo, mid, 0.0, {}});
        set.granules.push_back({2, mid, hi, 0.0, {}});
    }
    return set;
}

/**
 * Maps each condition of a row to the label of its granule.
 *
 * Interval kind: a value belongs to the interval containing it; a value equal
 * to a shared bound is assigned the lower label. Prototype kind: a condition
 * takes the label of the granule with maximum membership, ties to the lower
 * label.
 */
inline std::vector<int> label_series(std::span<const double> row, const GranuleSet& set) {
    if (set.granules.empty()) throw InternalError("label_series: empty granule set");
    std::vector<int> labels(row.size(), 0);

    if (set.kind == GranuleKind::Interval) {
        for (std::size_t t = 0; t < row.size(); ++t) {
            const double v = row[t];
            int label = 0;
            for (const auto& g : set.granules) {
                if (v >= g.lower && v <= g.upper) {
                    label = g.label;
                    break;  // first match owns shared bounds -> lower label
                }
            }
            if (label == 0) throw InternalError("label_series: value outside all interval granules");
            labels[t] = label;
        }
    } else {
        for (std::size_t t = 0; t < row.size(); ++t) {
            int best = 0;
            double best_mu = -1.0;
            for (const auto& g : set.granules) {
                if (t >= g.membership.size()) throw InternalError("label_series: membership vector too short");
                if (g.membership[t] > best_mu) {
                    best_mu = g.membership[t];
                    best = g.label;
                }
            }
            labels[t] = best;
        }
    }
    return labels;
}

}  // namespace gbc
