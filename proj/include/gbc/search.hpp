#pragma once

#include <algorithm>
#include <optional>
#include <span>
#include <vector>

#include "gbc/bicluster.hpp"
#include "gbc/common.hpp"
#include "gbc/scoring.hpp"
#include "gbc/trend.hpp"

namespace gbc {

/**
 * Parameters of the greedy maximum-same-trend chain search. The sweep
 * enumerates one chain per (start column) x (L0 value) x (MST rank) tuple.
 */
struct SearchConfig {
    int min_gene = 15;
    int min_cond = 10;
    int L0 = 30;
    int mst_rank = 1;                 // chains run for every rank 1..mst_rank
    std::vector<int> start_columns;   // empty = all columns
    std::vector<int> L0_sweep;        // empty = just {L0}
    bool overlap_filter = false;      // optional Jaccard-overlap suppression
    double overlap_jaccard = 0.9;
    int threads = 0;

    void validate() const {
        if (min_gene < 1) throw InputError("search: min_gene must be at least 1");
        if (min_cond < 2) throw InputError("search: min_cond must be at least 2");
        if (L0 < 1) throw InputError("search: L0 must be at least 1");
        if (mst_rank < 1) throw InputError("search: mst_rank must be at least 1");
    }
};

/// Adaptive lookahead: the unit-pulse form of Eq. 19 collapses to the number
/// of remaining columns capped by L0. `current` is 0-based.
inline int adaptive_L(int L0, int current, int m) {
    const int remaining = m - 1 - current;
    return std::min(L0, std::max(remaining, 0));
}

struct StepResult {
    int column = -1;
    int direction = 0;               // +1 rising, -1 falling
    std::vector<int> survivors;      // active rows matching direction or 0
};

/**
 * Scores every candidate column in (current, current+L] against the current
 * column: up(m) counts active rows trending up or flat, down(m) down or flat
 * (a 0 entry stands for both trends). A column's MST score is max(up, down);
 * candidates whose surviving row set would fall below min_rows are dropped.
 * Returns the rank-th best by score (ties to the smaller column, then to the
 * rising direction), or nullopt when the window is exhausted.
 */
inline std::optional<StepResult> next_condition(const TrendMatrix& trend, std::span<const int> active,
                                                int current, int lookahead, int rank, int min_rows) {
    if (active.empty()) return std::nullopt;
    const int m = trend.conditions();
    const int last = std::min(current + lookahead, m - 1);

    struct Candidate {
        int column;
        int direction;
        int score;
    };
    std::vector<Candidate> candidates;
    for (int cand = current + 1; cand <= last; ++cand) {
        int up = 0, down = 0;
        for (int row : active) {
            const int sign = trend.entry(row, cand, current);
            if (sign >= 0) ++up;
            if (sign <= 0) ++down;
        }
        const int direction = up >= down ? 1 : -1;
        const int score = std::max(up, down);
        if (score < min_rows) continue;
        candidates.push_back({cand, direction, score});
    }
    if (static_cast<int>(candidates.size()) < rank) return std::nullopt;

    std::nth_element(candidates.begin(), candidates.begin() + (rank - 1), candidates.end(),
                     [](const Candidate& a, const Candidate& b) {
                         if (a.score != b.score) return a.score > b.score;
                         return a.column < b.column;
                     });
    const Candidate chosen = candidates[static_cast<std::size_t>(rank - 1)];

    StepResult out;
    out.column = chosen.column;
    out.direction = chosen.direction;
    out.survivors.reserve(active.size());
    for (int row : active) {
        const int sign = trend.entry(row, chosen.column, current);
        if (sign == 0 || sign == chosen.direction) out.survivors.push_back(row);
    }
    return out;
}

namespace detail {

inline std::optional<Bicluster> run_chain(const TrendMatrix& trend, int start, int L0, int rank,
                                          const SearchConfig& cfg) {
    std::vector<int> active(static_cast<std::size_t>(trend.genes()));
    for (int i = 0; i < trend.genes(); ++i) active[static_cast<std::size_t>(i)] = i;

    Bicluster bc;
    bc.cols.push_back(start);
    bc.provenance = {"", start, L0, rank, 0};

    int current = start;
    for (;;) {
        const int lookahead = adaptive_L(L0, current, trend.conditions());
        if (lookahead == 0) break;
        const auto step = next_condition(trend, active, current, lookahead, rank, cfg.min_gene);
        if (!step) break;
        if (bc.provenance.direction == 0) bc.provenance.direction = step->direction;
        bc.cols.push_back(step->column);
        active = step->survivors;
        current = step->column;
    }
    if (static_cast<int>(bc.cols.size()) < cfg.min_cond) return std::nullopt;
    if (static_cast<int>(active.size()) < cfg.min_gene) return std::nullopt;
    bc.rows = std::move(active);
    return bc;
}

}  // namespace detail

/**
 * Mines initial biclusters: one greedy chain per sweep tuple, duplicates
 * (identical row and column sets) suppressed keeping the first occurrence in
 * sweep order. Results are in sweep order; use the scored overload for the
 * MFD-sorted list.
 */
inline std::vector<Bicluster> mine_initial(const TrendMatrix& trend, const SearchConfig& cfg) {
    cfg.validate();
    std::vector<int> starts = cfg.start_columns;
    if (starts.empty()) {
        starts.resize(static_cast<std::size_t>(trend.conditions()));
        for (int c = 0; c < trend.conditions(); ++c) starts[static_cast<std::size_t>(c)] = c;
    } else {
        for (int c : starts)
            if (c < 0 || c >= trend.conditions()) throw InputError("search: start column out of range");
    }
    std::vector<int> l0s = cfg.L0_sweep.empty() ? std::vector<int>{cfg.L0} : cfg.L0_sweep;
    for (int l : l0s)
        if (l < 1) throw InputError("search: L0 values must be positive");

    struct Tuple {
        int start, L0, rank;
    };
    std::vector<Tuple> sweep;
    for (int start : starts)
        for (int l : l0s)
            for (int rank = 1; rank <= cfg.mst_rank; ++rank) sweep.push_back({start, l, rank});

    std::vector<std::optional<Bicluster>> slots(sweep.size());
    parallel_for(static_cast<int>(sweep.size()), cfg.threads, [&](int i) {
        const Tuple& t = sweep[static_cast<std::size_t>(i)];
        slots[static_cast<std::size_t>(i)] = detail::run_chain(trend, t.start, t.L0, t.rank, cfg);
    });

    std::vector<Bicluster> out;
    for (auto& slot : slots) {
        if (!slot) continue;
        const bool duplicate =
            std::any_of(out.begin(), out.end(), [&](const Bicluster& b) { return b.same_extent(*slot); });
        if (!duplicate) out.push_back(std::move(*slot));
    }
    return out;
}

/// Scored variant: computes MSR/MFD for every mined bicluster and returns
/// the list sorted by MFD ascending (ties by extent for determinism).
inline std::vector<Bicluster> mine_initial(const TrendMatrix& trend, const SearchConfig& cfg,
                                           const ExpressionMatrix& matrix, const SlopeAngleMatrix& angles) {
    std::vector<Bicluster> out = mine_initial(trend, cfg);
    parallel_for(static_cast<int>(out.size()), cfg.threads,
                 [&](int i) { score_bicluster(matrix, angles, out[static_cast<std::size_t>(i)]); });
    std::stable_sort(out.begin(), out.end(), [](const Bicluster& a, const Bicluster& b) {
        if (a.mfd != b.mfd) return a.mfd < b.mfd;
        if (a.rows != b.rows) return a.rows < b.rows;
        return a.cols < b.cols;
    });
    if (cfg.overlap_filter) {
        std::vector<Bicluster> kept;
        for (auto& bc : out) {
            const bool redundant = std::any_of(kept.begin(), kept.end(), [&](const Bicluster& k) {
                return cell_jaccard(k, bc) > cfg.overlap_jaccard;
            });
            if (!redundant) kept.push_back(std::move(bc));
        }
        out = std::move(kept);
    }
    return out;
}

}  // namespace gbc
