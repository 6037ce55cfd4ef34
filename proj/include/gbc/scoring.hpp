#pragma once

#include <algorithm>
#include <cassert>
#include <cmath>
#include <numbers>
#include <span>
#include <vector>

#include "gbc/bicluster.hpp"
#include "gbc/matrix.hpp"

namespace gbc {

/**
 * Slope angles Theta = (180/pi) * arctan(pinv(Delta) * Xi): per gene, the
 * adjacent-condition differences Xi normalized by the row's dynamic range
 * over M-1 steps (Delta). Rows with zero range get all-zero angles, the
 * pseudo-inverse convention.
 */
struct SlopeAngleMatrix {
    int n = 0;
    int m = 0;                       // condition count of the source matrix
    std::vector<double> angles;      // n x (m-1), degrees in [-90, 90]
    std::vector<double> row_ranges;  // max - min per gene row

    double at(int gene, int transition) const {
        return angles[static_cast<std::size_t>(gene) * (m - 1) + transition];
    }

    /// Angle of the change from column `from` to column `to` (from < to),
    /// normalized exactly like the adjacent-column angles.
    double pair_angle(const ExpressionMatrix& matrix, int gene, int from, int to) const {
        if (to == from + 1) return at(gene, from);
        const double range = row_ranges[static_cast<std::size_t>(gene)];
        if (range == 0.0) return 0.0;
        const double diff = matrix.at(gene, to) - matrix.at(gene, from);
        return std::atan(diff * (m - 1) / range) * 180.0 / std::numbers::pi;
    }
};

inline SlopeAngleMatrix slope_angles(const ExpressionMatrix& matrix) {
    SlopeAngleMatrix out;
    out.n = matrix.rows();
    out.m = matrix.cols();
    out.angles.assign(static_cast<std::size_t>(out.n) * (out.m - 1), 0.0);
    out.row_ranges.assign(static_cast<std::size_t>(out.n), 0.0);
    for (int i = 0; i < out.n; ++i) {
        const auto row = matrix.row(i);
        const auto [lo, hi] = std::minmax_element(row.begin(), row.end());
        const double range = *hi - *lo;
        out.row_ranges[static_cast<std::size_t>(i)] = range;
        if (range == 0.0) continue;
        const double scale = (out.m - 1) / range;
        for (int j = 1; j < out.m; ++j) {
            out.angles[static_cast<std::size_t>(i) * (out.m - 1) + (j - 1)] =
                std::atan((matrix.at(i, j) - matrix.at(i, j - 1)) * scale) * 180.0 / std::numbers::pi;
        }
    }
    return out;
}

/// Cheng-Church mean squared residue of the sub-matrix (I, J).
inline double msr(const ExpressionMatrix& matrix, std::span<const int> rows, std::span<const int> cols) {
    if (rows.empty() || cols.empty()) throw InputError("msr: empty row or column set");
    const double inv_cols = 1.0 / static_cast<double>(cols.size());
    const double inv_rows = 1.0 / static_cast<double>(rows.size());

    std::vector<double> row_mean(rows.size(), 0.0);
    std::vector<double> col_mean(cols.size(), 0.0);
    double grand = 0.0;
    for (std::size_t a = 0; a < rows.size(); ++a) {
        for (std::size_t b = 0; b < cols.size(); ++b) {
            const double v = matrix.at(rows[a], cols[b]);
            row_mean[a] += v;
            col_mean[b] += v;
            grand += v;
        }
    }
    for (auto& v : row_mean) v *= inv_cols;
    for (auto& v : col_mean) v *= inv_rows;
    grand *= inv_rows * inv_cols;

    double h = 0.0;
    for (std::size_t a = 0; a < rows.size(); ++a) {
        for (std::size_t b = 0; b < cols.size(); ++b) {
            const double r = matrix.at(rows[a], cols[b]) - row_mean[a] - col_mean[b] + grand;
            h += r * r;
        }
    }
    return h * inv_rows * inv_cols;
}

/**
 * Mean fluctuation degree over the transitions between consecutive selected
 * columns: the RMS deviation of each gene's transition angle from the
 * per-transition mean angle of the selected genes. Zero exactly when all
 * selected genes share identical transition-angle vectors.
 */
inline double mfd(const ExpressionMatrix& matrix, const SlopeAngleMatrix& angles,
                  std::span<const int> rows, std::span<const int> cols) {
    if (rows.empty()) throw InputError("mfd: empty row set");
    if (cols.size() < 2) throw InputError("mfd: need at least two columns");
    const std::size_t transitions = cols.size() - 1;

    double sum_sq = 0.0;
    std::vector<double> theta(rows.size());
    for (std::size_t p = 0; p < transitions; ++p) {
        double mean = 0.0;
        for (std::size_t a = 0; a < rows.size(); ++a) {
            theta[a] = angles.pair_angle(matrix, rows[a], cols[p], cols[p + 1]);
            mean += theta[a];
        }
        mean /= static_cast<double>(rows.size());
        for (double t : theta) sum_sq += (t - mean) * (t - mean);
    }
    return std::sqrt(sum_sq / (static_cast<double>(rows.size()) * static_cast<double>(transitions)));
}

/// Scores a bicluster in place.
inline void score_bicluster(const ExpressionMatrix& matrix, const SlopeAngleMatrix& angles, Bicluster& bc) {
    bc.msr = msr(matrix, bc.rows, bc.cols);
    bc.mfd = bc.cols.size() >= 2 ? mfd(matrix, angles, bc.rows, bc.cols) : 0.0;
}

struct RefineConfig {
    double delta = 1200.0;  // MSR threshold for deletion candidates
    int max_passes = 10;
    int min_gene = 15;      // deletion floor on |I|
    int min_cond = 10;      // deletion floor on |J|
    bool gate_add_on_delta = false;  // optionally require added rows/cols to respect delta
};

/// One accepted refinement mutation, for monotonicity auditing.
struct RefineEvent {
    bool added = false;   // false = deletion
    bool is_row = false;
    int index = -1;
    double mfd_before = 0.0;
    double mfd_after = 0.0;
};

namespace detail {

struct SubmatrixStats {
    std::vector<double> row_mean, col_mean;
    double grand = 0.0;
    double h = 0.0;                      // mean squared residue
    std::vector<double> row_d, col_d;    // per-row / per-column mean squared residue
};

inline SubmatrixStats submatrix_stats(const ExpressionMatrix& m, std::span<const int> rows,
                                      std::span<const int> cols) {
    SubmatrixStats s;
    s.row_mean.assign(rows.size(), 0.0);
    s.col_mean.assign(cols.size(), 0.0);
    s.row_d.assign(rows.size(), 0.0);
    s.col_d.assign(cols.size(), 0.0);
    for (std::size_t a = 0; a < rows.size(); ++a)
        for (std::size_t b = 0; b < cols.size(); ++b) {
            const double v = m.at(rows[a], cols[b]);
            s.row_mean[a] += v;
            s.col_mean[b] += v;
            s.grand += v;
        }
    for (auto& v : s.row_mean) v /= static_cast<double>(cols.size());
    for (auto& v : s.col_mean) v /= static_cast<double>(rows.size());
    s.grand /= static_cast<double>(rows.size() * cols.size());
    for (std::size_t a = 0; a < rows.size(); ++a)
        for (std::size_t b = 0; b < cols.size(); ++b) {
            const double r = m.at(rows[a], cols[b]) - s.row_mean[a] - s.col_mean[b] + s.grand;
            s.row_d[a] += r * r;
            s.col_d[b] += r * r;
            s.h += r * r;
        }
    for (auto& v : s.row_d) v /= static_cast<double>(cols.size());
    for (auto& v : s.col_d) v /= static_cast<double>(rows.size());
    s.h /= static_cast<double>(rows.size() * cols.size());
    return s;
}

}  // namespace detail

/**
 * Two-step refinement loop. Step 1 repeatedly deletes, among rows/columns
 * whose mean squared residue exceeds delta and whose removal strictly lowers
 * the MFD, the one with the largest residue (respecting the min_gene /
 * min_cond floors). Step 2 sweeps absent rows, then absent columns, in index
 * order and adds any whose inclusion does not increase the MFD. Passes repeat
 * until a fixpoint or max_passes.
 */
inline Bicluster refine(const ExpressionMatrix& matrix, const SlopeAngleMatrix& angles, Bicluster bc,
                        const RefineConfig& cfg, std::vector<RefineEvent>* trace = nullptr) {
    if (bc.rows.empty() || bc.cols.size() < 2) throw InputError("refine: bicluster too small to refine");
    constexpr double kMfdTol = 1e-12;

    double current_mfd = mfd(matrix, angles, bc.rows, bc.cols);
    auto record = [&](bool added, bool is_row, int index, double before, double after) {
        if (trace) trace->push_back({added, is_row, index, before, after});
    };

    for (int pass = 0; pass < cfg.max_passes; ++pass) {
        bool pass_changed = false;

        // Step 1: delete rows and columns.
        for (;;) {
            const detail::SubmatrixStats stats = detail::submatrix_stats(matrix, bc.rows, bc.cols);
            double best_d = cfg.delta;
            int best_idx = -1;
            bool best_is_row = false;
            double best_mfd = 0.0;

            if (static_cast<int>(bc.rows.size()) > cfg.min_gene) {
                for (std::size_t a = 0; a < bc.rows.size(); ++a) {
                    if (stats.row_d[a] <= cfg.delta || stats.row_d[a] <= best_d) continue;
                    std::vector<int> trial = bc.rows;
                    trial.erase(trial.begin() + static_cast<std::ptrdiff_t>(a));
                    const double trial_mfd = mfd(matrix, angles, trial, bc.cols);
                    if (trial_mfd < current_mfd) {
                        best_d = stats.row_d[a];
                        best_idx = static_cast<int>(a);
                        best_is_row = true;
                        best_mfd = trial_mfd;
                    }
                }
            }
            if (static_cast<int>(bc.cols.size()) > std::max(cfg.min_cond, 2)) {
                for (std::size_t b = 0; b < bc.cols.size(); ++b) {
                    if (stats.col_d[b] <= cfg.delta || stats.col_d[b] <= best_d) continue;
                    std::vector<int> trial = bc.cols;
                    trial.erase(trial.begin() + static_cast<std::ptrdiff_t>(b));
                    const double trial_mfd = mfd(matrix, angles, bc.rows, trial);
                    if (trial_mfd < current_mfd) {
                        best_d = stats.col_d[b];
                        best_idx = static_cast<int>(b);
                        best_is_row = false;
                        best_mfd = trial_mfd;
                    }
                }
            }
            if (best_idx < 0) break;
            if (best_is_row) {
                record(false, true, bc.rows[static_cast<std::size_t>(best_idx)], current_mfd, best_mfd);
                bc.rows.erase(bc.rows.begin() + best_idx);
            } else {
                record(false, false, bc.cols[static_cast<std::size_t>(best_idx)], current_mfd, best_mfd);
                bc.cols.erase(bc.cols.begin() + best_idx);
            }
            assert(best_mfd <= current_mfd + kMfdTol);
            current_mfd = best_mfd;
            pass_changed = true;
        }

        // Step 2: add absent rows, then absent columns, one sweep each.
        std::vector<char> in_rows(static_cast<std::size_t>(matrix.rows()), 0);
        for (int r : bc.rows) in_rows[static_cast<std::size_t>(r)] = 1;
        for (int i = 0; i < matrix.rows(); ++i) {
            if (in_rows[static_cast<std::size_t>(i)]) continue;
            std::vector<int> trial = bc.rows;
            trial.insert(std::lower_bound(trial.begin(), trial.end(), i), i);
            const double trial_mfd = mfd(matrix, angles, trial, bc.cols);
            if (trial_mfd > current_mfd + kMfdTol) continue;
            if (cfg.gate_add_on_delta) {
                const detail::SubmatrixStats stats = detail::submatrix_stats(matrix, trial, bc.cols);
                const auto at = std::lower_bound(trial.begin(), trial.end(), i) - trial.begin();
                if (stats.row_d[static_cast<std::size_t>(at)] > cfg.delta) continue;
            }
            record(true, true, i, current_mfd, trial_mfd);
            bc.rows = std::move(trial);
            current_mfd = trial_mfd;
            pass_changed = true;
        }
        std::vector<char> in_cols(static_cast<std::size_t>(matrix.cols()), 0);
        for (int c : bc.cols) in_cols[static_cast<std::size_t>(c)] = 1;
        for (int j = 0; j < matrix.cols(); ++j) {
            if (in_cols[static_cast<std::size_t>(j)]) continue;
            std::vector<int> trial = bc.cols;
            trial.insert(std::lower_bound(trial.begin(), trial.end(), j), j);
            const double trial_mfd = mfd(matrix, angles, bc.rows, trial);
            if (trial_mfd > current_mfd + kMfdTol) continue;
            if (cfg.gate_add_on_delta) {
                const detail::SubmatrixStats stats = detail::submatrix_stats(matrix, bc.rows, trial);
                const auto at = std::lower_bound(trial.begin(), trial.end(), j) - trial.begin();
                if (stats.col_d[static_cast<std::size_t>(at)] > cfg.delta) continue;
            }
            record(true, false, j, current_mfd, trial_mfd);
            bc.cols = std::move(trial);
            current_mfd = trial_mfd;
            pass_changed = true;
        }

        if (!pass_changed) break;
    }

    bc.msr = msr(matrix, bc.rows, bc.cols);
    bc.mfd = current_mfd;
    return bc;
}

}  // namespace gbc
