#pragma once

#include <algorithm>
#include <cassert>
#include <random>
#include <vector>

#include "gbc/bicluster.hpp"
#include "gbc/matrix.hpp"
#include "gbc/scoring.hpp"

namespace gbc {

struct CcConfig {
    double delta = 1200.0;  // homogeneity threshold on the mean squared residue
    double alpha = 1.2;     // multiple-deletion aggressiveness
    int n_biclusters = 50;
    std::uint64_t mask_seed = 0;

    void validate() const {
        if (delta <= 0.0) throw InputError("cc: delta must be positive");
        if (alpha < 1.0) throw InputError("cc: alpha must be at least 1");
        if (n_biclusters < 1) throw InputError("cc: bicluster count must be positive");
    }
};

namespace detail {

struct CcView {
    const std::vector<double>* data;
    int m;
    std::vector<int> rows, cols;

    double at(int i, int j) const { return (*data)[static_cast<std::size_t>(i) * m + j]; }
};

inline SubmatrixStats cc_stats(const CcView& v) {
    SubmatrixStats s;
    s.row_mean.assign(v.rows.size(), 0.0);
    s.col_mean.assign(v.cols.size(), 0.0);
    s.row_d.assign(v.rows.size(), 0.0);
    s.col_d.assign(v.cols.size(), 0.0);
    for (std::size_t a = 0; a < v.rows.size(); ++a)
        for (std::size_t b = 0; b < v.cols.size(); ++b) {
            const double x = v.at(v.rows[a], v.cols[b]);
            s.row_mean[a] += x;
            s.col_mean[b] += x;
            s.grand += x;
        }
    for (auto& x : s.row_mean) x /= static_cast<double>(v.cols.size());
    for (auto& x : s.col_mean) x /= static_cast<double>(v.rows.size());
    s.grand /= static_cast<double>(v.rows.size() * v.cols.size());
    for (std::size_t a = 0; a < v.rows.size(); ++a)
        for (std::size_t b = 0; b < v.cols.size(); ++b) {
            const double r = v.at(v.rows[a], v.cols[b]) - s.row_mean[a] - s.col_mean[b] + s.grand;
            s.row_d[a] += r * r;
            s.col_d[b] += r * r;
            s.h += r * r;
        }
    for (auto& x : s.row_d) x /= static_cast<double>(v.cols.size());
    for (auto& x : s.col_d) x /= static_cast<double>(v.rows.size());
    s.h /= static_cast<double>(v.rows.size() * v.cols.size());
    return s;
}

}  // namespace detail

/**
 * Cheng-Church delta-biclustering. Each round runs multiple node deletion
 * (drop every row/column whose mean residue exceeds alpha*H while H > delta),
 * single node deletion (drop the worst row or column until H <= delta), and
 * node addition (columns then rows whose mean residue does not exceed H),
 * then masks the found cells with seeded uniform noise over the matrix's
 * value range so later rounds find different structure.
 */
inline std::vector<Bicluster> cc_mine(const ExpressionMatrix& matrix, const CcConfig& cfg) {
    cfg.validate();
    const int n = matrix.rows();
    const int m = matrix.cols();
    if (n < 2 || m < 2) throw InputError("cc: matrix must be at least 2x2");

    const auto [lo_it, hi_it] = std::minmax_element(matrix.values.begin(), matrix.values.end());
    std::uniform_real_distribution<double> mask_value(*lo_it, *hi_it);
    std::mt19937_64 rng(cfg.mask_seed);

    std::vector<double> work = matrix.values;  // masked working copy
    std::vector<Bicluster> out;
    out.reserve(static_cast<std::size_t>(cfg.n_biclusters));

    for (int round = 0; round < cfg.n_biclusters; ++round) {
        detail::CcView view{&work, m, {}, {}};
        view.rows.resize(static_cast<std::size_t>(n));
        view.cols.resize(static_cast<std::size_t>(m));
        for (int i = 0; i < n; ++i) view.rows[static_cast<std::size_t>(i)] = i;
        for (int j = 0; j < m; ++j) view.cols[static_cast<std::size_t>(j)] = j;

        // Multiple node deletion.
        for (;;) {
            detail::SubmatrixStats s = detail::cc_stats(view);
            if (s.h <= cfg.delta) break;
            bool changed = false;
            if (view.rows.size() > 1) {
                std::vector<int> keep;
                for (std::size_t a = 0; a < view.rows.size(); ++a)
                    if (s.row_d[a] <= cfg.alpha * s.h) keep.push_back(view.rows[a]);
                if (!keep.empty() && keep.size() < view.rows.size()) {
                    view.rows = std::move(keep);
                    changed = true;
                }
            }
            if (view.cols.size() > 1) {
                s = detail::cc_stats(view);
                if (s.h <= cfg.delta) break;
                std::vector<int> keep;
                for (std::size_t b = 0; b < view.cols.size(); ++b)
                    if (s.col_d[b] <= cfg.alpha * s.h) keep.push_back(view.cols[b]);
                if (!keep.empty() && keep.size() < view.cols.size()) {
                    view.cols = std::move(keep);
                    changed = true;
                }
            }
            if (!changed) break;
        }

        // Single node deletion: the worst row or column, one at a time. The
        // Cheng-Church lemma guarantees H strictly decreases.
        for (;;) {
            const detail::SubmatrixStats s = detail::cc_stats(view);
            if (s.h <= cfg.delta) break;
            double worst = -1.0;
            std::size_t idx = 0;
            bool is_row = true;
            if (view.rows.size() > 1)
                for (std::size_t a = 0; a < s.row_d.size(); ++a)
                    if (s.row_d[a] > worst) { worst = s.row_d[a]; idx = a; is_row = true; }
            if (view.cols.size() > 1)
                for (std::size_t b = 0; b < s.col_d.size(); ++b)
                    if (s.col_d[b] > worst) { worst = s.col_d[b]; idx = b; is_row = false; }
            if (worst < 0.0) break;  // nothing deletable (1x1)
            if (is_row) view.rows.erase(view.rows.begin() + static_cast<std::ptrdiff_t>(idx));
            else view.cols.erase(view.cols.begin() + static_cast<std::ptrdiff_t>(idx));
            assert(detail::cc_stats(view).h < s.h + 1e-12);
        }

        // Node addition: columns then rows whose mean residue stays within
        // the current H; a batch is reverted if it pushes H past delta.
        for (;;) {
            detail::SubmatrixStats s = detail::cc_stats(view);
            const double h = s.h;
            bool changed = false;

            std::vector<char> in_cols(static_cast<std::size_t>(m), 0);
            for (int j : view.cols) in_cols[static_cast<std::size_t>(j)] = 1;
            std::vector<int> col_batch;
            for (int j = 0; j < m; ++j) {
                if (in_cols[static_cast<std::size_t>(j)]) continue;
                double col_mean = 0.0;
                for (int r : view.rows) col_mean += view.at(r, j);
                col_mean /= static_cast<double>(view.rows.size());
                double d = 0.0;
                for (std::size_t a = 0; a < view.rows.size(); ++a) {
                    const double res = view.at(view.rows[a], j) - s.row_mean[a] - col_mean + s.grand;
                    d += res * res;
                }
                d /= static_cast<double>(view.rows.size());
                if (d <= h) col_batch.push_back(j);
            }
            if (!col_batch.empty()) {
                std::vector<int> prev = view.cols;
                view.cols.insert(view.cols.end(), col_batch.begin(), col_batch.end());
                std::sort(view.cols.begin(), view.cols.end());
                if (detail::cc_stats(view).h > cfg.delta) view.cols = std::move(prev);
                else changed = true;
            }

            s = detail::cc_stats(view);
            std::vector<char> in_rows(static_cast<std::size_t>(n), 0);
            for (int i : view.rows) in_rows[static_cast<std::size_t>(i)] = 1;
            std::vector<int> row_batch;
            for (int i = 0; i < n; ++i) {
                if (in_rows[static_cast<std::size_t>(i)]) continue;
                double d = 0.0;
                double row_mean = 0.0;
                for (int c : view.cols) row_mean += view.at(i, c);
                row_mean /= static_cast<double>(view.cols.size());
                for (std::size_t b = 0; b < view.cols.size(); ++b) {
                    const double res = view.at(i, view.cols[b]) - row_mean - s.col_mean[b] + s.grand;
                    d += res * res;
                }
                d /= static_cast<double>(view.cols.size());
                if (d <= s.h) row_batch.push_back(i);
            }
            if (!row_batch.empty()) {
                std::vector<int> prev = view.rows;
                view.rows.insert(view.rows.end(), row_batch.begin(), row_batch.end());
                std::sort(view.rows.begin(), view.rows.end());
                if (detail::cc_stats(view).h > cfg.delta) view.rows = std::move(prev);
                else changed = true;
            }
            if (!changed) break;
        }

        Bicluster bc;
        bc.rows = view.rows;
        bc.cols = view.cols;
        bc.msr = detail::cc_stats(view).h;
        bc.provenance = {"cc", -1, 0, round + 1, 0};
        out.push_back(std::move(bc));

        // Mask the found cells so the next round explores elsewhere.
        for (int i : out.back().rows)
            for (int j : out.back().cols)
                work[static_cast<std::size_t>(i) * m + j] = mask_value(rng);
    }
    return out;
}

}  // namespace gbc
