#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <span>
#include <string>
#include <unordered_set>
#include <vector>

#include "gbc/common.hpp"

namespace gbc {

/**
 * Dense gene-by-condition expression matrix. Rows are genes, columns are
 * experimental conditions; a gene row is treated as a time series over its
 * conditions. Values must be finite after ingestion.
 */
struct ExpressionMatrix {
    std::vector<std::string> gene_ids;       // length N
    std::vector<std::string> condition_ids;  // length M
    std::vector<double> values;              // row-major N*M

    int rows() const { return static_cast<int>(gene_ids.size()); }
    int cols() const { return static_cast<int>(condition_ids.size()); }

    double at(int i, int j) const { return values[static_cast<std::size_t>(i) * condition_ids.size() + j]; }
    double& at(int i, int j) { return values[static_cast<std::size_t>(i) * condition_ids.size() + j]; }

    std::span<const double> row(int i) const {
        return {values.data() + static_cast<std::size_t>(i) * condition_ids.size(), condition_ids.size()};
    }

    static ExpressionMatrix create(std::vector<std::string> gene_ids,
                                   std::vector<std::string> condition_ids,
                                   std::vector<double> values) {
        ExpressionMatrix m{std::move(gene_ids), std::move(condition_ids), std::move(values)};
        m.validate();
        return m;
    }

    void validate() const {
        const std::size_t n = gene_ids.size();
        const std::size_t m = condition_ids.size();
        if (n < 1) throw InputError("expression matrix needs at least one gene row");
        if (m < 2) throw InputError("expression matrix needs at least two conditions");
        if (values.size() != n * m) throw InputError("expression matrix value count does not match dimensions");
        for (std::size_t i = 0; i < values.size(); ++i) {
            if (!std::isfinite(values[i])) {
                throw InputError("non-finite value at gene '" + gene_ids[i / m] + "', condition '" +
                                 condition_ids[i % m] + "'");
            }
        }
        check_unique(gene_ids, "gene");
        check_unique(condition_ids, "condition");
    }

    std::uint64_t content_hash() const {
        const std::uint64_t dims[2] = {gene_ids.size(), condition_ids.size()};
        std::uint64_t h = fnv1a64(dims, sizeof dims);
        for (const auto& id : gene_ids) h = fnv1a64(id.data(), id.size(), h);
        for (const auto& id : condition_ids) h = fnv1a64(id.data(), id.size(), h);
        h = fnv1a64(values.data(), values.size() * sizeof(double), h);
        return h;
    }

private:
    static void check_unique(const std::vector<std::string>& ids, const char* what) {
        std::unordered_set<std::string> seen;
        for (const auto& id : ids) {
            if (!seen.insert(id).second) throw InputError(std::string("duplicate ") + what + " identifier '" + id + "'");
        }
    }
};

/**
 * A gene row sorted ascending with exactly-equal values collapsed to a single
 * datum. `positions[k]` lists the original condition indices (0-based) whose
 * value equals `values[k]`.
 */
struct SortedDistinctSeries {
    std::vector<double> values;                // strictly ascending
    std::vector<std::vector<int>> positions;   // per distinct value

    int distinct_count() const { return static_cast<int>(values.size()); }
};

/// Sorts a row ascending and collapses bitwise-equal values. No epsilon
/// merging: "same value" means exact floating equality.
inline SortedDistinctSeries sort_dedupe(std::span<const double> row) {
    if (row.size() < 2) throw InputError("sort_dedupe requires at least two conditions");
    for (double v : row) {
        if (!std::isfinite(v)) throw InputError("sort_dedupe: non-finite value in row");
    }
    std::vector<int> order(row.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return row[a] < row[b]; });

    SortedDistinctSeries out;
    for (int idx : order) {
        if (out.values.empty() || row[idx] != out.values.back()) {
            out.values.push_back(row[idx]);
            out.positions.emplace_back();
        }
        out.positions.back().push_back(idx);
    }
    return out;
}

}  // namespace gbc
