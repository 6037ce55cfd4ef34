#pragma once

#include <limits>
#include <string>
#include <vector>

namespace gbc {

/// Where a bicluster came from: mining method and the sweep coordinates of
/// the chain that produced it.
struct Provenance {
    std::string method;    // "fcm", "jig", "cc", "truth", ...
    int start_column = -1; // 0-based first column of the chain
    int L0 = 0;
    int rank = 1;
    int direction = 0;     // first accepted step's trend direction
};

/**
 * A bicluster: row subset I (sorted ascending) and ordered column subset J
 * (strictly increasing, possibly non-contiguous), with its coherence scores.
 */
struct Bicluster {
    std::vector<int> rows;
    std::vector<int> cols;
    double msr = std::numeric_limits<double>::quiet_NaN();
    double mfd = std::numeric_limits<double>::quiet_NaN();
    Provenance provenance;

    bool same_extent(const Bicluster& other) const { return rows == other.rows && cols == other.cols; }
};

/// Cell-level Jaccard overlap of two rectangular biclusters.
inline double cell_jaccard(const Bicluster& a, const Bicluster& b) {
    auto intersect_size = [](const std::vector<int>& x, const std::vector<int>& y) {
        std::size_t i = 0, j = 0, n = 0;
        while (i < x.size() && j < y.size()) {
            if (x[i] < y[j]) ++i;
            else if (x[i] > y[j]) ++j;
            else { ++n; ++i; ++j; }
        }
        return n;
    };
    const std::size_t rows_common = intersect_size(a.rows, b.rows);
    const std::size_t cols_common = intersect_size(a.cols, b.cols);
    const std::size_t inter = rows_common * cols_common;
    const std::size_t cells_a = a.rows.size() * a.cols.size();
    const std::size_t cells_b = b.rows.size() * b.cols.size();
    const std::size_t uni = cells_a + cells_b - inter;
    return uni == 0 ? 0.0 : static_cast<double>(inter) / static_cast<double>(uni);
}

}  // namespace gbc
