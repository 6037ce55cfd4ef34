#pragma once

#include <cstdint>
#include <fstream>
#include <optional>
#include <vector>

#include "gbc/common.hpp"
#include "gbc/granulation.hpp"
#include "gbc/matrix.hpp"

namespace gbc {

/**
 * The information-granular labeling matrix Psi: one integer label per cell,
 * 1..K_i within row i.
 */
struct LabelMatrix {
    int n = 0;
    int m = 0;
    std::vector<int> labels;          // row-major n*m
    std::vector<int> granule_counts;  // per row K_i

    int at(int gene, int cond) const { return labels[static_cast<std::size_t>(gene) * m + cond]; }
};

/// Builds Psi by granulating every row with the configured method. Rows are
/// independent and processed in parallel; failures carry the gene identity.
inline LabelMatrix build_label_matrix(const ExpressionMatrix& matrix, const GranulationConfig& cfg) {
    LabelMatrix out;
    out.n = matrix.rows();
    out.m = matrix.cols();
    out.labels.assign(static_cast<std::size_t>(out.n) * out.m, 0);
    out.granule_counts.assign(static_cast<std::size_t>(out.n), 0);

    const std::uint64_t stage = stage_tag("granulate");
    parallel_for(out.n, cfg.threads, [&](int i) {
        try {
            const RowGranulation rg =
                granulate_row(matrix.row(i), cfg, derive_seed(cfg.seed, stage, static_cast<std::uint64_t>(i)));
            out.granule_counts[static_cast<std::size_t>(i)] = rg.granules.count();
            std::copy(rg.labels.begin(), rg.labels.end(),
                      out.labels.begin() + static_cast<std::ptrdiff_t>(i) * out.m);
        } catch (const std::exception& e) {
            throw InputError("granulation failed for gene '" + matrix.gene_ids[static_cast<std::size_t>(i)] +
                             "': " + e.what());
        }
    });
    return out;
}

enum class TrendStorage { Auto, Stored, OnDemand };

/**
 * The trend matrix Gamma: for gene n and column m, the vector of
 * sign(psi_nm - psi_nk) over all earlier columns k. +1 is a rising trend,
 * -1 falling, 0 stands for both. Column 1's placeholder is an empty vector
 * and is never read by the search.
 *
 * Stored mode packs the per-gene lower triangle at 2 bits per entry;
 * on-demand mode keeps only the labels and computes signs on access. Both
 * modes return identical values.
 */
class TrendMatrix {
public:
    // On-demand kicks in automatically when the packed triangle would exceed
    // ~10^8 entries (N*M^2 heuristic).
    static constexpr std::uint64_t kAutoStoredLimit = 100000000ULL;

    static TrendMatrix build(LabelMatrix labels, TrendStorage storage = TrendStorage::Auto) {
        TrendMatrix t;
        t.labels_ = std::move(labels);
        const std::uint64_t footprint = static_cast<std::uint64_t>(t.labels_.n) *
                                        static_cast<std::uint64_t>(t.labels_.m) *
                                        static_cast<std::uint64_t>(t.labels_.m);
        t.stored_ = storage == TrendStorage::Stored ||
                    (storage == TrendStorage::Auto && footprint <= kAutoStoredLimit);
        if (t.stored_) t.pack();
        return t;
    }

    int genes() const { return labels_.n; }
    int conditions() const { return labels_.m; }
    bool stored() const { return stored_; }
    const LabelMatrix& labels() const { return labels_; }

    /// sign(psi[gene][later] - psi[gene][earlier]); requires earlier < later.
    int entry(int gene, int later, int earlier) const {
        if (earlier >= later) throw InternalError("TrendMatrix::entry: column order violated");
        if (stored_) {
            const std::uint64_t idx = triangle_offset(gene) + tri_index(later, earlier);
            const std::uint64_t word = packed_[idx >> 5];
            return static_cast<int>((word >> ((idx & 31u) * 2)) & 3u) - 1;
        }
        const int d = labels_.at(gene, later) - labels_.at(gene, earlier);
        return d > 0 ? 1 : d < 0 ? -1 : 0;
    }

private:
    LabelMatrix labels_;
    bool stored_ = false;
    std::vector<std::uint64_t> packed_;  // 32 entries per word, entry = sign+1

    std::uint64_t triangle_size() const {
        const std::uint64_t m = static_cast<std::uint64_t>(labels_.m);
        return m * (m - 1) / 2;
    }
    std::uint64_t triangle_offset(int gene) const { return static_cast<std::uint64_t>(gene) * triangle_size(); }
    static std::uint64_t tri_index(int later, int earlier) {
        return static_cast<std::uint64_t>(later) * (later - 1) / 2 + static_cast<std::uint64_t>(earlier);
    }

    void pack() {
        const std::uint64_t total = static_cast<std::uint64_t>(labels_.n) * triangle_size();
        packed_.assign((total + 31) / 32, 0);
        for (int g = 0; g < labels_.n; ++g) {
            for (int later = 1; later < labels_.m; ++later) {
                for (int earlier = 0; earlier < later; ++earlier) {
                    const int d = labels_.at(g, later) - labels_.at(g, earlier);
                    const std::uint64_t code = static_cast<std::uint64_t>((d > 0 ? 1 : d < 0 ? -1 : 0) + 1);
                    const std::uint64_t idx = triangle_offset(g) + tri_index(later, earlier);
                    packed_[idx >> 5] |= code << ((idx & 31u) * 2);
                }
            }
        }
    }
};

inline TrendMatrix build_trend_matrix(const LabelMatrix& labels, TrendStorage storage = TrendStorage::Auto) {
    return TrendMatrix::build(labels, storage);
}

// ---------------------------------------------------------------------------
// Offline cache. Granulation and trend construction are the expensive offline
// half of the pipeline; the cache persists the label matrix (from which Gamma
// is rebuilt bit-exactly) keyed by matrix content and granulation config.
// ---------------------------------------------------------------------------

namespace detail {
constexpr std::uint64_t kTrendCacheMagic = 0x474243545231ULL;  // "GBCTR1"
}

inline void save_trend_cache(const std::string& path, const LabelMatrix& labels,
                             std::uint64_t matrix_hash, std::uint64_t config_hash) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InputError("cannot write trend cache '" + path + "'");
    auto put_u64 = [&](std::uint64_t v) { out.write(reinterpret_cast<const char*>(&v), sizeof v); };
    put_u64(detail::kTrendCacheMagic);
    put_u64(matrix_hash);
    put_u64(config_hash);
    put_u64(static_cast<std::uint64_t>(labels.n));
    put_u64(static_cast<std::uint64_t>(labels.m));
    out.write(reinterpret_cast<const char*>(labels.labels.data()),
              static_cast<std::streamsize>(labels.labels.size() * sizeof(int)));
    out.write(reinterpret_cast<const char*>(labels.granule_counts.data()),
              static_cast<std::streamsize>(labels.granule_counts.size() * sizeof(int)));
    if (!out) throw InputError("failed writing trend cache '" + path + "'");
}

/// Returns the cached label matrix when the file exists and both hashes
/// match; nullopt otherwise (stale or missing cache is not an error).
inline std::optional<LabelMatrix> load_trend_cache(const std::string& path, std::uint64_t matrix_hash,
                                                   std::uint64_t config_hash) {
    std::ifstream in(path, std::ios::binary);
    if (!in) return std::nullopt;
    auto get_u64 = [&]() {
        std::uint64_t v = 0;
        in.read(reinterpret_cast<char*>(&v), sizeof v);
        return v;
    };
    if (get_u64() != detail::kTrendCacheMagic) return std::nullopt;
    if (get_u64() != matrix_hash || get_u64() != config_hash) return std::nullopt;
    LabelMatrix labels;
    labels.n = static_cast<int>(get_u64());
    labels.m = static_cast<int>(get_u64());
    if (!in || labels.n < 1 || labels.m < 2) return std::nullopt;
    labels.labels.resize(static_cast<std::size_t>(labels.n) * labels.m);
    labels.granule_counts.resize(static_cast<std::size_t>(labels.n));
    in.read(reinterpret_cast<char*>(labels.labels.data()),
            static_cast<std::streamsize>(labels.labels.size() * sizeof(int)));
    in.read(reinterpret_cast<char*>(labels.granule_counts.data()),
            static_cast<std::streamsize>(labels.granule_counts.size() * sizeof(int)));
    if (!in) return std::nullopt;
    return labels;
}

}  // namespace gbc
