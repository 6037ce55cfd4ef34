#pragma once

#include <algorithm>
#include <cmath>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "gbc/bicluster.hpp"
#include "gbc/matrix.hpp"

namespace gbc {

/**
 * A planted coherent block. Additive blocks (base profile plus per-row
 * offsets) are zero-MSR and zero-MFD patterns at sigma = 0; scaling blocks
 * (base profile times per-row factors) keep identical trends but nonzero MSR,
 * exercising the case where residue alone misses trend consistency.
 */
struct PlantedBlock {
    enum class Pattern { AdditiveShift, Scaling };

    std::vector<int> rows;              // sorted, in-matrix row indices
    std::vector<int> cols;              // sorted, in-matrix column indices
    std::vector<double> base_profile;   // length cols.size()
    std::vector<double> row_offsets;    // length rows.size(); offsets or scale factors
    Pattern pattern = Pattern::AdditiveShift;
};

struct SynthSpec {
    int n_genes = 0;
    int n_conds = 0;
    std::vector<PlantedBlock> planted;
    double noise_sigma = 0.0;  // in-block Gaussian noise scale
    std::uint64_t seed = 0;
};

struct SynthResult {
    ExpressionMatrix matrix;
    std::vector<Bicluster> truth;
};

/**
 * Generates a background of seeded standard-normal cells and overlays each
 * planted block. Rejects overlapping blocks so the ground truth stays
 * unambiguous. The output is a pure function of the spec.
 */
inline SynthResult generate(const SynthSpec& spec) {
    if (spec.n_genes < 1 || spec.n_conds < 2) throw InputError("synth: matrix must be at least 1x2");
    if (spec.noise_sigma < 0.0) throw InputError("synth: noise sigma must be non-negative");

    std::mt19937_64 rng(spec.seed);
    std::normal_distribution<double> normal(0.0, 1.0);

    std::vector<double> values(static_cast<std::size_t>(spec.n_genes) * spec.n_conds);
    for (auto& v : values) v = normal(rng);

    std::vector<char> taken(values.size(), 0);
    std::vector<Bicluster> truth;
    for (const auto& block : spec.planted) {
        if (block.base_profile.size() != block.cols.size() || block.row_offsets.size() != block.rows.size())
            throw InputError("synth: block profile/offset lengths do not match its extent");
        for (int r : block.rows)
            if (r < 0 || r >= spec.n_genes) throw InputError("synth: planted row out of range");
        for (int c : block.cols)
            if (c < 0 || c >= spec.n_conds) throw InputError("synth: planted column out of range");

        for (std::size_t a = 0; a < block.rows.size(); ++a) {
            for (std::size_t b = 0; b < block.cols.size(); ++b) {
                const std::size_t cell =
                    static_cast<std::size_t>(block.rows[a]) * spec.n_conds + block.cols[b];
                if (taken[cell]) throw InputError("synth: planted blocks overlap");
                taken[cell] = 1;
                double v = block.pattern == PlantedBlock::Pattern::AdditiveShift
                               ? block.base_profile[b] + block.row_offsets[a]
                               : block.base_profile[b] * block.row_offsets[a];
                if (spec.noise_sigma > 0.0) v += spec.noise_sigma * normal(rng);
                values[cell] = v;
            }
        }
        Bicluster bc;
        bc.rows = block.rows;
        bc.cols = block.cols;
        bc.provenance.method = "truth";
        truth.push_back(std::move(bc));
    }

    std::vector<std::string> gene_ids(static_cast<std::size_t>(spec.n_genes));
    std::vector<std::string> cond_ids(static_cast<std::size_t>(spec.n_conds));
    for (int i = 0; i < spec.n_genes; ++i) gene_ids[static_cast<std::size_t>(i)] = "g" + std::to_string(i);
    for (int j = 0; j < spec.n_conds; ++j) cond_ids[static_cast<std::size_t>(j)] = "c" + std::to_string(j);

    return {ExpressionMatrix::create(std::move(gene_ids), std::move(cond_ids), std::move(values)),
            std::move(truth)};
}

/**
 * Cell-level Jaccard match scores: relevance averages, over found biclusters,
 * the best overlap with any truth block; recovery averages, over truth, the
 * best overlap with any found bicluster.
 */
inline std::pair<double, double> recovery_score(const std::vector<Bicluster>& found,
                                                const std::vector<Bicluster>& truth) {
    if (truth.empty()) throw InputError("recovery_score: truth list must be non-empty");
    if (found.empty()) return {0.0, 0.0};
    auto best_against = [](const Bicluster& bc, const std::vector<Bicluster>& others) {
        double best = 0.0;
        for (const auto& o : others) best = std::max(best, cell_jaccard(bc, o));
        return best;
    };
    double relevance = 0.0;
    for (const auto& f : found) relevance += best_against(f, truth);
    relevance /= static_cast<double>(found.size());
    double recovery = 0.0;
    for (const auto& t : truth) recovery += best_against(t, found);
    recovery /= static_cast<double>(truth.size());
    return {relevance, recovery};
}

struct MfdReportEntry {
    std::string name;
    double mean_mfd = 0.0;
    double stddev_mfd = 0.0;
    int used = 0;          // biclusters actually aggregated
    bool truncated = false;  // true when the list was shorter than top_k
};

struct MfdReport {
    int top_k = 0;
    std::vector<MfdReportEntry> entries;  // input method order preserved
};

/// Mean and (population) standard deviation of the top_k lowest MFD scores
/// per method.
inline MfdReport compare_mfd(const std::vector<std::pair<std::string, std::vector<Bicluster>>>& methods,
                             int top_k) {
    if (top_k < 1) throw InputError("compare_mfd: top_k must be positive");
    MfdReport report;
    report.top_k = top_k;
    for (const auto& [name, list] : methods) {
        if (list.empty()) throw InputError("compare_mfd: method '" + name + "' has no biclusters");
        std::vector<double> mfds;
        mfds.reserve(list.size());
        for (const auto& bc : list)
            if (std::isfinite(bc.mfd)) mfds.push_back(bc.mfd);  // unscored entries are skipped
        if (mfds.empty()) throw InputError("compare_mfd: method '" + name + "' has no scored biclusters");
        std::sort(mfds.begin(), mfds.end());

        MfdReportEntry entry;
        entry.name = name;
        entry.truncated = static_cast<int>(mfds.size()) < top_k;
        entry.used = entry.truncated ? static_cast<int>(mfds.size()) : top_k;
        for (int i = 0; i < entry.used; ++i) entry.mean_mfd += mfds[static_cast<std::size_t>(i)];
        entry.mean_mfd /= entry.used;
        for (int i = 0; i < entry.used; ++i) {
            const double d = mfds[static_cast<std::size_t>(i)] - entry.mean_mfd;
            entry.stddev_mfd += d * d;
        }
        entry.stddev_mfd = std::sqrt(entry.stddev_mfd / entry.used);
        report.entries.push_back(std::move(entry));
    }
    return report;
}

}  // namespace gbc
