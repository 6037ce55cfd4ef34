#pragma once

#include <chrono>
#include <string>
#include <vector>

#include "gbc/common.hpp"
#include "gbc/granulation.hpp"
#include "gbc/scoring.hpp"
#include "gbc/search.hpp"
#include "gbc/trend.hpp"

namespace gbc {

/**
 * Full-run configuration. All stage defaults follow the reference protocol:
 * kappa 2, minGene 15, minCond 10, L0 30, MSR threshold 1200, 50 biclusters.
 * Every random stage derives its substream from the single root seed.
 */
struct RunConfig {
    GranulationConfig granulation;
    SearchConfig search;
    RefineConfig refine;
    int top_n = 50;
    int threads = 0;  // 0 = GBC_THREADS env or hardware
    std::uint64_t seed = 0;
    bool use_trend_cache = false;
    std::string trend_cache_path;

    /// Copies the shared knobs into the per-stage configs and returns the
    /// fully resolved configuration actually executed.
    RunConfig resolved() const {
        RunConfig r = *this;
        r.granulation.seed = derive_seed(seed, stage_tag("granulate"));
        r.granulation.threads = threads;
        r.search.threads = threads;
        r.refine.min_gene = r.search.min_gene;
        r.refine.min_cond = r.search.min_cond;
        return r;
    }
};

struct StageTiming {
    std::string stage;
    double seconds = 0.0;
};

struct ResultBundle {
    std::vector<Bicluster> biclusters;
    std::vector<StageTiming> timings;
    RunConfig config;         // resolved configuration, re-runnable
    std::string diagnostic;   // non-empty when the run warrants a note
};

/**
 * granulate -> trend matrix (optionally cached) -> mine initial biclusters ->
 * refine each -> deduplicate -> keep the top_n lowest-MFD biclusters.
 * Deterministic for a fixed seed regardless of thread count.
 */
inline ResultBundle run_pipeline(const RunConfig& config, const ExpressionMatrix& matrix) {
    ResultBundle bundle;
    bundle.config = config.resolved();
    const RunConfig& cfg = bundle.config;

    using clock = std::chrono::steady_clock;
    auto timed = [&](const char* stage, auto&& fn) {
        const auto begin = clock::now();
        auto result = fn();
        bundle.timings.push_back({stage, std::chrono::duration<double>(clock::now() - begin).count()});
        return result;
    };

    const LabelMatrix labels = timed("granulate", [&] {
        if (cfg.use_trend_cache && !cfg.trend_cache_path.empty()) {
            const std::uint64_t mh = matrix.content_hash();
            const std::uint64_t ch = cfg.granulation.config_hash();
            if (auto cached = load_trend_cache(cfg.trend_cache_path, mh, ch)) return *cached;
            LabelMatrix fresh = build_label_matrix(matrix, cfg.granulation);
            save_trend_cache(cfg.trend_cache_path, fresh, mh, ch);
            return fresh;
        }
        return build_label_matrix(matrix, cfg.granulation);
    });
    const TrendMatrix trend = timed("trend", [&] { return build_trend_matrix(labels); });
    const SlopeAngleMatrix angles = timed("angles", [&] { return slope_angles(matrix); });

    std::vector<Bicluster> initial =
        timed("mine", [&] { return mine_initial(trend, cfg.search, matrix, angles); });
    for (auto& bc : initial) bc.provenance.method = method_name(cfg.granulation.method);

    std::vector<Bicluster> refined = timed("refine", [&] {
        std::vector<Bicluster> out(initial.size());
        parallel_for(static_cast<int>(initial.size()), cfg.threads, [&](int i) {
            out[static_cast<std::size_t>(i)] =
                refine(matrix, angles, initial[static_cast<std::size_t>(i)], cfg.refine);
        });
        return out;
    });

    std::stable_sort(refined.begin(), refined.end(), [](const Bicluster& a, const Bicluster& b) {
        if (a.mfd != b.mfd) return a.mfd < b.mfd;
        if (a.rows != b.rows) return a.rows < b.rows;
        return a.cols < b.cols;
    });
    for (auto& bc : refined) {
        const bool duplicate = std::any_of(bundle.biclusters.begin(), bundle.biclusters.end(),
                                           [&](const Bicluster& kept) { return kept.same_extent(bc); });
        if (!duplicate) bundle.biclusters.push_back(std::move(bc));
        if (static_cast<int>(bundle.biclusters.size()) >= cfg.top_n) break;
    }

    if (bundle.biclusters.empty()) {
        bundle.diagnostic = "no bicluster met min_gene=" + std::to_string(cfg.search.min_gene) +
                            " and min_cond=" + std::to_string(cfg.search.min_cond) +
                            "; consider lowering the size floors or sweeping more L0 values";
    }
    return bundle;
}

}  // namespace gbc
