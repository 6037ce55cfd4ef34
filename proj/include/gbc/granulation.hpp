#pragma once

#include <span>
#include <string>
#include <vector>

#include "gbc/fcm.hpp"
#include "gbc/granules.hpp"
#include "gbc/jig.hpp"
#include "gbc/matrix.hpp"

namespace gbc {

enum class GranulationMethod { Fcm, Jig };

inline const char* method_name(GranulationMethod m) {
    return m == GranulationMethod::Fcm ? "fcm" : "jig";
}

/**
 * Per-row granulation settings shared by both paths. Degenerate rows (one or
 * two distinct values) bypass the configured method entirely.
 */
struct GranulationConfig {
    GranulationMethod method = GranulationMethod::Fcm;
    FcmConfig fcm;              // fcm.seed is ignored; per-row seeds derive from `seed`
    double tau = 0.5;           // JIG specificity decay
    int jig_windows = 0;        // 0 = ceil(0.5 * distinct count), Eq.-8 parity
    PsoConfig pso;              // JIG segmentation optimizer
    int jig_exhaustive_max = 12;
    std::uint64_t seed = 0;     // root seed for per-row substreams
    int threads = 0;            // 0 = GBC_THREADS env or hardware

    std::uint64_t config_hash() const {
        std::string repr = std::string(method_name(method)) + "|k=" + std::to_string(fcm.kappa) +
                           "|tol=" + std::to_string(fcm.tol) + "|it=" + std::to_string(fcm.max_iters) +
                           "|rs=" + std::to_string(fcm.restarts) + "|tau=" + std::to_string(tau) +
                           "|P=" + std::to_string(jig_windows) + "|np=" + std::to_string(pso.particles) +
                           "|ni=" + std::to_string(pso.iterations) + "|ex=" + std::to_string(jig_exhaustive_max) +
                           "|seed=" + std::to_string(seed);
        return fnv1a64(repr);
    }
};

struct RowGranulation {
    GranuleSet granules;
    std::vector<int> labels;  // length M, values 1..granules.count()
};

/// Granulates a single gene row: sort/dedupe, degenerate shortcut, otherwise
/// the configured method, then condition labeling.
inline RowGranulation granulate_row(std::span<const double> row, const GranulationConfig& cfg,
                                    std::uint64_t row_seed) {
    const SortedDistinctSeries series = sort_dedupe(row);
    RowGranulation out;
    if (auto degenerate = degenerate_granules(series)) {
        out.granules = std::move(*degenerate);
    } else if (cfg.method == GranulationMethod::Fcm) {
        FcmConfig fcm_cfg = cfg.fcm;
        fcm_cfg.seed = row_seed;
        const FcmState state = fcm_fit(row, granule_count(series), fcm_cfg);
        out.granules = build_ordered_granules_fcm(state);
    } else {
        PsoConfig pso_cfg = cfg.pso;
        pso_cfg.seed = row_seed;
        const int windows = jig_window_count(series, cfg.jig_windows);
        const WindowPartition partition =
            optimize_partition(series, windows, cfg.tau, pso_cfg, false, cfg.jig_exhaustive_max);
        out.granules = build_interval_granules(series, partition);
    }
    out.labels = label_series(row, out.granules);
    return out;
}

}  // namespace gbc
