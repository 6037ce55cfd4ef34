#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "gbc/fcm.hpp"

using namespace gbc;

namespace {

// Reference alternating-optimization FCM, written independently of the
// library path: plain textbook updates run to a much tighter tolerance.
struct ReferenceFcm {
    std::vector<double> prototypes;
    std::vector<std::vector<double>> memberships;  // [cluster][point]
};

ReferenceFcm reference_fcm(const std::vector<double>& data, std::vector<double> protos, double kappa,
                           int iters = 2000, double tol = 1e-12) {
    const int c = static_cast<int>(protos.size());
    const int m = static_cast<int>(data.size());
    std::vector<std::vector<double>> u(static_cast<std::size_t>(c), std::vector<double>(m, 0.0));
    for (int it = 0; it < iters; ++it) {
        for (int t = 0; t < m; ++t) {
            std::vector<int> zero;
            for (int j = 0; j < c; ++j)
                if (data[t] == protos[j]) zero.push_back(j);
            if (!zero.empty()) {
                for (int j = 0; j < c; ++j) u[j][t] = 0.0;
                for (int j : zero) u[j][t] = 1.0 / zero.size();
                continue;
            }
            for (int j = 0; j < c; ++j) {
                double denom = 0.0;
                for (int l = 0; l < c; ++l)
                    denom += std::pow(std::abs(data[t] - protos[j]) / std::abs(data[t] - protos[l]),
                                      2.0 / (kappa - 1.0));
                u[j][t] = 1.0 / denom;
            }
        }
        double delta = 0.0;
        for (int j = 0; j < c; ++j) {
            double num = 0.0, den = 0.0;
            for (int t = 0; t < m; ++t) {
                const double w = std::pow(u[j][t], kappa);
                num += w * data[t];
                den += w;
            }
            const double next = den > 0 ? num / den : protos[j];
            delta = std::max(delta, std::abs(next - protos[j]));
            protos[j] = next;
        }
        if (delta < tol) break;
    }
    return {protos, u};
}

}  // namespace

TEST(FcmFit, TwoWellSeparatedClusters) {
    const std::vector<double> row{0, 0, 10, 10};
    const FcmState state = fcm_fit(row, 2, {.kappa = 2.0});

    // Oracle: reference run from the same deterministic quantile start.
    const ReferenceFcm ref = reference_fcm(row, {2.5, 7.5}, 2.0);
    ASSERT_EQ(state.clusters, 2);
    for (int j = 0; j < 2; ++j) EXPECT_NEAR(state.prototypes[j], ref.prototypes[j], 1e-6);
    EXPECT_NEAR(state.prototypes[0], 0.0, 1e-6);
    EXPECT_NEAR(state.prototypes[1], 10.0, 1e-6);
    EXPECT_GE(state.membership(0, 0), 0.99);
    EXPECT_GE(state.membership(0, 1), 0.99);
    EXPECT_GE(state.membership(1, 2), 0.99);
    EXPECT_GE(state.membership(1, 3), 0.99);
}

TEST(FcmFit, SingleClusterIsTheMean) {
    const std::vector<double> row{1, 2, 3, 4, 5, 6};
    const FcmState state = fcm_fit(row, 1, {.kappa = 2.0});
    ASSERT_EQ(state.clusters, 1);
    EXPECT_NEAR(state.prototypes[0], 3.5, 1e-12);
    for (int t = 0; t < 6; ++t) EXPECT_NEAR(state.membership(0, t), 1.0, 1e-12);
}

TEST(FcmFit, ThreeClustersMatchMultiRestartOracle) {
    const std::vector<double> row{0, 1, 10, 11, 20, 21};
    FcmConfig cfg;
    cfg.kappa = 2.0;
    cfg.restarts = 10;
    cfg.seed = 42;
    const FcmState state = fcm_fit(row, 3, cfg);

    // Oracle: best of ten random restarts at tolerance 1e-12.
    std::mt19937_64 rng(7);
    std::uniform_int_distribution<std::size_t> pick(0, row.size() - 1);
    double best_obj = std::numeric_limits<double>::infinity();
    ReferenceFcm best;
    for (int r = 0; r < 10; ++r) {
        std::vector<double> start;
        while (start.size() < 3) {
            const double v = row[pick(rng)];
            if (std::find(start.begin(), start.end(), v) == start.end()) start.push_back(v);
        }
        std::sort(start.begin(), start.end());
        const ReferenceFcm cand = reference_fcm(row, start, 2.0);
        double obj = 0.0;
        for (std::size_t j = 0; j < 3; ++j)
            for (std::size_t t = 0; t < row.size(); ++t)
                obj += cand.memberships[j][t] * cand.memberships[j][t] *
                       (row[t] - cand.prototypes[j]) * (row[t] - cand.prototypes[j]);
        if (obj < best_obj) {
            best_obj = obj;
            best = cand;
        }
    }
    std::vector<double> oracle = best.prototypes;
    std::sort(oracle.begin(), oracle.end());
    std::vector<double> got = state.prototypes;
    std::sort(got.begin(), got.end());
    for (int j = 0; j < 3; ++j) EXPECT_NEAR(got[static_cast<std::size_t>(j)], oracle[static_cast<std::size_t>(j)], 1e-6);
    EXPECT_NEAR(got[0], 0.5, 0.05);
    EXPECT_NEAR(got[1], 10.5, 0.05);
    EXPECT_NEAR(got[2], 20.5, 0.05);
}

TEST(FcmFit, RejectsTooManyClusters) {
    EXPECT_THROW(fcm_fit(std::vector<double>{1, 1, 2, 2}, 3, {}), InputError);
    EXPECT_THROW(fcm_fit(std::vector<double>{1, 2, 3}, 2, {.kappa = 1.0}), InputError);
}

TEST(FcmFit, PartitionColumnsSumToOneAndObjectiveDecreases) {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> value(-5.0, 5.0);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<double> row(12);
        for (auto& v : row) v = value(rng);
        const SortedDistinctSeries series = sort_dedupe(row);
        if (series.distinct_count() < 3) continue;
        const FcmState state = fcm_fit(row, granule_count(series), {.kappa = 2.0});
        EXPECT_LE(state.max_column_sum_error, 1e-9);
        for (std::size_t k = 1; k < state.objective_trace.size(); ++k)
            EXPECT_LE(state.objective_trace[k], state.objective_trace[k - 1] + 1e-12);
    }
}

TEST(GranuleCount, HalfTheDistinctCountRoundedUp) {
    auto series_of = [](int n) {
        std::vector<double> row;
        for (int i = 0; i < n; ++i) row.push_back(i);
        return sort_dedupe(row);
    };
    EXPECT_EQ(granule_count(series_of(7)), 4);
    EXPECT_EQ(granule_count(series_of(8)), 4);
    EXPECT_EQ(granule_count(series_of(3)), 2);
}

TEST(OrderedGranules, SortsByPrototype) {
    FcmState state;
    state.clusters = 2;
    state.points = 3;
    state.prototypes = {9.0, 1.0};
    state.partition = {0.1, 0.2, 0.9, 0.9, 0.8, 0.1};  // cluster 0 row, cluster 1 row
    const GranuleSet set = build_ordered_granules_fcm(state);
    ASSERT_EQ(set.count(), 2);
    EXPECT_EQ(set.granules[0].label, 1);
    EXPECT_EQ(set.granules[0].prototype, 1.0);
    EXPECT_EQ(set.granules[0].membership, (std::vector<double>{0.9, 0.8, 0.1}));
    EXPECT_EQ(set.granules[1].prototype, 9.0);
}

TEST(OrderedGranules, AlreadySortedIsIdentity) {
    FcmState state;
    state.clusters = 2;
    state.points = 2;
    state.prototypes = {1.0, 2.0};
    state.partition = {1, 0, 0, 1};
    const GranuleSet set = build_ordered_granules_fcm(state);
    EXPECT_EQ(set.granules[0].prototype, 1.0);
    EXPECT_EQ(set.granules[1].prototype, 2.0);
}

TEST(OrderedGranules, PrototypeTiesKeepClusterIndexOrder) {
    FcmState state;
    state.clusters = 2;
    state.points = 2;
    state.prototypes = {2.0, 2.0};
    state.partition = {0.7, 0.3, 0.3, 0.7};
    const GranuleSet set = build_ordered_granules_fcm(state);
    EXPECT_EQ(set.granules[0].membership, (std::vector<double>{0.7, 0.3}));
    EXPECT_EQ(set.granules[1].membership, (std::vector<double>{0.3, 0.7}));
}

TEST(FcmLabels, AffineEquivariance) {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> value(0.0, 10.0);
    for (int trial = 0; trial < 25; ++trial) {
        std::vector<double> row(10);
        for (auto& v : row) v = value(rng);
        const SortedDistinctSeries series = sort_dedupe(row);
        if (series.distinct_count() < 3) continue;
        const int c = granule_count(series);

        std::vector<double> scaled(row.size());
        const double a = 2.5, b = -7.0;
        for (std::size_t t = 0; t < row.size(); ++t) scaled[t] = a * row[t] + b;

        const GranuleSet g1 = build_ordered_granules_fcm(fcm_fit(row, c, {.kappa = 2.0}));
        const GranuleSet g2 = build_ordered_granules_fcm(fcm_fit(scaled, c, {.kappa = 2.0}));
        EXPECT_EQ(label_series(row, g1), label_series(scaled, g2));
    }
}
