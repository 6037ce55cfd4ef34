#include <gtest/gtest.h>

#include <numeric>
#include <random>

#include "gbc/scoring.hpp"
#include "gbc/synthetic.hpp"

using namespace gbc;

namespace {

PlantedBlock block_at(int row0, int rows, int col0, int cols) {
    PlantedBlock block;
    for (int r = 0; r < rows; ++r) block.rows.push_back(row0 + r);
    for (int c = 0; c < cols; ++c) block.cols.push_back(col0 + c);
    for (int c = 0; c < cols; ++c) block.base_profile.push_back(c % 2 == 0 ? c : -c);
    for (int r = 0; r < rows; ++r) block.row_offsets.push_back(0.25 * r);
    return block;
}

}  // namespace

TEST(Generate, NoiselessFullWidthBlockIsExactlyCoherent) {
    SynthSpec spec;
    spec.n_genes = 12;
    spec.n_conds = 8;
    spec.noise_sigma = 0.0;
    spec.seed = 1;
    spec.planted.push_back(block_at(3, 5, 0, 8));  // spans every condition
    const SynthResult result = generate(spec);
    const Bicluster& truth = result.truth[0];
    const SlopeAngleMatrix angles = slope_angles(result.matrix);
    EXPECT_LE(msr(result.matrix, truth.rows, truth.cols), 1e-9);
    EXPECT_LE(mfd(result.matrix, angles, truth.rows, truth.cols), 1e-12);
}

TEST(Generate, DeterministicForAFixedSeed) {
    SynthSpec spec;
    spec.n_genes = 30;
    spec.n_conds = 10;
    spec.noise_sigma = 0.2;
    spec.seed = 99;
    spec.planted.push_back(block_at(5, 6, 2, 5));
    const SynthResult a = generate(spec);
    const SynthResult b = generate(spec);
    EXPECT_EQ(a.matrix.values, b.matrix.values);
}

TEST(Generate, PlantedBlockBeatsBackgroundMsr) {
    SynthSpec spec;
    spec.n_genes = 200;
    spec.n_conds = 40;
    spec.noise_sigma = 0.1;
    spec.seed = 7;
    PlantedBlock block = block_at(50, 20, 10, 12);
    spec.planted.push_back(block);
    const SynthResult result = generate(spec);

    const Bicluster& truth = result.truth[0];
    const double block_msr = msr(result.matrix, truth.rows, truth.cols);

    // Background blocks of the same shape, away from the planted rows.
    std::vector<int> bg_rows, bg_cols;
    for (int r = 0; r < 20; ++r) bg_rows.push_back(100 + r);
    for (int c = 0; c < 12; ++c) bg_cols.push_back(10 + c);
    const double background_msr = msr(result.matrix, bg_rows, bg_cols);
    EXPECT_LT(block_msr * 10.0, background_msr);
}

TEST(Generate, RejectsOverlappingBlocks) {
    SynthSpec spec;
    spec.n_genes = 20;
    spec.n_conds = 10;
    spec.planted.push_back(block_at(0, 5, 0, 4));
    spec.planted.push_back(block_at(4, 5, 3, 4));  // shares cell (4, 3)
    EXPECT_THROW(generate(spec), InputError);
}

TEST(Generate, ScalingPatternKeepsTrendsButNotResidue) {
    SynthSpec spec;
    spec.n_genes = 10;
    spec.n_conds = 6;
    spec.noise_sigma = 0.0;
    spec.seed = 4;
    PlantedBlock block;
    for (int r = 0; r < 4; ++r) block.rows.push_back(r);
    for (int c = 0; c < 6; ++c) block.cols.push_back(c);
    block.base_profile = {1, 3, 2, 5, 4, 6};
    block.row_offsets = {1.0, 1.5, 2.0, 2.5};  // scale factors
    block.pattern = PlantedBlock::Pattern::Scaling;
    spec.planted.push_back(block);
    const SynthResult result = generate(spec);
    const Bicluster& truth = result.truth[0];
    const SlopeAngleMatrix angles = slope_angles(result.matrix);
    // Scaled rows share identical normalized slope angles but have residue.
    EXPECT_LE(mfd(result.matrix, angles, truth.rows, truth.cols), 1e-9);
    EXPECT_GT(msr(result.matrix, truth.rows, truth.cols), 1e-3);
}

TEST(RecoveryScore, ExactMatchScoresOne) {
    SynthSpec spec;
    spec.n_genes = 10;
    spec.n_conds = 6;
    spec.planted.push_back(block_at(2, 4, 1, 4));
    const SynthResult result = generate(spec);
    const auto [relevance, recovery] = recovery_score(result.truth, result.truth);
    EXPECT_EQ(relevance, 1.0);
    EXPECT_EQ(recovery, 1.0);
}

TEST(RecoveryScore, DisjointScoresZeroAndEmptyFoundScoresZero) {
    Bicluster a, b;
    a.rows = {0, 1};
    a.cols = {0, 1};
    b.rows = {5, 6};
    b.cols = {3, 4};
    const auto [relevance, recovery] = recovery_score({a}, {b});
    EXPECT_EQ(relevance, 0.0);
    EXPECT_EQ(recovery, 0.0);
    const auto empty = recovery_score({}, {b});
    EXPECT_EQ(empty.first, 0.0);
    EXPECT_EQ(empty.second, 0.0);
}

TEST(RecoveryScore, HalfTheRowsScoresHalf) {
    Bicluster full, half;
    full.rows = {0, 1, 2, 3};
    full.cols = {0, 1, 2};
    half.rows = {0, 1};
    half.cols = {0, 1, 2};
    const auto [relevance, recovery] = recovery_score({half}, {full});
    EXPECT_NEAR(relevance, 0.5, 1e-12);
    EXPECT_NEAR(recovery, 0.5, 1e-12);
}

TEST(RecoveryScore, SwappingArgumentsSwapsTheScores) {
    std::mt19937_64 rng(15);
    for (int trial = 0; trial < 30; ++trial) {
        auto random_list = [&](int count) {
            std::vector<Bicluster> list(static_cast<std::size_t>(count));
            for (auto& bc : list) {
                const int r0 = static_cast<int>(rng() % 6);
                const int c0 = static_cast<int>(rng() % 4);
                for (int r = 0; r <= static_cast<int>(rng() % 4); ++r) bc.rows.push_back(r0 + r);
                for (int c = 0; c <= static_cast<int>(rng() % 3); ++c) bc.cols.push_back(c0 + c);
            }
            return list;
        };
        const auto found = random_list(1 + static_cast<int>(rng() % 3));
        const auto truth = random_list(1 + static_cast<int>(rng() % 3));
        const auto fwd = recovery_score(found, truth);
        const auto rev = recovery_score(truth, found);
        EXPECT_NEAR(fwd.first, rev.second, 1e-12);
        EXPECT_NEAR(fwd.second, rev.first, 1e-12);
        EXPECT_GE(fwd.first, 0.0);
        EXPECT_LE(fwd.first, 1.0);
        EXPECT_GE(fwd.second, 0.0);
        EXPECT_LE(fwd.second, 1.0);
    }
}

TEST(CompareMfd, ZeroFluctuationMethod) {
    std::vector<Bicluster> zeros(5);
    for (auto& bc : zeros) {
        bc.rows = {0};
        bc.cols = {0, 1};
        bc.mfd = 0.0;
    }
    const MfdReport report = compare_mfd({{"zeros", zeros}}, 5);
    ASSERT_EQ(report.entries.size(), 1u);
    EXPECT_EQ(report.entries[0].mean_mfd, 0.0);
    EXPECT_EQ(report.entries[0].stddev_mfd, 0.0);
    EXPECT_FALSE(report.entries[0].truncated);
}

TEST(CompareMfd, SingleBiclusterHasZeroStddev) {
    Bicluster bc;
    bc.rows = {0};
    bc.cols = {0, 1};
    bc.mfd = 12.5;
    const MfdReport report = compare_mfd({{"one", {bc}}}, 3);
    ASSERT_EQ(report.entries.size(), 1u);
    EXPECT_EQ(report.entries[0].mean_mfd, 12.5);
    EXPECT_EQ(report.entries[0].stddev_mfd, 0.0);
    EXPECT_TRUE(report.entries[0].truncated);
    EXPECT_EQ(report.entries[0].used, 1);
}

TEST(CompareMfd, PreservesMethodOrderAndTopK) {
    auto with_mfds = [](std::initializer_list<double> mfds) {
        std::vector<Bicluster> list;
        for (double v : mfds) {
            Bicluster bc;
            bc.rows = {0};
            bc.cols = {0, 1};
            bc.mfd = v;
            list.push_back(bc);
        }
        return list;
    };
    const MfdReport report = compare_mfd(
        {{"beta", with_mfds({4, 2, 8})}, {"alpha", with_mfds({1, 9, 5})}}, 2);
    ASSERT_EQ(report.entries.size(), 2u);
    EXPECT_EQ(report.top_k, 2);
    EXPECT_EQ(report.entries[0].name, "beta");
    EXPECT_EQ(report.entries[1].name, "alpha");
    EXPECT_NEAR(report.entries[0].mean_mfd, 3.0, 1e-12);  // top-2 of {2, 4, 8}
    EXPECT_NEAR(report.entries[1].mean_mfd, 3.0, 1e-12);  // top-2 of {1, 5, 9}
}
