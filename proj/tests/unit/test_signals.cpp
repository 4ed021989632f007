#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <random>

#include "oracles.hpp"
#include "pcs/signals.hpp"

using namespace pcs;

TEST(LevelPartition, EqualSplitsAndValidation) {
    const auto p = LevelPartition::equal(10, 3);
    EXPECT_EQ(p.level(0).size(), 4u);
    EXPECT_EQ(p.level(1).size(), 3u);
    EXPECT_EQ(p.level(2).size(), 3u);
    for (Index i = 0; i < 10; ++i) EXPECT_EQ(p.level_of(i), i < 4 ? 0 : (i < 7 ? 1 : 2));
    EXPECT_THROW(LevelPartition(4, {{0, 1}, {1, 2, 3}}), ConfigError);
    EXPECT_THROW(LevelPartition(4, {{0, 1}, {2}}), ConfigError);
    EXPECT_THROW(LevelPartition(4, {{0, 1, 2, 3}, {}}), ConfigError);
    EXPECT_THROW(LevelPartition::equal(4, 5), ConfigError);
}

TEST(DrawSparse, Extremes) {
    const auto dense = draw_sparse(12, 12, 1);
    EXPECT_EQ(dense.support.size(), 12u);
    for (Index i = 0; i < 12; ++i) EXPECT_NEAR(std::abs(dense.x(i)), 1.0, 1e-15);
    const auto one = draw_sparse(12, 1, 2);
    EXPECT_EQ(support_of(one.x).size(), 1u);
    EXPECT_EQ(draw_sparse(5, 0, 1).x.norm(), 0.0);
    EXPECT_THROW(draw_sparse(5, 6, 1), ConfigError);
    EXPECT_THROW(draw_sparse(5, -1, 1), ConfigError);
}

TEST(DrawSparse, DeterministicAndLaws) {
    EXPECT_EQ(draw_sparse(20, 5, 9).x, draw_sparse(20, 5, 9).x);
    const auto g = draw_sparse(20, 5, 9, ValueLaw::gaussian);
    EXPECT_EQ(g.support.size(), 5u);
    EXPECT_EQ(support_of(g.x), g.support);
}

TEST(DrawSparse, UniformSupportFrequencies) {
    const int draws = 10000;
    std::vector<int> hits(16, 0);
    for (int t = 0; t < draws; ++t)
        for (Index i : draw_sparse(16, 4, 1000 + static_cast<std::uint64_t>(t)).support) ++hits[static_cast<std::size_t>(i)];
    const double p = 4.0 / 16.0;
    const double sigma = std::sqrt(draws * p * (1 - p));
    for (int h : hits) EXPECT_LE(std::abs(h - draws * p), 3.0 * sigma);
}

TEST(DrawSparseDistributed, VacuousWhenLambdaIsD) {
    const auto part = LevelPartition::equal(16, 4);
    const int draws = 8000;
    std::vector<int> hits(16, 0);
    for (int t = 0; t < draws; ++t) {
        const auto s = draw_sparse_distributed(part, 4, 4.0, static_cast<std::uint64_t>(t));
        for (Index i : s.support) ++hits[static_cast<std::size_t>(i)];
    }
    const double p = 0.25, sigma = std::sqrt(draws * p * (1 - p));
    for (int h : hits) EXPECT_LE(std::abs(h - draws * p), 4.0 * sigma);
    // Some draws put all four entries into one level.
    bool concentrated = false;
    for (int t = 0; t < 2000 && !concentrated; ++t) {
        const auto s = draw_sparse_distributed(part, 4, 4.0, static_cast<std::uint64_t>(t));
        for (Index c : s.level_counts) concentrated = concentrated || c == 4;
    }
    EXPECT_TRUE(concentrated);
}

TEST(DrawSparseDistributed, LambdaOneOnePerLevel) {
    const auto part = LevelPartition::equal(20, 5);
    for (int t = 0; t < 200; ++t) {
        const auto s = draw_sparse_distributed(part, 5, 1.0, static_cast<std::uint64_t>(t));
        for (Index c : s.level_counts) EXPECT_EQ(c, 1);
    }
}

TEST(DrawSparseDistributed, CapsHold) {
    const auto part = LevelPartition::equal(32, 4);
    for (int t = 0; t < 1000; ++t) {
        const auto s = draw_sparse_distributed(part, 8, 2.0, static_cast<std::uint64_t>(t));
        EXPECT_EQ(s.support.size(), 8u);
        for (Index c : s.level_counts) EXPECT_LE(c, 4);
        EXPECT_TRUE(is_sparse_distributed(s.x, 8, 2.0, part));
        EXPECT_EQ(s.model, SignalModel::distributed);
    }
}

TEST(DrawSparseDistributed, UniformOverAdmissibleSupports) {
    // N=6, two levels of 3, s=3, lambda=1.5: cap 2, so 18 admissible supports.
    const auto part = LevelPartition::equal(6, 2);
    std::map<std::vector<Index>, int> counts;
    const int draws = 18000;
    for (int t = 0; t < draws; ++t) ++counts[draw_sparse_distributed(part, 3, 1.5, static_cast<std::uint64_t>(t)).support];
    ASSERT_EQ(counts.size(), 18u);
    double chi2 = 0.0;
    for (const auto& [support, n] : counts) chi2 += (n - 1000.0) * (n - 1000.0) / 1000.0;
    EXPECT_LE(chi2, 40.79);  // 17 degrees of freedom, 0.1% level
}

TEST(DrawSparseDistributed, Errors) {
    const auto part = LevelPartition::equal(8, 4);
    EXPECT_THROW(draw_sparse_distributed(part, 2, 0.5, 1), ConfigError);  // lambda < 1
    EXPECT_THROW(draw_sparse_distributed(part, 2, 5.0, 1), ConfigError);  // lambda > D
    EXPECT_THROW(draw_sparse_distributed(part, 1, 1.0, 1), ConfigError);  // cap floor(1/4) = 0
    EXPECT_THROW(draw_sparse_distributed(LevelPartition(8, {{0}, {1, 2, 3, 4, 5, 6, 7}}), 6, 1.0, 1), ConfigError);
    EXPECT_EQ(distributed_cap(8, 2.0, 4), 4);
    EXPECT_EQ(distributed_cap(3, 1.5, 2), 2);
}

TEST(BestSTerm, Examples) {
    CVector x(3);
    x << 3.0, 2.0, 1.0;
    EXPECT_DOUBLE_EQ(best_s_term_error(x, 1), 3.0);
    EXPECT_DOUBLE_EQ(best_s_term_error(x, 3), 0.0);
    EXPECT_DOUBLE_EQ(best_s_term_error(draw_sparse(30, 6, 3).x, 6), 0.0);
}

TEST(BestSTerm, MatchesBruteForce) {
    std::mt19937_64 rng(12);
    for (int t = 0; t < 30; ++t) {
        const CVector x = oracle::random_complex(8, rng);
        double prev = 1e300;
        for (Index s = 0; s <= 8; ++s) {
            const double got = best_s_term_error(x, s);
            EXPECT_NEAR(got, oracle::brute_best_s_term(x, s), 1e-12);
            EXPECT_LE(got, prev);
            prev = got;
        }
        EXPECT_EQ(best_s_term_error(x, 8), 0.0);
    }
}

TEST(BestDistributed, ForcedByCaps) {
    // All mass in level 0, cap floor(lambda s / D) = 2.
    const auto part = LevelPartition::equal(8, 2);
    CVector x = CVector::Zero(8);
    x(0) = 4.0;
    x(1) = 3.0;
    x(2) = 2.0;
    x(3) = 1.0;
    EXPECT_DOUBLE_EQ(best_distributed_error(x, 4, 1.0, part), 3.0);
    EXPECT_EQ(best_distributed_support(x, 4, 1.0, part), (std::vector<Index>{0, 1}));
    EXPECT_DOUBLE_EQ(best_distributed_error(x, 2, 2.0, part), 3.0);
}

TEST(BestDistributed, MemberHasZeroError) {
    const auto part = LevelPartition::equal(32, 4);
    const auto s = draw_sparse_distributed(part, 8, 2.0, 3);
    EXPECT_DOUBLE_EQ(best_distributed_error(s.x, 8, 2.0, part), 0.0);
}

TEST(BestDistributed, MatchesBruteForceAndOrdering) {
    const auto part = LevelPartition::equal(8, 2);
    std::vector<Index> owner(8);
    for (Index i = 0; i < 8; ++i) owner[static_cast<std::size_t>(i)] = part.level_of(i);
    std::mt19937_64 rng(13);
    for (int t = 0; t < 40; ++t) {
        const CVector x = oracle::random_complex(8, rng);
        for (Index s = 1; s <= 8; ++s)
            for (double lambda : {1.0, 1.25, 1.5, 1.75, 2.0}) {
                const Index cap = static_cast<Index>(std::floor(lambda * static_cast<double>(s) / 2.0 + 1e-9));
                const double brute = cap >= 1 ? oracle::brute_best_distributed(x, s, cap, owner, 2) : -1.0;
                if (brute < 0.0) {
                    EXPECT_THROW(best_distributed_error(x, s, lambda, part), ConfigError);
                    continue;
                }
                const double got = best_distributed_error(x, s, lambda, part);
                EXPECT_NEAR(got, brute, 1e-12);
                EXPECT_GE(got, best_s_term_error(x, s) - 1e-12);
            }
        for (Index s = 1; s <= 8; ++s)
            EXPECT_NEAR(best_distributed_error(x, s, 2.0, part), best_s_term_error(x, s), 1e-12);
    }
}

TEST(BestDistributed, TiesGoToLowerIndex) {
    const auto part = LevelPartition::equal(4, 1);
    const CVector x = CVector::Ones(4);
    EXPECT_EQ(best_distributed_support(x, 2, 1.0, part), (std::vector<Index>{0, 1}));
}

TEST(Membership, Checks) {
    const auto part = LevelPartition::equal(8, 2);
    CVector x = CVector::Zero(8);
    x(0) = x(1) = x(2) = 1.0;
    EXPECT_FALSE(is_sparse_distributed(x, 3, 1.0, part));  // cap 1
    EXPECT_TRUE(is_sparse_distributed(x, 3, 2.0, part));
    EXPECT_FALSE(is_sparse_distributed(x, 2, 2.0, part));  // too many nonzeros
}
