#include <gtest/gtest.h>

#include "pdmsort/analysis.hpp"

using namespace pdmsort;

TEST(Analysis, SortUnit) {
    EXPECT_EQ(sort_unit(1u << 21, 1u << 14, 64), 131072u);
    const std::uint64_t M = 1024, B = 16, m = M / B;
    EXPECT_EQ(sort_unit(M + B, M, B), 4 * (m + 1));
    EXPECT_THROW(sort_unit(M, M, B), std::invalid_argument);
}

TEST(Analysis, GExamples) {
    EXPECT_EQ(g_of(Rational(5, 2)), Rational(0));
    EXPECT_EQ(g_of(Rational(1)), Rational(3, 2));
    EXPECT_EQ(g_of(Rational(8)), Rational(0));
    EXPECT_EQ(g_of(Rational(2)), Rational(1, 6));
    Rational prev = g_of(Rational(1));
    for (int k = 5; k <= 30; ++k) {
        Rational cur = g_of(Rational(k, 4));
        EXPECT_LE(cur, prev);
        prev = cur;
    }
}

TEST(Analysis, HExamples) {
    EXPECT_EQ(h_of(Rational(0)), Rational(1));
    EXPECT_EQ(h_of(Rational(1)), Rational(2));
    EXPECT_EQ(h_of(Rational(3, 4)), Rational(8, 5));
    EXPECT_EQ(h_of(Rational(-3)), Rational(1));
    EXPECT_EQ(h_of(Rational(7)), Rational(2));
    Rational prev = h_of(Rational(0));
    for (int k = 1; k <= 8; ++k) {
        Rational cur = h_of(Rational(k, 8));
        EXPECT_GT(cur, prev);
        prev = cur;
    }
}

TEST(Analysis, LeadingFactor) {
    EXPECT_DOUBLE_EQ(leading_factor(256, 64, 8), 3.0);
    EXPECT_DOUBLE_EQ(leading_factor(16, 4, 16), 4.5 * 2.0);
    EXPECT_DOUBLE_EQ(leading_factor(64, 4, 16), 3.0 * 12.0 / 7.0);  // 8D/B = 32, log_64 32 = 5/6
    EXPECT_DOUBLE_EQ(leading_factor(16, 64, 8), (3.0 + 1.0 / 6.0));
    for (std::uint64_t m : {16u, 64u, 256u}) {
        for (std::uint64_t B : {4u, 64u}) {
            for (std::uint64_t D : {2u, 4u, 8u, 16u}) {
                double f = leading_factor(m, B, D);
                EXPECT_GE(f, 3.0);
                EXPECT_LE(f, 9.0);
            }
        }
    }
}

TEST(Analysis, MergeCostTerms) {
    GuideParams p{8, 1, 2, 4, 4, 4, 4, 1, 3};
    auto t = predict_merge_costs(p, 1000, 100, 5, 2000, 16);
    EXPECT_DOUBLE_EQ(t.z_over_d4, 250.0);
    EXPECT_DOUBLE_EQ(t.z_over_d5, 250.0);
    EXPECT_DOUBLE_EQ(t.two_z_over_dbar, 1000.0);
    EXPECT_DOUBLE_EQ(t.two_y_over_d2, 50.0);
    EXPECT_DOUBLE_EQ(t.three_y_over_dl, 300.0);
    EXPECT_DOUBLE_EQ(t.total(), 1850.0);
    EXPECT_DOUBLE_EQ(t.slack, 16.0 * (5 + 125 + 1));
}

TEST(Analysis, PhasePredictions) {
    GuideParams p{8, 1, 2, 4, 4, 4, 4, 1, 3};
    GuidesortReport rep;
    rep.z = 400;
    rep.y = 100;
    rep.base_sample_blocks = 50;
    MergeRecord r;
    r.bundled_blocks = 10;
    r.sample_blocks = 100;
    r.leaves = 4;
    rep.merges.push_back(r);
    auto ph = predict_phases(p, rep, 400, 4);
    EXPECT_DOUBLE_EQ(ph.at("base"), 200.0 + 50.0);
    EXPECT_DOUBLE_EQ(ph.at("step1"), 5.0 + 100.0);  // 2*10/4 + 2*100*2/4
    EXPECT_DOUBLE_EQ(ph.at("step3"), ph.at("step1"));
    EXPECT_DOUBLE_EQ(ph.at("step2"), 50.0);
    EXPECT_DOUBLE_EQ(ph.at("step4"), 100.0 + 200.0 + 100.0);
    EXPECT_DOUBLE_EQ(ph.at("step5"), 200.0 + 100.0 + 100.0);
    EXPECT_DOUBLE_EQ(phase_slack(rep, 400, 16), 16.0 * (1 + 25 + 1));
}
