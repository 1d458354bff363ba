#include <gtest/gtest.h>

#include "pdmsort/params.hpp"

using namespace pdmsort;

namespace {

// The four bullets, in exact integer form.
bool bullets_hold(std::uint64_t a, std::uint64_t b, std::uint64_t a2, std::uint64_t b2) {
    if (a2 == 0 || b2 == 0) return false;
    const bool divides = b2 % a2 == 0 || a2 % b2 == 0;
    const bool a_close = 2 * a2 > a && a2 <= a;
    // b' > b/2, b' > b - sqrt(b) (as (b - b')^2 < b), b' <= b
    const bool b_close = 2 * b2 > b && b2 <= b && (b - b2) * (b - b2) < b;
    const auto sign = [](std::int64_t x) { return (x > 0) - (x < 0); };
    const bool same_side = sign(static_cast<std::int64_t>(a) - static_cast<std::int64_t>(b)) *
                               sign(static_cast<std::int64_t>(a2) - static_cast<std::int64_t>(b2)) >=
                           0;
    return divides && a_close && b_close && same_side;
}

using U64Pair = std::pair<std::uint64_t, std::uint64_t>;

}  // namespace

TEST(Lemma1, Examples) {
    EXPECT_EQ(lemma1_f(1, 7), (U64Pair{1, 7}));
    EXPECT_EQ(lemma1_f(10, 4), (U64Pair{8, 4}));
    EXPECT_EQ(lemma1_f(3, 10), (U64Pair{3, 9}));
    EXPECT_EQ(lemma1_f(5, 30), (U64Pair{5, 30}));
    EXPECT_THROW(lemma1_f(0, 3), ParamsError);
}

TEST(Lemma1, BulletsOnSmallGrid) {
    for (std::uint64_t a = 1; a <= 300; ++a) {
        for (std::uint64_t b = 1; b <= 300; ++b) {
            auto [a2, b2] = lemma1_f(a, b);
            ASSERT_TRUE(bullets_hold(a, b, a2, b2)) << a << "," << b << " -> " << a2 << "," << b2;
        }
    }
}

TEST(Isqrt, Floors) {
    for (std::uint64_t x = 0; x < 5000; ++x) {
        auto r = isqrt(x);
        ASSERT_LE(r * r, x);
        ASSERT_GT((r + 1) * (r + 1), x);
    }
    EXPECT_EQ(isqrt(~std::uint64_t{0}), 4294967295u);
}

TEST(General, HandEvaluatedExamples) {
    auto p = compute_params_general(16, 4, 4, true);
    EXPECT_EQ(p, (GuideParams{8, 1, 2, 4, 4, 4, 4, 1, 3}));

    auto q = compute_params_general(256, 64, 8, true);
    EXPECT_EQ(q, (GuideParams{242, 1, 4, 8, 8, 8, 8, 1, 12}));
    EXPECT_EQ(q.r * q.s + q.dbar + q.d5 + 2 * q.dl, 256u);

    auto w = compute_params_general(16, 4, 16, true);
    EXPECT_EQ(w.dl, 2u);
    EXPECT_EQ(w.dbar, 7u);
    EXPECT_EQ(w.d5, 2u);
    EXPECT_EQ(w.r, 3u);
    EXPECT_EQ(w.d2, 10u);
    EXPECT_EQ(w.d4, 14u);
    EXPECT_EQ(w.q, 6u);
}

TEST(General, PreconditionsAndErrors) {
    EXPECT_THROW(compute_params_general(16, 16, 32), ParamsError);
    EXPECT_THROW(compute_params_general(16, 4, 4), ParamsError);  // B < 16 without unchecked
    EXPECT_NO_THROW(compute_params_general(64, 64, 16));
    EXPECT_EQ(compute_params_general(64, 64, 16), compute_params_general(64, 64, 16));
}

TEST(General, PowerOfTwoRegimeValid) {
    for (std::uint64_t m = 8; m <= 1024; m *= 2) {
        for (std::uint64_t B : {16u, 64u, 256u}) {
            for (std::uint64_t D = 4; D <= m; D *= 2) {
                if (D * D < m) continue;
                auto p = compute_params_general(m, B, D);
                EXPECT_TRUE(validate_params(p, m, B, D).empty()) << m << " " << B << " " << D;
            }
        }
    }
}

TEST(Simple, Examples) {
    auto p = compute_params_simple(64, 8, 8);
    EXPECT_EQ(p.s, 1u);
    EXPECT_EQ(p.dbar, 4u);
    EXPECT_EQ(p.r, 32u);
    EXPECT_EQ(p.d2, 8u);
    EXPECT_EQ(p.d5, 8u);
    EXPECT_EQ(p.dl, 8u);
    EXPECT_EQ(p.d4, 8u);
    EXPECT_EQ(p.q, 13u);
    EXPECT_THROW(compute_params_simple(16, 4, 4), ParamsError);
    auto s = compute_params_simple(48, 8, 8);
    EXPECT_EQ(s.r, 16u);
    EXPECT_EQ(s.dbar, 4u);
}

TEST(Simple, OddAndUnitDiskCounts) {
    auto p = compute_params_simple(64, 8, 5);
    EXPECT_EQ(p.dbar, 2u);
    EXPECT_EQ(p.d4, 4u);
    auto one = compute_params_simple(16, 4, 1);
    EXPECT_EQ(one.dbar, 1u);
    EXPECT_EQ(one.d4, 1u);
    EXPECT_EQ(one.r, 12u);
}

TEST(Validate, NamesEachViolation) {
    auto p = compute_params_simple(64, 8, 8);
    EXPECT_TRUE(validate_params(p, 64, 8, 8).empty());

    auto wide = p;
    wide.dbar = 8;
    wide.q = 29;
    EXPECT_EQ(validate_params(wide, 64, 8, 8), std::vector<std::string>{"D̄ ≤ ⌈D/2⌉ violated"});

    GuideParams odd{16, 2, 3, 8, 8, 6, 8, 8, 3};
    EXPECT_EQ(validate_params(odd, 64, 8, 8), std::vector<std::string>{"s | D̄ violated"});

    auto big = p;
    big.r = 37;
    big.q = 15;  // ceil(38*3/8)
    EXPECT_EQ(validate_params(big, 64, 8, 8), std::vector<std::string>{"r·s + D̄ + D5 + 2·D_L ≤ m violated"});
}

TEST(Select, Routing) {
    EXPECT_TRUE(std::holds_alternative<SequentialPlan>(select_algorithm(3, 4, 2, Mode::Auto)));
    auto s = select_algorithm(64, 16, 4, Mode::Auto);
    ASSERT_TRUE(std::holds_alternative<StripingPlan>(s));
    EXPECT_EQ(std::get<StripingPlan>(s).arity, 8u);
    auto t = select_algorithm(256, 64, 8, Mode::Auto);
    ASSERT_TRUE(std::holds_alternative<StripingPlan>(t));
    EXPECT_EQ(std::get<StripingPlan>(t).arity, 16u);
    auto g = select_algorithm(64, 64, 16, Mode::Auto);
    ASSERT_TRUE(std::holds_alternative<GuidesortPlan>(g));
    EXPECT_FALSE(std::get<GuidesortPlan>(g).simple);
    EXPECT_FALSE(std::get<GuidesortPlan>(g).unchecked);
}

TEST(Select, ForcedModes) {
    EXPECT_THROW(select_algorithm(16, 4, 4, Mode::Simple), ParamsError);
    auto f = select_algorithm(16, 4, 4, Mode::Striping);
    EXPECT_EQ(std::get<StripingPlan>(f).arity, 4u);
    EXPECT_THROW(select_algorithm(16, 4, 16, Mode::Striping), ParamsError);
    auto g = select_algorithm(16, 4, 4, Mode::General);
    EXPECT_TRUE(std::get<GuidesortPlan>(g).unchecked);
    EXPECT_TRUE(std::holds_alternative<SequentialPlan>(select_algorithm(1024, 16, 4, Mode::Sequential)));
}

TEST(Select, AutoRegionsPartition) {
    for (std::uint64_t m = 2; m <= 300; ++m) {
        for (std::uint64_t D = 1; D <= m; ++D) {
            AlgorithmPlan plan;
            try {
                plan = select_algorithm(m, 64, D, Mode::Auto);
            } catch (const ParamsError&) {
                // Guidesort region outside the supported parameter range
                ASSERT_GT(D * D, m);
                continue;
            }
            const int region = m <= 3 ? 0 : (D * D <= m ? 1 : 2);
            ASSERT_EQ(static_cast<int>(plan.index()), region) << m << " " << D;
        }
    }
}
