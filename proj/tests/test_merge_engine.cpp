#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "pdmsort/merge_engine.hpp"

using namespace pdmsort;

namespace {

std::vector<Cell> sorted_cells(std::mt19937_64& rng, std::size_t n, std::uint32_t tag) {
    std::vector<Cell> v(n);
    for (std::size_t i = 0; i < n; ++i) {
        v[i].item = {rng() % 1000, (std::uint64_t{tag} << 32) | i};
        v[i].run = tag;
    }
    std::sort(v.begin(), v.end(), [](const Cell& a, const Cell& b) { return a.item < b.item; });
    return v;
}

}  // namespace

TEST(UnitMerge, MergesWithinFrames) {
    std::mt19937_64 rng(5);
    for (std::uint32_t unit : {1u, 2u, 4u}) {
        for (std::size_t ways : {2u, 3u}) {
            Machine m({256, 4, 4});
            std::vector<StripedRun> runs;
            std::vector<Cell> all;
            for (std::uint32_t w = 0; w < ways; ++w) {
                auto cells = sorted_cells(rng, 13 + 29 * w, w);
                all.insert(all.end(), cells.begin(), cells.end());
                runs.push_back(store_cells(m, cells));
            }
            std::vector<const StripedRun*> in;
            for (const auto& r : runs) {
                in.push_back(&r);
            }
            auto buf = m.reserve(static_cast<std::uint32_t>(ways * unit));
            auto out = unit_merge(m, in, unit, 4, buf.frames());
            std::sort(all.begin(), all.end(), [](const Cell& a, const Cell& b) { return a.item < b.item; });
            auto got = load_cells(m, out);
            ASSERT_EQ(got.size(), all.size());
            for (std::size_t i = 0; i < all.size(); ++i) {
                ASSERT_EQ(got[i].item, all[i].item);
            }
        }
    }
}

TEST(UnitMerge, TwoEqualInputsCostTwoSweeps) {
    // two sequences of l blocks: ceil(2l/D1) reads and as many writes
    std::mt19937_64 rng(1);
    Machine m({256, 4, 8});
    const std::size_t l = 32;
    auto a = store_cells(m, sorted_cells(rng, l * 4, 0));
    auto b = store_cells(m, sorted_cells(rng, l * 4, 1));
    const StripedRun* in[2] = {&a, &b};
    auto buf = m.reserve(16);
    unit_merge(m, in, 8, 8, buf.frames());
    EXPECT_EQ(m.stats().input_ops, 2 * l / 8);
    EXPECT_EQ(m.stats().output_ops, 2 * l / 8);
}

TEST(UnitMerge, RejectsWrongFrameCount) {
    Machine m({64, 4, 4});
    std::vector<Item> x{{1, 0}};
    auto a = store_striped(m, x);
    const StripedRun* in[2] = {&a, &a};
    auto buf = m.reserve(3);
    EXPECT_THROW(unit_merge(m, in, 2, 4, buf.frames()), std::invalid_argument);
}

TEST(UnitSplit, InvertsMergeWithNoMoreOps) {
    std::mt19937_64 rng(9);
    for (std::uint32_t unit : {1u, 3u, 4u}) {
        Machine m({256, 4, 4});
        auto ca = sorted_cells(rng, 57, 0);
        auto cb = sorted_cells(rng, 91, 1);
        auto a = store_cells(m, ca);
        auto b = store_cells(m, cb);
        const StripedRun* in[2] = {&a, &b};
        StripedRun merged;
        {
            auto buf = m.reserve(2 * unit);
            merged = unit_merge(m, in, unit, 4, buf.frames());
        }
        const auto merge_ops = m.stats().total_ops();
        m.reset_stats();
        auto sa = allocate_striped(m, ca.size());
        auto sb = allocate_striped(m, cb.size());
        const StripedRun* out[2] = {&sa, &sb};
        {
            auto buf = m.reserve(2 * unit);
            unit_split(m, merged, out, [](const Cell& c) -> std::size_t { return c.run; }, unit, buf.frames());
        }
        EXPECT_LE(m.stats().total_ops(), merge_ops) << "unit " << unit;
        auto ga = load_cells(m, sa);
        auto gb = load_cells(m, sb);
        ASSERT_EQ(ga.size(), ca.size());
        ASSERT_EQ(gb.size(), cb.size());
        for (std::size_t i = 0; i < ca.size(); ++i) {
            ASSERT_EQ(ga[i].item, ca[i].item);
        }
        for (std::size_t i = 0; i < cb.size(); ++i) {
            ASSERT_EQ(gb[i].item, cb[i].item);
        }
    }
}

TEST(UnitSplit, RejectsUncoveredParent) {
    Machine m({64, 4, 4});
    std::vector<Item> x{{1, 0}, {2, 1}};
    auto p = store_striped(m, x);
    auto a = allocate_striped(m, 1);
    const StripedRun* out[1] = {&a};
    auto buf = m.reserve(1);
    EXPECT_THROW(unit_split(m, p, out, [](const Cell&) -> std::size_t { return 0; }, 1, buf.frames()),
                 std::invalid_argument);
}
