#pragma once

#include <compare>
#include <cstdint>
#include <limits>

namespace pdmsort {

/// A record to be sorted. Keys may repeat; the tiebreak (the record's
/// position in the input) makes every (key, tiebreak) pair distinct.
struct Item {
    std::uint64_t key = 0;
    std::uint64_t tiebreak = 0;

    friend constexpr auto operator<=>(const Item&, const Item&) = default;
};

/// Padding beyond the last real item of a sequence. Compares greater than
/// every real item.
inline constexpr Item kDummyItem{std::numeric_limits<std::uint64_t>::max(),
                                 std::numeric_limits<std::uint64_t>::max()};

constexpr bool is_dummy(const Item& x) { return x == kDummyItem; }

/// One cell of a block frame. Data runs only use `item`. Samples, the
/// canonical sequence and guides store leader records, which additionally
/// carry the source run, the segment ordinal and (once colored) the color
/// group and per-color index. The tags are bookkeeping; a leader record
/// occupies one cell like a data item.
struct Cell {
    Item item;
    std::uint32_t run = 0;
    std::uint32_t seg = 0;
    std::uint32_t color = 0;
    std::uint32_t index = 0;
};

inline constexpr Cell kDummyCell{kDummyItem, 0, 0, 0, 0};

}  // namespace pdmsort
