#include "pdmsort/baselines.hpp"

#include <algorithm>
#include <stdexcept>
#include <vector>

#include "pdmsort/merge_engine.hpp"

namespace pdmsort {

namespace {

// Forms sorted runs of `run_blocks` blocks, moving `unit` blocks per op,
// then merges them `arity` at a time until one run is left.
StripedRun merge_sort(Machine& machine, const StripedRun& input, std::uint64_t run_blocks, std::uint32_t unit,
                      std::uint64_t arity, BaselineReport* report) {
    const std::uint64_t B = machine.block_size();
    const std::uint32_t width = unit;
    BaselineReport local;
    BaselineReport& rep = report != nullptr ? *report : local;
    if (input.num_items == 0) {
        throw std::invalid_argument("sort of an empty sequence");
    }

    std::vector<StripedRun> runs;
    {
        PhaseScope phase(machine, "form");
        auto buf = machine.reserve(static_cast<std::uint32_t>(run_blocks));
        std::vector<Transfer> t;
        std::vector<Cell> cells;
        for (std::uint64_t first = 0; first < input.num_blocks; first += run_blocks) {
            const std::uint64_t cnt = std::min(run_blocks, input.num_blocks - first);
            const std::uint64_t items = std::min(cnt * B, input.num_items - first * B);
            for (std::uint64_t j = 0; j < cnt; j += unit) {
                t.clear();
                for (std::uint64_t i = j; i < std::min<std::uint64_t>(j + unit, cnt); ++i) {
                    auto a = input.block(first + i);
                    t.push_back({a.disk, a.frame, buf[i]});
                }
                machine.input(t);
            }
            cells.clear();
            for (std::uint64_t i = 0; i < cnt; ++i) {
                auto blk = machine.frame(buf[i]);
                std::uint64_t n = std::min<std::uint64_t>(B, items - i * B);
                cells.insert(cells.end(), blk.begin(), blk.begin() + static_cast<std::ptrdiff_t>(n));
            }
            std::sort(cells.begin(), cells.end(), [](const Cell& a, const Cell& b) { return a.item < b.item; });
            StripedRun run = allocate_striped(machine, items, width);
            StripedWriter writer(machine, run, buf.slice(0, std::min<std::uint64_t>(unit, run.num_blocks)));
            for (const auto& c : cells) {
                writer.push(c);
            }
            writer.finish();
            runs.push_back(std::move(run));
        }
    }
    rep.runs = runs.size();

    PhaseScope phase(machine, "merge");
    while (runs.size() > 1) {
        ++rep.levels;
        std::vector<StripedRun> next;
        for (std::size_t first = 0; first < runs.size(); first += arity) {
            const std::size_t cnt = std::min<std::size_t>(arity, runs.size() - first);
            if (cnt == 1) {
                next.push_back(runs[first]);
                continue;
            }
            std::vector<const StripedRun*> inputs;
            for (std::size_t i = 0; i < cnt; ++i) {
                inputs.push_back(&runs[first + i]);
            }
            auto buf = machine.reserve(static_cast<std::uint32_t>(cnt * unit));
            next.push_back(unit_merge(machine, inputs, unit, width, buf.frames()));
            ++rep.merge_nodes;
            for (const auto* r : inputs) {
                discard(machine, *r);
            }
        }
        runs = std::move(next);
    }
    return runs.front();
}

}  // namespace

StripedRun sequential_sort(Machine& machine, const StripedRun& input, BaselineReport* report) {
    return merge_sort(machine, input, machine.m(), 1, machine.m(), report);
}

StripedRun naive_striping_sort(Machine& machine, const StripedRun& input, std::uint64_t arity,
                               BaselineReport* report) {
    const std::uint64_t D = machine.disks();
    if (arity < 2) {
        throw std::invalid_argument("striping arity must be at least 2");
    }
    if (arity * D > machine.m()) {
        throw std::invalid_argument("striping arity too large for memory");
    }
    return merge_sort(machine, input, arity * D, static_cast<std::uint32_t>(D), arity, report);
}

std::uint64_t ceil_log(std::uint64_t base, std::uint64_t x) {
    if (base < 2) {
        throw std::invalid_argument("logarithm base must be at least 2");
    }
    std::uint64_t t = 0;
    unsigned __int128 p = 1;
    while (p < x) {
        p *= base;
        ++t;
    }
    return t;
}

std::uint64_t predicted_striping_ios(std::uint64_t n, std::uint64_t D, std::uint64_t arity) {
    const std::uint64_t super = ceil_div(n, D);
    return 2 * super * ceil_log(arity, super);
}

}  // namespace pdmsort
