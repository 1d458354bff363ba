#include "pdmsort/merge_engine.hpp"

#include <algorithm>
#include <deque>
#include <queue>
#include <stdexcept>
#include <vector>

namespace pdmsort {

namespace {

struct InStream {
    const StripedRun* run = nullptr;
    std::uint64_t next_block = 0;
    std::uint64_t loaded_items = 0;  // items read so far
    std::vector<Cell> buf;
    std::size_t pos = 0;

    std::size_t buffered() const { return buf.size() - pos; }
    bool has_more_blocks() const { return next_block < run->num_blocks; }
};

struct HeapEntry {
    Item item;
    std::uint32_t stream;
    bool operator>(const HeapEntry& o) const { return item > o.item; }
};

// Writes `cells` (at most frames.size() blocks worth) to consecutive blocks
// of `target` starting at `first_block`.
void write_superblock(Machine& machine, const StripedRun& target, std::uint64_t first_block,
                      std::span<const Cell> cells, std::span<const std::uint32_t> frames,
                      std::vector<Transfer>& scratch) {
    const std::uint64_t B = machine.block_size();
    std::uint64_t blocks = ceil_div(cells.size(), B);
    scratch.clear();
    for (std::uint64_t i = 0; i < blocks; ++i) {
        auto dst = machine.frame(frames[i]);
        std::uint64_t first = i * B;
        std::uint64_t n = std::min<std::uint64_t>(B, cells.size() - first);
        std::copy_n(cells.begin() + static_cast<std::ptrdiff_t>(first), n, dst.begin());
        std::fill(dst.begin() + static_cast<std::ptrdiff_t>(n), dst.end(), kDummyCell);
        auto a = target.block(first_block + i);
        scratch.push_back({a.disk, a.frame, frames[i]});
    }
    machine.output(scratch);
}

// Reads up to `unit` blocks of `run` starting at `first_block`; appends the
// real cells to `out`.
std::uint64_t read_superblock(Machine& machine, const StripedRun& run, std::uint64_t first_block,
                              std::uint32_t unit, std::span<const std::uint32_t> frames,
                              std::vector<Cell>& out, std::vector<Transfer>& scratch) {
    const std::uint64_t B = machine.block_size();
    std::uint64_t blocks = std::min<std::uint64_t>(unit, run.num_blocks - first_block);
    scratch.clear();
    for (std::uint64_t i = 0; i < blocks; ++i) {
        auto a = run.block(first_block + i);
        scratch.push_back({a.disk, a.frame, frames[i]});
    }
    machine.input(scratch);
    for (std::uint64_t i = 0; i < blocks; ++i) {
        std::uint64_t first = (first_block + i) * B;
        std::uint64_t n = std::min<std::uint64_t>(B, run.num_items - first);
        auto src = machine.frame(frames[i]);
        out.insert(out.end(), src.begin(), src.begin() + static_cast<std::ptrdiff_t>(n));
    }
    return blocks;
}

void check_room(std::uint64_t occupied_cells, std::uint64_t incoming_blocks, std::uint64_t B,
                std::size_t frames) {
    if (ceil_div(occupied_cells, B) + incoming_blocks > frames) {
        throw MemoryBudgetError("buffered merge/split would overflow its frames");
    }
}

}  // namespace

StripedRun unit_merge(Machine& machine, std::span<const StripedRun* const> inputs, std::uint32_t unit,
                      std::uint32_t out_width, std::span<const std::uint32_t> frames) {
    const std::uint64_t B = machine.block_size();
    if (unit == 0 || unit > machine.disks()) {
        throw std::invalid_argument("merge unit must be in [1, D]");
    }
    if (frames.size() != inputs.size() * unit) {
        throw std::invalid_argument("merge needs exactly inputs * unit frames");
    }
    std::uint64_t total = 0;
    for (const auto* r : inputs) {
        total += r->num_items;
    }
    StripedRun out = allocate_striped(machine, total, out_width);
    if (total == 0) {
        return out;
    }

    std::vector<InStream> streams(inputs.size());
    std::deque<std::uint32_t> pending;
    for (std::uint32_t i = 0; i < inputs.size(); ++i) {
        streams[i].run = inputs[i];
        if (inputs[i]->num_items > 0) {
            pending.push_back(i);
        }
    }
    std::priority_queue<HeapEntry, std::vector<HeapEntry>, std::greater<>> heap;
    std::vector<Cell> outbuf;
    const std::uint64_t out_cap = static_cast<std::uint64_t>(unit) * B;
    outbuf.reserve(out_cap);
    std::uint64_t out_block = 0;
    std::vector<Transfer> scratch;
    std::uint64_t occupied = 0;

    for (;;) {
        if (outbuf.size() == out_cap) {
            write_superblock(machine, out, out_block, outbuf, frames, scratch);
            out_block += unit;
            occupied -= outbuf.size();
            outbuf.clear();
        } else if (!pending.empty()) {
            auto& s = streams[pending.front()];
            pending.pop_front();
            std::uint64_t blocks = std::min<std::uint64_t>(unit, s.run->num_blocks - s.next_block);
            check_room(occupied, blocks, B, frames.size());
            s.buf.clear();
            s.pos = 0;
            read_superblock(machine, *s.run, s.next_block, unit, frames, s.buf, scratch);
            s.next_block += blocks;
            occupied += s.buf.size();
            heap.push({s.buf[0].item, static_cast<std::uint32_t>(&s - streams.data())});
        } else if (heap.empty()) {
            break;
        } else {
            auto top = heap.top();
            heap.pop();
            auto& s = streams[top.stream];
            outbuf.push_back(s.buf[s.pos++]);
            if (s.pos < s.buf.size()) {
                heap.push({s.buf[s.pos].item, top.stream});
            } else if (s.has_more_blocks()) {
                pending.push_back(top.stream);
            }
        }
    }
    if (!outbuf.empty()) {
        write_superblock(machine, out, out_block, outbuf, frames, scratch);
    }
    return out;
}

void unit_split(Machine& machine, const StripedRun& parent, std::span<const StripedRun* const> children,
                const std::function<std::size_t(const Cell&)>& child_of, std::uint32_t unit,
                std::span<const std::uint32_t> frames) {
    const std::uint64_t B = machine.block_size();
    const std::uint64_t sb_items = static_cast<std::uint64_t>(unit) * B;
    if (frames.size() != children.size() * unit) {
        throw std::invalid_argument("split needs exactly children * unit frames");
    }
    std::uint64_t total = 0;
    for (const auto* c : children) {
        total += c->num_items;
    }
    if (total != parent.num_items) {
        throw std::invalid_argument("split children do not cover the parent");
    }

    struct OutStream {
        const StripedRun* run;
        std::uint64_t superblock;  // index of the superblock being filled
        bool active;
        std::vector<Cell> buf;     // size of the current superblock
        std::uint64_t filled = 0;  // filled from the back
    };
    auto superblock_items = [&](const StripedRun& r, std::uint64_t k) {
        std::uint64_t first = k * sb_items;
        return std::min<std::uint64_t>(sb_items, r.num_items - first);
    };
    std::vector<OutStream> outs;
    outs.reserve(children.size());
    for (const auto* c : children) {
        OutStream o{c, 0, c->num_items > 0, {}, 0};
        if (o.active) {
            o.superblock = ceil_div(c->num_items, sb_items) - 1;
            o.buf.resize(superblock_items(*c, o.superblock));
        }
        outs.push_back(std::move(o));
    }

    std::uint64_t parent_superblocks = ceil_div(parent.num_items, sb_items);
    std::uint64_t next_parent = parent_superblocks;  // superblocks [next_parent, end) are read
    std::vector<Cell> pbuf;
    std::vector<Transfer> scratch;
    std::uint64_t occupied = 0;
    std::size_t just_filled = children.size();

    for (;;) {
        if (just_filled < outs.size()) {
            auto& o = outs[just_filled];
            just_filled = outs.size();
            if (o.filled == o.buf.size()) {
                write_superblock(machine, *o.run, o.superblock * unit, o.buf, frames, scratch);
                occupied -= o.buf.size();
                if (o.superblock == 0) {
                    o.active = false;
                    o.buf.clear();
                } else {
                    --o.superblock;
                    o.buf.assign(superblock_items(*o.run, o.superblock), Cell{});
                }
                o.filled = 0;
                continue;
            }
        }
        if (pbuf.empty()) {
            if (next_parent == 0) {
                break;
            }
            --next_parent;
            std::uint64_t blocks = std::min<std::uint64_t>(unit, parent.num_blocks - next_parent * unit);
            check_room(occupied, blocks, B, frames.size());
            read_superblock(machine, parent, next_parent * unit, unit, frames, pbuf, scratch);
            occupied += pbuf.size();
            continue;
        }
        Cell c = pbuf.back();
        pbuf.pop_back();
        std::size_t k = child_of(c);
        if (k >= outs.size() || !outs[k].active) {
            throw std::logic_error("split: cell routed to an unknown or complete child");
        }
        auto& o = outs[k];
        o.buf[o.buf.size() - 1 - o.filled] = c;
        ++o.filled;
        just_filled = k;
    }
    for (const auto& o : outs) {
        if (o.active) {
            throw std::logic_error("split: child not completely filled");
        }
    }
}

}  // namespace pdmsort
