#include "pdmsort/striped.hpp"

#include <algorithm>
#include <stdexcept>

namespace pdmsort {

BlockView BlockView::sub(std::uint64_t first, std::uint64_t count, std::uint64_t block_size) const {
    if (first + count > num_blocks) {
        throw std::out_of_range("block view range");
    }
    std::uint64_t begin_item = first * block_size;
    std::uint64_t end_item = std::min(num_items, (first + count) * block_size);
    return {run, first_block + first, count, end_item > begin_item ? end_item - begin_item : 0};
}

StripedRun allocate_striped(Machine& machine, std::uint64_t num_items, std::uint32_t width) {
    if (width == 0) {
        width = machine.disks();
    }
    if (width > machine.disks()) {
        throw std::invalid_argument("stripe width exceeds the number of disks");
    }
    StripedRun run;
    run.width = width;
    run.num_items = num_items;
    run.num_blocks = ceil_div(num_items, machine.block_size());
    run.start_frames.assign(width, 0);
    for (std::uint32_t d = 0; d < width; ++d) {
        std::uint64_t frames = run.num_blocks > d ? ceil_div(run.num_blocks - d, width) : 0;
        run.start_frames[d] = machine.alloc_region(d, frames);
    }
    return run;
}

StripedRun store_cells(Machine& machine, std::span<const Cell> cells, StoreMode mode, std::uint32_t width) {
    StripedRun run = allocate_striped(machine, cells.size(), width);
    const std::uint64_t B = machine.block_size();
    if (mode == StoreMode::Harness) {
        for (std::uint64_t j = 0; j < run.num_blocks; ++j) {
            auto a = run.block(j);
            std::uint64_t first = j * B;
            std::uint64_t n = std::min<std::uint64_t>(B, cells.size() - first);
            machine.poke(a.disk, a.frame, cells.subspan(first, n));
        }
        return run;
    }
    if (run.num_blocks == 0) {
        return run;
    }
    auto frames = machine.reserve(static_cast<std::uint32_t>(std::min<std::uint64_t>(run.width, run.num_blocks)));
    StripedWriter writer(machine, run, frames.frames());
    for (const auto& c : cells) {
        writer.push(c);
    }
    writer.finish();
    return run;
}

StripedRun store_striped(Machine& machine, std::span<const Item> items, StoreMode mode) {
    std::vector<Cell> cells(items.size());
    for (std::size_t i = 0; i < items.size(); ++i) {
        cells[i].item = items[i];
    }
    return store_cells(machine, cells, mode);
}

std::vector<Cell> load_cells(const Machine& machine, const StripedRun& run) {
    std::vector<Cell> out;
    out.reserve(run.num_items);
    const std::uint64_t B = machine.block_size();
    for (std::uint64_t j = 0; j < run.num_blocks; ++j) {
        auto a = run.block(j);
        auto blk = machine.peek(a.disk, a.frame);
        std::uint64_t n = std::min<std::uint64_t>(B, run.num_items - j * B);
        out.insert(out.end(), blk.begin(), blk.begin() + static_cast<std::ptrdiff_t>(n));
    }
    return out;
}

std::vector<Item> load_striped(const Machine& machine, const StripedRun& run) {
    auto cells = load_cells(machine, run);
    std::vector<Item> out(cells.size());
    std::transform(cells.begin(), cells.end(), out.begin(), [](const Cell& c) { return c.item; });
    return out;
}

void discard(Machine& machine, const StripedRun& run) {
    for (std::uint64_t j = 0; j < run.num_blocks; ++j) {
        auto a = run.block(j);
        machine.discard(a.disk, a.frame);
    }
}

// --- StripedReader ---------------------------------------------------------

StripedReader::StripedReader(Machine& machine, BlockView view, std::span<const std::uint32_t> frames)
    : machine_(machine), view_(view), frames_(frames) {
    if (frames_.empty()) {
        throw std::invalid_argument("reader needs at least one frame");
    }
    scratch_.reserve(frames_.size());
}

void StripedReader::refill() {
    const std::uint64_t B = machine_.block_size();
    std::uint64_t count = std::min<std::uint64_t>(frames_.size(), view_.num_blocks - next_block_);
    scratch_.clear();
    for (std::uint64_t i = 0; i < count; ++i) {
        auto a = view_.block(next_block_ + i);
        scratch_.push_back({a.disk, a.frame, frames_[i]});
    }
    machine_.input(scratch_);
    next_block_ += count;
    buffered_ = std::min<std::uint64_t>(count * B, view_.num_items - consumed_);
    pos_ = 0;
}

const Cell& StripedReader::peek() {
    if (done()) {
        throw std::out_of_range("reader exhausted");
    }
    if (buffered_ == 0) {
        refill();
    }
    const std::uint64_t B = machine_.block_size();
    return machine_.frame(frames_[pos_ / B])[pos_ % B];
}

Cell StripedReader::pop() {
    Cell c = peek();
    ++pos_;
    --buffered_;
    ++consumed_;
    return c;
}

// --- StripedWriter ---------------------------------------------------------

StripedWriter::StripedWriter(Machine& machine, const StripedRun& target, std::span<const std::uint32_t> frames)
    : machine_(machine), target_(target), frames_(frames) {
    if (frames_.empty() || frames_.size() > target.width) {
        throw std::invalid_argument("writer frame count must be in [1, width]");
    }
    scratch_.reserve(frames_.size());
}

void StripedWriter::push(const Cell& cell) {
    if (written_ + fill_ >= target_.num_items) {
        throw std::out_of_range("writer target is full");
    }
    const std::uint64_t B = machine_.block_size();
    machine_.frame(frames_[fill_ / B])[fill_ % B] = cell;
    ++fill_;
    if (fill_ == frames_.size() * B) {
        flush(frames_.size());
    }
}

void StripedWriter::flush(std::uint64_t blocks) {
    scratch_.clear();
    for (std::uint64_t i = 0; i < blocks; ++i) {
        auto a = target_.block(next_block_ + i);
        scratch_.push_back({a.disk, a.frame, frames_[i]});
    }
    machine_.output(scratch_);
    next_block_ += blocks;
    written_ += fill_;
    fill_ = 0;
}

void StripedWriter::finish() {
    if (fill_ > 0) {
        const std::uint64_t B = machine_.block_size();
        std::uint64_t blocks = ceil_div(fill_, B);
        for (std::uint64_t p = fill_; p < blocks * B; ++p) {
            machine_.frame(frames_[p / B])[p % B] = kDummyCell;
        }
        flush(blocks);
    }
    if (written_ != target_.num_items) {
        throw std::logic_error("writer finished before its target was filled");
    }
}

// --- scattered transfers ---------------------------------------------------

namespace {

template <class Op>
std::uint64_t scattered(Machine& machine, std::span<const Transfer> transfers, Op op) {
    std::vector<std::vector<Transfer>> per_disk(machine.disks());
    for (const auto& t : transfers) {
        per_disk.at(t.disk).push_back(t);
    }
    std::size_t ops = 0;
    for (const auto& q : per_disk) {
        ops = std::max(ops, q.size());
    }
    std::vector<Transfer> batch;
    batch.reserve(machine.disks());
    for (std::size_t t = 0; t < ops; ++t) {
        batch.clear();
        for (const auto& q : per_disk) {
            if (t < q.size()) {
                batch.push_back(q[t]);
            }
        }
        op(batch);
    }
    return ops;
}

}  // namespace

std::uint64_t scattered_input(Machine& machine, std::span<const Transfer> transfers) {
    return scattered(machine, transfers, [&](std::span<const Transfer> b) { machine.input(b); });
}

std::uint64_t scattered_output(Machine& machine, std::span<const Transfer> transfers) {
    return scattered(machine, transfers, [&](std::span<const Transfer> b) { machine.output(b); });
}

}  // namespace pdmsort
