#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "pdmsort/item.hpp"
#include "pdmsort/machine.hpp"

namespace pdmsort {

struct BlockAddress {
    std::uint32_t disk = 0;
    std::uint64_t frame = 0;

    friend bool operator==(const BlockAddress&, const BlockAddress&) = default;
};

/// A sequence stored round-robin over disks 0..width-1: block j lives on
/// disk j mod width in frame start_frames[j mod width] + j / width. Cells
/// past `num_items` in the last block are padding.
struct StripedRun {
    std::vector<std::uint64_t> start_frames;
    std::uint64_t num_items = 0;
    std::uint64_t num_blocks = 0;
    std::uint32_t width = 0;

    BlockAddress block(std::uint64_t j) const {
        return {static_cast<std::uint32_t>(j % width), start_frames[j % width] + j / width};
    }
};

/// A contiguous range of blocks of a striped run.
struct BlockView {
    const StripedRun* run = nullptr;
    std::uint64_t first_block = 0;
    std::uint64_t num_blocks = 0;
    std::uint64_t num_items = 0;

    static BlockView whole(const StripedRun& r) { return {&r, 0, r.num_blocks, r.num_items}; }
    BlockView sub(std::uint64_t first, std::uint64_t count, std::uint64_t block_size) const;
    BlockAddress block(std::uint64_t j) const { return run->block(first_block + j); }
};

inline std::uint64_t ceil_div(std::uint64_t a, std::uint64_t b) { return (a + b - 1) / b; }

/// Allocates disk space for a striped sequence of `num_items` cells.
/// `width` defaults to all disks.
StripedRun allocate_striped(Machine& machine, std::uint64_t num_items, std::uint32_t width = 0);

enum class StoreMode {
    /// Direct placement that bypasses I/O counters. Test setup only.
    Harness,
    /// Writes through reserved frames, D blocks per output operation.
    Counted,
};

StripedRun store_striped(Machine& machine, std::span<const Item> items,
                         StoreMode mode = StoreMode::Harness);
StripedRun store_cells(Machine& machine, std::span<const Cell> cells,
                       StoreMode mode = StoreMode::Harness, std::uint32_t width = 0);

/// Uncounted read-back of a stored sequence, padding stripped.
std::vector<Item> load_striped(const Machine& machine, const StripedRun& run);
std::vector<Cell> load_cells(const Machine& machine, const StripedRun& run);

void discard(Machine& machine, const StripedRun& run);

/// Streams a block range into memory `frames.size()` consecutive blocks per
/// input operation.
class StripedReader {
  public:
    StripedReader(Machine& machine, BlockView view, std::span<const std::uint32_t> frames);

    bool done() const { return consumed_ == view_.num_items; }
    std::uint64_t consumed() const { return consumed_; }
    const Cell& peek();
    Cell pop();

  private:
    void refill();

    Machine& machine_;
    BlockView view_;
    std::span<const std::uint32_t> frames_;
    std::uint64_t next_block_ = 0;
    std::uint64_t consumed_ = 0;
    std::uint64_t buffered_ = 0;  // cells loaded and not yet consumed
    std::uint64_t pos_ = 0;       // position within loaded frames
    std::vector<Transfer> scratch_;
};

/// Appends cells to a preallocated striped sequence, flushing
/// `frames.size()` consecutive blocks per output operation.
class StripedWriter {
  public:
    StripedWriter(Machine& machine, const StripedRun& target, std::span<const std::uint32_t> frames);

    void push(const Cell& cell);
    /// Pads and flushes the final partial batch.
    void finish();
    std::uint64_t written() const { return written_; }

  private:
    void flush(std::uint64_t blocks);

    Machine& machine_;
    const StripedRun& target_;
    std::span<const std::uint32_t> frames_;
    std::uint64_t next_block_ = 0;
    std::uint64_t written_ = 0;
    std::uint64_t fill_ = 0;  // cells buffered
    std::vector<Transfer> scratch_;
};

/// Issues an arbitrary set of block transfers with as few operations as the
/// per-disk loads allow: operation t moves the t-th pending block of every
/// disk. Returns the number of operations.
std::uint64_t scattered_input(Machine& machine, std::span<const Transfer> transfers);
std::uint64_t scattered_output(Machine& machine, std::span<const Transfer> transfers);

}  // namespace pdmsort
