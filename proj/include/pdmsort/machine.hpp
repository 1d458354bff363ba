#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "pdmsort/item.hpp"

namespace pdmsort {

/// Shape of a simulated parallel disk machine. `M` and `B` are in cells.
struct MachineConfig {
    std::uint64_t M = 0;
    std::uint64_t B = 0;
    std::uint32_t D = 0;

    std::uint32_t m() const { return static_cast<std::uint32_t>(M / B); }
};

class ConfigError : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

enum class Fault {
    EmptyTransfer,
    TooManyTransfers,
    DuplicateDisk,
    DuplicateMemoryFrame,
    DiskOutOfRange,
    MemoryFrameOutOfRange,
    UnwrittenSource,
    UnreservedFrame,
    MemoryBudget,
    InvalidReservation,
};

const char* fault_name(Fault f);

/// Raised on any violation of the machine's rules. All of these indicate a
/// bug in the algorithm driving the machine.
class PdmError : public std::logic_error {
  public:
    PdmError(Fault fault, const std::string& what) : std::logic_error(what), fault_(fault) {}
    Fault fault() const { return fault_; }

  private:
    Fault fault_;
};

class MemoryBudgetError : public PdmError {
  public:
    explicit MemoryBudgetError(const std::string& what) : PdmError(Fault::MemoryBudget, what) {}
};

/// One block movement of an I/O operation.
struct Transfer {
    std::uint32_t disk = 0;
    std::uint64_t disk_frame = 0;
    std::uint32_t mem_frame = 0;
};

struct PhaseCounts {
    std::uint64_t input_ops = 0;
    std::uint64_t output_ops = 0;
    std::uint64_t blocks_in = 0;
    std::uint64_t blocks_out = 0;

    std::uint64_t total_ops() const { return input_ops + output_ops; }
};

struct IoStats {
    std::uint64_t input_ops = 0;
    std::uint64_t output_ops = 0;
    std::uint64_t blocks_in = 0;
    std::uint64_t blocks_out = 0;
    std::map<std::string, PhaseCounts, std::less<>> phases;

    std::uint64_t total_ops() const { return input_ops + output_ops; }
    PhaseCounts phase(std::string_view label) const;
};

enum class Direction : std::uint8_t { Input, Output };

struct TraceRecord {
    Direction dir;
    std::uint8_t phase;
    std::uint32_t disk;
    std::uint64_t frame;
    std::uint32_t epoch;
};

class Machine;

/// A set of reserved internal-memory frames. Releases its frames on
/// destruction.
class FrameBuffer {
  public:
    FrameBuffer() = default;
    FrameBuffer(FrameBuffer&& other) noexcept;
    FrameBuffer& operator=(FrameBuffer&& other) noexcept;
    FrameBuffer(const FrameBuffer&) = delete;
    FrameBuffer& operator=(const FrameBuffer&) = delete;
    ~FrameBuffer();

    std::size_t size() const { return frames_.size(); }
    std::uint32_t operator[](std::size_t i) const { return frames_[i]; }
    std::span<const std::uint32_t> frames() const { return frames_; }
    std::span<const std::uint32_t> slice(std::size_t first, std::size_t count) const {
        return std::span<const std::uint32_t>(frames_).subspan(first, count);
    }

    void release();

  private:
    friend class Machine;
    FrameBuffer(Machine* machine, std::vector<std::uint32_t> frames)
        : machine_(machine), frames_(std::move(frames)) {}

    Machine* machine_ = nullptr;
    std::vector<std::uint32_t> frames_;
};

/// Simulated uniprocessor parallel disk machine: an internal memory of
/// m = M/B block frames and D disks of unbounded length. Every input or
/// output operation moves at most D blocks between pairwise distinct memory
/// frames and pairwise distinct disks, and is counted once.
class Machine {
  public:
    explicit Machine(MachineConfig config);
    ~Machine();
    Machine(const Machine&) = delete;
    Machine& operator=(const Machine&) = delete;

    const MachineConfig& config() const { return config_; }
    std::uint32_t m() const { return m_; }
    std::uint64_t block_size() const { return config_.B; }
    std::uint32_t disks() const { return config_.D; }

    void input(std::span<const Transfer> transfers);
    void output(std::span<const Transfer> transfers);

    /// Bump-allocates `frames` consecutive frames on `disk`; returns the first.
    std::uint64_t alloc_region(std::uint32_t disk, std::uint64_t frames);
    std::uint64_t cursor(std::uint32_t disk) const { return cursors_.at(disk); }
    std::uint64_t high_water() const;

    FrameBuffer reserve(std::uint32_t frames);
    std::uint32_t reserved() const { return reserved_; }
    std::uint32_t peak_reserved() const { return peak_reserved_; }

    /// Contents of a reserved memory frame.
    std::span<Cell> frame(std::uint32_t mem_frame);
    std::span<const Cell> frame(std::uint32_t mem_frame) const;

    // Harness access. Uncounted and untraced; for test setup and verification.
    void poke(std::uint32_t disk, std::uint64_t disk_frame, std::span<const Cell> block);
    std::span<const Cell> peek(std::uint32_t disk, std::uint64_t disk_frame) const;
    bool is_written(std::uint32_t disk, std::uint64_t disk_frame) const;

    /// Drops the contents of a disk frame. Disk space is never handed out
    /// again; this only frees simulator storage. A later input of the frame
    /// fails as unwritten.
    void discard(std::uint32_t disk, std::uint64_t disk_frame);

    const IoStats& stats() const { return stats_; }
    void reset_stats();

    const std::string& phase() const { return phase_; }
    void set_phase(std::string label);

    std::uint32_t epoch() const { return epoch_; }
    void set_epoch(std::uint32_t epoch) { epoch_ = epoch; }

    void enable_trace(bool on) { tracing_ = on; }
    const std::vector<TraceRecord>& trace() const { return trace_; }
    void clear_trace() { trace_.clear(); }
    std::uint8_t phase_id(std::string_view label) const;
    const std::string& phase_name(std::uint8_t id) const { return phase_names_.at(id); }

  private:
    friend class FrameBuffer;
    struct Chunk;
    struct Disk {
        std::vector<std::unique_ptr<Chunk>> chunks;
    };

    void release(std::span<const std::uint32_t> frames);
    void check_transfers(std::span<const Transfer> transfers, bool input);
    Cell* disk_block(std::uint32_t disk, std::uint64_t disk_frame, bool create);
    const Cell* disk_block(std::uint32_t disk, std::uint64_t disk_frame) const;
    void mark_written(std::uint32_t disk, std::uint64_t disk_frame);
    void count(bool input, std::size_t blocks);

    MachineConfig config_;
    std::uint32_t m_;
    std::vector<Cell> memory_;
    std::vector<std::uint8_t> reserved_flag_;
    std::vector<std::uint32_t> free_frames_;
    std::uint32_t reserved_ = 0;
    std::uint32_t peak_reserved_ = 0;

    std::vector<Disk> disks_;
    std::vector<std::uint64_t> cursors_;

    IoStats stats_;
    std::string phase_;
    PhaseCounts* phase_counts_ = nullptr;
    std::uint8_t phase_index_ = 0;
    std::vector<std::string> phase_names_;
    std::uint32_t epoch_ = 0;
    bool tracing_ = false;
    std::vector<TraceRecord> trace_;

    std::vector<std::uint32_t> seen_disk_;
    std::vector<std::uint32_t> seen_frame_;
    std::uint32_t stamp_ = 0;
};

/// Sets the machine's phase label for the lifetime of the scope.
class PhaseScope {
  public:
    PhaseScope(Machine& machine, std::string label) : machine_(machine), previous_(machine.phase()) {
        machine_.set_phase(std::move(label));
    }
    ~PhaseScope() { machine_.set_phase(previous_); }
    PhaseScope(const PhaseScope&) = delete;
    PhaseScope& operator=(const PhaseScope&) = delete;

  private:
    Machine& machine_;
    std::string previous_;
};

}  // namespace pdmsort
