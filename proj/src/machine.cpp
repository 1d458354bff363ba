#include "pdmsort/machine.hpp"

#include <algorithm>
#include <sstream>

namespace pdmsort {

namespace {

constexpr std::uint64_t kChunkFrames = 1024;

std::string describe(const char* what, std::uint32_t disk, std::uint64_t frame) {
    std::ostringstream os;
    os << what << " (disk " << disk << ", frame " << frame << ")";
    return os.str();
}

}  // namespace

const char* fault_name(Fault f) {
    switch (f) {
    case Fault::EmptyTransfer: return "empty transfer set";
    case Fault::TooManyTransfers: return "more than D blocks in one I/O";
    case Fault::DuplicateDisk: return "disk used twice in one I/O";
    case Fault::DuplicateMemoryFrame: return "memory frame used twice in one I/O";
    case Fault::DiskOutOfRange: return "disk number out of range";
    case Fault::MemoryFrameOutOfRange: return "memory frame out of range";
    case Fault::UnwrittenSource: return "input from a frame never written";
    case Fault::UnreservedFrame: return "memory frame not reserved";
    case Fault::MemoryBudget: return "memory budget exceeded";
    case Fault::InvalidReservation: return "invalid reservation";
    }
    return "unknown fault";
}

PhaseCounts IoStats::phase(std::string_view label) const {
    auto it = phases.find(label);
    return it == phases.end() ? PhaseCounts{} : it->second;
}

// --- FrameBuffer -----------------------------------------------------------

FrameBuffer::FrameBuffer(FrameBuffer&& other) noexcept
    : machine_(other.machine_), frames_(std::move(other.frames_)) {
    other.machine_ = nullptr;
    other.frames_.clear();
}

FrameBuffer& FrameBuffer::operator=(FrameBuffer&& other) noexcept {
    if (this != &other) {
        release();
        machine_ = other.machine_;
        frames_ = std::move(other.frames_);
        other.machine_ = nullptr;
        other.frames_.clear();
    }
    return *this;
}

FrameBuffer::~FrameBuffer() { release(); }

void FrameBuffer::release() {
    if (machine_ != nullptr && !frames_.empty()) {
        machine_->release(frames_);
    }
    frames_.clear();
    machine_ = nullptr;
}

// --- Machine ---------------------------------------------------------------

struct Machine::Chunk {
    std::vector<Cell> cells;
    std::vector<std::uint8_t> written;
    std::uint64_t live = 0;
};

Machine::Machine(MachineConfig config) : config_(config) {
    if (config.M == 0 || config.B == 0 || config.D == 0) {
        throw ConfigError("M, B and D must be positive");
    }
    if (2 * config.B > config.M) {
        throw ConfigError("invalid machine: 2B > M");
    }
    if (config.M % config.B != 0) {
        throw ConfigError("invalid machine: B does not divide M");
    }
    if (config.D > config.M / config.B) {
        throw ConfigError("invalid machine: D > M/B");
    }
    m_ = static_cast<std::uint32_t>(config.M / config.B);
    memory_.assign(static_cast<std::size_t>(config.M), kDummyCell);
    reserved_flag_.assign(m_, 0);
    free_frames_.resize(m_);
    for (std::uint32_t i = 0; i < m_; ++i) {
        free_frames_[i] = m_ - 1 - i;
    }
    disks_.resize(config.D);
    cursors_.assign(config.D, 0);
    seen_disk_.assign(config.D, 0);
    seen_frame_.assign(m_, 0);
    set_phase("");
}

Machine::~Machine() = default;

std::uint64_t Machine::high_water() const {
    return *std::max_element(cursors_.begin(), cursors_.end());
}

std::uint64_t Machine::alloc_region(std::uint32_t disk, std::uint64_t frames) {
    if (disk >= config_.D) {
        throw PdmError(Fault::DiskOutOfRange, describe("alloc_region", disk, frames));
    }
    std::uint64_t first = cursors_[disk];
    cursors_[disk] += frames;
    return first;
}

FrameBuffer Machine::reserve(std::uint32_t frames) {
    if (frames == 0) {
        throw PdmError(Fault::InvalidReservation, "reservation of zero frames");
    }
    if (reserved_ + frames > m_) {
        std::ostringstream os;
        os << "memory budget exceeded: " << reserved_ << " frames reserved, " << frames
           << " requested, m = " << m_;
        throw MemoryBudgetError(os.str());
    }
    std::vector<std::uint32_t> out(frames);
    for (auto& f : out) {
        f = free_frames_.back();
        free_frames_.pop_back();
        reserved_flag_[f] = 1;
    }
    reserved_ += frames;
    peak_reserved_ = std::max(peak_reserved_, reserved_);
    return FrameBuffer(this, std::move(out));
}

void Machine::release(std::span<const std::uint32_t> frames) {
    for (auto f : frames) {
        reserved_flag_[f] = 0;
        free_frames_.push_back(f);
    }
    reserved_ -= static_cast<std::uint32_t>(frames.size());
}

std::span<Cell> Machine::frame(std::uint32_t mem_frame) {
    if (mem_frame >= m_) {
        throw PdmError(Fault::MemoryFrameOutOfRange, "memory frame out of range");
    }
    if (!reserved_flag_[mem_frame]) {
        throw PdmError(Fault::UnreservedFrame, "access to unreserved memory frame");
    }
    return {memory_.data() + mem_frame * config_.B, static_cast<std::size_t>(config_.B)};
}

std::span<const Cell> Machine::frame(std::uint32_t mem_frame) const {
    return const_cast<Machine*>(this)->frame(mem_frame);
}

Cell* Machine::disk_block(std::uint32_t disk, std::uint64_t disk_frame, bool create) {
    auto& chunks = disks_[disk].chunks;
    std::uint64_t c = disk_frame / kChunkFrames;
    if (c >= chunks.size()) {
        if (!create) {
            return nullptr;
        }
        chunks.resize(c + 1);
    }
    if (!chunks[c]) {
        if (!create) {
            return nullptr;
        }
        chunks[c] = std::make_unique<Chunk>();
        chunks[c]->cells.resize(kChunkFrames * config_.B);
        chunks[c]->written.assign(kChunkFrames, 0);
    }
    return chunks[c]->cells.data() + (disk_frame % kChunkFrames) * config_.B;
}

const Cell* Machine::disk_block(std::uint32_t disk, std::uint64_t disk_frame) const {
    const auto& chunks = disks_[disk].chunks;
    std::uint64_t c = disk_frame / kChunkFrames;
    if (c >= chunks.size() || !chunks[c] || !chunks[c]->written[disk_frame % kChunkFrames]) {
        return nullptr;
    }
    return chunks[c]->cells.data() + (disk_frame % kChunkFrames) * config_.B;
}

void Machine::mark_written(std::uint32_t disk, std::uint64_t disk_frame) {
    auto& chunk = *disks_[disk].chunks[disk_frame / kChunkFrames];
    auto& flag = chunk.written[disk_frame % kChunkFrames];
    if (!flag) {
        flag = 1;
        ++chunk.live;
    }
}

bool Machine::is_written(std::uint32_t disk, std::uint64_t disk_frame) const {
    return disk < config_.D && disk_block(disk, disk_frame) != nullptr;
}

void Machine::discard(std::uint32_t disk, std::uint64_t disk_frame) {
    auto& chunks = disks_.at(disk).chunks;
    std::uint64_t c = disk_frame / kChunkFrames;
    if (c >= chunks.size() || !chunks[c]) {
        return;
    }
    auto& chunk = *chunks[c];
    auto& flag = chunk.written[disk_frame % kChunkFrames];
    if (flag) {
        flag = 0;
        if (--chunk.live == 0) {
            chunks[c].reset();
        }
    }
}

void Machine::check_transfers(std::span<const Transfer> transfers, bool input) {
    if (transfers.empty()) {
        throw PdmError(Fault::EmptyTransfer, "I/O operation without transfers");
    }
    if (transfers.size() > config_.D) {
        throw PdmError(Fault::TooManyTransfers, "I/O operation moves more than D blocks");
    }
    if (++stamp_ == 0) {
        std::fill(seen_disk_.begin(), seen_disk_.end(), 0);
        std::fill(seen_frame_.begin(), seen_frame_.end(), 0);
        stamp_ = 1;
    }
    for (const auto& t : transfers) {
        if (t.disk >= config_.D) {
            throw PdmError(Fault::DiskOutOfRange, describe("disk out of range", t.disk, t.disk_frame));
        }
        if (t.mem_frame >= m_) {
            throw PdmError(Fault::MemoryFrameOutOfRange, "memory frame out of range");
        }
        if (seen_disk_[t.disk] == stamp_) {
            throw PdmError(Fault::DuplicateDisk, describe("disk used twice in one I/O", t.disk, t.disk_frame));
        }
        seen_disk_[t.disk] = stamp_;
        if (seen_frame_[t.mem_frame] == stamp_) {
            throw PdmError(Fault::DuplicateMemoryFrame, "memory frame used twice in one I/O");
        }
        seen_frame_[t.mem_frame] = stamp_;
        if (!reserved_flag_[t.mem_frame]) {
            throw PdmError(Fault::UnreservedFrame, "I/O through an unreserved memory frame");
        }
        if (input && disk_block(t.disk, t.disk_frame) == nullptr) {
            throw PdmError(Fault::UnwrittenSource, describe("input from unwritten frame", t.disk, t.disk_frame));
        }
    }
}

void Machine::count(bool input, std::size_t blocks) {
    if (input) {
        ++stats_.input_ops;
        stats_.blocks_in += blocks;
        ++phase_counts_->input_ops;
        phase_counts_->blocks_in += blocks;
    } else {
        ++stats_.output_ops;
        stats_.blocks_out += blocks;
        ++phase_counts_->output_ops;
        phase_counts_->blocks_out += blocks;
    }
}

void Machine::input(std::span<const Transfer> transfers) {
    check_transfers(transfers, true);
    for (const auto& t : transfers) {
        const Cell* src = disk_block(t.disk, t.disk_frame);
        std::copy_n(src, config_.B, memory_.data() + t.mem_frame * config_.B);
        if (tracing_) {
            trace_.push_back({Direction::Input, phase_index_, t.disk, t.disk_frame, epoch_});
        }
    }
    count(true, transfers.size());
}

void Machine::output(std::span<const Transfer> transfers) {
    check_transfers(transfers, false);
    for (const auto& t : transfers) {
        Cell* dst = disk_block(t.disk, t.disk_frame, true);
        std::copy_n(memory_.data() + t.mem_frame * config_.B, config_.B, dst);
        mark_written(t.disk, t.disk_frame);
        if (tracing_) {
            trace_.push_back({Direction::Output, phase_index_, t.disk, t.disk_frame, epoch_});
        }
    }
    count(false, transfers.size());
}

void Machine::poke(std::uint32_t disk, std::uint64_t disk_frame, std::span<const Cell> block) {
    if (disk >= config_.D) {
        throw PdmError(Fault::DiskOutOfRange, describe("poke", disk, disk_frame));
    }
    Cell* dst = disk_block(disk, disk_frame, true);
    std::size_t n = std::min<std::size_t>(block.size(), config_.B);
    std::copy_n(block.data(), n, dst);
    std::fill(dst + n, dst + config_.B, kDummyCell);
    mark_written(disk, disk_frame);
}

std::span<const Cell> Machine::peek(std::uint32_t disk, std::uint64_t disk_frame) const {
    if (disk >= config_.D) {
        throw PdmError(Fault::DiskOutOfRange, describe("peek", disk, disk_frame));
    }
    const Cell* src = disk_block(disk, disk_frame);
    if (src == nullptr) {
        throw PdmError(Fault::UnwrittenSource, describe("peek of unwritten frame", disk, disk_frame));
    }
    return {src, static_cast<std::size_t>(config_.B)};
}

void Machine::reset_stats() {
    stats_ = IoStats{};
    set_phase(phase_);
}

std::uint8_t Machine::phase_id(std::string_view label) const {
    for (std::size_t i = 0; i < phase_names_.size(); ++i) {
        if (phase_names_[i] == label) {
            return static_cast<std::uint8_t>(i);
        }
    }
    return 0xff;
}

void Machine::set_phase(std::string label) {
    phase_ = std::move(label);
    phase_counts_ = &stats_.phases[phase_];
    auto id = phase_id(phase_);
    if (id == 0xff) {
        if (phase_names_.size() >= 0xff) {
            throw std::length_error("too many distinct phase labels");
        }
        phase_names_.push_back(phase_);
        id = static_cast<std::uint8_t>(phase_names_.size() - 1);
    }
    phase_index_ = id;
}

}  // namespace pdmsort
