#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "pdmsort/machine.hpp"
#include "pdmsort/params.hpp"
#include "pdmsort/striped.hpp"

namespace pdmsort {

/// A sorted run together with its sample (one leader record per segment of
/// s blocks, tagged with the run's id within the parent merge).
struct SortedRun {
    StripedRun run;
    std::optional<StripedRun> sample;
};

/// Number of s-block segments of a sequence of `num_items` items.
std::uint64_t segment_count(std::uint64_t num_items, std::uint64_t B, std::uint64_t s);

/// Sorts a sequence of at most m blocks in one read sweep and one write
/// sweep. With `emit_sample`, also writes the sample through D_L frames.
SortedRun base_sort(Machine& machine, const BlockView& input, const GuideParams& params, bool emit_sample,
                    std::uint32_t run_id = 0);

// ---- Step 1 -----------------------------------------------------------------

/// Shape of the sample merge: leaves are single samples or internally
/// sorted bundles, internal nodes are two-way merges.
struct SampleTree {
    struct Node {
        std::uint32_t lo = 0;  // runs [lo, hi)
        std::uint32_t hi = 0;
        std::uint64_t num_items = 0;
        int left = -1;
        int right = -1;

        bool leaf() const { return left < 0; }
    };
    std::vector<Node> nodes;
    std::vector<std::uint64_t> sample_items;  // per run
    int root = -1;

    std::size_t leaves() const;
    std::size_t merges() const { return nodes.size() - leaves(); }
};

struct CanonicalResult {
    StripedRun canonical;
    SampleTree tree;
};

/// Merges the samples into the canonical sequence. Consumes (discards) the
/// samples.
CanonicalResult merge_samples(Machine& machine, std::span<const StripedRun> samples, const GuideParams& params);

// ---- Step 2 -----------------------------------------------------------------

/// Smallest multiple of s in [0, D - s] that occurs in neither history.
std::uint32_t greedy_pick_color(std::span<const std::uint32_t> overall, std::span<const std::uint32_t> run,
                                std::uint32_t s, std::uint32_t D);

struct Guide {
    StripedRun seq;
    std::vector<std::uint64_t> color_counts;  // segments per color base
    std::vector<std::uint64_t> disk_counts;   // blocks per disk
};

/// Colors the canonical sequence into the guide. `run_blocks[i]` is the
/// block length of run i. Consumes the canonical sequence.
Guide color_canonical(Machine& machine, const StripedRun& canonical, std::span<const std::uint64_t> run_blocks,
                      const GuideParams& params);

/// Number of windows of `window` consecutive entries (globally and within
/// each run) whose colors are not pairwise distinct.
std::uint64_t guide_window_violations(std::span<const Cell> guide, std::uint64_t window);

// ---- Step 3 -----------------------------------------------------------------

/// Splits the guide back into one colored sample per run, reversing the
/// sample merge. The guide itself is left intact.
std::vector<StripedRun> split_guide(Machine& machine, const StripedRun& guide, const SampleTree& tree,
                                    const GuideParams& params);

// ---- Step 4 -----------------------------------------------------------------

/// Disk regions receiving the redistributed blocks of one merge. A segment
/// colored (c, i) puts its j-th block at (c + j, base[c + j] + i).
struct MergeLayout {
    std::vector<std::uint64_t> base;
    std::vector<std::uint64_t> size;
    std::vector<std::vector<bool>> used;

    BlockAddress locate(std::uint32_t color, std::uint32_t index, std::uint32_t offset) const {
        return {color + offset, base[color + offset] + index};
    }
};

MergeLayout allocate_merge_layout(Machine& machine, const Guide& guide, const GuideParams& params);

/// Where each block of a run went.
struct Placement {
    std::vector<BlockAddress> blocks;
};

/// Moves the blocks of `run` to the places named by its colored sample.
/// Uses `frames` (D4 + D_L of them). Consumes the run and the colored sample.
Placement redistribute_run(Machine& machine, const StripedRun& run, const StripedRun& colored_sample,
                           MergeLayout& layout, const GuideParams& params, std::span<const std::uint32_t> frames);

// ---- Step 5 -----------------------------------------------------------------

/// Merges the redistributed runs following the guide. `run_items[i]` is the
/// item count of run i.
SortedRun guided_merge(Machine& machine, std::span<const std::uint64_t> run_items, const StripedRun& guide,
                       const MergeLayout& layout, const GuideParams& params, bool emit_sample,
                       std::uint32_t run_id = 0);

// ---- Driver -----------------------------------------------------------------

struct MergeRecord {
    std::uint32_t ordinal = 0;
    std::uint32_t depth = 0;
    std::uint64_t runs = 0;
    std::uint64_t run_blocks = 0;     // contribution to z
    std::uint64_t sample_blocks = 0;  // contribution to y
    std::uint64_t leaves = 0;         // sorted sequences entering the binary merge tree
    std::uint64_t tree_merges = 0;
    std::uint64_t bundled_blocks = 0;  // sample blocks sorted in bundles
    std::uint64_t segments = 0;
    std::uint64_t output_sample_blocks = 0;
};

struct GuidesortReport {
    std::vector<MergeRecord> merges;
    std::uint64_t z = 0;
    std::uint64_t y = 0;
    std::uint64_t base_calls = 0;
    std::uint64_t base_sample_blocks = 0;
    std::uint32_t max_depth = 0;
};

/// Everything a checker needs to audit one merge after the fact.
struct MergeInfo {
    std::uint32_t ordinal = 0;
    std::vector<StripedRun> runs;
    std::vector<Placement> placements;
    StripedRun output;
    const GuideParams* params = nullptr;
    const Machine* machine = nullptr;
};

struct GuidesortOptions {
    /// Reject parameters that fail validate_params. Disable only to
    /// provoke budget failures on purpose.
    bool validate = true;
    /// Record a machine trace; it is cleared after each on_merge call.
    bool trace = false;
    std::function<void(std::span<const Cell> guide, std::uint64_t window)> on_guide;
    std::function<void(const MergeInfo&)> on_merge;
};

/// Sorts `input` (striped over all disks). The input is left intact.
StripedRun guidesort(Machine& machine, const StripedRun& input, const GuideParams& params,
                     const GuidesortOptions& options = {}, GuidesortReport* report = nullptr);

}  // namespace pdmsort
