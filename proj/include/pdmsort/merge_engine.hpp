#pragma once

#include <cstdint>
#include <functional>
#include <span>

#include "pdmsort/machine.hpp"
#include "pdmsort/striped.hpp"

namespace pdmsort {

/// Merges sorted sequences (ordered by item) into a new striped sequence of
/// width `out_width`. Inputs are read and the output is written `unit`
/// consecutive blocks per operation; `frames` must hold inputs.size() * unit
/// frames. Partially consumed input, merged output not yet written and the
/// next incoming superblock share those frames; since internal computation
/// is free, cells are compacted before every transfer so that a transfer
/// always sees whole free frames.
StripedRun unit_merge(Machine& machine, std::span<const StripedRun* const> inputs, std::uint32_t unit,
                      std::uint32_t out_width, std::span<const std::uint32_t> frames);

/// Inverse of a two-way unit_merge: distributes the cells of `parent` to
/// the preallocated `children` by `child_of`, preserving order. Processes
/// the sequences from their ends with the time-reversed schedule of the
/// merge, so it performs the same number of operations within the same
/// frames.
void unit_split(Machine& machine, const StripedRun& parent, std::span<const StripedRun* const> children,
                const std::function<std::size_t(const Cell&)>& child_of, std::uint32_t unit,
                std::span<const std::uint32_t> frames);

}  // namespace pdmsort
