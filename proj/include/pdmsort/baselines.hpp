#pragma once

#include <cstdint>

#include "pdmsort/machine.hpp"
#include "pdmsort/striped.hpp"

namespace pdmsort {

struct BaselineReport {
    std::uint64_t runs = 0;         // initial runs formed
    std::uint64_t merge_nodes = 0;  // merges actually performed
    std::uint32_t levels = 0;
};

/// m-way mergesort that stores everything on disk 0 and moves one block
/// per operation.
StripedRun sequential_sort(Machine& machine, const StripedRun& input, BaselineReport* report = nullptr);

/// Mergesort over superblocks of D lock-step blocks with the given merge
/// arity. Requires arity >= 2 and arity * D <= m.
StripedRun naive_striping_sort(Machine& machine, const StripedRun& input, std::uint64_t arity,
                               BaselineReport* report = nullptr);

/// Smallest t with base^t >= x (0 for x <= 1).
std::uint64_t ceil_log(std::uint64_t base, std::uint64_t x);

/// 2 ceil(n/D) ceil(log_arity ceil(n/D)).
std::uint64_t predicted_striping_ios(std::uint64_t n, std::uint64_t D, std::uint64_t arity);

}  // namespace pdmsort
