#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "pdmsort/baselines.hpp"
#include "pdmsort/guidesort.hpp"
#include "pdmsort/machine.hpp"
#include "pdmsort/params.hpp"

namespace pdmsort {

enum class Algo { Auto, Sequential, Striping, Guidesort };

Algo parse_algo(const std::string& s);
const char* algo_name(Algo algo);

struct RunConfig {
    MachineConfig machine;
    Algo algo = Algo::Auto;
    Mode mode = Mode::Auto;
    std::uint64_t seed = 0;  // recorded only
};

struct RunResult {
    Algo algo = Algo::Auto;  // the algorithm actually run
    std::vector<std::uint64_t> keys;
    IoStats stats;
    std::optional<GuidesortPlan> guide;
    std::uint64_t arity = 0;  // striping
    GuidesortReport guide_report;
    BaselineReport baseline_report;
    std::uint32_t peak_reserved = 0;
    std::uint64_t high_water = 0;
    double wall_ms = 0;
};

/// Resolves algorithm and mode flags to a plan.
AlgorithmPlan resolve_plan(const MachineConfig& cfg, Algo algo, Mode mode);

/// Sorts `keys` (tiebroken by position) on a fresh machine.
RunResult run_sort(const RunConfig& config, std::span<const std::uint64_t> keys,
                   const GuidesortOptions& options = {});

/// The sort unit, or the single-pass cost 2n when N <= M.
std::uint64_t sort_unit_or_single_pass(std::uint64_t N, std::uint64_t M, std::uint64_t B);

nlohmann::json to_json(const GuideParams& p);
nlohmann::json report_json(const RunConfig& config, std::uint64_t N, const RunResult& result);

// ---- bench ------------------------------------------------------------------

struct GridEntry {
    std::uint64_t M = 0, B = 0, D = 0, N = 0;
};

/// "M,B,D,N;M,B,D,N;..." Empty string gives an empty grid.
std::vector<GridEntry> parse_grid(const std::string& spec);

struct BenchRow {
    GridEntry config;
    std::uint64_t seed = 0;
    std::string algo;
    std::string mode;
    bool ok = false;
    std::string error;
    nlohmann::json report;  // report_json of the run
};

/// Runs every algorithm in `algos` on every grid entry. Failures are
/// recorded per row. Rows come back in grid order.
std::vector<BenchRow> run_bench(const std::vector<GridEntry>& grid, std::uint64_t seed,
                                const std::vector<Algo>& algos, Mode mode, unsigned jobs = 1);

std::string bench_csv(const std::vector<BenchRow>& rows);
nlohmann::json bench_json(const std::vector<BenchRow>& rows);

}  // namespace pdmsort
