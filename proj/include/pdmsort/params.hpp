#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace pdmsort {

class ParamsError : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

/// Parameters of one Guidesort configuration. Buffer widths are in block
/// frames.
struct GuideParams {
    std::uint64_t r = 0;     // merge arity
    std::uint64_t s = 0;     // segment length in blocks
    std::uint64_t dbar = 0;  // batch width
    std::uint64_t d1 = 0;    // lock-step group for sample merging
    std::uint64_t d2 = 0;
    std::uint64_t d4 = 0;
    std::uint64_t d5 = 0;
    std::uint64_t dl = 0;
    std::uint64_t q = 0;     // history storage

    friend bool operator==(const GuideParams&, const GuideParams&) = default;
};

std::string to_string(const GuideParams& p);

/// The divisibility-adjusting function: returns (a', b') close to (a, b)
/// with one dividing the other.
std::pair<std::uint64_t, std::uint64_t> lemma1_f(std::uint64_t a, std::uint64_t b);

/// Floor of the square root.
std::uint64_t isqrt(std::uint64_t x);

/// The general parameter recipe. Unless `unchecked`, requires m >= 8,
/// D >= 4, B >= 16 and sqrt(m) <= D <= m. The result is always validated.
GuideParams compute_params_general(std::uint64_t m, std::uint64_t B, std::uint64_t D, bool unchecked = false);

/// The simple preset; requires m >= 6D and B >= D.
GuideParams compute_params_simple(std::uint64_t m, std::uint64_t B, std::uint64_t D);
bool simple_applicable(std::uint64_t m, std::uint64_t B, std::uint64_t D);
bool general_preconditions(std::uint64_t m, std::uint64_t B, std::uint64_t D);

/// One entry per violated constraint; empty iff `p` is usable.
std::vector<std::string> validate_params(const GuideParams& p, std::uint64_t m, std::uint64_t B, std::uint64_t D);

enum class Mode { Auto, Simple, General, Striping, Sequential };

Mode parse_mode(const std::string& s);
const char* mode_name(Mode mode);

struct SequentialPlan {};
struct StripingPlan {
    std::uint64_t arity = 0;
};
struct GuidesortPlan {
    GuideParams params;
    bool simple = false;
    bool unchecked = false;
};

using AlgorithmPlan = std::variant<SequentialPlan, StripingPlan, GuidesortPlan>;

/// Routes a configuration to an algorithm. In Auto mode: m <= 3 gives the
/// sequential sort, D^2 <= m gives sqrt(m)-way striping, otherwise
/// Guidesort.
AlgorithmPlan select_algorithm(std::uint64_t m, std::uint64_t B, std::uint64_t D, Mode mode);

/// Guidesort parameters regardless of where Auto would route: the simple
/// preset when it applies, otherwise the general recipe.
GuidesortPlan guidesort_plan(std::uint64_t m, std::uint64_t B, std::uint64_t D, Mode mode = Mode::Auto);

}  // namespace pdmsort
