#pragma once

#include <cstdint>
#include <map>
#include <string>

#include <boost/rational.hpp>

#include "pdmsort/guidesort.hpp"
#include "pdmsort/params.hpp"

namespace pdmsort {

using Rational = boost::rational<std::int64_t>;

/// 2n ceil(log_m n) with n = ceil(N/B), m = M/B. Requires N > M.
std::uint64_t sort_unit(std::uint64_t N, std::uint64_t M, std::uint64_t B);

/// max(5 - 2x, 0) / (4x - 2), for x >= 1.
Rational g_of(const Rational& x);

/// 1 / (1 - max(0, min(x, 1)) / 2).
Rational h_of(const Rational& x);

/// (3 + g(m/D)) h(log_m(8D/B)). The clamps of h are decided exactly; only
/// the interior of the logarithm is evaluated in floating point.
double leading_factor(std::uint64_t m, std::uint64_t B, std::uint64_t D);

/// The leading terms of the per-merge cost and the additive slack allowed
/// on top of them.
struct MergeCostTerms {
    double z_over_d4 = 0;
    double z_over_d5 = 0;
    double two_z_over_dbar = 0;
    double two_y_over_d2 = 0;
    double three_y_over_dl = 0;
    double slack = 0;

    double total() const { return z_over_d4 + z_over_d5 + two_z_over_dbar + two_y_over_d2 + three_y_over_dl; }
};

MergeCostTerms predict_merge_costs(const GuideParams& p, std::uint64_t z, std::uint64_t y,
                                   std::uint64_t merge_nodes, std::uint64_t n, std::uint64_t m);

/// Predicted leading term of every phase of one Guidesort run.
std::map<std::string, double> predict_phases(const GuideParams& p, const GuidesortReport& report, std::uint64_t n,
                                             std::uint64_t D);

/// Additive slack granted to each phase prediction.
double phase_slack(const GuidesortReport& report, std::uint64_t n, std::uint64_t m);

}  // namespace pdmsort
