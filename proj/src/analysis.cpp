#include "pdmsort/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "pdmsort/baselines.hpp"

namespace pdmsort {

std::uint64_t sort_unit(std::uint64_t N, std::uint64_t M, std::uint64_t B) {
    if (B == 0 || M < 2 * B || M % B != 0) {
        throw std::invalid_argument("sort_unit: invalid M, B");
    }
    if (N <= M) {
        throw std::invalid_argument("sort_unit needs N > M");
    }
    const std::uint64_t n = ceil_div(N, B);
    return 2 * n * ceil_log(M / B, n);
}

Rational g_of(const Rational& x) {
    if (x < 1) {
        throw std::invalid_argument("g needs x >= 1");
    }
    Rational num = std::max(Rational(5) - 2 * x, Rational(0));
    return num / (4 * x - 2);
}

Rational h_of(const Rational& x) {
    Rational c = std::max(Rational(0), std::min(x, Rational(1)));
    return Rational(1) / (Rational(1) - c / 2);
}

double leading_factor(std::uint64_t m, std::uint64_t B, std::uint64_t D) {
    if (m < 2 || B == 0 || D == 0 || D > m) {
        throw std::invalid_argument("leading_factor: invalid configuration");
    }
    const Rational g = g_of(Rational(static_cast<std::int64_t>(m), static_cast<std::int64_t>(D)));
    double h;
    if (8 * D <= B) {
        h = 1.0;  // log_m(8D/B) <= 0
    } else if (8 * D >= m * B) {
        h = 2.0;  // log_m(8D/B) >= 1
    } else {
        long double x = std::log(static_cast<long double>(8 * D) / static_cast<long double>(B)) /
                        std::log(static_cast<long double>(m));
        h = static_cast<double>(1.0L / (1.0L - x / 2));
    }
    return (3.0 + boost::rational_cast<double>(g)) * h;
}

MergeCostTerms predict_merge_costs(const GuideParams& p, std::uint64_t z, std::uint64_t y,
                                   std::uint64_t merge_nodes, std::uint64_t n, std::uint64_t m) {
    MergeCostTerms t;
    const auto zd = static_cast<double>(z);
    const auto yd = static_cast<double>(y);
    t.z_over_d4 = zd / static_cast<double>(p.d4);
    t.z_over_d5 = zd / static_cast<double>(p.d5);
    t.two_z_over_dbar = 2 * zd / static_cast<double>(p.dbar);
    t.two_y_over_d2 = 2 * yd / static_cast<double>(p.d2);
    t.three_y_over_dl = 3 * yd / static_cast<double>(p.dl);
    t.slack = 16.0 * (static_cast<double>(merge_nodes) + static_cast<double>(n) / static_cast<double>(m) + 1);
    return t;
}

std::map<std::string, double> predict_phases(const GuideParams& p, const GuidesortReport& report, std::uint64_t n,
                                             std::uint64_t D) {
    std::map<std::string, double> out;
    const double z = static_cast<double>(report.z);
    const double y = static_cast<double>(report.y);
    const double dd = static_cast<double>(D);
    out["base"] = 2.0 * static_cast<double>(n) / dd + static_cast<double>(report.base_sample_blocks) / p.dl;

    double tree = 0;
    double step5_samples = 0;
    for (const auto& rec : report.merges) {
        const double height = static_cast<double>(ceil_log(2, rec.leaves));
        tree += 2.0 * static_cast<double>(rec.bundled_blocks) / dd +
                2.0 * static_cast<double>(rec.sample_blocks) * height / static_cast<double>(p.d1);
        step5_samples += static_cast<double>(rec.output_sample_blocks);
    }
    out["step1"] = tree;
    out["step2"] = 2.0 * y / static_cast<double>(p.d2);
    out["step3"] = tree;
    out["step4"] = z / static_cast<double>(p.d4) + z / static_cast<double>(p.dbar) + y / static_cast<double>(p.dl);
    out["step5"] = z / static_cast<double>(p.dbar) + z / static_cast<double>(p.d5) + y / static_cast<double>(p.dl) +
                   step5_samples / static_cast<double>(p.dl);
    return out;
}

double phase_slack(const GuidesortReport& report, std::uint64_t n, std::uint64_t m) {
    return 16.0 * (static_cast<double>(report.merges.size()) + static_cast<double>(n) / static_cast<double>(m) + 1);
}

}  // namespace pdmsort
