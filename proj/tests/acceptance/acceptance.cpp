// Acceptance checks A1-A9. Prints one PASS/FAIL line per criterion and
// exits non-zero if any fails.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <map>
#include <string>
#include <vector>

#include "pdmsort/analysis.hpp"
#include "pdmsort/baselines.hpp"
#include "pdmsort/keyfile.hpp"
#include "pdmsort/runner.hpp"

using namespace pdmsort;

namespace {

struct Verdict {
    bool pass = true;
    std::string detail;
    std::uint64_t checks = 0;

    void fail(const std::string& why) {
        if (pass) {
            detail = why;
        }
        pass = false;
    }
};

using Addr = std::pair<std::uint32_t, std::uint64_t>;

std::string cfg_name(std::uint64_t m, std::uint64_t B, std::uint64_t D, std::uint64_t N, std::uint64_t seed) {
    return "m=" + std::to_string(m) + " B=" + std::to_string(B) + " D=" + std::to_string(D) +
           " N=" + std::to_string(N) + " seed=" + std::to_string(seed);
}

// Every address in `want` must occur exactly once among `seen`.
bool exactly_once(const std::map<Addr, int>& seen, const std::vector<Addr>& want) {
    for (const auto& a : want) {
        auto it = seen.find(a);
        if (it == seen.end() || it->second != 1) {
            return false;
        }
    }
    return true;
}

std::vector<Addr> addresses(const StripedRun& r) {
    std::vector<Addr> out;
    for (std::uint64_t j = 0; j < r.num_blocks; ++j) {
        auto a = r.block(j);
        out.emplace_back(a.disk, a.frame);
    }
    return out;
}

struct ReadOnceAudit {
    Verdict* v;
    std::string cfg;

    void operator()(const MergeInfo& info) const {
        const Machine& m = *info.machine;
        const auto s4 = m.phase_id("step4");
        const auto s5 = m.phase_id("step5");
        std::map<Addr, int> in4, out4, in5, out5;
        for (const auto& t : m.trace()) {
            if (t.epoch != info.ordinal) {
                continue;
            }
            Addr a{t.disk, t.frame};
            if (t.phase == s4) {
                ++(t.dir == Direction::Input ? in4 : out4)[a];
            } else if (t.phase == s5) {
                ++(t.dir == Direction::Input ? in5 : out5)[a];
            }
        }
        std::vector<Addr> run_blocks, placed;
        for (const auto& r : info.runs) {
            auto a = addresses(r);
            run_blocks.insert(run_blocks.end(), a.begin(), a.end());
        }
        for (const auto& p : info.placements) {
            for (const auto& b : p.blocks) {
                placed.emplace_back(b.disk, b.frame);
            }
        }
        ++v->checks;
        if (placed.size() != run_blocks.size()) {
            v->fail(cfg + ": placement count differs from run blocks");
        } else if (!exactly_once(in4, run_blocks)) {
            v->fail(cfg + ": step 4 did not read every run block exactly once");
        } else if (!exactly_once(out4, placed) || out4.size() != placed.size()) {
            v->fail(cfg + ": step 4 did not write every placed block exactly once");
        } else if (!exactly_once(in5, placed)) {
            v->fail(cfg + ": step 5 did not read every placed block exactly once");
        } else if (!exactly_once(out5, addresses(info.output))) {
            v->fail(cfg + ": step 5 did not write every output block exactly once");
        } else {
            for (const auto& [a, c] : in5) {
                if (c != 1) {
                    v->fail(cfg + ": step 5 read a block twice");
                    break;
                }
            }
        }
    }
};

void report(const char* id, const char* what, const Verdict& v, double secs) {
    std::printf("%s %s: %s (%llu checks, %.1fs)%s%s\n", id, v.pass ? "PASS" : "FAIL", what,
                static_cast<unsigned long long>(v.checks), secs, v.detail.empty() ? "" : " - ",
                v.detail.c_str());
    std::fflush(stdout);
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

int main() {
    bool all = true;
    auto finish = [&](const char* id, const char* what, const Verdict& v, double secs) {
        report(id, what, v, secs);
        all = all && v.pass;
    };

    // ---- A1, A4, A5, A8 and the first half of A9 share the grid ----------
    Verdict a1, a4, a5, a8, a9;
    auto t0 = std::chrono::steady_clock::now();
    double baseline_secs = 0;
    for (std::uint64_t m : {16u, 64u, 256u}) {
        for (std::uint64_t B : {4u, 64u}) {
            for (std::uint64_t D : {2u, 4u, 8u, 16u}) {
                if (D > m) {
                    continue;
                }
                for (std::uint64_t N : {1000u, 100000u, 1u << 20}) {
                    for (std::uint64_t seed : {1u, 2u, 3u}) {
                        const std::string name = cfg_name(m, B, D, N, seed);
                        auto keys = generate_keys(N, seed * 1000003 + N);
                        auto oracle = keys;
                        std::sort(oracle.begin(), oracle.end());
                        RunConfig cfg{{m * B, B, static_cast<std::uint32_t>(D)}, Algo::Guidesort, Mode::Auto, seed};

                        GuidesortOptions opt;
                        opt.trace = true;
                        opt.on_guide = [&](std::span<const Cell> g, std::uint64_t w) {
                            ++a4.checks;
                            if (auto bad = guide_window_violations(g, w); bad > 0) {
                                a4.fail(name + ": " + std::to_string(bad) + " window conflicts");
                            }
                        };
                        opt.on_merge = ReadOnceAudit{&a5, name};
                        ++a1.checks;
                        ++a9.checks;
                        try {
                            auto res = run_sort(cfg, keys, opt);
                            if (!verify_keys(keys, res.keys).ok()) {
                                a1.fail(name + ": verify failed");
                            } else if (res.keys != oracle) {
                                a1.fail(name + ": differs from oracle");
                            }
                            if (res.peak_reserved > m) {
                                a9.fail(name + ": reservation peak above m");
                            }
                        } catch (const MemoryBudgetError& e) {
                            a9.fail(name + ": " + e.what());
                            a1.fail(name + ": " + e.what());
                        } catch (const std::exception& e) {
                            a1.fail(name + ": " + e.what());
                        }

                        // Baseline formulas, once per configuration.
                        if (seed != 1) {
                            continue;
                        }
                        auto tb = std::chrono::steady_clock::now();
                        const std::uint64_t n = ceil_div(N, B);
                        try {
                            RunConfig sc = cfg;
                            sc.algo = Algo::Sequential;
                            auto res = run_sort(sc, keys);
                            ++a8.checks;
                            const std::uint64_t bound = sort_unit_or_single_pass(N, m * B, B) +
                                                        2 * (res.baseline_report.merge_nodes + 1);
                            if (res.keys != oracle || res.stats.total_ops() > bound) {
                                a8.fail(name + ": sequential " + std::to_string(res.stats.total_ops()) + " > " +
                                        std::to_string(bound));
                            }
                            if (m / D >= 2) {
                                RunConfig st = cfg;
                                st.algo = Algo::Striping;
                                st.mode = Mode::Striping;
                                auto r2 = run_sort(st, keys);
                                ++a8.checks;
                                // one read and one write sweep even when the input is a single superblock
                                const std::uint64_t b2 =
                                    std::max(predicted_striping_ios(n, D, r2.arity), 2 * ceil_div(n, D)) +
                                    4 * r2.baseline_report.merge_nodes;
                                if (r2.keys != oracle || r2.stats.total_ops() > b2) {
                                    a8.fail(name + ": striping " + std::to_string(r2.stats.total_ops()) + " > " +
                                            std::to_string(b2));
                                }
                            }
                        } catch (const std::exception& e) {
                            a8.fail(name + ": " + e.what());
                        }
                        baseline_secs += seconds_since(tb);
                    }
                }
            }
        }
    }
    const double grid_secs = seconds_since(t0) - baseline_secs;
    finish("A1", "guidesort matches the oracle on the grid", a1, grid_secs);

    // ---- A2 ----------------------------------------------------------------
    t0 = std::chrono::steady_clock::now();
    Verdict a2;
    for (std::uint64_t a = 1; a <= 1500; ++a) {
        for (std::uint64_t b = 1; b <= 1500; ++b) {
            ++a2.checks;
            auto [ap, bp] = lemma1_f(a, b);
            const bool divides = (ap != 0 && bp % ap == 0) || (bp != 0 && ap % bp == 0);
            const bool a_ok = 2 * ap > a && ap <= a;
            const bool b_ok = 2 * bp > b && bp <= b && (b - bp) * (b - bp) < b;
            const auto da = static_cast<std::int64_t>(a) - static_cast<std::int64_t>(b);
            const auto dp = static_cast<std::int64_t>(ap) - static_cast<std::int64_t>(bp);
            const bool order = (da >= 0 && dp >= 0) || (da <= 0 && dp <= 0);
            if (!(divides && a_ok && b_ok && order)) {
                a2.fail("a=" + std::to_string(a) + " b=" + std::to_string(b));
            }
        }
    }
    finish("A2", "lemma1_f bullets for 1 <= a, b <= 1500", a2, seconds_since(t0));

    // ---- A3 ----------------------------------------------------------------
    t0 = std::chrono::steady_clock::now();
    Verdict a3;
    for (std::uint64_t m = 8; m <= 1024; m *= 2) {
        for (std::uint64_t B : {16u, 64u, 256u}) {
            const std::uint64_t lo = std::max<std::uint64_t>(4, isqrt(m - 1) + 1);
            for (std::uint64_t D = 1; D <= m; D *= 2) {
                if (D < lo) {
                    continue;
                }
                ++a3.checks;
                const std::string name = "m=" + std::to_string(m) + " B=" + std::to_string(B) + " D=" + std::to_string(D);
                try {
                    auto v = validate_params(compute_params_general(m, B, D), m, B, D);
                    if (!v.empty()) {
                        a3.fail(name + ": " + v.front());
                    }
                } catch (const std::exception& e) {
                    a3.fail(name + ": " + e.what());
                }
            }
        }
    }
    finish("A3", "general parameters valid for D between sqrt(m) and m", a3, seconds_since(t0));

    finish("A4", "guide windows have distinct color groups", a4, grid_secs);
    finish("A5", "steps 4 and 5 move every block exactly once", a5, grid_secs);

    // ---- A6, A7 ------------------------------------------------------------
    t0 = std::chrono::steady_clock::now();
    Verdict a6, a7;
    {
        const std::uint64_t M = 1u << 14, B = 64, D = 8, N = 1u << 21;
        RunConfig cfg{{M, B, D}, Algo::Guidesort, Mode::General, 42};
        auto keys = generate_keys(N, 42);
        ++a6.checks;
        ++a9.checks;
        try {
            auto res = run_sort(cfg, keys);
            const double unit = static_cast<double>(sort_unit(N, M, B)) / D;
            const double ratio = static_cast<double>(res.stats.total_ops()) / unit;
            a6.detail = "ratio " + std::to_string(ratio) + ", leading factor " +
                        std::to_string(leading_factor(M / B, B, D));
            if (!verify_keys(keys, res.keys).ok()) {
                a6.fail("output not sorted");
            } else if (ratio > 3.3) {
                a6.pass = false;
            }

            const auto& rep = res.guide_report;
            const auto& p = res.guide->params;
            const std::uint64_t n = N / B;
            auto pred = predict_phases(p, rep, n, D);
            const double slack = phase_slack(rep, n, M / B);
            std::string worst;
            for (const auto& [phase, expect] : pred) {
                ++a7.checks;
                const double got = static_cast<double>(res.stats.phase(phase).total_ops());
                worst += phase + " " + std::to_string(static_cast<long long>(got)) + "/" +
                         std::to_string(static_cast<long long>(expect)) + " ";
                if (std::abs(got - expect) > slack) {
                    a7.pass = false;
                }
            }
            auto terms = predict_merge_costs(p, rep.z, rep.y, rep.merges.size(), n, M / B);
            a7.detail = worst + "slack " + std::to_string(static_cast<long long>(slack)) + ", merge terms " +
                        std::to_string(static_cast<long long>(terms.total()));
        } catch (const MemoryBudgetError& e) {
            a9.fail(std::string("A6 run: ") + e.what());
            a6.fail(e.what());
            a7.fail(e.what());
        } catch (const std::exception& e) {
            a6.fail(e.what());
            a7.fail(e.what());
        }
    }
    const double a6_secs = seconds_since(t0);
    finish("A6", "M=2^14 B=64 D=8 N=2^21 ratio <= 3.3", a6, a6_secs);
    finish("A7", "per-phase ops within prediction plus slack", a7, a6_secs);

    if (baseline_secs > 0) {
        finish("A8", "baseline costs within their formulas", a8, baseline_secs);
    }

    // ---- A9 negative ---------------------------------------------------------
    t0 = std::chrono::steady_clock::now();
    {
        ++a9.checks;
        Machine machine({64, 4, 4});
        std::vector<Item> items(4096);
        auto keys = generate_keys(items.size(), 9);
        for (std::size_t i = 0; i < items.size(); ++i) {
            items[i] = {keys[i], i};
        }
        auto in = store_striped(machine, items);
        auto p = compute_params_general(16, 4, 4, true);
        p.r = 9;  // r s + D̄ + D5 + 2 D_L = m + 1
        GuidesortOptions opt;
        opt.validate = false;
        try {
            guidesort(machine, in, p, opt);
            a9.fail("oversized step 5 buffers went unnoticed");
        } catch (const MemoryBudgetError&) {
        } catch (const std::exception& e) {
            a9.fail(std::string("unexpected error: ") + e.what());
        }
    }
    finish("A9", "reservations stay within m; oversized buffers are rejected", a9,
           grid_secs + a6_secs + seconds_since(t0));

    return all ? 0 : 1;
}
