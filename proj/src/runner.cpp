#include "pdmsort/runner.hpp"

#include <atomic>
#include <chrono>
#include <sstream>
#include <thread>

#include "pdmsort/analysis.hpp"
#include "pdmsort/keyfile.hpp"
#include "pdmsort/striped.hpp"

namespace pdmsort {

namespace {

const char* const kPhases[] = {"base", "step1", "step2", "step3", "step4", "step5", "form", "merge"};

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

std::uint64_t parse_u64(const std::string& s) {
    std::size_t used = 0;
    std::uint64_t v = std::stoull(s, &used);
    if (used != s.size()) {
        throw std::invalid_argument("not a number: " + s);
    }
    return v;
}

}  // namespace

Algo parse_algo(const std::string& s) {
    if (s == "auto") return Algo::Auto;
    if (s == "sequential") return Algo::Sequential;
    if (s == "striping") return Algo::Striping;
    if (s == "guidesort") return Algo::Guidesort;
    throw std::invalid_argument("unknown algorithm: " + s);
}

const char* algo_name(Algo algo) {
    switch (algo) {
        case Algo::Auto: return "auto";
        case Algo::Sequential: return "sequential";
        case Algo::Striping: return "striping";
        case Algo::Guidesort: return "guidesort";
    }
    return "?";
}

AlgorithmPlan resolve_plan(const MachineConfig& cfg, Algo algo, Mode mode) {
    const std::uint64_t m = cfg.m();
    switch (algo) {
        case Algo::Sequential:
            return select_algorithm(m, cfg.B, cfg.D, Mode::Sequential);
        case Algo::Striping:
            return select_algorithm(m, cfg.B, cfg.D, Mode::Striping);
        case Algo::Guidesort:
            return guidesort_plan(m, cfg.B, cfg.D, mode);
        case Algo::Auto:
            break;
    }
    if (mode == Mode::Simple || mode == Mode::General) {
        return guidesort_plan(m, cfg.B, cfg.D, mode);
    }
    return select_algorithm(m, cfg.B, cfg.D, mode);
}

RunResult run_sort(const RunConfig& config, std::span<const std::uint64_t> keys, const GuidesortOptions& options) {
    if (keys.empty()) {
        throw std::invalid_argument("nothing to sort");
    }
    Machine machine(config.machine);
    auto plan = resolve_plan(config.machine, config.algo, config.mode);

    std::vector<Item> items(keys.size());
    for (std::size_t i = 0; i < keys.size(); ++i) {
        items[i] = {keys[i], i};
    }
    StripedRun input = store_striped(machine, items, StoreMode::Harness);
    items.clear();
    items.shrink_to_fit();
    machine.reset_stats();

    RunResult res;
    auto start = std::chrono::steady_clock::now();
    StripedRun output = std::visit(
        overloaded{
            [&](const SequentialPlan&) {
                res.algo = Algo::Sequential;
                return sequential_sort(machine, input, &res.baseline_report);
            },
            [&](const StripingPlan& s) {
                res.algo = Algo::Striping;
                res.arity = s.arity;
                return naive_striping_sort(machine, input, s.arity, &res.baseline_report);
            },
            [&](const GuidesortPlan& g) {
                res.algo = Algo::Guidesort;
                res.guide = g;
                return guidesort(machine, input, g.params, options, &res.guide_report);
            },
        },
        plan);
    res.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    res.stats = machine.stats();
    res.peak_reserved = machine.peak_reserved();
    res.high_water = machine.high_water();

    auto sorted = load_striped(machine, output);
    res.keys.resize(sorted.size());
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        res.keys[i] = sorted[i].key;
    }
    return res;
}

std::uint64_t sort_unit_or_single_pass(std::uint64_t N, std::uint64_t M, std::uint64_t B) {
    if (N <= M) {
        return 2 * ceil_div(N, B);
    }
    return sort_unit(N, M, B);
}

nlohmann::json to_json(const GuideParams& p) {
    return {{"r", p.r},   {"s", p.s},   {"Dbar", p.dbar}, {"D1", p.d1}, {"D2", p.d2},
            {"D4", p.d4}, {"D5", p.d5}, {"DL", p.dl},     {"q", p.q}};
}

nlohmann::json report_json(const RunConfig& config, std::uint64_t N, const RunResult& result) {
    using nlohmann::json;
    const auto& c = config.machine;
    const std::uint64_t n = ceil_div(N, c.B);
    const std::uint64_t m = c.m();
    json j;
    j["config"] = {{"M", c.M},       {"B", c.B}, {"D", c.D}, {"N", N}, {"m", m}, {"seed", config.seed},
                   {"algo", algo_name(config.algo)}, {"mode", mode_name(config.mode)}};
    j["algo"] = algo_name(result.algo);
    if (result.guide) {
        j["params"] = to_json(result.guide->params);
        j["paramsRecipe"] = result.guide->simple ? "simple" : (result.guide->unchecked ? "general-unchecked" : "general");
    }
    if (result.algo == Algo::Striping) {
        j["arity"] = result.arity;
    }
    const auto& st = result.stats;
    json phases = json::object();
    for (const auto& [label, pc] : st.phases) {
        if (label.empty()) {
            continue;
        }
        phases[label] = {{"inputOps", pc.input_ops},
                         {"outputOps", pc.output_ops},
                         {"totalOps", pc.total_ops()},
                         {"blocksIn", pc.blocks_in},
                         {"blocksOut", pc.blocks_out}};
    }
    j["io"] = {{"inputOps", st.input_ops}, {"outputOps", st.output_ops}, {"totalOps", st.total_ops()},
               {"blocksIn", st.blocks_in}, {"blocksOut", st.blocks_out}, {"phases", phases}};

    const std::uint64_t unit = sort_unit_or_single_pass(N, c.M, c.B);
    json a;
    a["n"] = n;
    a["m"] = m;
    a["sortUnit"] = unit;
    a["sortUnitSinglePass"] = N <= c.M;
    a["ratio"] = static_cast<double>(st.total_ops()) / (static_cast<double>(unit) / static_cast<double>(c.D));
    a["leadingFactor"] = leading_factor(m, c.B, c.D);
    if (result.algo == Algo::Guidesort) {
        const auto& rep = result.guide_report;
        const auto& p = result.guide->params;
        auto terms = predict_merge_costs(p, rep.z, rep.y, rep.merges.size(), n, m);
        a["z"] = rep.z;
        a["y"] = rep.y;
        a["mergeNodes"] = rep.merges.size();
        a["depth"] = rep.max_depth;
        a["predicted"] = {{"zOverD4", terms.z_over_d4},
                          {"zOverD5", terms.z_over_d5},
                          {"twoZOverDbar", terms.two_z_over_dbar},
                          {"twoYOverD2", terms.two_y_over_d2},
                          {"threeYOverDL", terms.three_y_over_dl},
                          {"total", terms.total()},
                          {"slack", terms.slack}};
        a["phasePredicted"] = predict_phases(p, rep, n, c.D);
        a["phaseSlack"] = phase_slack(rep, n, m);
    } else if (result.algo == Algo::Striping) {
        a["predictedStriping"] = predicted_striping_ios(n, c.D, result.arity);
        a["mergeNodes"] = result.baseline_report.merge_nodes;
    } else {
        a["mergeNodes"] = result.baseline_report.merge_nodes;
    }
    j["analysis"] = a;
    j["memory"] = {{"peakReserved", result.peak_reserved}, {"diskHighWater", result.high_water}};
    j["wallMs"] = result.wall_ms;
    return j;
}

std::vector<GridEntry> parse_grid(const std::string& spec) {
    std::vector<GridEntry> grid;
    std::stringstream entries(spec);
    std::string entry;
    while (std::getline(entries, entry, ';')) {
        if (entry.find_first_not_of(" \t") == std::string::npos) {
            continue;
        }
        std::vector<std::uint64_t> v;
        std::stringstream fields(entry);
        std::string f;
        while (std::getline(fields, f, ',')) {
            f.erase(0, f.find_first_not_of(" \t"));
            f.erase(f.find_last_not_of(" \t") + 1);
            v.push_back(parse_u64(f));
        }
        if (v.size() != 4) {
            throw std::invalid_argument("grid entry needs M,B,D,N: " + entry);
        }
        grid.push_back({v[0], v[1], v[2], v[3]});
    }
    return grid;
}

std::vector<BenchRow> run_bench(const std::vector<GridEntry>& grid, std::uint64_t seed,
                                const std::vector<Algo>& algos, Mode mode, unsigned jobs) {
    std::vector<BenchRow> rows;
    for (const auto& g : grid) {
        for (Algo a : algos) {
            BenchRow row;
            row.config = g;
            row.seed = seed;
            row.algo = algo_name(a);
            row.mode = mode_name(mode);
            rows.push_back(std::move(row));
        }
    }
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < rows.size(); i = next++) {
            auto& row = rows[i];
            try {
                RunConfig cfg;
                cfg.machine = {row.config.M, row.config.B, static_cast<std::uint32_t>(row.config.D)};
                cfg.algo = parse_algo(row.algo);
                cfg.mode = mode;
                cfg.seed = seed;
                auto keys = generate_keys(row.config.N, seed);
                auto res = run_sort(cfg, keys, {});
                auto check = verify_keys(keys, res.keys);
                if (!check.ok()) {
                    throw std::runtime_error("output check failed: " + check.message);
                }
                row.report = report_json(cfg, row.config.N, res);
                row.algo = algo_name(res.algo);
                row.ok = true;
            } catch (const std::exception& e) {
                row.error = e.what();
            }
        }
    };
    jobs = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(rows.size())));
    if (jobs <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (unsigned t = 0; t < jobs; ++t) {
            pool.emplace_back(worker);
        }
        for (auto& t : pool) {
            t.join();
        }
    }
    return rows;
}

std::string bench_csv(const std::vector<BenchRow>& rows) {
    std::ostringstream os;
    os << "M,B,D,N,seed,algo,inputOps,outputOps,totalOps,sortUnit,ratio,leadingFactor";
    for (const char* p : kPhases) {
        os << ",ops_" << p;
    }
    os << ",mode,wallMs,status\n";
    for (const auto& row : rows) {
        const auto& g = row.config;
        os << g.M << ',' << g.B << ',' << g.D << ',' << g.N << ',' << row.seed << ',' << row.algo;
        if (row.ok) {
            const auto& io = row.report["io"];
            const auto& a = row.report["analysis"];
            os << ',' << io["inputOps"].get<std::uint64_t>() << ',' << io["outputOps"].get<std::uint64_t>() << ','
               << io["totalOps"].get<std::uint64_t>() << ',' << a["sortUnit"].get<std::uint64_t>() << ','
               << a["ratio"].get<double>() << ',' << a["leadingFactor"].get<double>();
            for (const char* p : kPhases) {
                const auto& ph = io["phases"];
                os << ',' << (ph.contains(p) ? ph[p]["totalOps"].get<std::uint64_t>() : 0);
            }
            os << ',' << row.mode << ',' << row.report["wallMs"].get<double>() << ",ok\n";
        } else {
            os << ",,,,,,";
            for (std::size_t i = 0; i < std::size(kPhases); ++i) {
                os << ',';
            }
            std::string err = row.error;
            for (auto& ch : err) {
                if (ch == ',' || ch == '\n' || ch == '"') {
                    ch = ' ';
                }
            }
            os << ',' << row.mode << ",,error: " << err << '\n';
        }
    }
    return os.str();
}

nlohmann::json bench_json(const std::vector<BenchRow>& rows) {
    nlohmann::json out = nlohmann::json::array();
    for (const auto& row : rows) {
        if (row.ok) {
            out.push_back(row.report);
        } else {
            out.push_back({{"config",
                            {{"M", row.config.M},
                             {"B", row.config.B},
                             {"D", row.config.D},
                             {"N", row.config.N},
                             {"seed", row.seed},
                             {"algo", row.algo},
                             {"mode", row.mode}}},
                           {"error", row.error}});
        }
    }
    return out;
}

}  // namespace pdmsort
