#include <CLI11.hpp>

#include <fstream>
#include <iostream>

#include "pdmsort/analysis.hpp"
#include "pdmsort/keyfile.hpp"
#include "pdmsort/runner.hpp"

using namespace pdmsort;

namespace {

void write_text(const std::string& path, const std::string& text) {
    if (path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error("cannot create " + path);
    }
    out << text;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Parallel disk model simulator and Guidesort"};
    app.require_subcommand(1);

    std::uint64_t M = 0, B = 0, D = 0, N = 0, seed = 1;
    std::string algo = "auto", mode = "auto", in, out, csv, json_out, grid;
    unsigned jobs = 1;

    auto* gen = app.add_subcommand("gen", "Write N pseudo-random 64-bit keys");
    gen->add_option("--N,--n", N, "number of keys")->required();
    gen->add_option("--seed", seed, "PRNG seed");
    gen->add_option("--out", out, "output key file")->required();

    auto* sort = app.add_subcommand("sort", "Sort a key file on a simulated machine");
    sort->add_option("--in", in, "input key file")->required();
    sort->add_option("--out", out, "sorted key file")->required();
    sort->add_option("--M", M, "memory size in items")->required();
    sort->add_option("--B", B, "block size in items")->required();
    sort->add_option("--D", D, "number of disks")->required();
    sort->add_option("--algo", algo, "auto|sequential|striping|guidesort");
    sort->add_option("--mode", mode, "auto|simple|general");
    sort->add_option("--json", json_out, "I/O report path ('-' for stdout)");

    auto* verify = app.add_subcommand("verify", "Check a sorted key file against its input");
    verify->add_option("--in", in, "input key file")->required();
    verify->add_option("--out", out, "sorted key file")->required();

    auto* params = app.add_subcommand("params", "Print parameters and routing for a configuration");
    params->add_option("--M", M, "memory size in items")->required();
    params->add_option("--B", B, "block size in items")->required();
    params->add_option("--D", D, "number of disks")->required();
    params->add_option("--mode", mode, "auto|simple|general|striping|sequential");

    auto* bench = app.add_subcommand("bench", "Run a grid of configurations");
    bench->add_option("--grid", grid, "M,B,D,N;M,B,D,N;...")->required();
    bench->add_option("--seed", seed, "PRNG seed");
    bench->add_option("--algo", algo, "auto|sequential|striping|guidesort|all");
    bench->add_option("--mode", mode, "auto|simple|general");
    bench->add_option("--csv", csv, "CSV report path ('-' for stdout)");
    bench->add_option("--json", json_out, "JSON report path ('-' for stdout)");
    bench->add_option("--jobs", jobs, "rows run in parallel");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (gen->parsed()) {
            if (N == 0) {
                throw std::invalid_argument("--N must be at least 1");
            }
            write_keys(out, generate_keys(N, seed));
            return 0;
        }
        if (sort->parsed()) {
            RunConfig cfg;
            cfg.machine = {M, B, static_cast<std::uint32_t>(D)};
            cfg.algo = parse_algo(algo);
            cfg.mode = parse_mode(mode);
            auto keys = read_keys(in);
            auto res = run_sort(cfg, keys);
            write_keys(out, res.keys);
            auto report = report_json(cfg, keys.size(), res);
            if (!json_out.empty()) {
                write_text(json_out, report.dump(2) + "\n");
            } else {
                std::cerr << "algo=" << algo_name(res.algo) << " ops=" << res.stats.total_ops()
                          << " ratio=" << report["analysis"]["ratio"].get<double>() << "\n";
            }
            return 0;
        }
        if (verify->parsed()) {
            auto res = verify_keys(read_keys(in), read_keys(out));
            std::cout << (res.ok() ? "PASS" : "FAIL") << ": " << res.message << "\n";
            return res.ok() ? 0 : 1;
        }
        if (params->parsed()) {
            MachineConfig cfg{M, B, static_cast<std::uint32_t>(D)};
            Machine probe(cfg);  // validates the configuration
            const std::uint64_t m = cfg.m();
            nlohmann::json j;
            j["M"] = M;
            j["B"] = B;
            j["D"] = D;
            j["m"] = m;
            j["mode"] = mode;
            j["leadingFactor"] = leading_factor(m, B, D);
            auto plan = select_algorithm(m, B, D, parse_mode(mode));
            if (std::holds_alternative<SequentialPlan>(plan)) {
                j["algo"] = "sequential";
            } else if (const auto* s = std::get_if<StripingPlan>(&plan)) {
                j["algo"] = "striping";
                j["arity"] = s->arity;
            } else {
                const auto& g = std::get<GuidesortPlan>(plan);
                j["algo"] = "guidesort";
                j["recipe"] = g.simple ? "simple" : (g.unchecked ? "general-unchecked" : "general");
                j["params"] = to_json(g.params);
                j["violations"] = validate_params(g.params, m, B, D);
            }
            std::cout << j.dump(2) << "\n";
            return 0;
        }
        if (bench->parsed()) {
            std::vector<Algo> algos;
            if (algo == "all") {
                algos = {Algo::Sequential, Algo::Striping, Algo::Guidesort};
            } else {
                algos = {parse_algo(algo)};
            }
            auto rows = run_bench(parse_grid(grid), seed, algos, parse_mode(mode), jobs);
            if (!csv.empty()) {
                write_text(csv, bench_csv(rows));
            }
            if (!json_out.empty()) {
                write_text(json_out, bench_json(rows).dump(2) + "\n");
            }
            if (csv.empty() && json_out.empty()) {
                std::cout << bench_csv(rows);
            }
            std::size_t failed = 0;
            for (const auto& r : rows) {
                if (!r.ok) {
                    ++failed;
                    std::cerr << "row failed: " << r.config.M << ',' << r.config.B << ',' << r.config.D << ','
                              << r.config.N << ' ' << r.algo << ": " << r.error << "\n";
                }
            }
            return failed == 0 ? 0 : 1;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
