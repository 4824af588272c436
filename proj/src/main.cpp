#include "hqmc/cli/experiment.hpp"

#include "CLI11.hpp"

#include <fstream>
#include <iostream>

namespace {

int cmd_price(const std::string& config_path, long long seed_override,
              const std::string& out_override, unsigned threads,
              bool emit_replicates) {
    hqmc::cli::ExperimentConfig cfg =
        hqmc::cli::ExperimentConfig::from_json_file(config_path);
    if (seed_override >= 0) cfg.seed = static_cast<std::uint64_t>(seed_override);
    if (!out_override.empty()) cfg.out = out_override;

    const auto result = hqmc::cli::run_experiment(cfg, threads);

    std::ofstream os(cfg.out);
    if (!os) {
        std::cerr << "error: cannot write '" << cfg.out << "'\n";
        return 1;
    }
    hqmc::cli::write_csv(result, os);
    if (emit_replicates) {
        const std::string rep_path = cfg.out + ".replicates";
        std::ofstream rs(rep_path);
        if (!rs) {
            std::cerr << "error: cannot write '" << rep_path << "'\n";
            return 1;
        }
        hqmc::cli::write_replicates_csv(result, rs);
    }
    hqmc::cli::write_csv(result, std::cout);

    if (result.any_failure()) {
        for (const auto& row : result.rows)
            if (!row.error.empty())
                std::cerr << "error: " << row.scheme << " n=" << row.n << ": "
                          << row.error << "\n";
        return 2;
    }
    return 0;
}

int cmd_verify(const std::string& results_path, const std::string& expect_path) {
    const auto report = hqmc::cli::verify_goldens(results_path, expect_path);
    for (const auto& line : report.lines)
        std::cout << (line.pass ? "PASS" : "FAIL") << "  " << line.text << "\n";
    if (report.lines.empty()) std::cout << "PASS  no checks listed\n";
    return report.ok() ? 0 : 3;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"stochastic-volatility pricing experiments"};
    app.require_subcommand(1);

    std::string config_path, out_override, results_path, expect_path;
    long long seed_override = -1;
    unsigned threads = 0;
    bool emit_replicates = false;

    auto* price = app.add_subcommand("price", "run an experiment config");
    price->add_option("--config", config_path, "experiment config (JSON)")
        ->required();
    price->add_option("--seed", seed_override, "override the config seed");
    price->add_option("--out", out_override, "override the output CSV path");
    price->add_option("--threads", threads, "worker threads (0 = all cores)");
    price->add_flag("--emit-replicates", emit_replicates,
                    "also write per-replicate means next to the CSV");

    auto* verify = app.add_subcommand("verify", "check a results CSV");
    verify->add_option("--results", results_path, "results CSV")->required();
    verify->add_option("--expect", expect_path, "expectation checks (JSON)")
        ->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (price->parsed())
            return cmd_price(config_path, seed_override, out_override, threads,
                             emit_replicates);
        return cmd_verify(results_path, expect_path);
    } catch (const hqmc::cli::ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
