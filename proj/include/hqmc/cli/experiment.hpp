#pragma once

#include "hqmc/ext/multiasset.hpp"
#include "hqmc/ext/three_halves.hpp"
#include "hqmc/heston/params.hpp"
#include "hqmc/svj/svj.hpp"

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

namespace hqmc::cli {

// configuration problems are reported with the offending field path
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ExperimentConfig {
    std::string model;                // heston | svj | multiasset | 3over2
    std::string payoff;               // european | asian | barrier | basket
    std::vector<std::string> schemes; // mc | qmc | bridge | cond-qmc
    std::vector<std::uint64_t> n;     // points per replicate, powers of two
    std::uint64_t q = 8;
    std::uint64_t seed = 0;
    std::size_t dates = 1;
    double strike = 100.0;
    double expiry = 1.0;
    double barrier = 0.0;
    std::string out = "results.csv";

    // the block matching `model` is populated
    heston::HestonParams heston{};
    svj::SvjParams svj{};
    ext::MultiAssetParams multiasset{};
    ext::ThreeHalvesParams three_halves{};
    int refine_depth = 5; // 3over2 reference time-integral sampler

    static ExperimentConfig from_json_file(const std::string& path);
    static ExperimentConfig from_json_text(const std::string& text);
    void validate() const;
};

struct RowResult {
    std::string scheme;
    std::uint64_t n = 0;
    std::uint64_t q = 0;
    double estimate = 0.0;
    double std_error = 0.0;
    double wall_ms = 0.0;
    std::vector<double> replicate_means;
    std::string error; // nonempty marks a numerical failure; run continues
};

struct ExperimentResult {
    std::vector<RowResult> rows; // sorted by (scheme, n)
    bool any_failure() const;
};

// Deterministic given (config, seed) regardless of worker scheduling;
// threads = 0 picks the hardware concurrency.
ExperimentResult run_experiment(const ExperimentConfig& cfg, unsigned threads = 0);

// columns: scheme,n,q,estimate,std_error,wall_ms (failures marked ERROR)
void write_csv(const ExperimentResult& result, std::ostream& os);
// columns: scheme,n,rep,mean — the per-replicate means behind each row
void write_replicates_csv(const ExperimentResult& result, std::ostream& os);

struct VerifyReport {
    struct Line {
        bool pass = false;
        std::string text;
    };
    std::vector<Line> lines;
    bool ok() const;
};

// Expectation checks against a results CSV. Supported check objects:
//   {"scheme","n","reference",["k"],["reference_std_error"]}  value check
//   {"type":"se_ratio","num_scheme","den_scheme","n","max"}   ratio bound
//   {"type":"se_order","schemes":[...],["min_levels"]}        per-n ordering
VerifyReport verify_goldens(const std::string& results_csv_path,
                            const std::string& expect_path);

} // namespace hqmc::cli
