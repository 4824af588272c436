#pragma once

#include "hqmc/qmc/scramble.hpp"
#include "hqmc/qmc/sobol.hpp"

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace hqmc::qmc {

struct EstimatorReport {
    double estimate = 0.0;
    std::vector<double> replicate_means;
    double std_error = 0.0;
    std::uint64_t n = 0;  // points per replicate
    std::uint64_t q = 0;  // replicates

    // Recompute estimate/std_error from replicate_means.
    static EstimatorReport from_replicates(std::vector<double> means, std::uint64_t n);
};

using Integrand = std::function<double(std::span<const double>)>;

// Randomized-QMC estimator: q independent Owen scramblings of the net, mean
// per replicate, batch standard error across replicates.
EstimatorReport rqmc_estimate(const Integrand& f, const DigitalNet& net,
                              std::uint64_t q, std::uint64_t seed);

// Plain Monte Carlo over `total` i.i.d. uniform points in [0,1]^d; the report
// treats every sample as its own replicate so the batch formula reduces to
// the usual i.i.d. standard error.
EstimatorReport mc_estimate(const Integrand& f, unsigned dimension,
                            std::uint64_t total, std::uint64_t seed);

// Seed stream for replicate r of a run seeded with `seed`.
std::uint64_t replicate_seed(std::uint64_t seed, std::uint64_t r);

} // namespace hqmc::qmc
