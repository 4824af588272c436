#include "hqmc/qmc/estimator.hpp"

#include <cmath>
#include <random>
#include <stdexcept>
#include <string>

namespace hqmc::qmc {

std::uint64_t replicate_seed(std::uint64_t seed, std::uint64_t r) {
    std::uint64_t x = seed + 0x9e3779b97f4a7c15ull * (r + 1);
    x ^= x >> 30; x *= 0xbf58476d1ce4e5b9ull;
    x ^= x >> 27; x *= 0x94d049bb133111ebull;
    x ^= x >> 31;
    return x;
}

EstimatorReport EstimatorReport::from_replicates(std::vector<double> means,
                                                 std::uint64_t n) {
    EstimatorReport rep;
    rep.n = n;
    rep.q = means.size();
    rep.replicate_means = std::move(means);
    double sum = 0.0;
    for (double v : rep.replicate_means) sum += v;
    rep.estimate = sum / rep.q;
    if (rep.q > 1) {
        double ss = 0.0;
        for (double v : rep.replicate_means) {
            double dlt = v - rep.estimate;
            ss += dlt * dlt;
        }
        rep.std_error = std::sqrt(ss / (static_cast<double>(rep.q) * (rep.q - 1)));
    }
    return rep;
}

EstimatorReport rqmc_estimate(const Integrand& f, const DigitalNet& net,
                              std::uint64_t q, std::uint64_t seed) {
    if (q < 2)
        throw std::invalid_argument("rqmc_estimate: need at least 2 replicates");
    const std::uint64_t n = net.count();
    const unsigned d = net.dimension();
    std::vector<double> means(q);
    std::vector<double> pt(d);
    for (std::uint64_t r = 0; r < q; ++r) {
        ScrambleState state(replicate_seed(seed, r));
        double acc = 0.0;
        for (std::uint64_t i = 0; i < n; ++i) {
            for (unsigned j = 0; j < d; ++j)
                pt[j] = state.apply_bits(net.coord_bits(i, j), j);
            double v = f(pt);
            if (!std::isfinite(v))
                throw std::runtime_error("rqmc_estimate: non-finite integrand value at point " +
                                         std::to_string(i) + " of replicate " + std::to_string(r));
            acc += v;
        }
        means[r] = acc / static_cast<double>(n);
    }
    return EstimatorReport::from_replicates(std::move(means), n);
}

EstimatorReport mc_estimate(const Integrand& f, unsigned dimension,
                            std::uint64_t total, std::uint64_t seed) {
    if (total < 2)
        throw std::invalid_argument("mc_estimate: need at least 2 points");
    std::mt19937_64 gen(replicate_seed(seed, 0));
    std::uniform_real_distribution<double> unif(0x1p-64, 1.0 - 0x1p-53);
    std::vector<double> vals(total);
    std::vector<double> pt(dimension);
    for (std::uint64_t i = 0; i < total; ++i) {
        for (unsigned j = 0; j < dimension; ++j)
            pt[j] = unif(gen);
        double v = f(pt);
        if (!std::isfinite(v))
            throw std::runtime_error("mc_estimate: non-finite integrand value at point " +
                                     std::to_string(i));
        vals[i] = v;
    }
    return EstimatorReport::from_replicates(std::move(vals), 1);
}

} // namespace hqmc::qmc
