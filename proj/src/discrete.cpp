#include "hqmc/dist/discrete.hpp"
#include "hqmc/dist/gamma.hpp"
#include "hqmc/dist/normal.hpp"

#include <cmath>
#include <stdexcept>

namespace hqmc::dist {

long poisson_quantile(double mean, double p) {
    if (mean < 0.0)
        throw std::domain_error("poisson_quantile: mean must be nonnegative");
    if (!(p > 0.0 && p < 1.0))
        throw std::domain_error("poisson_quantile: p must lie in (0,1)");
    if (mean == 0.0) return 0;

    if (mean <= 30.0) {
        double pmf = std::exp(-mean);
        double cdf = pmf;
        long k = 0;
        while (cdf < p) {
            ++k;
            pmf *= mean / k;
            cdf += pmf;
            if (k > 100000)
                throw std::runtime_error("poisson_quantile: summation did not terminate");
        }
        return k;
    }
    // Large mean: normal-approximation bracket, then exact scan using
    // CDF(k) = Q(k+1, mean).
    long k = static_cast<long>(mean + normal_quantile(p) * std::sqrt(mean));
    if (k < 0) k = 0;
    auto cdf = [&](long n) { return gamma_q(n + 1.0, mean); };
    while (k > 0 && cdf(k - 1) >= p) --k;
    while (cdf(k) < p) ++k;
    return k;
}

long binomial_quantile(long trials, double prob, double p) {
    if (trials < 0)
        throw std::domain_error("binomial_quantile: trials must be nonnegative");
    if (prob < 0.0 || prob > 1.0)
        throw std::domain_error("binomial_quantile: prob must lie in [0,1]");
    if (!(p > 0.0 && p < 1.0))
        throw std::domain_error("binomial_quantile: p must lie in (0,1)");
    if (trials == 0 || prob == 0.0) return 0;
    if (prob == 1.0) return trials;

    // log-space recurrence so extreme (trials, prob) do not underflow to a
    // stuck-at-zero pmf
    double lpmf = trials * std::log1p(-prob);
    double lodds = std::log(prob) - std::log1p(-prob);
    double cdf = std::exp(lpmf);
    long k = 0;
    while (cdf < p && k < trials) {
        ++k;
        lpmf += std::log(static_cast<double>(trials - k + 1) / k) + lodds;
        cdf += std::exp(lpmf);
    }
    return k;
}

} // namespace hqmc::dist
