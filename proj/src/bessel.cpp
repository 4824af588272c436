#include "hqmc/dist/bessel.hpp"

#include <cmath>
#include <limits>

namespace hqmc::dist {

namespace {

using cplx = std::complex<double>;

// Ascending series, returned as log I_nu(z). Handles z = 0 by limit.
cplx log_bessel_series(double nu, cplx z) {
    if (z == 0.0) {
        if (nu == 0.0) return cplx(0.0, 0.0);
        if (nu > 0.0) return cplx(-std::numeric_limits<double>::infinity(), 0.0);
        return cplx(std::numeric_limits<double>::infinity(), 0.0);
    }
    const cplx q = 0.25 * z * z;
    cplx term(1.0, 0.0), sum(1.0, 0.0);
    for (int k = 1; k <= 400; ++k) {
        term *= q / (k * (nu + k));
        sum += term;
        if (std::abs(term) < 1e-17 * std::abs(sum))
            break;
    }
    return nu * std::log(0.5 * z) - std::lgamma(nu + 1.0) + std::log(sum);
}

// Large-|z| asymptotic expansion (|arg z| < pi/2), as log I_nu(z).
cplx log_bessel_asymptotic(double nu, cplx z) {
    const double mu = 4.0 * nu * nu;
    cplx term(1.0, 0.0), sum(1.0, 0.0);
    double prev = std::abs(term);
    for (int k = 1; k <= 30; ++k) {
        double num = mu - (2.0 * k - 1.0) * (2.0 * k - 1.0);
        term *= -num / (8.0 * k * z);
        double mag = std::abs(term);
        if (mag > prev)  // divergent tail reached
            break;
        sum += term;
        prev = mag;
        if (mag < 1e-17 * std::abs(sum))
            break;
    }
    return z - 0.5 * std::log(2.0 * M_PI * z) + std::log(sum);
}

} // namespace

std::complex<double> bessel_i_log_arg(double nu, std::complex<double> log_z) {
    if (nu <= -1.0)
        throw std::domain_error("bessel_i_log_arg: order must exceed -1");
    const double mod = std::exp(log_z.real());
    if (mod <= 30.0) {
        // series in z^2, single-valued; only the prefactor carries the
        // unwrapped phase
        const cplx q = 0.25 * std::exp(2.0 * log_z);
        cplx term(1.0, 0.0), sum(1.0, 0.0);
        for (int k = 1; k <= 400; ++k) {
            term *= q / (k * (nu + k));
            sum += term;
            if (std::abs(term) < 1e-17 * std::abs(sum))
                break;
        }
        return nu * (log_z - std::log(2.0)) - std::lgamma(nu + 1.0) + std::log(sum);
    }
    const cplx z = std::exp(log_z);
    if (z.real() < 0.1 * mod)
        throw std::runtime_error("bessel_i_log_arg: argument outside asymptotic sector");
    const double mu = 4.0 * nu * nu;
    cplx term(1.0, 0.0), sum(1.0, 0.0);
    double prev = std::abs(term);
    for (int k = 1; k <= 30; ++k) {
        double num = mu - (2.0 * k - 1.0) * (2.0 * k - 1.0);
        term *= -num / (8.0 * k * z);
        double mag = std::abs(term);
        if (mag > prev)
            break;
        sum += term;
        prev = mag;
        if (mag < 1e-17 * std::abs(sum))
            break;
    }
    return z - 0.5 * (std::log(2.0 * M_PI) + log_z) + std::log(sum);
}

std::complex<double> bessel_i(double nu, std::complex<double> z, bool log_scaled) {
    if (nu <= -1.0)
        throw std::domain_error("bessel_i: order must exceed -1");
    cplx lv = (std::abs(z) <= 30.0) ? log_bessel_series(nu, z)
                                    : log_bessel_asymptotic(nu, z);
    if (log_scaled)
        return lv;
    if (lv.real() > 700.0)
        throw std::range_error("bessel_i: overflow in unscaled mode, use log_scaled");
    return std::exp(lv);
}

long BesselDistribution::quantile(double p) const {
    if (!(p > 0.0 && p < 1.0))
        throw std::domain_error("BesselDistribution::quantile: p must lie in (0,1)");
    if (z == 0.0) return 0;

    const double logz2 = std::log(0.5 * z);
    const double lognorm = bessel_i(nu, cplx(z, 0.0), true).real();
    // log-space pmf recurrence b_n = b_{n-1} (z/2)^2 / (n (n+nu)); the mass
    // peaks near n ~ z/2, so pmfs may start far below the representable range
    double lb = nu * logz2 - lognorm - std::lgamma(nu + 1.0);
    double cdf = std::exp(lb);
    const double lq = 2.0 * logz2;
    long n = 0;
    while (cdf < p) {
        ++n;
        lb += lq - std::log(n * (n + nu));
        cdf += std::exp(lb);
        if (n > 200000)
            throw std::runtime_error("BesselDistribution::quantile: pmf normalization failure");
        if (lb < -41.0 && n > 0.5 * z) { // past the mode with negligible pmf
            if (1.0 - cdf <= 1e-9)
                break; // p in the far tail beyond representable mass
            throw std::runtime_error("BesselDistribution::quantile: pmf normalization failure");
        }
    }
    return n;
}

} // namespace hqmc::dist
