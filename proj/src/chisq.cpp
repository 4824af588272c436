#include "hqmc/dist/chisq.hpp"
#include "hqmc/dist/gamma.hpp"
#include "hqmc/dist/normal.hpp"
#include "hqmc/dist/pchip.hpp"

#include <algorithm>
#include <limits>

namespace hqmc::dist {

double NoncentralChiSq::cdf(double x) const {
    if (x <= 0.0) return 0.0;
    if (lambda == 0.0)
        return gamma_p(0.5 * nu, 0.5 * x);

    // Poisson-mixture of central chi-squared CDFs, scanned outward from the
    // Poisson mode so the dominant weights are accumulated first.
    const double hl = 0.5 * lambda;
    const long mode = static_cast<long>(hl);
    auto logw = [&](long k) {
        return -hl + k * std::log(hl) - std::lgamma(k + 1.0);
    };
    double sum = 0.0, wsum = 0.0;
    double tol = 1e-14;
    // downward
    for (long k = mode; k >= 0; --k) {
        double w = std::exp(logw(k));
        sum += w * gamma_p(0.5 * nu + k, 0.5 * x);
        wsum += w;
        if (w < tol && k < mode) break;
    }
    // upward
    for (long k = mode + 1; k < mode + 10000; ++k) {
        double w = std::exp(logw(k));
        sum += w * gamma_p(0.5 * nu + k, 0.5 * x);
        wsum += w;
        if (w < tol) break;
    }
    return std::min(1.0, sum);
}

double NoncentralChiSq::pdf(double x) const {
    if (x <= 0.0) return 0.0;
    if (lambda == 0.0) {
        double a = 0.5 * nu;
        return 0.5 * std::exp((a - 1.0) * std::log(0.5 * x) - 0.5 * x - std::lgamma(a));
    }
    const double hl = 0.5 * lambda;
    const long mode = static_cast<long>(hl);
    auto logw = [&](long k) {
        return -hl + k * std::log(hl) - std::lgamma(k + 1.0);
    };
    auto dens = [&](long k) {
        double a = 0.5 * nu + k;
        return 0.5 * std::exp((a - 1.0) * std::log(0.5 * x) - 0.5 * x - std::lgamma(a));
    };
    double sum = 0.0;
    for (long k = mode; k >= 0; --k) {
        double w = std::exp(logw(k));
        sum += w * dens(k);
        if (w < 1e-14 && k < mode) break;
    }
    for (long k = mode + 1; k < mode + 10000; ++k) {
        double w = std::exp(logw(k));
        sum += w * dens(k);
        if (w < 1e-14) break;
    }
    return sum;
}

double NoncentralChiSq::quantile(double p) const {
    if (!(p > 0.0 && p < 1.0))
        throw std::domain_error("NoncentralChiSq::quantile: p must lie in (0,1)");

    // Starting guess: normal approximation on the Wilson-Hilferty scale.
    const double mean = nu + lambda;
    const double var = 2.0 * (nu + 2.0 * lambda);
    double z = normal_quantile(p);
    double x = mean + z * std::sqrt(var);
    if (x <= 0.0) x = mean * std::exp(z * std::sqrt(var) / mean);
    x = std::max(x, 1e-300);

    double lo = 0.0, hi = std::numeric_limits<double>::infinity();
    for (int it = 0; it < 300; ++it) {
        double f = cdf(x) - p;
        if (f > 0.0) hi = x; else lo = x;
        if (std::abs(f) < 1e-12)
            break;
        double g = pdf(x);
        double xn = (g > 0.0) ? x - f / g : x;
        if (!(xn > lo && xn < hi))
            xn = std::isinf(hi) ? x * 2.0 : 0.5 * (lo + hi);
        if (xn == x)
            break;
        x = xn;
    }
    if (std::abs(cdf(x) - p) > 1e-9)
        throw std::runtime_error("NoncentralChiSq::quantile: root finder did not converge");
    return x;
}

NcChisqQuantileSpline::NcChisqQuantileSpline(double nu, double lambda, int nodes)
    : law_(nu, lambda) {
    // Grid uniform in the normal-quantile transform of p; quantile vs z is
    // smooth and near-linear in the tails.
    const double zmax = 4.2;
    pgrid_.resize(nodes);
    q_.resize(nodes);
    std::vector<double> zg(nodes);
    for (int i = 0; i < nodes; ++i) {
        double zz = -zmax + 2.0 * zmax * i / (nodes - 1);
        zg[i] = zz;
        pgrid_[i] = normal_cdf(zz);
        q_[i] = law_.quantile(pgrid_[i]);
    }
    zgrid_ = std::move(zg);
    slope_ = pchip_slopes(zgrid_, q_);
}

double NcChisqQuantileSpline::operator()(double p) const {
    if (p <= pgrid_.front() || p >= pgrid_.back())
        return law_.quantile(p);
    double z = normal_quantile(p);
    auto it = std::upper_bound(zgrid_.begin(), zgrid_.end(), z);
    std::size_t seg = static_cast<std::size_t>(it - zgrid_.begin()) - 1;
    seg = std::min(seg, zgrid_.size() - 2);
    return std::max(0.0, pchip_eval(zgrid_, q_, slope_, z, seg));
}

} // namespace hqmc::dist
