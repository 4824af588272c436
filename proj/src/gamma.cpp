#include "hqmc/dist/gamma.hpp"
#include "hqmc/dist/normal.hpp"

#include <algorithm>
#include <limits>

namespace hqmc::dist {

namespace {

double gamma_p_series(double a, double x) {
    // lower series: P(a,x) = x^a e^-x / Gamma(a+1) * sum x^n / ((a+1)...(a+n))
    double ap = a;
    double sum = 1.0 / a;
    double del = sum;
    for (int n = 0; n < 500; ++n) {
        ap += 1.0;
        del *= x / ap;
        sum += del;
        if (std::abs(del) < std::abs(sum) * 1e-16)
            break;
    }
    return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

double gamma_q_cf(double a, double x) {
    // Lentz continued fraction for Q(a,x), x > a+1 roughly
    const double tiny = 1e-300;
    double b = x + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i <= 500; ++i) {
        double an = -i * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < 1e-16)
            break;
    }
    return h * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

} // namespace

double gamma_p(double a, double x) {
    if (a <= 0.0)
        throw std::domain_error("gamma_p: shape must be positive");
    if (x < 0.0)
        throw std::domain_error("gamma_p: x must be nonnegative");
    if (x == 0.0) return 0.0;
    if (x < a + 1.0)
        return gamma_p_series(a, x);
    return 1.0 - gamma_q_cf(a, x);
}

double gamma_q(double a, double x) {
    if (a <= 0.0)
        throw std::domain_error("gamma_q: shape must be positive");
    if (x < 0.0)
        throw std::domain_error("gamma_q: x must be nonnegative");
    if (x == 0.0) return 1.0;
    if (x < a + 1.0)
        return 1.0 - gamma_p_series(a, x);
    return gamma_q_cf(a, x);
}

double gamma_cdf(double shape, double rate, double x) {
    if (x <= 0.0) return 0.0;
    return gamma_p(shape, rate * x);
}

double gamma_quantile(double shape, double rate, double p) {
    if (shape <= 0.0 || rate <= 0.0)
        throw std::domain_error("gamma_quantile: shape and rate must be positive");
    if (!(p > 0.0 && p < 1.0))
        throw std::domain_error("gamma_quantile: p must lie in (0,1)");

    // Wilson-Hilferty starting point for the unit-rate quantile.
    double z = normal_quantile(p);
    double t = 1.0 - 1.0 / (9.0 * shape) + z / (3.0 * std::sqrt(shape));
    double x = shape * t * t * t;
    if (x <= 0.0 || shape < 0.3) {
        // small-shape start from P(a,x) ~ x^a / (a Gamma(a))
        x = std::exp((std::log(p) + std::lgamma(shape + 1.0)) / shape);
    }
    x = std::max(x, 1e-300);

    double lo = 0.0, hi = std::numeric_limits<double>::infinity();
    for (int it = 0; it < 200; ++it) {
        double f = gamma_p(shape, x) - p;
        if (f > 0.0) hi = x; else lo = x;
        if (std::abs(f) < 1e-14)
            break;
        double logpdf = (shape - 1.0) * std::log(x) - x - std::lgamma(shape);
        double step = f * std::exp(-logpdf);
        double xn = x - step;
        if (!(xn > lo && (xn < hi))) {
            xn = std::isinf(hi) ? x * 2.0 : 0.5 * (lo + hi);
        }
        if (xn == x)
            break;
        x = xn;
    }
    return x / rate;
}

} // namespace hqmc::dist
