#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "hqmc/dist/bessel.hpp"
#include "hqmc/dist/chisq.hpp"
#include "hqmc/dist/discrete.hpp"
#include "hqmc/dist/gamma.hpp"
#include "hqmc/dist/normal.hpp"

#include "test_util.hpp"

#include <cmath>
#include <random>

using namespace hqmc::dist;

TEST_CASE("normal quantile basics") {
    CHECK(normal_quantile(0.5) == doctest::Approx(0.0).epsilon(1e-14));
    CHECK(normal_quantile(0.975) == doctest::Approx(1.959963984540054).epsilon(1e-12));
    CHECK_THROWS_AS(normal_quantile(0.0), std::domain_error);
    CHECK_THROWS_AS(normal_quantile(1.0), std::domain_error);

    std::mt19937_64 gen(7);
    std::uniform_real_distribution<double> u(1e-8, 1.0 - 1e-8);
    for (int i = 0; i < 200; ++i) {
        double p = u(gen);
        CHECK(std::abs(normal_quantile(p) + normal_quantile(1.0 - p)) < 1e-9);
        CHECK(normal_cdf(normal_quantile(p)) == doctest::Approx(p).epsilon(1e-12));
    }
}

TEST_CASE("noncentral chi-squared quantile") {
    // central chi2 with 2 dof is Exponential(1/2)
    NoncentralChiSq central(2.0, 0.0);
    CHECK(central.quantile(0.5) == doctest::Approx(2.0 * std::log(2.0)).epsilon(1e-10));

    // stochastic ordering in lambda
    double nu = 1.26837;
    double prev = 0.0;
    for (double lam : {0.0, 0.01, 0.05, 0.1, 0.5, 2.0}) {
        double q = NoncentralChiSq(nu, lam).quantile(0.3);
        CHECK(q >= prev);
        prev = q;
    }

    // CDF-quantile inversion residual
    std::mt19937_64 gen(11);
    std::uniform_real_distribution<double> u(0.001, 0.999);
    for (int i = 0; i < 50; ++i) {
        double p = u(gen);
        NoncentralChiSq law(0.5 + 4.0 * u(gen), 3.0 * u(gen));
        CHECK(std::abs(law.cdf(law.quantile(p)) - p) < 1e-9);
    }
}

TEST_CASE("noncentral chi-squared quantile vs simulation") {
    // Heston variance transition over dt=1 with Feller-violating parameters
    const double nu = 1.26837, lam = 0.0557;
    NoncentralChiSq law(nu, lam);
    const std::size_t n = 1'000'000;
    std::mt19937_64 gen(42);
    std::poisson_distribution<long> pois(0.5 * lam);
    std::vector<double> sample(n);
    for (auto& x : sample) {
        long k = pois(gen);
        std::gamma_distribution<double> g(0.5 * nu + k, 2.0);
        x = g(gen);
    }
    double q = law.quantile(0.9);
    double emp = 0.0;
    for (double x : sample)
        if (x <= q) emp += 1.0;
    emp /= n;
    CHECK(std::abs(emp - 0.9) < testutil::ks_critical(n, 0.01));
}

TEST_CASE("gamma quantile") {
    CHECK(gamma_quantile(1.0, 1.0, 0.5) == doctest::Approx(std::log(2.0)).epsilon(1e-12));
    // rate scaling
    for (double p : {0.1, 0.42, 0.9}) {
        CHECK(gamma_quantile(2.0, 3.0, p) ==
              doctest::Approx(gamma_quantile(2.0, 1.0, p) / 3.0).epsilon(1e-10));
    }
    // independent quadrature oracle: integrate the pdf with Simpson's rule,
    // bisect for the quantile
    {
        const double k = 2.5, beta = 0.7, p = 0.25;
        auto pdf = [&](double x) {
            return std::pow(beta, k) * std::pow(x, k - 1.0) * std::exp(-beta * x) /
                   std::tgamma(k);
        };
        auto cdf_num = [&](double x) {
            const int n = 4000;
            double hstep = x / n, s = pdf(0.0) + pdf(x);
            for (int i = 1; i < n; ++i)
                s += (i % 2 ? 4.0 : 2.0) * pdf(i * hstep);
            return s * hstep / 3.0;
        };
        double lo = 0.0, hi = 50.0;
        for (int it = 0; it < 60; ++it) {
            double mid = 0.5 * (lo + hi);
            (cdf_num(mid) < p ? lo : hi) = mid;
        }
        CHECK(gamma_quantile(k, beta, p) == doctest::Approx(0.5 * (lo + hi)).epsilon(1e-8));
    }
    // inversion residual
    std::mt19937_64 gen(3);
    std::uniform_real_distribution<double> u(0.001, 0.999);
    for (int i = 0; i < 50; ++i) {
        double k = 0.2 + 5.0 * u(gen), p = u(gen);
        CHECK(gamma_cdf(k, 1.0, gamma_quantile(k, 1.0, p)) ==
              doctest::Approx(p).epsilon(1e-9));
    }
}

TEST_CASE("poisson quantile") {
    for (double p : {0.01, 0.5, 0.99})
        CHECK(poisson_quantile(0.0, p) == 0);
    CHECK(poisson_quantile(1.0, std::exp(-1.0)) == 0);
    CHECK(poisson_quantile(1.0, std::exp(-1.0) + 1e-12) == 1);

    // brute-force CDF summation oracle (log-space pmf so large means don't underflow)
    auto oracle = [](double lam, double p) {
        double cdf = 0.0;
        long k = -1;
        while (cdf < p) {
            ++k;
            cdf += std::exp(k * std::log(lam) - lam - std::lgamma(k + 1.0));
        }
        return k;
    };
    CHECK(poisson_quantile(7.3, 0.95) == oracle(7.3, 0.95));
    std::mt19937_64 gen(9);
    std::uniform_real_distribution<double> u(0.01, 0.99);
    for (int i = 0; i < 100; ++i) {
        double lam = 50.0 * u(gen), p = u(gen);
        CHECK(poisson_quantile(lam, p) == oracle(lam, p));
    }
    // large-mean branch agrees with summation
    CHECK(poisson_quantile(2000.0, 0.75) == oracle(2000.0, 0.75));
}

TEST_CASE("binomial quantile") {
    CHECK(binomial_quantile(0, 0.3, 0.7) == 0);
    CHECK(binomial_quantile(5, 1.0, 0.2) == 5);
    auto oracle = [](long n, double th, double p) {
        double cdf = 0.0;
        for (long k = 0; k <= n; ++k) {
            double pmf = std::exp(std::lgamma(n + 1.0) - std::lgamma(k + 1.0) -
                                  std::lgamma(n - k + 1.0)) *
                         std::pow(th, k) * std::pow(1.0 - th, n - k);
            cdf += pmf;
            if (cdf >= p) return k;
        }
        return n;
    };
    CHECK(binomial_quantile(9, 0.35, 0.5) == oracle(9, 0.35, 0.5));
    std::mt19937_64 gen(13);
    std::uniform_real_distribution<double> u(0.02, 0.98);
    for (int i = 0; i < 100; ++i) {
        long n = 1 + static_cast<long>(30 * u(gen));
        double th = u(gen), p = u(gen);
        CHECK(binomial_quantile(n, th, p) == oracle(n, th, p));
    }
    // binomial(4, 1/2) median
    CHECK(binomial_quantile(4, 0.5, 0.5) == 2);
}

namespace {
// high-precision real-axis series oracle in long double
long double bessel_series_ld(double nu, long double x) {
    long double q = 0.25L * x * x;
    long double term = 1.0L, sum = 1.0L;
    for (int k = 1; k < 1000; ++k) {
        term *= q / (k * (nu + (long double)k));
        sum += term;
        if (term < 1e-22L * sum) break;
    }
    return std::pow(0.5L * x, (long double)nu) / std::tgammal(nu + 1.0L) * sum;
}
} // namespace

TEST_CASE("modified Bessel function") {
    CHECK(bessel_i_real(0.0, 0.0) == doctest::Approx(1.0));
    double expect_half = std::sqrt(2.0 / (M_PI * 1.0)) * std::sinh(1.0);
    CHECK(bessel_i_real(0.5, 1.0) == doctest::Approx(expect_half).epsilon(1e-12));
    CHECK(expect_half == doctest::Approx(0.937674).epsilon(1e-6));

    // real-axis agreement with long double series across both branches
    for (double x : {0.1, 1.0, 5.0, 20.0, 29.0, 31.0, 50.0, 200.0}) {
        for (double nu : {-0.37, 0.0, 0.63418, 2.5}) {
            double lv = bessel_i(nu, {x, 0.0}, true).real();
            long double ref = std::log(bessel_series_ld(nu, x));
            CHECK(lv == doctest::Approx((double)ref).epsilon(1e-10));
        }
    }
    // complex evaluation restricted to the real axis matches real path
    for (double x : {0.5, 3.0, 12.0}) {
        auto c = bessel_i(0.3, {x, 0.0});
        CHECK(c.imag() == doctest::Approx(0.0).scale(1).epsilon(1e-12));
        CHECK(c.real() == doctest::Approx(bessel_i_real(0.3, x)).epsilon(1e-12));
    }
    // log-scaled large argument vs asymptotic oracle
    {
        double z = 50.0, nu = 0.63418;
        double mu = 4.0 * nu * nu;
        double s = 1.0 - (mu - 1.0) / (8.0 * z) +
                   (mu - 1.0) * (mu - 9.0) / (2.0 * 64.0 * z * z) -
                   (mu - 1.0) * (mu - 9.0) * (mu - 25.0) / (6.0 * 512.0 * z * z * z);
        double ref = z - 0.5 * std::log(2.0 * M_PI * z) + std::log(s);
        CHECK(bessel_i(nu, {z, 0.0}, true).real() == doctest::Approx(ref).epsilon(1e-8));
    }
    CHECK_THROWS_AS(bessel_i(0.5, {800.0, 0.0}, false), std::range_error);
}

TEST_CASE("Bessel distribution") {
    for (double p : {0.01, 0.5, 0.99})
        CHECK(BesselDistribution(0.5, 0.0).quantile(p) == 0);

    // normalization of the pmf over n = 0..200
    {
        double nu = 0.5, z = 2.0;
        double lognorm = bessel_i(nu, {z, 0.0}, true).real();
        double sum = 0.0;
        for (int n = 0; n <= 200; ++n)
            sum += std::exp((2 * n + nu) * std::log(0.5 * z) - lognorm -
                            std::lgamma(n + 1.0) - std::lgamma(n + nu + 1.0));
        CHECK(sum <= 1.0 + 1e-12);
        CHECK(sum >= 1.0 - 1e-12);
    }

    // summation oracle incl. Feller-violated order range
    auto oracle = [](double nu, double z, double p) {
        double lognorm = bessel_i(nu, {z, 0.0}, true).real();
        double cdf = 0.0;
        for (long n = 0; n < 10000; ++n) {
            cdf += std::exp((2 * n + nu) * std::log(0.5 * z) - lognorm -
                            std::lgamma(n + 1.0) - std::lgamma(n + nu + 1.0));
            if (cdf >= p) return n;
        }
        return -1L;
    };
    CHECK(BesselDistribution(-0.37, 1.5).quantile(0.5) == oracle(-0.37, 1.5, 0.5));
    std::mt19937_64 gen(21);
    std::uniform_real_distribution<double> u(0.02, 0.98);
    for (int i = 0; i < 60; ++i) {
        double nu = -0.8 + 3.0 * u(gen);
        double z = 8.0 * u(gen);
        double p = u(gen);
        CHECK(BesselDistribution(nu, z).quantile(p) == oracle(nu, z, p));
    }
}

TEST_CASE("quantile monotonicity in p") {
    std::vector<double> ps;
    for (int i = 1; i < 40; ++i) ps.push_back(i / 40.0);
    auto check_monotone = [&](auto&& q) {
        double prev = -1e300;
        for (double p : ps) {
            double v = q(p);
            CHECK(v >= prev);
            prev = v;
        }
    };
    check_monotone([](double p) { return normal_quantile(p); });
    check_monotone([](double p) { return gamma_quantile(1.7, 2.2, p); });
    check_monotone([](double p) { return NoncentralChiSq(1.26837, 0.4).quantile(p); });
    check_monotone([](double p) { return (double)poisson_quantile(3.3, p); });
    check_monotone([](double p) { return (double)binomial_quantile(11, 0.4, p); });
    check_monotone([](double p) { return (double)BesselDistribution(0.2, 2.5).quantile(p); });
}

TEST_CASE("noncentral chi-squared quantile spline matches exact") {
    NcChisqQuantileSpline spline(1.26837, 0.0557);
    NoncentralChiSq law(1.26837, 0.0557);
    std::mt19937_64 gen(5);
    std::uniform_real_distribution<double> u(1e-4, 1.0 - 1e-4);
    for (int i = 0; i < 300; ++i) {
        double p = u(gen);
        double a = spline(p), b = law.quantile(p);
        CHECK(a == doctest::Approx(b).epsilon(2e-5));
    }
    // outside the grid falls back to the exact quantile
    CHECK(spline(1e-7) == doctest::Approx(law.quantile(1e-7)).epsilon(1e-10));
}
