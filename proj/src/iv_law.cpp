#include "hqmc/heston/iv_law.hpp"

#include "hqmc/dist/bessel.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace hqmc::heston {

namespace {

constexpr double kPi = 3.141592653589793238462643;
// CDF truncation target. Kept well below the quantile residual tolerance:
// the series length N jumps as the evaluation point moves, and each jump
// perturbs F by up to one term, so the term size must be negligible at the
// root-finder's 1e-7 scale.
constexpr double kEps = 1e-9;
// Width multiplier in the inversion period rule h = 2*pi/(x + |m1| + q*sd).
// The mass beyond the period aliases directly into the CDF, so q must push
// that mass below the CDF error budget. At q=12 the aliasing left a ~1e-5
// systematic shift in smooth functionals of the quantile (visible against a
// closed-form European-call oracle); q=18 removes it at ~1.5x series cost.
constexpr double kQWidth = 18.0;
constexpr std::size_t kNCap = 1'000'000;

// log(sinh(z)) for Re(z) > 0 without overflow
std::complex<double> lsinh(std::complex<double> z) {
    return z - std::log(2.0) + std::log(1.0 - std::exp(-2.0 * z));
}

double lsinh_real(double x) {
    return x - std::log(2.0) + std::log1p(-std::exp(-2.0 * x));
}

std::complex<double> coth(std::complex<double> z) {
    const std::complex<double> e = std::exp(-2.0 * z);
    return (1.0 + e) / (1.0 - e);
}

} // namespace

CfMoments cf_moments(const std::function<std::complex<double>(double)>& phi, double h) {
    // conjugate symmetry supplies phi(-a) = conj(phi(a))
    const std::complex<double> p1 = phi(h), p2 = phi(2.0 * h);
    const double d1 = (8.0 * p1.imag() - p2.imag()) / (6.0 * h);
    const double d2 = (-2.0 * p2.real() + 32.0 * p1.real() - 30.0) / (12.0 * h * h);
    return {d1, -d2};
}

CfMoments cf_moments_richardson(const std::function<std::complex<double>(double)>& phi,
                                double h) {
    const CfMoments a = cf_moments(phi, h);
    const CfMoments b = cf_moments(phi, 0.5 * h);
    return {(16.0 * b.m1 - a.m1) / 15.0, (16.0 * b.m2 - a.m2) / 15.0};
}

IntegratedVarianceLaw::IntegratedVarianceLaw(const HestonParams& p, double dt, double v_u,
                                             double v_t) {
    p.validate();
    if (!(dt > 0.0))
        throw std::invalid_argument("IntegratedVarianceLaw: dt must be positive");
    if (!(v_u >= 0.0) || !(v_t >= 0.0))
        throw std::invalid_argument("IntegratedVarianceLaw: endpoints must be nonnegative");

    kappa_ = p.kappa;
    sigma2_ = p.sigma * p.sigma;
    dt_ = dt;
    sumv_ = (v_u + v_t) / sigma2_;
    sqxy_ = std::sqrt(v_u * v_t);
    nu_ = 0.5 * p.delta() - 1.0;

    const double hk = 0.5 * kappa_ * dt;
    lsinh_k_ = lsinh_real(hk);
    coth_k_ = 1.0 / std::tanh(hk);
    log_ib_ = 0.0;
    if (sqxy_ > 0.0) {
        const double log_arg_b = std::log(2.0 * kappa_ * sqxy_ / sigma2_) - lsinh_k_;
        log_ib_ = dist::bessel_i(nu_, std::exp(log_arg_b), true).real();
    }

    // moments by finite differences of the CF, step adapted to the law's scale
    auto phi = [this](double a) { return char_fn(a); };
    double guess = dt * 0.5 * (v_u + v_t) + 0.125 * sigma2_ * p.delta() * dt * dt;
    double h = 0.2 / guess;
    bool ok = false;
    for (int pass = 0; pass < 40 && !ok; ++pass) {
        const CfMoments m = cf_moments_richardson(phi, h);
        if (std::isfinite(m.m1) && std::isfinite(m.m2) && m.m1 > 0.0 &&
            m.m2 > m.m1 * m.m1) {
            // one refinement with a spread-aware step
            const double h2 = 0.2 / (m.m1 + 3.0 * std::sqrt(m.m2 - m.m1 * m.m1));
            const CfMoments m2 = cf_moments_richardson(phi, h2);
            if (std::isfinite(m2.m1) && std::isfinite(m2.m2) && m2.m1 > 0.0 &&
                m2.m2 > m2.m1 * m2.m1) {
                m1_ = m2.m1;
                m2_ = m2.m2;
            } else {
                m1_ = m.m1;
                m2_ = m.m2;
            }
            ok = true;
        } else {
            h *= 0.5;
        }
    }
    if (!ok)
        throw std::runtime_error("IntegratedVarianceLaw: moment estimation failed");
    sd_ = std::sqrt(m2_ - m1_ * m1_);
}

std::complex<double> IntegratedVarianceLaw::log_char_fn(double a) const {
    if (a == 0.0) return {0.0, 0.0};
    const std::complex<double> gamma =
        std::sqrt(std::complex<double>(kappa_ * kappa_, -2.0 * sigma2_ * a));
    const std::complex<double> g = 0.5 * gamma * dt_;
    const std::complex<double> lsg = lsinh(g);

    // leading ratio gamma sinh(kappa dt/2) / (kappa sinh(gamma dt/2))
    const std::complex<double> log_lead =
        std::log(gamma) - std::log(kappa_) + lsinh_k_ - lsg;
    const std::complex<double> expo =
        sumv_ * (kappa_ * coth_k_ - gamma * coth(g));

    std::complex<double> log_ratio;
    if (sqxy_ == 0.0) {
        // I_nu(arg_a)/I_nu(arg_b) -> (arg_a/arg_b)^nu as the common factor
        // sqrt(xy) -> 0
        log_ratio = nu_ * log_lead;
    } else {
        const std::complex<double> log_arg_a =
            std::log(2.0 * sqxy_ / sigma2_) + std::log(gamma) - lsg;
        std::complex<double> log_ia;
        if (log_arg_a.real() < -14.0) {
            // one-term series; relative error O(|z|^2)
            log_ia = nu_ * (log_arg_a - std::log(2.0)) - std::lgamma(nu_ + 1.0);
        } else {
            // phase of the argument winds with a; keep it unwrapped
            log_ia = dist::bessel_i_log_arg(nu_, log_arg_a);
        }
        log_ratio = log_ia - log_ib_;
    }
    return log_lead + expo + log_ratio;
}

std::complex<double> IntegratedVarianceLaw::char_fn(double a) const {
    const std::complex<double> lp = log_char_fn(a);
    if (lp.real() < -700.0) return {0.0, 0.0};
    return std::exp(lp);
}

double IntegratedVarianceLaw::eval_cdf(double x) const {
    if (x <= 0.0) return 0.0;
    const double h = 2.0 * kPi / (x + std::abs(m1_) + kQWidth * sd_);
    const double tail = 0.5 * kPi * kEps;
    double s = h * x / kPi;
    for (std::size_t j = 1;; ++j) {
        const std::complex<double> p = char_fn(h * j);
        s += (2.0 / kPi) * std::sin(h * j * x) / j * p.real();
        if (std::abs(p) / j < tail) break;
        if (j >= kNCap) {
            std::ostringstream msg;
            msg << "IntegratedVarianceLaw: CDF series failed to truncate (x=" << x
                << ", dt=" << dt_ << ", m1=" << m1_ << ")";
            throw std::runtime_error(msg.str());
        }
    }
    return std::min(1.0, std::max(0.0, s));
}

double IntegratedVarianceLaw::cdf(double x) const {
    auto it = memo_.find(x);
    if (it != memo_.end()) return it->second;
    const double f = eval_cdf(x);
    memo_.emplace(x, f);
    return f;
}

double IntegratedVarianceLaw::quantile(double prob) const {
    if (!(prob > 0.0 && prob < 1.0))
        throw std::invalid_argument("IntegratedVarianceLaw: quantile needs p in (0,1)");
    double lo = 0.0, flo = 0.0;
    double hi = m1_ + 12.0 * sd_;
    double fhi = cdf(hi);
    for (int grow = 0; fhi < prob && grow < 60; ++grow) {
        lo = hi;
        flo = fhi;
        hi *= 1.5;
        fhi = cdf(hi);
    }
    if (fhi < prob)
        throw std::runtime_error("IntegratedVarianceLaw: quantile bracket not found");

    const double width_tol = 1e-3 * std::max(m1_, 1e-300);
    while (hi - lo > width_tol) {
        const double mid = 0.5 * (lo + hi);
        const double fm = cdf(mid);
        if (fm < prob) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
            fhi = fm;
        }
    }

    // secant polish with bracket safeguard
    double x0 = lo, f0 = flo, x1 = hi, f1 = fhi;
    double best = x1, best_res = std::abs(f1 - prob);
    for (int it = 0; it < 100; ++it) {
        if (best_res <= 1e-7) return best;
        double xn;
        if (f1 != f0) {
            xn = x1 - (f1 - prob) * (x1 - x0) / (f1 - f0);
            if (!(xn > lo && xn < hi)) xn = 0.5 * (lo + hi);
        } else {
            xn = 0.5 * (lo + hi);
        }
        const double fn = cdf(xn);
        if (fn < prob)
            lo = xn;
        else
            hi = xn;
        x0 = x1;
        f0 = f1;
        x1 = xn;
        f1 = fn;
        if (std::abs(fn - prob) < best_res) {
            best = xn;
            best_res = std::abs(fn - prob);
        }
    }
    if (best_res <= 1e-7) return best;
    throw std::runtime_error("IntegratedVarianceLaw: quantile polish did not converge");
}

} // namespace hqmc::heston
