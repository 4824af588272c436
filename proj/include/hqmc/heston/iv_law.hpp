#pragma once

#include "hqmc/heston/params.hpp"

#include <complex>
#include <functional>
#include <map>

namespace hqmc::heston {

struct CfMoments {
    double m1; // first moment
    double m2; // second (raw) moment
};

// Fourth-order central-difference estimate of the first two moments of a
// distribution from its characteristic function phi, using conjugate symmetry
// phi(-a) = conj(phi(a)). Step h should resolve the curvature of phi at 0.
CfMoments cf_moments(const std::function<std::complex<double>(double)>& phi, double h);

// Same with one Richardson extrapolation pass (h and h/2).
CfMoments cf_moments_richardson(const std::function<std::complex<double>(double)>& phi,
                                double h);

// Conditional law of the integrated variance over one interval,
// int_u^t V_s ds | V_u = x, V_t = y, accessed through its characteristic
// function and a Fourier-series CDF inversion.
class IntegratedVarianceLaw {
public:
    IntegratedVarianceLaw(const HestonParams& p, double dt, double v_u, double v_t);

    // log of Phi(a) = E[exp(i a int V)] given the endpoints
    std::complex<double> log_char_fn(double a) const;
    std::complex<double> char_fn(double a) const;

    double m1() const { return m1_; }
    double m2() const { return m2_; }
    double std_dev() const { return sd_; }

    // Truncated-series CDF, clamped to [0,1]. Evaluations are memoized.
    double cdf(double x) const;

    // Quantile: |cdf(result) - prob| <= 1e-7.
    double quantile(double prob) const;

    double dt() const { return dt_; }

private:
    double eval_cdf(double x) const;

    double kappa_, sigma2_, dt_;
    double sumv_;    // (x + y) / sigma^2
    double sqxy_;    // sqrt(x y)
    double nu_;      // delta/2 - 1
    double lsinh_k_; // log sinh(kappa dt / 2)
    double coth_k_;  // coth(kappa dt / 2)
    double log_ib_;  // log I_nu(arg_b), valid when sqxy_ > 0
    double m1_ = 0.0, m2_ = 0.0, sd_ = 0.0;

    mutable std::map<double, double> memo_;
};

} // namespace hqmc::heston
