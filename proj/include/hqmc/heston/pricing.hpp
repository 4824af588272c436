#pragma once

#include "hqmc/heston/params.hpp"

#include <span>

namespace hqmc::heston {

// int sqrt(V) dW recovered from the integrated variance identity
// V_t - V_u = kappa theta dt - kappa iv + sigma int sqrt(V) dW.
double recover_stoch_integral(const HestonParams& p, double v_u, double v_t, double iv,
                              double dt);

// Conditional law of S_t given the variance-path functionals over (u, t]:
// log S_t ~ N(mu, var) with mu = log s_u + r dt - iv/2 + rho z, var = (1-rho^2) iv.
struct ConditionedLogPriceLaw {
    double mu;
    double var;

    static ConditionedLogPriceLaw make(double s_u, double r, double rho, double dt,
                                       double iv, double z);
    // quantile of S_t itself
    double quantile(double prob) const;
};

double black_scholes_call(double s0, double strike, double r, double tau, double vol);

// One conditional-BS evaluation of the European call from two quantile
// coordinates (terminal variance draw, integrated variance draw).
double conditional_european_call(const HestonParams& p, double strike, double maturity,
                                 double u1, double u2);

// Plain exact-simulation draw of S_T from three coordinates
// (terminal variance, integrated variance, terminal normal).
double heston_terminal(const HestonParams& p, double maturity, std::span<const double> u);

} // namespace hqmc::heston
