#include "hqmc/heston/pricing.hpp"

#include "hqmc/dist/normal.hpp"
#include "hqmc/heston/iv_law.hpp"
#include "hqmc/heston/transition.hpp"

#include <cmath>
#include <stdexcept>

namespace hqmc::heston {

double recover_stoch_integral(const HestonParams& p, double v_u, double v_t, double iv,
                              double dt) {
    if (!(iv >= 0.0))
        throw std::invalid_argument("recover_stoch_integral: iv must be nonnegative");
    return (v_t - v_u - p.kappa * p.theta * dt + p.kappa * iv) / p.sigma;
}

ConditionedLogPriceLaw ConditionedLogPriceLaw::make(double s_u, double r, double rho,
                                                    double dt, double iv, double z) {
    return {std::log(s_u) + r * dt - 0.5 * iv + rho * z,
            (1.0 - rho * rho) * iv};
}

double ConditionedLogPriceLaw::quantile(double prob) const {
    if (var <= 0.0) return std::exp(mu); // degenerate
    return std::exp(mu + std::sqrt(var) * dist::normal_quantile(prob));
}

double black_scholes_call(double s0, double strike, double r, double tau, double vol) {
    if (!(s0 > 0.0 && strike > 0.0 && tau > 0.0))
        throw std::invalid_argument("black_scholes_call: bad inputs");
    const double disc = std::exp(-r * tau);
    if (vol <= 0.0) return std::max(s0 - strike * disc, 0.0);
    const double sd = vol * std::sqrt(tau);
    const double d1 = (std::log(s0 / strike) + (r + 0.5 * vol * vol) * tau) / sd;
    const double d2 = d1 - sd;
    return s0 * dist::normal_cdf(d1) - strike * disc * dist::normal_cdf(d2);
}

double conditional_european_call(const HestonParams& p, double strike, double maturity,
                                 double u1, double u2) {
    const double v_t = variance_transition_quantile(p, p.V0, maturity, u1);
    IntegratedVarianceLaw law(p, maturity, p.V0, v_t);
    const double iv = law.quantile(u2);
    const double z = recover_stoch_integral(p, p.V0, v_t, iv, maturity);
    const double s0_adj = p.S0 * std::exp(-0.5 * p.rho * p.rho * iv + p.rho * z);
    const double vol_adj =
        std::sqrt(iv / maturity) * std::sqrt(1.0 - p.rho * p.rho);
    return black_scholes_call(s0_adj, strike, p.r, maturity, vol_adj);
}

double heston_terminal(const HestonParams& p, double maturity, std::span<const double> u) {
    if (u.size() < 3)
        throw std::invalid_argument("heston_terminal: needs 3 coordinates");
    const double v_t = variance_transition_quantile(p, p.V0, maturity, u[0]);
    IntegratedVarianceLaw law(p, maturity, p.V0, v_t);
    const double iv = law.quantile(u[1]);
    const double z = recover_stoch_integral(p, p.V0, v_t, iv, maturity);
    return ConditionedLogPriceLaw::make(p.S0, p.r, p.rho, maturity, iv, z).quantile(u[2]);
}

} // namespace hqmc::heston
