#include "hqmc/heston/params.hpp"
#include "hqmc/heston/transition.hpp"

#include "hqmc/dist/chisq.hpp"

#include <cmath>
#include <stdexcept>

namespace hqmc::heston {

void HestonParams::validate() const {
    if (!(S0 > 0.0)) throw std::invalid_argument("HestonParams: S0 must be positive");
    if (!(V0 >= 0.0)) throw std::invalid_argument("HestonParams: V0 must be nonnegative");
    if (!(kappa > 0.0)) throw std::invalid_argument("HestonParams: kappa must be positive");
    if (!(theta > 0.0)) throw std::invalid_argument("HestonParams: theta must be positive");
    if (!(sigma > 0.0)) throw std::invalid_argument("HestonParams: sigma must be positive");
    if (!(std::abs(rho) < 1.0))
        throw std::invalid_argument("HestonParams: rho must lie in (-1,1)");
    if (!std::isfinite(r)) throw std::invalid_argument("HestonParams: r must be finite");
}

double transition_scale(const HestonParams& p, double dt) {
    return p.sigma * p.sigma * (1.0 - std::exp(-p.kappa * dt)) / (4.0 * p.kappa);
}

double transition_lambda(const HestonParams& p, double dt, double v_u) {
    const double e = std::exp(-p.kappa * dt);
    return 4.0 * p.kappa * e * v_u / (p.sigma * p.sigma * (1.0 - e));
}

double variance_transition_quantile(const HestonParams& p, double v_u, double dt,
                                    double prob) {
    if (!(dt > 0.0)) throw std::invalid_argument("variance transition: dt must be positive");
    if (!(v_u >= 0.0))
        throw std::invalid_argument("variance transition: v_u must be nonnegative");
    dist::NoncentralChiSq law(p.delta(), transition_lambda(p, dt, v_u));
    return transition_scale(p, dt) * law.quantile(prob);
}

} // namespace hqmc::heston
