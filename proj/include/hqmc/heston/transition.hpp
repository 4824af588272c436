#pragma once

#include "hqmc/heston/params.hpp"

namespace hqmc::heston {

// Scale factor of the exact variance transition over an interval of length dt:
// V_t | V_u ~ scale * chisq'_{delta}(lambda(V_u)).
double transition_scale(const HestonParams& p, double dt);

// Noncentrality of the transition given the left endpoint.
double transition_lambda(const HestonParams& p, double dt, double v_u);

// Quantile of V_{u+dt} | V_u = v_u at probability level prob.
double variance_transition_quantile(const HestonParams& p, double v_u, double dt, double prob);

} // namespace hqmc::heston
