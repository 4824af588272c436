#pragma once

#include "hqmc/heston/paths.hpp"

#include <span>
#include <vector>

namespace hqmc::payoffs {

// Arithmetic-average Asian call on the grid dates.
struct AsianSpec {
    double strike = 100.0;
    double expiry = 1.0;
};

// Down-and-out call: knocked out once the price closes below the barrier on a
// monitoring date, terminal payoff (S_T - K)+.
struct BarrierSpec {
    double barrier = 0.0;
    double strike = 100.0;
};

// e^{-rT} (mean of S over the grid dates - K)+
double asian_payoff(const heston::PathGrid& grid, const AsianSpec& spec, double r);

// Pathwise greeks for the Asian call (Delta and Rho only; the pathwise Gamma
// does not exist for a kinked payoff).
double pw_delta_asian(const heston::PathGrid& grid, const AsianSpec& spec, double r,
                      double s0);
double pw_rho_asian(const heston::PathGrid& grid, const AsianSpec& spec, double r);

struct LrGreeks {
    double delta = 0.0, gamma = 0.0, rho = 0.0;
};

// Likelihood-ratio greeks from the lognormal step densities conditional on the
// variance path. The per-step scores d_i are standard normal under the exact
// construction.
LrGreeks lr_greeks_asian(const heston::HestonParams& p, const heston::PathGrid& grid,
                         const AsianSpec& spec);
// The scores alone (for distributional checks).
std::vector<double> lr_scores(const heston::HestonParams& p,
                              const heston::PathGrid& grid);

// Price-path construction for barrier pricing: both walk the lognormal steps
// implied by the variance-path functionals in grid.iv / grid.z, consuming one
// uniform per date.
//
// One-step-survival importance sampling: every step is drawn conditionally
// above the barrier and the per-step survival probability multiplies the
// weight; returns weight * e^{-rT} (S_T - K)+.
double barrier_onestep_survival(const heston::HestonParams& p,
                                const heston::PathGrid& grid,
                                const BarrierSpec& spec,
                                std::span<const double> u_price);
// Crude knockout-indicator estimator on the same coordinates (test oracle).
double barrier_knockout_indicator(const heston::HestonParams& p,
                                  const heston::PathGrid& grid,
                                  const BarrierSpec& spec,
                                  std::span<const double> u_price);

// Exact conditional one-step survival probability (exposed for tests).
double barrier_step_survival_prob(double s, double barrier, double r, double rho,
                                  double dt, double iv, double z);

} // namespace hqmc::payoffs
