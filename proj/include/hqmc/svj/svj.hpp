#pragma once

#include "hqmc/heston/paths.hpp"

#include <cmath>
#include <span>
#include <utility>
#include <vector>

namespace hqmc::svj {

// Square-root stochastic volatility plus lognormal multiplicative jumps on an
// independent Poisson clock. The diffusion part carries the compensated drift
// r - lambda*mu_bar so the discounted price stays a martingale.
struct SvjParams {
    heston::HestonParams base;
    double lambda = 0.0;  // jump intensity
    double mu_bar = 0.0;  // mean relative jump E[Y - 1]
    double sigma_s = 0.0; // jump log-std

    double mu_s() const { return std::log1p(mu_bar) - 0.5 * sigma_s * sigma_s; }
    static double mu_bar_from_log(double mu_s, double sigma_s) {
        return std::expm1(mu_s + 0.5 * sigma_s * sigma_s);
    }

    // Diffusion-part parameters with the jump-compensated drift.
    heston::HestonParams diffusion() const {
        heston::HestonParams p = base;
        p.r = base.r - lambda * mu_bar;
        return p;
    }

    void validate() const;
};

// Per-date jump state: counts N_{t_i} and cumulative jump log-sums
// J_i = sum_{j<=N_{t_i}} log Y_j.
struct JumpPath {
    std::vector<long> counts;
    std::vector<double> jsum;
};

// Terminal price from a point in (0,1)^5: variance, integrated variance,
// price normal, Poisson count, jump-sum normal.
double svj_terminal(const SvjParams& p, double horizon, std::span<const double> u);

// Count at an interior time conditional on counts at bracketing times.
long poisson_bridge_count(long n_s, long n_t, double s, double u_time, double t,
                          double prob);

// Cumulative jump log-sum at an interior date conditional on the bracketing
// sums and the counts at all three dates.
double jumpsum_bridge(double j_l, double j_r, long n_l, long n_i, long n_r,
                      double mu_s, double sigma_s, double prob);

// Path construction over a monitoring grid. Coordinate layout (dimension 7h):
// blocks [0,5h) feed the diffusion engine (variance, integrated variance,
// price normals, bridge auxiliaries), [5h,6h) the counts and [6h,7h) the
// jump-sum normals -- the last two in date order under the naive scheme and
// visitation order under the bridge scheme. Returned grid prices include the
// jump factors e^{J_i}.
class SvjPathEngine {
public:
    SvjPathEngine(SvjParams p, std::vector<double> times, heston::Scheme scheme);

    std::size_t dates() const { return diffusion_.dates(); }
    std::size_t dimension() const { return 7 * diffusion_.dates(); }
    heston::Scheme scheme() const { return diffusion_.scheme(); }

    void set_iv_sampler(std::shared_ptr<const heston::IvSampler> s) {
        diffusion_.set_iv_sampler(std::move(s));
    }
    void set_transition_sampler(std::shared_ptr<const heston::TransitionSampler> s) {
        diffusion_.set_transition_sampler(std::move(s));
    }

    std::pair<heston::PathGrid, JumpPath> operator()(std::span<const double> u) const;

private:
    SvjParams params_;
    heston::HestonPathEngine diffusion_;
};

} // namespace hqmc::svj
