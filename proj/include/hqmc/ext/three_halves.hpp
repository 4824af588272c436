#pragma once

#include "hqmc/heston/paths.hpp"

#include <memory>
#include <span>
#include <vector>

namespace hqmc::ext {

// dS = rS dt + sqrt(V) S (rho dW1 + sqrt(1-rho^2) dW2),
// dV = kappa V (theta - V) dt + epsilon V^{3/2} dW1.
// X = 1/V is a square-root process, which the path machinery can sample
// exactly; the price step needs int ds/X = int V ds conditioned on the X
// endpoints, which is supplied by a pluggable sampler.
struct ThreeHalvesParams {
    double S0 = 100.0, V0 = 0.04, kappa = 1.0, theta = 0.04, epsilon = 0.5,
           rho = 0.0, r = 0.0;

    // CIR parameters of X = 1/V: mean reversion kappa*theta towards
    // (kappa + epsilon^2)/(kappa*theta) with volatility epsilon
    heston::HestonParams x_process() const;
    void validate() const;
};

// int_{t_l}^{t_r} ds/X_s given the X endpoints of the interval.
class InverseIvSampler {
public:
    virtual ~InverseIvSampler() = default;
    virtual double sample(const heston::HestonParams& x_params, double x_l,
                          double x_r, double dt, double prob) const = 0;
};

// Reference plug-in (test quality): refines the interval dyadically with exact
// square-root bridge interior draws and integrates 1/X by the trapezoid rule.
// Auxiliary randomness is drawn from a generator seeded deterministically from
// the inputs, so a given (endpoints, probability) query is reproducible.
class BridgeRefinementInverseIv : public InverseIvSampler {
public:
    explicit BridgeRefinementInverseIv(int depth = 6);

    double sample(const heston::HestonParams& x_params, double x_l, double x_r,
                  double dt, double prob) const override;

private:
    int depth_;
};

// Path skeleton. Coordinate layout matches HestonPathEngine (dimension 5h):
// [0,h) X draws, [h,2h) int ds/X probabilities, [2h,3h) price normals,
// [3h,4h) Poisson and [4h,5h) Bessel auxiliaries (bridge only). The returned
// grid reports v = V = 1/X at the dates, iv = int V ds per interval and
// z = int sqrt(V) dW1 per interval.
class ThreeHalvesPathEngine {
public:
    ThreeHalvesPathEngine(ThreeHalvesParams p, std::vector<double> times,
                          heston::Scheme scheme,
                          std::shared_ptr<const InverseIvSampler> iv_sampler);

    std::size_t dates() const { return times_.size(); }
    std::size_t dimension() const { return 5 * times_.size(); }
    heston::Scheme scheme() const { return scheme_; }

    heston::PathGrid operator()(std::span<const double> u) const;

private:
    ThreeHalvesParams params_;
    std::vector<double> times_;
    heston::Scheme scheme_;
    std::shared_ptr<const InverseIvSampler> iv_;
};

// Step-3 recovery: int (sqrt(X))^{-1} dW1 over an interval from the X
// endpoints and int ds/X.
double three_halves_stoch_integral(const ThreeHalvesParams& p, double x_l,
                                   double x_r, double inv_iv, double dt);

} // namespace hqmc::ext
