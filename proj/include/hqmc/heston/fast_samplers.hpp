#pragma once

#include "hqmc/heston/paths.hpp"

#include <vector>

namespace hqmc::heston {

// Table-backed integrated-variance quantile sampler for a fixed interval
// length. The conditional law depends on the endpoints only through
// (a, w) = (v_l + v_r, 2 sqrt(v_l v_r)/(v_l + v_r)); log-quantiles are
// tabulated on a (sqrt(a), w, z)-grid (z the standard-normal transform of
// the probability) with monotone-cubic interpolation in z and local bicubic
// blending across the endpoint plane. Out-of-range queries fall back to the
// exact law.
class IvQuantileTable : public IvSampler {
public:
    IvQuantileTable(const HestonParams& p, double dt, double a_max, int na = 65,
                    int nw = 13, int nz = 48);

    double quantile(const HestonParams& p, double v_l, double v_r, double dt,
                    double prob) const override;

    double dt() const { return dt_; }

private:
    double node_blend(double a, double w, double z) const;

    HestonParams p_;
    double dt_, a_max_, zlim_;
    std::vector<double> agrid_, wgrid_, zgrid_;
    // per (ia, iw) node: log-quantile values over the z-grid plus pchip slopes
    std::vector<std::vector<double>> logq_, slope_;
    int na_, nw_, nz_;
};

// Table-backed variance-transition quantile for a fixed interval length:
// noncentral chi-squared quantiles on a (lambda, z)-grid, scaled by the
// transition scale factor. Exact fallback outside the grid.
class TransitionQuantileTable : public TransitionSampler {
public:
    TransitionQuantileTable(const HestonParams& p, double dt, double v_max,
                            int nl = 49, int nz = 48);

    double quantile(const HestonParams& p, double v_u, double dt,
                    double prob) const override;

    double dt() const { return dt_; }

private:
    HestonParams p_;
    double dt_, scale_, lam_coef_, lam_max_, zlim_;
    std::vector<double> lgrid_, zgrid_;
    std::vector<std::vector<double>> logq_, slope_;
    int nl_, nz_;
};

} // namespace hqmc::heston
