#include "hqmc/heston/fast_samplers.hpp"

#include "hqmc/dist/chisq.hpp"
#include "hqmc/dist/normal.hpp"
#include "hqmc/dist/pchip.hpp"
#include "hqmc/heston/iv_law.hpp"
#include "hqmc/heston/transition.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace hqmc::heston {

namespace {

std::vector<double> linspace(double lo, double hi, int n) {
    std::vector<double> g(n);
    for (int i = 0; i < n; ++i) g[i] = lo + (hi - lo) * i / (n - 1);
    return g;
}

bool same_variance_params(const HestonParams& a, const HestonParams& b) {
    return a.kappa == b.kappa && a.theta == b.theta && a.sigma == b.sigma;
}

// locate the cell of a uniform grid, returning (segment, fraction)
std::pair<std::size_t, double> cell(const std::vector<double>& g, double x) {
    const double step = g[1] - g[0];
    double f = (x - g.front()) / step;
    std::size_t seg = f <= 0.0 ? 0
                               : std::min(static_cast<std::size_t>(f), g.size() - 2);
    return {seg, (x - g[seg]) / step};
}

} // namespace

IvQuantileTable::IvQuantileTable(const HestonParams& p, double dt, double a_max,
                                 int na, int nw, int nz)
    : p_(p), dt_(dt), a_max_(a_max), zlim_(4.2), na_(na), nw_(nw), nz_(nz) {
    if (!(a_max > 0.0) || na < 4 || nw < 4 || nz < 8)
        throw std::invalid_argument("IvQuantileTable: bad grid");
    agrid_ = linspace(0.0, std::sqrt(a_max), na);
    wgrid_ = linspace(0.0, 1.0, nw);
    zgrid_ = linspace(-zlim_, zlim_, nz);
    logq_.resize(static_cast<std::size_t>(na) * nw);
    slope_.resize(logq_.size());
    for (int ia = 0; ia < na; ++ia) {
        for (int iw = 0; iw < nw; ++iw) {
            const double a = agrid_[ia] * agrid_[ia];
            const double spread = std::sqrt(std::max(1.0 - wgrid_[iw] * wgrid_[iw], 0.0));
            const double v_l = 0.5 * a * (1.0 + spread);
            const double v_r = 0.5 * a * (1.0 - spread);
            IntegratedVarianceLaw law(p, dt, v_l, v_r);
            auto& col = logq_[static_cast<std::size_t>(ia) * nw + iw];
            col.resize(nz);
            for (int iz = 0; iz < nz; ++iz)
                col[iz] = std::log(
                    std::max(law.quantile(dist::normal_cdf(zgrid_[iz])), 1e-300));
            slope_[static_cast<std::size_t>(ia) * nw + iw] =
                dist::pchip_slopes(zgrid_, col);
        }
    }
}

double IvQuantileTable::node_blend(double sa, double w, double z) const {
    const auto [ia, fa] = cell(agrid_, sa);
    const auto [iw, fw] = cell(wgrid_, w);
    const auto [iz, fz] = cell(zgrid_, z);
    (void)fz;
    auto at = [&](std::size_t i, std::size_t j) {
        const std::size_t k = i * nw_ + j;
        return dist::pchip_eval(zgrid_, logq_[k], slope_[k], z, iz);
    };
    // local bicubic in (sqrt(a), w) on the log-quantile; the sqrt spacing
    // concentrates nodes where the law changes fastest
    const std::size_t ba =
        ia == 0 ? 0 : std::min(ia - 1, static_cast<std::size_t>(na_) - 4);
    const std::size_t bw =
        iw == 0 ? 0 : std::min(iw - 1, static_cast<std::size_t>(nw_) - 4);
    double fcol[4];
    for (int k = 0; k < 4; ++k) {
        double frow[4];
        for (int j = 0; j < 4; ++j) frow[j] = at(ba + k, bw + j);
        fcol[k] = dist::cubic4(frow, static_cast<double>(iw - bw) + fw);
    }
    return std::exp(dist::cubic4(fcol, static_cast<double>(ia - ba) + fa));
}

double IvQuantileTable::quantile(const HestonParams& p, double v_l, double v_r,
                                 double dt, double prob) const {
    const double a = v_l + v_r;
    const double z = dist::normal_quantile(prob);
    if (!same_variance_params(p, p_) || std::abs(dt - dt_) > 1e-12 * std::max(1.0, dt_) ||
        a > a_max_ || std::abs(z) > zlim_)
        return IvSampler::quantile(p, v_l, v_r, dt, prob);
    const double w = a > 0.0 ? 2.0 * std::sqrt(v_l * v_r) / a : 0.0;
    return node_blend(std::sqrt(a), std::min(w, 1.0), z);
}

TransitionQuantileTable::TransitionQuantileTable(const HestonParams& p, double dt,
                                                 double v_max, int nl, int nz)
    : p_(p), dt_(dt), zlim_(4.2), nl_(nl), nz_(nz) {
    if (!(v_max > 0.0) || nl < 4 || nz < 8)
        throw std::invalid_argument("TransitionQuantileTable: bad grid");
    scale_ = transition_scale(p, dt);
    lam_coef_ = transition_lambda(p, dt, 1.0);
    lam_max_ = lam_coef_ * v_max;
    lgrid_ = linspace(0.0, std::sqrt(lam_max_), nl);
    zgrid_ = linspace(-zlim_, zlim_, nz);
    logq_.resize(nl);
    slope_.resize(nl);
    for (int il = 0; il < nl; ++il) {
        dist::NoncentralChiSq law(p.delta(), lgrid_[il] * lgrid_[il]);
        auto& col = logq_[il];
        col.resize(nz);
        for (int iz = 0; iz < nz; ++iz)
            col[iz] =
                std::log(std::max(law.quantile(dist::normal_cdf(zgrid_[iz])), 1e-300));
        slope_[il] = dist::pchip_slopes(zgrid_, col);
    }
}

double TransitionQuantileTable::quantile(const HestonParams& p, double v_u, double dt,
                                         double prob) const {
    const double lam = lam_coef_ * v_u;
    const double z = dist::normal_quantile(prob);
    if (!same_variance_params(p, p_) || p.delta() != p_.delta() ||
        std::abs(dt - dt_) > 1e-12 * std::max(1.0, dt_) || lam > lam_max_ ||
        std::abs(z) > zlim_)
        return TransitionSampler::quantile(p, v_u, dt, prob);
    const auto [il, fl] = cell(lgrid_, std::sqrt(lam));
    const auto [iz, fz] = cell(zgrid_, z);
    (void)fz;
    // local cubic across sqrt(lambda) on the log-quantile; sqrt spacing
    // concentrates nodes where the law changes fastest
    const std::size_t base =
        il == 0 ? 0 : std::min(il - 1, static_cast<std::size_t>(nl_) - 4);
    double f[4];
    for (int k = 0; k < 4; ++k)
        f[k] = dist::pchip_eval(zgrid_, logq_[base + k], slope_[base + k], z, iz);
    return scale_ * std::exp(dist::cubic4(f, static_cast<double>(il - base) + fl));
}

} // namespace hqmc::heston
