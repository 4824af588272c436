#include "hqmc/ext/multiasset.hpp"

#include "hqmc/dist/normal.hpp"
#include "hqmc/heston/iv_law.hpp"
#include "hqmc/heston/pricing.hpp"
#include "hqmc/heston/transition.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace hqmc::ext {

namespace {

// symmetric 2x2 matrices for the joint log-price covariance algebra
struct Sym2 {
    double xx = 0.0, xy = 0.0, yy = 0.0;

    Sym2 operator-(const Sym2& o) const { return {xx - o.xx, xy - o.xy, yy - o.yy}; }
    Sym2 operator+(const Sym2& o) const { return {xx + o.xx, xy + o.xy, yy + o.yy}; }
};

struct Vec2 {
    double x = 0.0, y = 0.0;

    Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
    Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
};

Vec2 apply(const Sym2& m, const Vec2& v) {
    return {m.xx * v.x + m.xy * v.y, m.xy * v.x + m.yy * v.y};
}

// general 2x2 (products of symmetric matrices need not be symmetric)
struct Mat2 {
    double a = 0.0, b = 0.0, c = 0.0, d = 0.0; // row-major
};

Mat2 mul(const Sym2& l, const Sym2& r) {
    return {l.xx * r.xx + l.xy * r.xy, l.xx * r.xy + l.xy * r.yy,
            l.xy * r.xx + l.yy * r.xy, l.xy * r.xy + l.yy * r.yy};
}

Vec2 apply(const Mat2& m, const Vec2& v) {
    return {m.a * v.x + m.b * v.y, m.c * v.x + m.d * v.y};
}

// m * s symmetrized; used for A B^{-1} A, which is symmetric exactly
Sym2 mul_sym(const Mat2& m, const Sym2& s) {
    const double xy1 = m.a * s.xy + m.b * s.yy;
    const double xy2 = m.c * s.xx + m.d * s.xy;
    return {m.a * s.xx + m.b * s.xy, 0.5 * (xy1 + xy2), m.c * s.xy + m.d * s.yy};
}

// clamp to the PSD cone (numerical noise can push the off-diagonal past the
// Cauchy-Schwarz bound)
Sym2 psd_clamp(Sym2 m) {
    m.xx = std::max(m.xx, 0.0);
    m.yy = std::max(m.yy, 0.0);
    const double bound = std::sqrt(m.xx * m.yy);
    m.xy = std::clamp(m.xy, -bound, bound);
    return m;
}

// principal (symmetric) square root of a PSD matrix; symmetric so that
// relabelling the assets permutes the construction exactly
Sym2 sqrtm(Sym2 m) {
    m = psd_clamp(m);
    const double det = std::max(m.xx * m.yy - m.xy * m.xy, 0.0);
    const double s = std::sqrt(det);
    const double t = std::sqrt(m.xx + m.yy + 2.0 * s);
    if (t == 0.0) return {0.0, 0.0, 0.0};
    return {(m.xx + s) / t, m.xy / t, (m.yy + s) / t};
}

Sym2 inverse(const Sym2& m) {
    const double tr = m.xx + m.yy;
    double det = m.xx * m.yy - m.xy * m.xy;
    // near-singular spans (vanishing integrated variance) get a ridge so the
    // bridge mean stays finite; the conditional covariance clamp absorbs the
    // small inconsistency
    det = std::max(det, 1e-14 * tr * tr + 1e-300);
    return {m.yy / det, -m.xy / det, m.xx / det};
}

struct IntervalLaw {
    Vec2 drift;  // per-interval log-price drifts
    Sym2 cov;    // per-interval log-price covariance
};

IntervalLaw interval_law(const MultiAssetParams& p, double dt,
                         const std::array<double, 3>& iv,
                         const std::array<double, 3>& z) {
    const double r1 = p.factors[0].rho, r2 = p.factors[1].rho,
                 r3 = p.factors[2].rho;
    IntervalLaw law;
    law.drift.x = p.r * dt - 0.5 * (iv[0] + iv[2]) + r1 * z[0] + r3 * z[2];
    law.drift.y = p.r * dt - 0.5 * (iv[1] + iv[2]) + r2 * z[1] + r3 * z[2];
    const double shared = (1.0 - r3 * r3) * iv[2];
    law.cov.xx = (1.0 - r1 * r1) * iv[0] + shared;
    law.cov.yy = (1.0 - r2 * r2) * iv[1] + shared;
    law.cov.xy = p.independent_normals ? 0.0 : shared;
    return law;
}

Vec2 draw_pair(const Sym2& cov, double u1, double u2) {
    const Vec2 z{dist::normal_quantile(u1), dist::normal_quantile(u2)};
    return apply(sqrtm(cov), z);
}

} // namespace

heston::HestonParams MultiAssetParams::factor_heston(int i) const {
    const auto& f = factors.at(i);
    heston::HestonParams p;
    p.S0 = 1.0; // factor processes carry no spot of their own
    p.V0 = f.V0;
    p.kappa = f.kappa;
    p.theta = f.theta;
    p.sigma = f.sigma;
    p.rho = f.rho;
    p.r = 0.0;
    return p;
}

void MultiAssetParams::validate() const {
    if (!(S10 > 0.0) || !(S20 > 0.0))
        throw std::invalid_argument("MultiAssetParams: spots must be positive");
    for (int i = 0; i < 3; ++i) factor_heston(i).validate();
}

std::pair<double, double> multiasset_terminal(const MultiAssetParams& p,
                                              double horizon,
                                              std::span<const double> u) {
    if (u.size() < 8)
        throw std::invalid_argument("multiasset_terminal: needs eight coordinates");
    std::array<double, 3> iv{}, z{};
    for (int f = 0; f < 3; ++f) {
        const auto fp = p.factor_heston(f);
        const double vt =
            heston::variance_transition_quantile(fp, fp.V0, horizon, u[f]);
        iv[f] = heston::IntegratedVarianceLaw(fp, horizon, fp.V0, vt).quantile(u[3 + f]);
        z[f] = heston::recover_stoch_integral(fp, fp.V0, vt, iv[f], horizon);
    }
    const auto law = interval_law(p, horizon, iv, z);
    const Vec2 noise = draw_pair(law.cov, u[6], u[7]);
    return {p.S10 * std::exp(law.drift.x + noise.x),
            p.S20 * std::exp(law.drift.y + noise.y)};
}

MultiAssetPathEngine::MultiAssetPathEngine(MultiAssetParams p,
                                           std::vector<double> times,
                                           heston::Scheme scheme)
    : params_(p), times_(std::move(times)), scheme_(scheme) {
    params_.validate();
    if (times_.empty())
        throw std::invalid_argument("MultiAssetPathEngine: no monitoring dates");
    if (scheme_ == heston::Scheme::bridge)
        heston::BridgeSchedule::build(times_.size()); // validates the date count
}

void MultiAssetPathEngine::set_iv_sampler(
    int factor, std::shared_ptr<const heston::IvSampler> s) {
    iv_.at(factor) = std::move(s);
}

void MultiAssetPathEngine::set_transition_sampler(
    int factor, std::shared_ptr<const heston::TransitionSampler> s) {
    trans_.at(factor) = std::move(s);
}

MultiAssetPath MultiAssetPathEngine::operator()(std::span<const double> u) const {
    const std::size_t h = times_.size();
    if (u.size() < dimension())
        throw std::invalid_argument("MultiAssetPathEngine: not enough coordinates");

    MultiAssetPath path;
    path.times = times_;

    static const heston::TransitionSampler exact_trans;
    for (int f = 0; f < 3; ++f) {
        const auto fp = params_.factor_heston(f);
        auto& grid = path.factors[f];
        grid.times = times_;
        if (scheme_ == heston::Scheme::naive) {
            const auto* trans = trans_[f] ? trans_[f].get() : &exact_trans;
            grid.v.resize(h);
            double t_prev = 0.0, v_prev = fp.V0;
            for (std::size_t i = 0; i < h; ++i) {
                grid.v[i] =
                    trans->quantile(fp, v_prev, times_[i] - t_prev, u[f * h + i]);
                t_prev = times_[i];
                v_prev = grid.v[i];
            }
        } else {
            grid.v = heston::sqrt_bridge_path(fp, times_, u.subspan(f * h, h),
                                              u.subspan(8 * h + f * h, h),
                                              u.subspan(11 * h + f * h, h));
        }
        heston::fill_integrated_variance(fp, grid, u.subspan(3 * h + f * h, h),
                                         iv_[f].get());
    }

    // per-interval joint log-price laws
    std::vector<IntervalLaw> laws(h);
    double t_prev = 0.0;
    for (std::size_t i = 0; i < h; ++i) {
        laws[i] = interval_law(
            params_, times_[i] - t_prev,
            {path.factors[0].iv[i], path.factors[1].iv[i], path.factors[2].iv[i]},
            {path.factors[0].z[i], path.factors[1].z[i], path.factors[2].z[i]});
        t_prev = times_[i];
    }

    const auto u1 = u.subspan(6 * h, h);
    const auto u2 = u.subspan(7 * h, h);
    std::vector<Vec2> logs(h + 1);
    logs[0] = {std::log(params_.S10), std::log(params_.S20)};

    if (scheme_ == heston::Scheme::naive) {
        for (std::size_t i = 0; i < h; ++i)
            logs[i + 1] = logs[i] + laws[i].drift + draw_pair(laws[i].cov, u1[i], u2[i]);
    } else {
        // cumulative drifts and covariances from the grid start
        std::vector<Vec2> mu(h + 1);
        std::vector<Sym2> cum(h + 1);
        for (std::size_t i = 1; i <= h; ++i) {
            mu[i] = mu[i - 1] + laws[i - 1].drift;
            cum[i] = cum[i - 1] + laws[i - 1].cov;
        }
        const auto sched = heston::BridgeSchedule::build(h);
        logs[h] = logs[0] + mu[h] + draw_pair(cum[h], u1[0], u2[0]);
        for (std::size_t pos = 1; pos < sched.order.size(); ++pos) {
            const auto& nd = sched.order[pos];
            const Sym2 a = cum[nd.index] - cum[nd.left];
            const Sym2 b = cum[nd.right] - cum[nd.left];
            const Mat2 gain = mul(a, inverse(b));
            const Vec2 span_gap =
                logs[nd.right] - logs[nd.left] - (mu[nd.right] - mu[nd.left]);
            const Vec2 mean =
                logs[nd.left] + (mu[nd.index] - mu[nd.left]) + apply(gain, span_gap);
            const Sym2 cov = a - mul_sym(gain, a);
            logs[nd.index] = mean + draw_pair(cov, u1[pos], u2[pos]);
        }
    }

    path.s1.resize(h);
    path.s2.resize(h);
    for (std::size_t i = 0; i < h; ++i) {
        path.s1[i] = std::exp(logs[i + 1].x);
        path.s2[i] = std::exp(logs[i + 1].y);
    }
    return path;
}

} // namespace hqmc::ext
