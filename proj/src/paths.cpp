#include "hqmc/heston/paths.hpp"

#include "hqmc/dist/bessel.hpp"
#include "hqmc/dist/chisq.hpp"
#include "hqmc/dist/discrete.hpp"
#include "hqmc/dist/gamma.hpp"
#include "hqmc/dist/normal.hpp"
#include "hqmc/heston/iv_law.hpp"
#include "hqmc/heston/pricing.hpp"
#include "hqmc/heston/transition.hpp"

#include <cmath>
#include <stdexcept>

namespace hqmc::heston {

namespace {

bool is_pow2(std::size_t n) { return n > 0 && (n & (n - 1)) == 0; }

void check_times(std::span<const double> times) {
    if (times.empty()) throw std::invalid_argument("path grid: no monitoring dates");
    double prev = 0.0;
    for (double t : times) {
        if (!(t > prev)) throw std::invalid_argument("path grid: times must be increasing and positive");
        prev = t;
    }
}

} // namespace

BridgeSchedule BridgeSchedule::build(std::size_t h) {
    if (!is_pow2(h))
        throw std::invalid_argument("BridgeSchedule: date count must be a power of two");
    BridgeSchedule sched;
    sched.order.reserve(h);
    sched.order.push_back({h, 0, 0});
    for (std::size_t step = h; step > 1; step >>= 1)
        for (std::size_t i = step / 2; i < h; i += step)
            sched.order.push_back({i, i - step / 2, i + step / 2});
    return sched;
}

double IvSampler::quantile(const HestonParams& p, double v_l, double v_r, double dt,
                           double prob) const {
    return IntegratedVarianceLaw(p, dt, v_l, v_r).quantile(prob);
}

double TransitionSampler::quantile(const HestonParams& p, double v_u, double dt,
                                   double prob) const {
    return variance_transition_quantile(p, v_u, dt, prob);
}

std::vector<double> sqrt_bridge_path(const HestonParams& p,
                                     std::span<const double> times,
                                     std::span<const double> u_var,
                                     std::span<const double> u_pois,
                                     std::span<const double> u_bessel) {
    check_times(times);
    const std::size_t h = times.size();
    if (u_var.size() < h || u_pois.size() < h || u_bessel.size() < h)
        throw std::invalid_argument("sqrt_bridge_path: not enough coordinates");
    const auto sched = BridgeSchedule::build(h);
    const double delta = p.delta();

    // time change s = c(t); x_i lives on the squared-Bessel clock
    std::vector<double> s(h + 1, 0.0), x(h + 1, 0.0);
    for (std::size_t i = 1; i <= h; ++i)
        s[i] = p.sigma * p.sigma / (4.0 * p.kappa) * std::expm1(p.kappa * times[i - 1]);
    x[0] = p.V0;

    // terminal draw
    dist::NoncentralChiSq term(delta, x[0] / s[h]);
    x[h] = s[h] * term.quantile(u_var[0]);

    for (std::size_t pos = 1; pos < sched.order.size(); ++pos) {
        const auto& node = sched.order[pos];
        const double sl = s[node.left], si = s[node.index], sr = s[node.right];
        const double xl = x[node.left], xr = x[node.right];
        const double hl = si - sl, hr = sr - si, span = sr - sl;

        const double lam = (hr / hl * xl + hl / hr * xr) / (2.0 * span);
        const long pcount = dist::poisson_quantile(lam, u_pois[pos]);
        const long bcount =
            dist::BesselDistribution(0.5 * delta - 1.0, std::sqrt(xl * xr) / span)
                .quantile(u_bessel[pos]);
        const double shape = pcount + 2.0 * bcount + 0.5 * delta;
        const double rate = span / (2.0 * hl * hr);
        x[node.index] = dist::gamma_quantile(shape, rate, u_var[pos]);
    }

    std::vector<double> v(h);
    for (std::size_t i = 1; i <= h; ++i)
        v[i - 1] = std::exp(-p.kappa * times[i - 1]) * x[i];
    return v;
}

void fill_integrated_variance(const HestonParams& p, PathGrid& grid,
                              std::span<const double> u_iv, const IvSampler* sampler) {
    const std::size_t h = grid.times.size();
    if (grid.v.size() != h || u_iv.size() < h)
        throw std::invalid_argument("fill_integrated_variance: bad inputs");
    static const IvSampler exact;
    if (!sampler) sampler = &exact;
    grid.iv.resize(h);
    grid.z.resize(h);
    double t_prev = 0.0, v_prev = p.V0;
    for (std::size_t i = 0; i < h; ++i) {
        const double dt = grid.times[i] - t_prev;
        grid.iv[i] = sampler->quantile(p, v_prev, grid.v[i], dt, u_iv[i]);
        grid.z[i] = recover_stoch_integral(p, v_prev, grid.v[i], grid.iv[i], dt);
        t_prev = grid.times[i];
        v_prev = grid.v[i];
    }
}

std::vector<double> stock_bridge_path(const HestonParams& p, const PathGrid& grid,
                                      std::span<const double> u_normal) {
    const std::size_t h = grid.times.size();
    if (grid.iv.size() != h || grid.z.size() != h || u_normal.size() < h)
        throw std::invalid_argument("stock_bridge_path: bad inputs");
    const auto sched = BridgeSchedule::build(h);
    const double rho2 = p.rho * p.rho;

    // cumulative drifts and variances from the grid start
    std::vector<double> mu(h + 1), var(h + 1, 0.0);
    mu[0] = std::log(p.S0);
    double civ = 0.0, cz = 0.0;
    for (std::size_t i = 1; i <= h; ++i) {
        civ += grid.iv[i - 1];
        cz += grid.z[i - 1];
        mu[i] = std::log(p.S0) + p.r * grid.times[i - 1] - 0.5 * civ + p.rho * cz;
        var[i] = (1.0 - rho2) * civ;
    }

    std::vector<double> logs(h + 1);
    logs[0] = std::log(p.S0);
    {
        const double z = var[h] > 0.0 ? dist::normal_quantile(u_normal[0]) : 0.0;
        logs[h] = mu[h] + std::sqrt(var[h]) * z;
    }
    for (std::size_t pos = 1; pos < sched.order.size(); ++pos) {
        const auto& node = sched.order[pos];
        const double denom = var[node.right] - var[node.left];
        const double dv = var[node.index] - var[node.left];
        const double ratio = denom > 0.0 ? dv / denom : 0.0;
        const double a = mu[node.index] - mu[node.left] + logs[node.left] +
                         ratio * (logs[node.right] - logs[node.left] +
                                  mu[node.left] - mu[node.right]);
        const double b = std::max(dv - ratio * ratio * denom, 0.0);
        const double z = b > 0.0 ? dist::normal_quantile(u_normal[pos]) : 0.0;
        logs[node.index] = a + std::sqrt(b) * z;
    }

    std::vector<double> out(h);
    for (std::size_t i = 1; i <= h; ++i) out[i - 1] = std::exp(logs[i]);
    return out;
}

HestonPathEngine::HestonPathEngine(HestonParams p, std::vector<double> times,
                                   Scheme scheme)
    : params_(p), times_(std::move(times)), scheme_(scheme) {
    params_.validate();
    check_times(times_);
    if (scheme_ == Scheme::bridge) schedule_ = BridgeSchedule::build(times_.size());
}

PathGrid HestonPathEngine::operator()(std::span<const double> u) const {
    const std::size_t h = times_.size();
    const std::size_t need = scheme_ == Scheme::bridge ? 5 * h : 3 * h;
    if (u.size() < need)
        throw std::invalid_argument("HestonPathEngine: not enough coordinates");

    PathGrid grid;
    grid.times = times_;

    if (scheme_ == Scheme::naive) {
        static const TransitionSampler exact;
        const TransitionSampler* trans = trans_ ? trans_.get() : &exact;
        grid.v.resize(h);
        double t_prev = 0.0, v_prev = params_.V0;
        for (std::size_t i = 0; i < h; ++i) {
            grid.v[i] = trans->quantile(params_, v_prev, times_[i] - t_prev, u[i]);
            t_prev = times_[i];
            v_prev = grid.v[i];
        }
        fill_integrated_variance(params_, grid, u.subspan(h, h), iv_.get());
        grid.s.resize(h);
        double s_prev = params_.S0;
        t_prev = 0.0;
        for (std::size_t i = 0; i < h; ++i) {
            const auto law = ConditionedLogPriceLaw::make(
                s_prev, params_.r, params_.rho, times_[i] - t_prev, grid.iv[i],
                grid.z[i]);
            grid.s[i] = law.quantile(u[2 * h + i]);
            s_prev = grid.s[i];
            t_prev = times_[i];
        }
        return grid;
    }

    grid.v = sqrt_bridge_path(params_, times_, u.subspan(0, h), u.subspan(3 * h, h),
                              u.subspan(4 * h, h));
    fill_integrated_variance(params_, grid, u.subspan(h, h), iv_.get());
    grid.s = stock_bridge_path(params_, grid, u.subspan(2 * h, h));
    return grid;
}

std::vector<double> uniform_grid(double horizon, std::size_t h) {
    if (!(horizon > 0.0) || h == 0) throw std::invalid_argument("uniform_grid: bad inputs");
    std::vector<double> t(h);
    for (std::size_t i = 0; i < h; ++i) t[i] = horizon * (i + 1) / h;
    return t;
}

} // namespace hqmc::heston
