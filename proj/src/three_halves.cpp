#include "hqmc/ext/three_halves.hpp"

#include "hqmc/dist/bessel.hpp"
#include "hqmc/dist/discrete.hpp"
#include "hqmc/dist/gamma.hpp"
#include "hqmc/dist/normal.hpp"
#include "hqmc/heston/iv_law.hpp"
#include "hqmc/heston/pricing.hpp"
#include "hqmc/heston/transition.hpp"

#include <bit>
#include <cmath>
#include <random>
#include <stdexcept>

namespace hqmc::ext {

heston::HestonParams ThreeHalvesParams::x_process() const {
    heston::HestonParams p;
    p.S0 = 1.0;
    p.V0 = 1.0 / V0;
    p.kappa = kappa * theta;
    p.theta = (kappa + epsilon * epsilon) / (kappa * theta);
    p.sigma = epsilon;
    p.rho = 0.0;
    p.r = 0.0;
    return p;
}

void ThreeHalvesParams::validate() const {
    if (!(S0 > 0.0) || !(V0 > 0.0))
        throw std::invalid_argument("ThreeHalvesParams: S0 and V0 must be positive");
    if (!(kappa > 0.0) || !(theta > 0.0) || !(epsilon > 0.0))
        throw std::invalid_argument("ThreeHalvesParams: kappa, theta, epsilon must be positive");
    if (!(rho > -1.0 && rho < 1.0))
        throw std::invalid_argument("ThreeHalvesParams: rho must lie in (-1,1)");
    x_process().validate();
}

double three_halves_stoch_integral(const ThreeHalvesParams& p, double x_l,
                                   double x_r, double inv_iv, double dt) {
    return (std::log(x_l / x_r) +
            (p.kappa + 0.5 * p.epsilon * p.epsilon) * inv_iv -
            p.kappa * p.theta * dt) /
           p.epsilon;
}

namespace {

std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ull;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

std::uint64_t seed_from(double a, double b, double c, double d) {
    std::uint64_t s = mix64(std::bit_cast<std::uint64_t>(a));
    s = mix64(s ^ std::bit_cast<std::uint64_t>(b));
    s = mix64(s ^ std::bit_cast<std::uint64_t>(c));
    s = mix64(s ^ std::bit_cast<std::uint64_t>(d));
    return s;
}

} // namespace

BridgeRefinementInverseIv::BridgeRefinementInverseIv(int depth) : depth_(depth) {
    if (depth < 1 || depth > 20)
        throw std::invalid_argument("BridgeRefinementInverseIv: depth out of range");
}

double BridgeRefinementInverseIv::sample(const heston::HestonParams& xp,
                                         double x_l, double x_r, double dt,
                                         double prob) const {
    if (!(x_l > 0.0) || !(x_r > 0.0) || !(dt > 0.0))
        throw std::invalid_argument("BridgeRefinementInverseIv: bad endpoints");
    const std::size_t n = std::size_t{1} << depth_;
    const double delta = xp.delta();

    // squared-Bessel clock over the interval (time origin shifted to its start)
    std::vector<double> s(n + 1), xt(n + 1, 0.0);
    for (std::size_t j = 0; j <= n; ++j) {
        const double tau = dt * j / n;
        s[j] = xp.sigma * xp.sigma / (4.0 * xp.kappa) * std::expm1(xp.kappa * tau);
    }
    xt[0] = x_l;
    xt[n] = std::exp(xp.kappa * dt) * x_r;

    std::mt19937_64 rng(seed_from(x_l, x_r, dt, prob));
    auto unif = [&rng] {
        // keep draws away from the endpoints of (0,1)
        return (static_cast<double>(rng() >> 11) + 0.5) * 0x1p-53;
    };

    for (std::size_t step = n; step > 1; step >>= 1) {
        for (std::size_t i = step / 2; i < n; i += step) {
            const std::size_t l = i - step / 2, r = i + step / 2;
            const double hl = s[i] - s[l], hr = s[r] - s[i], span = s[r] - s[l];
            const double lam = (hr / hl * xt[l] + hl / hr * xt[r]) / (2.0 * span);
            const long pcount = dist::poisson_quantile(lam, unif());
            const long bcount =
                dist::BesselDistribution(0.5 * delta - 1.0,
                                         std::sqrt(xt[l] * xt[r]) / span)
                    .quantile(unif());
            const double shape = pcount + 2.0 * bcount + 0.5 * delta;
            const double rate = span / (2.0 * hl * hr);
            xt[i] = dist::gamma_quantile(shape, rate, unif());
        }
    }

    double acc = 0.0;
    double inv_prev = 1.0 / x_l;
    for (std::size_t j = 1; j <= n; ++j) {
        const double inv = std::exp(xp.kappa * dt * j / n) / xt[j];
        acc += 0.5 * (inv_prev + inv) * dt / n;
        inv_prev = inv;
    }
    return acc;
}

ThreeHalvesPathEngine::ThreeHalvesPathEngine(
    ThreeHalvesParams p, std::vector<double> times, heston::Scheme scheme,
    std::shared_ptr<const InverseIvSampler> iv_sampler)
    : params_(p), times_(std::move(times)), scheme_(scheme),
      iv_(std::move(iv_sampler)) {
    params_.validate();
    if (times_.empty())
        throw std::invalid_argument("ThreeHalvesPathEngine: no monitoring dates");
    if (!iv_)
        throw std::logic_error(
            "ThreeHalvesPathEngine: conditional int ds/X sampler required; "
            "the exact law is not built in");
    if (scheme_ == heston::Scheme::bridge)
        heston::BridgeSchedule::build(times_.size());
}

heston::PathGrid ThreeHalvesPathEngine::operator()(std::span<const double> u) const {
    const std::size_t h = times_.size();
    if (u.size() < dimension())
        throw std::invalid_argument("ThreeHalvesPathEngine: not enough coordinates");
    const auto xp = params_.x_process();

    // X = 1/V path at the dates
    std::vector<double> x(h);
    if (scheme_ == heston::Scheme::naive) {
        double t_prev = 0.0, x_prev = xp.V0;
        for (std::size_t i = 0; i < h; ++i) {
            x[i] = heston::variance_transition_quantile(xp, x_prev,
                                                        times_[i] - t_prev, u[i]);
            t_prev = times_[i];
            x_prev = x[i];
        }
    } else {
        x = heston::sqrt_bridge_path(xp, times_, u.subspan(0, h),
                                     u.subspan(3 * h, h), u.subspan(4 * h, h));
    }

    heston::PathGrid grid;
    grid.times = times_;
    grid.v.resize(h);
    grid.iv.resize(h);
    grid.z.resize(h);
    double t_prev = 0.0, x_prev = xp.V0;
    for (std::size_t i = 0; i < h; ++i) {
        const double dt = times_[i] - t_prev;
        grid.v[i] = 1.0 / x[i];
        grid.iv[i] = iv_->sample(xp, x_prev, x[i], dt, u[h + i]);
        grid.z[i] = three_halves_stoch_integral(params_, x_prev, x[i], grid.iv[i], dt);
        t_prev = times_[i];
        x_prev = x[i];
    }

    // price path: the conditional step law matches the Heston one given
    // (iv, z), so the same machinery applies
    if (scheme_ == heston::Scheme::naive) {
        grid.s.resize(h);
        double s_prev = params_.S0;
        t_prev = 0.0;
        for (std::size_t i = 0; i < h; ++i) {
            const auto law = heston::ConditionedLogPriceLaw::make(
                s_prev, params_.r, params_.rho, times_[i] - t_prev, grid.iv[i],
                grid.z[i]);
            grid.s[i] = law.quantile(u[2 * h + i]);
            s_prev = grid.s[i];
            t_prev = times_[i];
        }
    } else {
        heston::HestonParams pricep = xp;
        pricep.S0 = params_.S0;
        pricep.r = params_.r;
        pricep.rho = params_.rho;
        grid.s = heston::stock_bridge_path(pricep, grid, u.subspan(2 * h, h));
    }
    return grid;
}

} // namespace hqmc::ext
