#include "hqmc/svj/svj.hpp"

#include "hqmc/dist/discrete.hpp"
#include "hqmc/dist/normal.hpp"
#include "hqmc/heston/pricing.hpp"

#include <cmath>
#include <stdexcept>

namespace hqmc::svj {

void SvjParams::validate() const {
    base.validate();
    if (!(lambda >= 0.0))
        throw std::invalid_argument("SvjParams: jump intensity must be nonnegative");
    if (!(mu_bar > -1.0))
        throw std::invalid_argument("SvjParams: mean relative jump must exceed -1");
    if (!(sigma_s >= 0.0))
        throw std::invalid_argument("SvjParams: jump log-std must be nonnegative");
}

double svj_terminal(const SvjParams& p, double horizon, std::span<const double> u) {
    if (u.size() < 5)
        throw std::invalid_argument("svj_terminal: needs five coordinates");
    const double diff = heston::heston_terminal(p.diffusion(), horizon, u.first(3));
    const long n = dist::poisson_quantile(p.lambda * horizon, u[3]);
    double jsum = 0.0;
    if (n > 0)
        jsum = n * p.mu_s() +
               std::sqrt(static_cast<double>(n)) * p.sigma_s * dist::normal_quantile(u[4]);
    return diff * std::exp(jsum);
}

long poisson_bridge_count(long n_s, long n_t, double s, double u_time, double t,
                          double prob) {
    if (n_s > n_t)
        throw std::invalid_argument("poisson_bridge_count: counts must be nondecreasing");
    if (!(s < u_time && u_time < t))
        throw std::invalid_argument("poisson_bridge_count: interior time out of order");
    return n_s + dist::binomial_quantile(n_t - n_s, (u_time - s) / (t - s), prob);
}

double jumpsum_bridge(double j_l, double j_r, long n_l, long n_i, long n_r,
                      double mu_s, double sigma_s, double prob) {
    if (n_l > n_i || n_i > n_r)
        throw std::invalid_argument("jumpsum_bridge: counts must be nondecreasing");
    if (n_r == n_l) return j_l; // no jumps in the span
    const double dl = static_cast<double>(n_i - n_l);
    const double dr = static_cast<double>(n_r - n_i);
    const double span = static_cast<double>(n_r - n_l);
    const double ratio = dl / span;
    const double mean = j_l + dl * mu_s + ratio * (j_r - j_l - span * mu_s);
    const double var = sigma_s * sigma_s * dl * dr / span;
    if (!(var > 0.0)) return mean;
    return mean + std::sqrt(var) * dist::normal_quantile(prob);
}

SvjPathEngine::SvjPathEngine(SvjParams p, std::vector<double> times,
                             heston::Scheme scheme)
    : params_(p), diffusion_(p.diffusion(), std::move(times), scheme) {
    params_.validate();
}

std::pair<heston::PathGrid, JumpPath> SvjPathEngine::operator()(
    std::span<const double> u) const {
    const std::size_t h = diffusion_.dates();
    if (u.size() < 7 * h)
        throw std::invalid_argument("SvjPathEngine: not enough coordinates");

    heston::PathGrid grid = diffusion_(u.first(5 * h));
    const auto u_cnt = u.subspan(5 * h, h);
    const auto u_sum = u.subspan(6 * h, h);
    const double mu = params_.mu_s();

    JumpPath jumps;
    jumps.counts.assign(h, 0);
    jumps.jsum.assign(h, 0.0);

    if (scheme() == heston::Scheme::naive) {
        long n = 0;
        double t_prev = 0.0, j = 0.0;
        for (std::size_t i = 0; i < h; ++i) {
            const double dt = grid.times[i] - t_prev;
            const long dn = dist::poisson_quantile(params_.lambda * dt, u_cnt[i]);
            n += dn;
            if (dn > 0)
                j += dn * mu + std::sqrt(static_cast<double>(dn)) * params_.sigma_s *
                                   dist::normal_quantile(u_sum[i]);
            jumps.counts[i] = n;
            jumps.jsum[i] = j;
            t_prev = grid.times[i];
        }
    } else {
        const auto sched = heston::BridgeSchedule::build(h);
        // 1-based date slots with slot 0 = grid start
        std::vector<long> cnt(h + 1, 0);
        std::vector<double> js(h + 1, 0.0);
        auto time_at = [&](std::size_t slot) {
            return slot == 0 ? 0.0 : grid.times[slot - 1];
        };
        cnt[h] = dist::poisson_quantile(params_.lambda * time_at(h), u_cnt[0]);
        for (std::size_t pos = 1; pos < sched.order.size(); ++pos) {
            const auto& nd = sched.order[pos];
            cnt[nd.index] =
                poisson_bridge_count(cnt[nd.left], cnt[nd.right], time_at(nd.left),
                                     time_at(nd.index), time_at(nd.right), u_cnt[pos]);
        }
        if (cnt[h] > 0)
            js[h] = cnt[h] * mu + std::sqrt(static_cast<double>(cnt[h])) *
                                      params_.sigma_s * dist::normal_quantile(u_sum[0]);
        for (std::size_t pos = 1; pos < sched.order.size(); ++pos) {
            const auto& nd = sched.order[pos];
            js[nd.index] = jumpsum_bridge(js[nd.left], js[nd.right], cnt[nd.left],
                                          cnt[nd.index], cnt[nd.right], mu,
                                          params_.sigma_s, u_sum[pos]);
        }
        for (std::size_t i = 0; i < h; ++i) {
            jumps.counts[i] = cnt[i + 1];
            jumps.jsum[i] = js[i + 1];
        }
    }

    for (std::size_t i = 0; i < h; ++i) grid.s[i] *= std::exp(jumps.jsum[i]);
    return {std::move(grid), std::move(jumps)};
}

} // namespace hqmc::svj
