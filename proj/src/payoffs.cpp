#include "hqmc/payoffs/payoffs.hpp"

#include "hqmc/dist/normal.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace hqmc::payoffs {

namespace {

double path_average(const heston::PathGrid& grid) {
    double avg = 0.0;
    for (double s : grid.s) avg += s;
    return avg / grid.s.size();
}

// drift and std of the lognormal step over interval i given the variance path
struct Step {
    double m, sd;
};

Step step_law(const heston::HestonParams& p, const heston::PathGrid& grid,
              std::size_t i) {
    const double dt = grid.times[i] - (i == 0 ? 0.0 : grid.times[i - 1]);
    const double m = p.r * dt - 0.5 * grid.iv[i] + p.rho * grid.z[i];
    const double sd = std::sqrt(std::max((1.0 - p.rho * p.rho) * grid.iv[i], 0.0));
    return {m, sd};
}

} // namespace

double asian_payoff(const heston::PathGrid& grid, const AsianSpec& spec, double r) {
    if (grid.s.empty()) throw std::invalid_argument("asian_payoff: empty path");
    return std::exp(-r * spec.expiry) * std::max(path_average(grid) - spec.strike, 0.0);
}

double pw_delta_asian(const heston::PathGrid& grid, const AsianSpec& spec, double r,
                      double s0) {
    const double avg = path_average(grid);
    if (avg < spec.strike) return 0.0;
    return std::exp(-r * spec.expiry) * avg / s0;
}

double pw_rho_asian(const heston::PathGrid& grid, const AsianSpec& spec, double r) {
    const double avg = path_average(grid);
    if (avg < spec.strike) return 0.0;
    double wavg = 0.0;
    for (std::size_t i = 0; i < grid.s.size(); ++i) wavg += grid.s[i] * grid.times[i];
    wavg /= grid.s.size();
    return std::exp(-r * spec.expiry) * (wavg - spec.expiry * (avg - spec.strike));
}

std::vector<double> lr_scores(const heston::HestonParams& p,
                              const heston::PathGrid& grid) {
    const std::size_t d = grid.s.size();
    std::vector<double> scores(d);
    double s_prev = p.S0;
    for (std::size_t i = 0; i < d; ++i) {
        const double dt = grid.times[i] - (i == 0 ? 0.0 : grid.times[i - 1]);
        const double sbar2 = (1.0 - p.rho * p.rho) * grid.iv[i] / dt;
        const double sbar = std::sqrt(sbar2);
        if (!(sbar > 0.0))
            throw std::runtime_error("lr_scores: degenerate step volatility");
        const double xi =
            std::exp(-0.5 * p.rho * p.rho * grid.iv[i] + p.rho * grid.z[i]);
        scores[i] = (std::log(grid.s[i] / (s_prev * xi)) - (p.r - 0.5 * sbar2) * dt) /
                    (sbar * std::sqrt(dt));
        s_prev = grid.s[i];
    }
    return scores;
}

LrGreeks lr_greeks_asian(const heston::HestonParams& p, const heston::PathGrid& grid,
                         const AsianSpec& spec) {
    const double payoff =
        std::max(path_average(grid) - spec.strike, 0.0) * std::exp(-p.r * spec.expiry);
    LrGreeks g;
    if (payoff == 0.0) return g;

    const auto scores = lr_scores(p, grid);
    const double dt1 = grid.times[0];
    const double sbar1 =
        std::sqrt((1.0 - p.rho * p.rho) * grid.iv[0] / dt1);
    const double s1 = sbar1 * std::sqrt(dt1);
    const double d1 = scores[0];
    g.delta = payoff * d1 / (p.S0 * s1);
    g.gamma = payoff * (d1 * d1 - d1 * s1 - 1.0) / (p.S0 * p.S0 * s1 * s1);
    double acc = -spec.expiry;
    for (std::size_t i = 0; i < scores.size(); ++i) {
        const double dt = grid.times[i] - (i == 0 ? 0.0 : grid.times[i - 1]);
        const double sbar = std::sqrt((1.0 - p.rho * p.rho) * grid.iv[i] / dt);
        acc += scores[i] * std::sqrt(dt) / sbar;
    }
    g.rho = payoff * acc;
    return g;
}

double barrier_step_survival_prob(double s, double barrier, double r, double rho,
                                  double dt, double iv, double z) {
    const double m = r * dt - 0.5 * iv + rho * z;
    const double sd = std::sqrt(std::max((1.0 - rho * rho) * iv, 0.0));
    if (sd == 0.0) return s * std::exp(m) >= barrier ? 1.0 : 0.0;
    return dist::normal_cdf((std::log(s / barrier) + m) / sd);
}

double barrier_onestep_survival(const heston::HestonParams& p,
                                const heston::PathGrid& grid,
                                const BarrierSpec& spec,
                                std::span<const double> u_price) {
    const std::size_t h = grid.times.size();
    if (u_price.size() < h)
        throw std::invalid_argument("barrier_onestep_survival: not enough coordinates");
    if (!(spec.barrier < p.S0))
        throw std::invalid_argument("barrier_onestep_survival: spot starts below barrier");
    double s = p.S0, weight = 1.0;
    for (std::size_t i = 0; i < h; ++i) {
        const auto [m, sd] = step_law(p, grid, i);
        const double psurv =
            barrier_step_survival_prob(s, spec.barrier, p.r, p.rho,
                                       grid.times[i] - (i == 0 ? 0.0 : grid.times[i - 1]),
                                       grid.iv[i], grid.z[i]);
        if (psurv == 0.0) return 0.0; // deterministic knockout
        weight *= psurv;
        if (sd == 0.0) {
            s *= std::exp(m);
        } else {
            const double u =
                std::min((1.0 - psurv) + u_price[i] * psurv, 1.0 - 1e-16);
            s *= std::exp(m + sd * dist::normal_quantile(u));
        }
        s = std::max(s, spec.barrier); // guard numerical undershoot of the tail
    }
    const double T = grid.times.back();
    return weight * std::exp(-p.r * T) * std::max(s - spec.strike, 0.0);
}

double barrier_knockout_indicator(const heston::HestonParams& p,
                                  const heston::PathGrid& grid,
                                  const BarrierSpec& spec,
                                  std::span<const double> u_price) {
    const std::size_t h = grid.times.size();
    if (u_price.size() < h)
        throw std::invalid_argument("barrier_knockout_indicator: not enough coordinates");
    double s = p.S0;
    for (std::size_t i = 0; i < h; ++i) {
        const auto [m, sd] = step_law(p, grid, i);
        s *= std::exp(m + (sd > 0.0 ? sd * dist::normal_quantile(u_price[i]) : 0.0));
        if (s < spec.barrier) return 0.0;
    }
    const double T = grid.times.back();
    return std::exp(-p.r * T) * std::max(s - spec.strike, 0.0);
}

} // namespace hqmc::payoffs
