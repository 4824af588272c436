#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "hqmc/dist/normal.hpp"
#include "hqmc/heston/fast_samplers.hpp"
#include "hqmc/heston/paths.hpp"
#include "hqmc/payoffs/payoffs.hpp"
#include "hqmc/qmc/estimator.hpp"
#include "hqmc/qmc/scramble.hpp"
#include "hqmc/qmc/sobol.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <vector>

using namespace hqmc;
using namespace hqmc::payoffs;

namespace {

heston::HestonParams reference_params() {
    heston::HestonParams p;
    p.S0 = 100.0;
    p.V0 = 0.010201;
    p.kappa = 6.21;
    p.theta = 0.019;
    p.sigma = 0.61;
    p.rho = -0.70;
    p.r = 0.0319;
    return p;
}

heston::PathGrid constant_grid(double level, std::size_t h, double horizon) {
    heston::PathGrid g;
    g.times = heston::uniform_grid(horizon, h);
    g.s.assign(h, level);
    g.v.assign(h, 0.02);
    g.iv.assign(h, 0.02 * horizon / h);
    g.z.assign(h, 0.0);
    return g;
}

double ks_uniform_normal(std::vector<double> x) {
    std::sort(x.begin(), x.end());
    const double n = x.size();
    double d = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double f = dist::normal_cdf(x[i]);
        d = std::max(d, std::max(f - i / n, (i + 1) / n - f));
    }
    return d;
}

std::vector<double> random_unit_vector(std::mt19937_64& gen, std::size_t n) {
    std::uniform_real_distribution<double> u(1e-12, 1.0 - 1e-12);
    std::vector<double> v(n);
    for (auto& x : v) x = u(gen);
    return v;
}

} // namespace

TEST_CASE("asian payoff basics") {
    AsianSpec spec{100.0, 1.0};
    auto at_strike = constant_grid(100.0, 4, 1.0);
    CHECK(asian_payoff(at_strike, spec, 0.0319) == 0.0);
    auto itm = constant_grid(112.0, 4, 1.0);
    CHECK(asian_payoff(itm, spec, 0.0319) ==
          doctest::Approx(std::exp(-0.0319) * 12.0).epsilon(1e-14));
}

TEST_CASE("pathwise greeks on deterministic paths") {
    AsianSpec spec{100.0, 1.0};
    const double r = 0.0319;

    auto otm = constant_grid(80.0, 4, 1.0);
    CHECK(pw_delta_asian(otm, spec, r, 100.0) == 0.0);
    CHECK(pw_rho_asian(otm, spec, r) == 0.0);

    auto itm = constant_grid(120.0, 4, 1.0);
    CHECK(pw_delta_asian(itm, spec, r, 100.0) ==
          doctest::Approx(std::exp(-r) * 1.2).epsilon(1e-14));

    // single monitoring date at expiry: rho estimate collapses to T*K
    auto single = constant_grid(120.0, 1, 1.0);
    CHECK(pw_rho_asian(single, spec, r) ==
          doctest::Approx(std::exp(-r) * spec.expiry * spec.strike).epsilon(1e-14));
}

TEST_CASE("likelihood-ratio scores are standard normal under exact simulation") {
    auto p = reference_params();
    const std::size_t h = 4;
    auto times = heston::uniform_grid(1.0, h);
    auto ivtab = std::make_shared<heston::IvQuantileTable>(p, 0.25, 0.4);
    auto ttab = std::make_shared<heston::TransitionQuantileTable>(p, 0.25, 0.3);
    heston::HestonPathEngine eng(p, times, heston::Scheme::naive);
    eng.set_iv_sampler(ivtab);
    eng.set_transition_sampler(ttab);

    const std::size_t n = 100000;
    std::vector<std::vector<double>> per_step(h);
    double cross = 0.0;
    std::mt19937_64 gen(3);
    for (std::size_t rep = 0; rep < n; ++rep) {
        auto u = random_unit_vector(gen, 5 * h);
        auto grid = eng(u);
        auto d = lr_scores(p, grid);
        for (std::size_t i = 0; i < h; ++i) per_step[i].push_back(d[i]);
        cross += d[0] * d[1];
    }
    const double thresh = 1.63 / std::sqrt(static_cast<double>(n)); // ~1% level
    for (std::size_t i = 0; i < h; ++i)
        CHECK(ks_uniform_normal(per_step[i]) < thresh);
    CHECK(std::abs(cross / n) < 4.0 / std::sqrt(static_cast<double>(n)));
}

TEST_CASE("lr greeks vanish out of the money") {
    auto p = reference_params();
    auto grid = constant_grid(80.0, 4, 1.0);
    AsianSpec spec{100.0, 1.0};
    auto g = lr_greeks_asian(p, grid, spec);
    CHECK(g.delta == 0.0);
    CHECK(g.gamma == 0.0);
    CHECK(g.rho == 0.0);
}

TEST_CASE("pathwise, likelihood-ratio, and finite-difference greeks agree") {
    auto p = reference_params();
    const std::size_t h = 4;
    auto times = heston::uniform_grid(1.0, h);
    AsianSpec spec{100.0, 1.0};
    auto ivtab = std::make_shared<heston::IvQuantileTable>(p, 0.25, 0.4);
    auto ttab = std::make_shared<heston::TransitionQuantileTable>(p, 0.25, 0.3);
    heston::HestonPathEngine eng(p, times, heston::Scheme::bridge);
    eng.set_iv_sampler(ivtab);
    eng.set_transition_sampler(ttab);

    // the log-price is affine in log S0 and in r*t given the variance path and
    // normals, so bumped payoffs reuse each simulated path (common random
    // numbers by construction)
    const double bump_s = 0.005 * p.S0;
    const double bump_r = 0.0005;
    auto rescale = [](const heston::PathGrid& g, double factor) {
        heston::PathGrid out = g;
        for (auto& s : out.s) s *= factor;
        return out;
    };
    auto rshift = [](const heston::PathGrid& g, double dr) {
        heston::PathGrid out = g;
        for (std::size_t i = 0; i < out.s.size(); ++i)
            out.s[i] *= std::exp(dr * out.times[i]);
        return out;
    };

    const std::uint64_t nrep = 30, npts = 1 << 11;
    std::vector<double> pw_d(nrep, 0.0), lr_d(nrep, 0.0), fd_d(nrep, 0.0);
    std::vector<double> lr_g(nrep, 0.0), fd_g(nrep, 0.0);
    std::vector<double> pw_r(nrep, 0.0), lr_r(nrep, 0.0), fd_r(nrep, 0.0);
    qmc::DigitalNet net(static_cast<unsigned>(5 * h), 11);
    std::vector<double> u(5 * h);
    for (std::uint64_t rep = 0; rep < nrep; ++rep) {
        qmc::ScrambleState scr(qmc::replicate_seed(99, rep));
        for (std::uint64_t i = 0; i < npts; ++i) {
            for (unsigned j = 0; j < 5 * h; ++j) u[j] = scr.apply(net.coord(i, j), j);
            auto grid = eng(u);
            pw_d[rep] += pw_delta_asian(grid, spec, p.r, p.S0);
            pw_r[rep] += pw_rho_asian(grid, spec, p.r);
            auto g = lr_greeks_asian(p, grid, spec);
            lr_d[rep] += g.delta;
            lr_g[rep] += g.gamma;
            lr_r[rep] += g.rho;
            const double up = asian_payoff(rescale(grid, 1.0 + bump_s / p.S0), spec, p.r);
            const double dn = asian_payoff(rescale(grid, 1.0 - bump_s / p.S0), spec, p.r);
            const double mid = asian_payoff(grid, spec, p.r);
            fd_d[rep] += (up - dn) / (2.0 * bump_s);
            fd_g[rep] += (up - 2.0 * mid + dn) / (bump_s * bump_s);
            const auto gup = rshift(grid, bump_r);
            const auto gdn = rshift(grid, -bump_r);
            const double rup =
                std::exp(-(p.r + bump_r) * spec.expiry) *
                std::max(std::accumulate(gup.s.begin(), gup.s.end(), 0.0) / h -
                             spec.strike,
                         0.0);
            const double rdn =
                std::exp(-(p.r - bump_r) * spec.expiry) *
                std::max(std::accumulate(gdn.s.begin(), gdn.s.end(), 0.0) / h -
                             spec.strike,
                         0.0);
            fd_r[rep] += (rup - rdn) / (2.0 * bump_r);
        }
    }
    auto finish = [&](std::vector<double>& v) {
        for (auto& x : v) x /= npts;
        double m = std::accumulate(v.begin(), v.end(), 0.0) / v.size();
        double s2 = 0.0;
        for (double x : v) s2 += (x - m) * (x - m);
        return std::pair{m, std::sqrt(s2 / (v.size() - 1.0) / v.size())};
    };
    auto [mpd, spd] = finish(pw_d);
    auto [mld, sld] = finish(lr_d);
    auto [mfd, sfd] = finish(fd_d);
    auto [mlg, slg] = finish(lr_g);
    auto [mfg, sfg] = finish(fd_g);
    auto [mpr, spr] = finish(pw_r);
    auto [mlr, slr] = finish(lr_r);
    auto [mfr, sfr] = finish(fd_r);
    auto close = [](double a, double sa, double b, double sb) {
        return std::abs(a - b) < 3.0 * std::sqrt(sa * sa + sb * sb) + 1e-4;
    };
    CHECK(close(mpd, spd, mfd, sfd));
    CHECK(close(mld, sld, mfd, sfd));
    CHECK(close(mpd, spd, mld, sld));
    CHECK(close(mlg, slg, mfg, sfg));
    CHECK(close(mpr, spr, mfr, sfr));
    CHECK(close(mlr, slr, mfr, sfr));
    CHECK(mpd > 0.3); // sanity: delta of a near-ATM asian call
    CHECK(mpd < 1.0);
}

TEST_CASE("one-step survival probability behaves") {
    const double r = 0.0319, rho = -0.7, dt = 0.25, iv = 0.005, z = 0.01;
    double prev = 0.0;
    for (double s = 90.0; s <= 110.0; s += 2.0) {
        const double ps = barrier_step_survival_prob(s, 95.0, r, rho, dt, iv, z);
        CHECK(ps > prev); // strictly increasing in spot
        prev = ps;
    }
    // zero-volatility step degenerates to an indicator
    CHECK(barrier_step_survival_prob(100.0, 95.0, r, rho, dt, 0.0, 0.0) == 1.0);
    CHECK(barrier_step_survival_prob(100.0, 120.0, r, rho, dt, 0.0, 0.0) == 0.0);
    // rho = 0 with deterministic variance matches the lognormal closed form
    const double sig2 = 0.04, ddt = 0.5, s0 = 100.0, H = 92.0;
    const double got = barrier_step_survival_prob(s0, H, r, 0.0, ddt, sig2 * ddt, 0.33);
    const double want = dist::normal_cdf(
        (std::log(s0 / H) + (r - 0.5 * sig2) * ddt) / std::sqrt(sig2 * ddt));
    CHECK(got == doctest::Approx(want).epsilon(1e-14));
}

TEST_CASE("vanishing barrier reduces to the plain payoff") {
    auto p = reference_params();
    const std::size_t h = 4;
    auto times = heston::uniform_grid(1.0, h);
    heston::HestonPathEngine eng(p, times, heston::Scheme::naive);
    auto ivtab = std::make_shared<heston::IvQuantileTable>(p, 0.25, 0.4);
    auto ttab = std::make_shared<heston::TransitionQuantileTable>(p, 0.25, 0.3);
    eng.set_iv_sampler(ivtab);
    eng.set_transition_sampler(ttab);
    BarrierSpec spec{1e-8, 100.0};
    std::mt19937_64 gen(17);
    for (int rep = 0; rep < 200; ++rep) {
        auto u = random_unit_vector(gen, 5 * h);
        auto grid = eng(u);
        const double surv = barrier_onestep_survival(p, grid, spec,
                                                     std::span(u).subspan(2 * h, h));
        const double crude = barrier_knockout_indicator(p, grid, spec,
                                                        std::span(u).subspan(2 * h, h));
        // survival probabilities are 1 to machine precision, so both walks see
        // the same uniforms and the same terminal price
        CHECK(surv == doctest::Approx(crude).epsilon(1e-9));
        CHECK(crude ==
              doctest::Approx(std::exp(-p.r * 1.0) *
                              std::max(grid.s.back() - spec.strike, 0.0))
                  .epsilon(1e-9));
    }
}

TEST_CASE("one-step survival estimator is unbiased and lowers variance") {
    auto p = reference_params();
    const std::size_t h = 4;
    auto times = heston::uniform_grid(1.0, h);
    heston::HestonPathEngine eng(p, times, heston::Scheme::naive);
    auto ivtab = std::make_shared<heston::IvQuantileTable>(p, 0.25, 0.4);
    auto ttab = std::make_shared<heston::TransitionQuantileTable>(p, 0.25, 0.3);
    eng.set_iv_sampler(ivtab);
    eng.set_transition_sampler(ttab);
    BarrierSpec spec{95.0, 100.0};

    const std::size_t n = 40000;
    std::mt19937_64 gen(29);
    double s1 = 0.0, s2 = 0.0, c1 = 0.0, c2 = 0.0;
    for (std::size_t rep = 0; rep < n; ++rep) {
        auto u = random_unit_vector(gen, 5 * h);
        auto grid = eng(u);
        const auto up = std::span(u).subspan(2 * h, h);
        const double a = barrier_onestep_survival(p, grid, spec, up);
        const double b = barrier_knockout_indicator(p, grid, spec, up);
        s1 += a;
        s2 += a * a;
        c1 += b;
        c2 += b * b;
    }
    const double ma = s1 / n, va = s2 / n - ma * ma;
    const double mb = c1 / n, vb = c2 / n - mb * mb;
    const double se = std::sqrt((va + vb) / n);
    CHECK(std::abs(ma - mb) < 3.5 * se);
    CHECK(va < vb);
    CHECK(ma > 0.0);
}

TEST_CASE("survival weights lie in the unit interval") {
    auto p = reference_params();
    const std::size_t h = 4;
    auto times = heston::uniform_grid(1.0, h);
    heston::HestonPathEngine eng(p, times, heston::Scheme::naive);
    BarrierSpec spec{98.0, 0.0}; // strike 0: payoff = weight * e^{-rT} S_T
    std::mt19937_64 gen(31);
    for (int rep = 0; rep < 100; ++rep) {
        auto u = random_unit_vector(gen, 5 * h);
        auto grid = eng(u);
        const double val = barrier_onestep_survival(p, grid, spec,
                                                    std::span(u).subspan(2 * h, h));
        CHECK(val >= 0.0);
        // replicate the conditioned walk to recover the weight
        double s = p.S0, weight = 1.0, t_prev = 0.0;
        for (std::size_t i = 0; i < h; ++i) {
            const double dt = grid.times[i] - t_prev;
            const double ps = barrier_step_survival_prob(s, spec.barrier, p.r, p.rho,
                                                         dt, grid.iv[i], grid.z[i]);
            weight *= ps;
            const double m = p.r * dt - 0.5 * grid.iv[i] + p.rho * grid.z[i];
            const double sd =
                std::sqrt((1.0 - p.rho * p.rho) * grid.iv[i]);
            const double uu = std::min((1.0 - ps) + u[2 * h + i] * ps, 1.0 - 1e-16);
            s = std::max(s * std::exp(m + sd * dist::normal_quantile(uu)),
                         spec.barrier);
            t_prev = grid.times[i];
        }
        CHECK(weight > 0.0);
        CHECK(weight <= 1.0);
        CHECK(val ==
              doctest::Approx(weight * std::exp(-p.r * 1.0) * s).epsilon(1e-12));
    }
}
