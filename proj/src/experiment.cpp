#include "hqmc/cli/experiment.hpp"

#include "hqmc/dist/discrete.hpp"
#include "hqmc/dist/normal.hpp"
#include "hqmc/heston/fast_samplers.hpp"
#include "hqmc/heston/pricing.hpp"
#include "hqmc/payoffs/payoffs.hpp"
#include "hqmc/qmc/estimator.hpp"
#include "hqmc/qmc/sobol.hpp"

#include "json.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <memory>
#include <set>
#include <sstream>
#include <thread>

namespace hqmc::cli {

using nlohmann::json;

namespace {

// ---- config parsing -------------------------------------------------------

[[noreturn]] void fail(const std::string& path, const std::string& what) {
    throw ConfigError(path + ": " + what);
}

const json& need(const json& j, const std::string& path, const char* key) {
    if (!j.is_object() || !j.contains(key)) fail(path + "." + key, "missing field");
    return j.at(key);
}

double num(const json& j, const std::string& path, const char* key) {
    const json& v = need(j, path, key);
    if (!v.is_number()) fail(path + "." + key, "expected a number");
    return v.get<double>();
}

double num_or(const json& j, const std::string& path, const char* key, double dflt) {
    if (!j.is_object() || !j.contains(key)) return dflt;
    return num(j, path, key);
}

std::string str(const json& j, const std::string& path, const char* key) {
    const json& v = need(j, path, key);
    if (!v.is_string()) fail(path + "." + key, "expected a string");
    return v.get<std::string>();
}

heston::HestonParams parse_heston(const json& j, const std::string& path) {
    heston::HestonParams p;
    p.S0 = num(j, path, "S0");
    p.V0 = num(j, path, "V0");
    p.kappa = num(j, path, "kappa");
    p.theta = num(j, path, "theta");
    p.sigma = num(j, path, "sigma");
    p.rho = num(j, path, "rho");
    p.r = num(j, path, "r");
    return p;
}

bool pow2(std::uint64_t n) { return n > 0 && (n & (n - 1)) == 0; }

} // namespace

ExperimentConfig ExperimentConfig::from_json_text(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config: invalid JSON: ") + e.what());
    }
    ExperimentConfig cfg;
    const std::string root = "config";
    cfg.model = str(j, root, "model");
    cfg.payoff = str(j, root, "payoff");

    if (j.contains("schemes")) {
        const json& s = j.at("schemes");
        if (!s.is_array() || s.empty()) fail("config.schemes", "expected a nonempty array");
        for (const auto& e : s) {
            if (!e.is_string()) fail("config.schemes", "expected strings");
            cfg.schemes.push_back(e.get<std::string>());
        }
    } else if (j.contains("scheme")) {
        cfg.schemes.push_back(str(j, root, "scheme"));
    } else {
        fail("config.schemes", "missing field");
    }

    const json& nlist = need(j, root, "n");
    if (nlist.is_number_unsigned()) {
        cfg.n.push_back(nlist.get<std::uint64_t>());
    } else if (nlist.is_array() && !nlist.empty()) {
        for (const auto& e : nlist) {
            if (!e.is_number_unsigned()) fail("config.n", "expected positive integers");
            cfg.n.push_back(e.get<std::uint64_t>());
        }
    } else {
        fail("config.n", "expected a positive integer or nonempty array");
    }

    cfg.q = static_cast<std::uint64_t>(num_or(j, root, "q", 8));
    cfg.seed = static_cast<std::uint64_t>(num_or(j, root, "seed", 0));
    cfg.dates = static_cast<std::size_t>(num_or(j, root, "dates", 1));
    cfg.strike = num_or(j, root, "strike", 100.0);
    cfg.expiry = num_or(j, root, "expiry", 1.0);
    cfg.barrier = num_or(j, root, "barrier", 0.0);
    if (j.contains("out")) cfg.out = str(j, root, "out");

    const json& pj = need(j, root, "params");
    const std::string ppath = "config.params";
    if (cfg.model == "heston") {
        cfg.heston = parse_heston(pj, ppath);
    } else if (cfg.model == "svj") {
        cfg.svj.base = parse_heston(pj, ppath);
        cfg.svj.lambda = num(pj, ppath, "lambda");
        cfg.svj.sigma_s = num(pj, ppath, "sigma_s");
        if (pj.contains("mu_bar"))
            cfg.svj.mu_bar = num(pj, ppath, "mu_bar");
        else
            cfg.svj.mu_bar =
                svj::SvjParams::mu_bar_from_log(num(pj, ppath, "mu_s"), cfg.svj.sigma_s);
    } else if (cfg.model == "multiasset") {
        cfg.multiasset.S10 = num(pj, ppath, "S10");
        cfg.multiasset.S20 = num(pj, ppath, "S20");
        cfg.multiasset.r = num(pj, ppath, "r");
        const json& fl = need(pj, ppath, "factors");
        if (!fl.is_array() || fl.size() != 3)
            fail(ppath + ".factors", "expected exactly three factors");
        for (int f = 0; f < 3; ++f) {
            const std::string fp = ppath + ".factors[" + std::to_string(f) + "]";
            const json& fj = fl.at(f);
            cfg.multiasset.factors[f] = {num(fj, fp, "V0"), num(fj, fp, "kappa"),
                                         num(fj, fp, "theta"), num(fj, fp, "sigma"),
                                         num(fj, fp, "rho")};
        }
        if (pj.contains("independent_normals")) {
            if (!pj.at("independent_normals").is_boolean())
                fail(ppath + ".independent_normals", "expected a boolean");
            cfg.multiasset.independent_normals = pj.at("independent_normals").get<bool>();
        }
    } else if (cfg.model == "3over2") {
        cfg.three_halves.S0 = num(pj, ppath, "S0");
        cfg.three_halves.V0 = num(pj, ppath, "V0");
        cfg.three_halves.kappa = num(pj, ppath, "kappa");
        cfg.three_halves.theta = num(pj, ppath, "theta");
        cfg.three_halves.epsilon = num(pj, ppath, "epsilon");
        cfg.three_halves.rho = num(pj, ppath, "rho");
        cfg.three_halves.r = num(pj, ppath, "r");
        cfg.refine_depth = static_cast<int>(num_or(pj, ppath, "refine_depth", 5));
    } else {
        fail("config.model", "unknown model '" + cfg.model + "'");
    }

    cfg.validate();
    return cfg;
}

ExperimentConfig ExperimentConfig::from_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return from_json_text(ss.str());
}

void ExperimentConfig::validate() const {
    static const std::set<std::string> kPayoffs{"european", "asian", "barrier",
                                               "basket"};
    if (!kPayoffs.count(payoff)) fail("config.payoff", "unknown payoff '" + payoff + "'");

    const bool path_payoff = payoff != "european";
    for (const auto& s : schemes) {
        if (s != "mc" && s != "qmc" && s != "bridge" && s != "cond-qmc")
            fail("config.schemes", "unknown scheme '" + s + "'");
        if (s == "cond-qmc" && (payoff != "european" || model != "heston"))
            fail("config.schemes",
                 "cond-qmc is only available for the Heston European call");
        if (s == "bridge" && !path_payoff)
            fail("config.schemes", "bridge ordering needs a path-dependent payoff");
        if (s == "bridge" && !pow2(dates))
            fail("config.dates", "bridge ordering needs a power-of-two date count");
    }

    if (payoff == "basket") {
        if (model != "multiasset") fail("config.payoff", "basket needs model=multiasset");
    } else if (payoff == "barrier") {
        if (model != "heston") fail("config.payoff", "barrier needs model=heston");
        if (!(barrier > 0.0) || barrier >= heston.S0)
            fail("config.barrier", "barrier must lie in (0, S0)");
    } else if (model == "multiasset") {
        fail("config.payoff", "model=multiasset supports payoff=basket only");
    }
    if (payoff == "european" && dates != 1)
        fail("config.dates", "european payoff uses a single date");
    if (path_payoff && dates < 1) fail("config.dates", "need at least one date");

    for (auto m : n)
        if (!pow2(m)) fail("config.n", "sample counts must be powers of two");
    if (n.empty()) fail("config.n", "missing field");
    if (q < 2) fail("config.q", "need at least two replicates");
    if (!(expiry > 0.0)) fail("config.expiry", "expiry must be positive");
    if (!(strike > 0.0)) fail("config.strike", "strike must be positive");

    try {
        if (model == "heston") heston.validate();
        else if (model == "svj") svj.validate();
        else if (model == "multiasset") multiasset.validate();
        else three_halves.validate();
    } catch (const std::invalid_argument& e) {
        fail("config.params", e.what());
    }
}

namespace {

// ---- integrand construction ----------------------------------------------

// one-step draw of (iv, z) through the table-backed quantiles
struct OneStepSampler {
    heston::HestonParams p;
    std::shared_ptr<const heston::TransitionQuantileTable> trans;
    std::shared_ptr<const heston::IvQuantileTable> iv;
    double horizon = 1.0;

    std::pair<double, double> draw(double u1, double u2) const {
        const double vt = trans->quantile(p, p.V0, horizon, u1);
        const double ivv = iv->quantile(p, p.V0, vt, horizon, u2);
        return {ivv, heston::recover_stoch_integral(p, p.V0, vt, ivv, horizon)};
    }
};

struct Context {
    ExperimentConfig cfg;

    // per-model machinery, built once and shared across rows and workers
    std::shared_ptr<OneStepSampler> one_step;          // european heston/svj
    std::shared_ptr<heston::HestonPathEngine> h_naive, h_bridge;
    std::shared_ptr<svj::SvjPathEngine> s_naive, s_bridge;
    std::shared_ptr<ext::MultiAssetPathEngine> m_naive, m_bridge;
    std::shared_ptr<ext::ThreeHalvesPathEngine> t_naive, t_bridge;

    explicit Context(const ExperimentConfig& c) : cfg(c) {
        const double T = cfg.expiry;
        const std::size_t h = cfg.dates;
        const bool want_bridge =
            std::count(cfg.schemes.begin(), cfg.schemes.end(), "bridge") > 0;

        if (cfg.model == "heston" || cfg.model == "svj") {
            const auto base =
                cfg.model == "heston" ? cfg.heston : cfg.svj.diffusion();
            const double scale = std::max(base.V0, base.theta);
            if (cfg.payoff == "european") {
                // cond-qmc uses the exact laws; the table-backed one-step
                // draw only serves the crude mc/qmc terminal samplers
                const bool tab =
                    std::any_of(cfg.schemes.begin(), cfg.schemes.end(),
                                [](const std::string& s) {
                                    return s == "mc" || s == "qmc";
                                });
                if (tab) {
                    auto t = std::make_shared<heston::TransitionQuantileTable>(
                        base, T, 10.0 * scale, 65, 64);
                    auto i = std::make_shared<heston::IvQuantileTable>(
                        base, T, 20.0 * scale, 97, 17, 64);
                    one_step = std::make_shared<OneStepSampler>(
                        OneStepSampler{base, std::move(t), std::move(i), T});
                }
            } else {
                auto t = std::make_shared<heston::TransitionQuantileTable>(
                    base, T / h, 10.0 * scale);
                auto i = std::make_shared<heston::IvQuantileTable>(base, T / h,
                                                                   20.0 * scale);
                auto times = heston::uniform_grid(T, h);
                if (cfg.model == "heston") {
                    h_naive = std::make_shared<heston::HestonPathEngine>(
                        cfg.heston, times, heston::Scheme::naive);
                    h_naive->set_iv_sampler(i);
                    h_naive->set_transition_sampler(t);
                    if (want_bridge) {
                        h_bridge = std::make_shared<heston::HestonPathEngine>(
                            cfg.heston, times, heston::Scheme::bridge);
                        h_bridge->set_iv_sampler(i);
                        h_bridge->set_transition_sampler(t);
                    }
                } else {
                    s_naive = std::make_shared<svj::SvjPathEngine>(
                        cfg.svj, times, heston::Scheme::naive);
                    s_naive->set_iv_sampler(i);
                    s_naive->set_transition_sampler(t);
                    if (want_bridge) {
                        s_bridge = std::make_shared<svj::SvjPathEngine>(
                            cfg.svj, times, heston::Scheme::bridge);
                        s_bridge->set_iv_sampler(i);
                        s_bridge->set_transition_sampler(t);
                    }
                }
            }
        } else if (cfg.model == "multiasset") {
            auto times = heston::uniform_grid(T, h);
            m_naive = std::make_shared<ext::MultiAssetPathEngine>(
                cfg.multiasset, times, heston::Scheme::naive);
            if (want_bridge)
                m_bridge = std::make_shared<ext::MultiAssetPathEngine>(
                    cfg.multiasset, times, heston::Scheme::bridge);
            for (int f = 0; f < 3; ++f) {
                const auto fp = cfg.multiasset.factor_heston(f);
                const double scale = std::max(fp.V0, fp.theta);
                auto t = std::make_shared<heston::TransitionQuantileTable>(
                    fp, T / h, 10.0 * scale);
                auto i = std::make_shared<heston::IvQuantileTable>(fp, T / h,
                                                                   20.0 * scale);
                m_naive->set_iv_sampler(f, i);
                m_naive->set_transition_sampler(f, t);
                if (m_bridge) {
                    m_bridge->set_iv_sampler(f, i);
                    m_bridge->set_transition_sampler(f, t);
                }
            }
        } else { // 3over2
            auto sampler =
                std::make_shared<ext::BridgeRefinementInverseIv>(cfg.refine_depth);
            auto times = heston::uniform_grid(T, h);
            t_naive = std::make_shared<ext::ThreeHalvesPathEngine>(
                cfg.three_halves, times, heston::Scheme::naive, sampler);
            if (want_bridge)
                t_bridge = std::make_shared<ext::ThreeHalvesPathEngine>(
                    cfg.three_halves, times, heston::Scheme::bridge, sampler);
        }
    }

    std::pair<qmc::Integrand, unsigned> make(const std::string& scheme) const {
        const double T = cfg.expiry, K = cfg.strike;
        const std::size_t h = cfg.dates;
        const bool bridged = scheme == "bridge";

        if (cfg.payoff == "european") {
            if (scheme == "cond-qmc") {
                // exact transition/iv laws: this column is the precision
                // reference, so no interpolation bias is tolerated
                const auto p = cfg.heston;
                return {[p, K, T](std::span<const double> u) {
                            return heston::conditional_european_call(p, K, T,
                                                                     u[0], u[1]);
                        },
                        2};
            }
            if (cfg.model == "heston") {
                const auto os = one_step;
                const double r = cfg.heston.r;
                return {[os, K, T, r](std::span<const double> u) {
                            auto [iv, z] = os->draw(u[0], u[1]);
                            const auto& p = os->p;
                            const double s =
                                heston::ConditionedLogPriceLaw::make(
                                    p.S0, p.r, p.rho, T, iv, z)
                                    .quantile(u[2]);
                            return std::exp(-r * T) * std::max(s - K, 0.0);
                        },
                        3};
            }
            if (cfg.model == "svj") {
                const auto os = one_step; // diffusion part with compensated drift
                const auto sp = cfg.svj;
                return {[os, sp, K, T](std::span<const double> u) {
                            auto [iv, z] = os->draw(u[0], u[1]);
                            const auto& p = os->p;
                            double s = heston::ConditionedLogPriceLaw::make(
                                           p.S0, p.r, p.rho, T, iv, z)
                                           .quantile(u[2]);
                            const long nj =
                                dist::poisson_quantile(sp.lambda * T, u[3]);
                            if (nj > 0)
                                s *= std::exp(nj * sp.mu_s() +
                                              std::sqrt(static_cast<double>(nj)) *
                                                  sp.sigma_s *
                                                  dist::normal_quantile(u[4]));
                            return std::exp(-sp.base.r * T) * std::max(s - K, 0.0);
                        },
                        5};
            }
            // 3over2: single-date path engine
            const auto eng = t_naive;
            const double r = cfg.three_halves.r;
            return {[eng, K, T, r](std::span<const double> u) {
                        auto grid = (*eng)(u);
                        return std::exp(-r * T) * std::max(grid.s.back() - K, 0.0);
                    },
                    static_cast<unsigned>(eng->dimension())};
        }

        if (cfg.payoff == "asian") {
            const payoffs::AsianSpec spec{K, T};
            if (cfg.model == "heston") {
                const auto eng = bridged ? h_bridge : h_naive;
                const double r = cfg.heston.r;
                return {[eng, spec, r](std::span<const double> u) {
                            return payoffs::asian_payoff((*eng)(u), spec, r);
                        },
                        static_cast<unsigned>(eng->dimension())};
            }
            if (cfg.model == "svj") {
                const auto eng = bridged ? s_bridge : s_naive;
                const double r = cfg.svj.base.r;
                return {[eng, spec, r](std::span<const double> u) {
                            return payoffs::asian_payoff((*eng)(u).first, spec, r);
                        },
                        static_cast<unsigned>(eng->dimension())};
            }
            const auto eng = bridged ? t_bridge : t_naive;
            const double r = cfg.three_halves.r;
            return {[eng, spec, r](std::span<const double> u) {
                        return payoffs::asian_payoff((*eng)(u), spec, r);
                    },
                    static_cast<unsigned>(eng->dimension())};
        }

        if (cfg.payoff == "barrier") {
            const auto eng = bridged ? h_bridge : h_naive;
            const payoffs::BarrierSpec spec{cfg.barrier, K};
            const auto p = cfg.heston;
            return {[eng, spec, p, h](std::span<const double> u) {
                        auto grid = (*eng)(u);
                        return payoffs::barrier_onestep_survival(
                            p, grid, spec, u.subspan(2 * h, h));
                    },
                    static_cast<unsigned>(eng->dimension())};
        }

        // basket: call on the larger terminal price
        const auto eng = bridged ? m_bridge : m_naive;
        const double r = cfg.multiasset.r;
        return {[eng, K, T, r](std::span<const double> u) {
                    auto path = (*eng)(u);
                    return std::exp(-r * T) *
                           std::max(std::max(path.s1.back(), path.s2.back()) - K,
                                    0.0);
                },
                static_cast<unsigned>(eng->dimension())};
    }
};

} // namespace

bool ExperimentResult::any_failure() const {
    return std::any_of(rows.begin(), rows.end(),
                       [](const RowResult& r) { return !r.error.empty(); });
}

ExperimentResult run_experiment(const ExperimentConfig& cfg, unsigned threads) {
    cfg.validate();
    const Context ctx(cfg);

    // row grid sorted by (scheme, n); the per-row seed is tied to this order
    std::vector<std::string> schemes = cfg.schemes;
    std::sort(schemes.begin(), schemes.end());
    schemes.erase(std::unique(schemes.begin(), schemes.end()), schemes.end());
    std::vector<std::uint64_t> ns = cfg.n;
    std::sort(ns.begin(), ns.end());
    ns.erase(std::unique(ns.begin(), ns.end()), ns.end());

    ExperimentResult result;
    for (const auto& s : schemes)
        for (auto m : ns) {
            RowResult row;
            row.scheme = s;
            row.n = m;
            row.q = cfg.q;
            result.rows.push_back(std::move(row));
        }

    auto run_row = [&](std::size_t idx) {
        RowResult& row = result.rows[idx];
        const auto t0 = std::chrono::steady_clock::now();
        try {
            const auto [f, dim] = ctx.make(row.scheme);
            const std::uint64_t seed =
                qmc::replicate_seed(cfg.seed, 1000003 * (idx + 1));
            qmc::EstimatorReport rep;
            if (row.scheme == "mc") {
                // matched total sample count: q independent batches of n
                std::vector<double> means(cfg.q);
                for (std::uint64_t rrep = 0; rrep < cfg.q; ++rrep)
                    means[rrep] = qmc::mc_estimate(f, dim, row.n,
                                                   qmc::replicate_seed(seed, rrep))
                                      .estimate;
                rep = qmc::EstimatorReport::from_replicates(std::move(means), row.n);
            } else {
                qmc::DigitalNet net(dim, std::countr_zero(row.n));
                rep = qmc::rqmc_estimate(f, net, cfg.q, seed);
            }
            row.estimate = rep.estimate;
            row.std_error = rep.std_error;
            row.replicate_means = std::move(rep.replicate_means);
        } catch (const std::exception& e) {
            row.error = e.what();
        }
        row.wall_ms = std::chrono::duration<double, std::milli>(
                          std::chrono::steady_clock::now() - t0)
                          .count();
    };

    unsigned nthreads = threads ? threads : std::thread::hardware_concurrency();
    nthreads = std::clamp<unsigned>(nthreads, 1,
                                    static_cast<unsigned>(result.rows.size()));
    if (nthreads <= 1) {
        for (std::size_t i = 0; i < result.rows.size(); ++i) run_row(i);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> pool;
        for (unsigned t = 0; t < nthreads; ++t)
            pool.emplace_back([&] {
                for (std::size_t i = next.fetch_add(1); i < result.rows.size();
                     i = next.fetch_add(1))
                    run_row(i);
            });
        for (auto& t : pool) t.join();
    }
    return result;
}

void write_csv(const ExperimentResult& result, std::ostream& os) {
    os << "scheme,n,q,estimate,std_error,wall_ms\n";
    char buf[256];
    for (const auto& row : result.rows) {
        if (!row.error.empty()) {
            os << "# " << row.scheme << " n=" << row.n << " failed: " << row.error
               << "\n";
            std::snprintf(buf, sizeof buf, "%s,%llu,%llu,ERROR,ERROR,%.3f\n",
                          row.scheme.c_str(),
                          static_cast<unsigned long long>(row.n),
                          static_cast<unsigned long long>(row.q), row.wall_ms);
        } else {
            std::snprintf(buf, sizeof buf, "%s,%llu,%llu,%.12g,%.12g,%.3f\n",
                          row.scheme.c_str(),
                          static_cast<unsigned long long>(row.n),
                          static_cast<unsigned long long>(row.q), row.estimate,
                          row.std_error, row.wall_ms);
        }
        os << buf;
    }
}

void write_replicates_csv(const ExperimentResult& result, std::ostream& os) {
    os << "scheme,n,rep,mean\n";
    char buf[256];
    for (const auto& row : result.rows)
        for (std::size_t rrep = 0; rrep < row.replicate_means.size(); ++rrep) {
            std::snprintf(buf, sizeof buf, "%s,%llu,%zu,%.17g\n",
                          row.scheme.c_str(),
                          static_cast<unsigned long long>(row.n), rrep,
                          row.replicate_means[rrep]);
            os << buf;
        }
}

// ---- verification ---------------------------------------------------------

namespace {

struct CsvRow {
    double estimate = 0.0, std_error = 0.0;
    bool valid = false;
};

std::map<std::pair<std::string, std::uint64_t>, CsvRow>
parse_results(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("results: cannot open '" + path + "'");
    std::map<std::pair<std::string, std::uint64_t>, CsvRow> out;
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        if (first) { // header
            first = false;
            continue;
        }
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        if (cells.size() < 6) throw ConfigError("results: malformed row '" + line + "'");
        CsvRow row;
        std::uint64_t n = 0;
        try {
            n = std::stoull(cells[1]);
            if (cells[3] != "ERROR") {
                row.estimate = std::stod(cells[3]);
                row.std_error = std::stod(cells[4]);
                row.valid = true;
            }
        } catch (const std::exception&) {
            throw ConfigError("results: malformed row '" + line + "'");
        }
        out[{cells[0], n}] = row;
    }
    return out;
}

std::string fmt(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g", x);
    return buf;
}

} // namespace

bool VerifyReport::ok() const {
    return std::all_of(lines.begin(), lines.end(),
                       [](const Line& l) { return l.pass; });
}

VerifyReport verify_goldens(const std::string& results_csv_path,
                            const std::string& expect_path) {
    auto rows = parse_results(results_csv_path);

    std::ifstream in(expect_path);
    if (!in) throw ConfigError("expect: cannot open '" + expect_path + "'");
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ConfigError(std::string("expect: invalid JSON: ") + e.what());
    }
    const json& checks = j.is_array() ? j : need(j, "expect", "checks");
    if (!checks.is_array()) fail("expect.checks", "expected an array");

    VerifyReport report;
    auto lookup = [&](const std::string& scheme,
                      std::uint64_t n) -> const CsvRow* {
        auto it = rows.find({scheme, n});
        return it == rows.end() || !it->second.valid ? nullptr : &it->second;
    };

    std::size_t ci = 0;
    for (const auto& c : checks) {
        const std::string path = "expect.checks[" + std::to_string(ci++) + "]";
        const std::string type =
            c.contains("type") ? str(c, path, "type") : std::string("value");
        VerifyReport::Line line;

        if (type == "value") {
            const std::string scheme = str(c, path, "scheme");
            const auto n = static_cast<std::uint64_t>(num(c, path, "n"));
            const double ref = num(c, path, "reference");
            const double k = num_or(c, path, "k", 3.0);
            const double ref_se = num_or(c, path, "reference_std_error", 0.0);
            const double abs_tol = num_or(c, path, "abs_tol", 0.0);
            const CsvRow* row = lookup(scheme, n);
            if (!row) {
                line.text = "value " + scheme + " n=" + std::to_string(n) +
                            ": row missing or failed";
            } else {
                const double comb =
                    std::sqrt(row->std_error * row->std_error + ref_se * ref_se);
                const double diff = std::abs(row->estimate - ref);
                line.pass = diff <= k * comb + abs_tol;
                line.text = "value " + scheme + " n=" + std::to_string(n) + ": |" +
                            fmt(row->estimate) + " - " + fmt(ref) + "| = " +
                            fmt(diff) + (line.pass ? " <= " : " > ") + fmt(k) +
                            "*" + fmt(comb) + (abs_tol > 0.0 ? " (+abs tol)" : "");
            }
        } else if (type == "se_ratio") {
            const std::string a = str(c, path, "num_scheme");
            const std::string b = str(c, path, "den_scheme");
            const auto n = static_cast<std::uint64_t>(num(c, path, "n"));
            const double maxr = num(c, path, "max");
            const CsvRow* ra = lookup(a, n);
            const CsvRow* rb = lookup(b, n);
            if (!ra || !rb) {
                line.text = "se_ratio " + a + "/" + b + " n=" + std::to_string(n) +
                            ": row missing or failed";
            } else if (rb->std_error <= 0.0) {
                line.pass = ra->std_error <= 0.0;
                line.text = "se_ratio " + a + "/" + b + " n=" + std::to_string(n) +
                            ": denominator std error is zero";
            } else {
                const double ratio = ra->std_error / rb->std_error;
                line.pass = ratio <= maxr;
                line.text = "se_ratio " + a + "/" + b + " n=" + std::to_string(n) +
                            ": " + fmt(ratio) + (line.pass ? " <= " : " > ") +
                            fmt(maxr);
            }
        } else if (type == "se_order") {
            const json& sl = need(c, path, "schemes");
            if (!sl.is_array() || sl.size() < 2)
                fail(path + ".schemes", "expected at least two schemes");
            std::vector<std::string> order;
            for (const auto& e : sl) order.push_back(e.get<std::string>());
            // levels where the std errors increase strictly along the list
            std::set<std::uint64_t> levels;
            for (const auto& [key, row] : rows)
                if (key.first == order.front() && row.valid) levels.insert(key.second);
            std::size_t hold = 0, total = 0;
            for (auto n : levels) {
                bool all = true, inc = true;
                for (std::size_t i = 0; i < order.size(); ++i) {
                    const CsvRow* row = lookup(order[i], n);
                    if (!row) { all = false; break; }
                    if (i > 0 &&
                        !(lookup(order[i - 1], n)->std_error < row->std_error))
                        inc = false;
                }
                if (!all) continue;
                ++total;
                if (inc) ++hold;
            }
            const auto min_levels = static_cast<std::size_t>(
                num_or(c, path, "min_levels", static_cast<double>(total)));
            line.pass = total > 0 && hold >= std::min(min_levels, total);
            std::string names;
            for (const auto& s : order) names += (names.empty() ? "" : " < ") + s;
            line.text = "se_order " + names + ": holds at " + std::to_string(hold) +
                        "/" + std::to_string(total) + " levels (need " +
                        std::to_string(std::min(min_levels, total)) + ")";
        } else {
            fail(path + ".type", "unknown check type '" + type + "'");
        }
        report.lines.push_back(std::move(line));
    }
    return report;
}

} // namespace hqmc::cli
