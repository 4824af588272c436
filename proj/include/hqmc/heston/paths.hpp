#pragma once

#include "hqmc/heston/params.hpp"

#include <cstddef>
#include <memory>
#include <span>
#include <vector>

namespace hqmc::heston {

enum class Scheme { naive, bridge };

// Monitoring grid t_1 < ... < t_h (t_0 = 0 implied) with per-date variance and
// price and per-interval integrated variance and stochastic integral.
struct PathGrid {
    std::vector<double> times;
    std::vector<double> v;  // V_{t_i}
    std::vector<double> iv; // int_{t_{i-1}}^{t_i} V ds
    std::vector<double> z;  // int_{t_{i-1}}^{t_i} sqrt(V) dW (variance driver)
    std::vector<double> s;  // S_{t_i}
};

// Level-order midpoint visitation: terminal first, then each dyadic refinement
// level. Indices are 1-based dates; left/right are the already-visited
// conditioning dates (0 = start of the grid).
struct BridgeSchedule {
    struct Node {
        std::size_t index, left, right;
    };
    std::vector<Node> order; // order[0] is the terminal node

    static BridgeSchedule build(std::size_t h); // h must be a power of two
};

// Pluggable per-interval integrated-variance quantile sampler; the default
// builds the exact law per call. Fast table-backed implementations substitute
// here for bulk path generation.
class IvSampler {
public:
    virtual ~IvSampler() = default;
    virtual double quantile(const HestonParams& p, double v_l, double v_r, double dt,
                            double prob) const;
};

// Pluggable variance-transition quantile sampler (same idea).
class TransitionSampler {
public:
    virtual ~TransitionSampler() = default;
    virtual double quantile(const HestonParams& p, double v_u, double dt,
                            double prob) const;
};

// Square-root process at the grid times by squared-Bessel bridge sampling in
// the time-changed coordinates. u_var supplies the terminal chi-squared draw
// (position 0) and the interior Gamma draws in visitation order; u_pois and
// u_bessel supply the interior Poisson and Bessel draws, indexed by visitation
// position.
std::vector<double> sqrt_bridge_path(const HestonParams& p,
                                     std::span<const double> times,
                                     std::span<const double> u_var,
                                     std::span<const double> u_pois,
                                     std::span<const double> u_bessel);

// Fills grid.iv and grid.z given grid.v (one iv coordinate per interval).
void fill_integrated_variance(const HestonParams& p, PathGrid& grid,
                              std::span<const double> u_iv,
                              const IvSampler* sampler = nullptr);

// Share-price path conditional on the variance-path functionals, sampled in
// bridge order from h standard-normal coordinates.
std::vector<double> stock_bridge_path(const HestonParams& p, const PathGrid& grid,
                                      std::span<const double> u_normal);

// Full path construction. Coordinate layout (dimension 5h): block [0,h) are
// variance draws, [h,2h) integrated-variance draws, [2h,3h) price normals,
// [3h,4h) Poisson and [4h,5h) Bessel auxiliaries (bridge interior points
// only). The naive scheme consumes the first three blocks in date order and
// ignores the auxiliaries; the bridge scheme consumes variance and price
// blocks in visitation order.
class HestonPathEngine {
public:
    HestonPathEngine(HestonParams p, std::vector<double> times, Scheme scheme);

    std::size_t dates() const { return times_.size(); }
    std::size_t dimension() const { return 5 * times_.size(); }
    Scheme scheme() const { return scheme_; }

    void set_iv_sampler(std::shared_ptr<const IvSampler> s) { iv_ = std::move(s); }
    void set_transition_sampler(std::shared_ptr<const TransitionSampler> s) {
        trans_ = std::move(s);
    }

    PathGrid operator()(std::span<const double> u) const;

private:
    HestonParams params_;
    std::vector<double> times_;
    Scheme scheme_;
    BridgeSchedule schedule_; // bridge only
    std::shared_ptr<const IvSampler> iv_;
    std::shared_ptr<const TransitionSampler> trans_;
};

// Uniform monitoring grid {T/h, 2T/h, ..., T}.
std::vector<double> uniform_grid(double horizon, std::size_t h);

} // namespace hqmc::heston
