#pragma once

namespace hqmc::heston {

// Heston model constants. The Feller condition 2*kappa*theta >= sigma^2 is
// deliberately not required; the reference parameter sets violate it.
struct HestonParams {
    double S0 = 100.0;   // spot
    double V0 = 0.04;    // initial variance
    double kappa = 1.0;  // mean-reversion rate
    double theta = 0.04; // long-run variance
    double sigma = 0.5;  // vol of vol
    double rho = 0.0;    // correlation between price and variance drivers
    double r = 0.0;      // risk-free rate

    double delta() const { return 4.0 * theta * kappa / (sigma * sigma); }
    bool feller() const { return 2.0 * kappa * theta >= sigma * sigma; }

    // throws std::invalid_argument on a bad parameter set
    void validate() const;
};

} // namespace hqmc::heston
