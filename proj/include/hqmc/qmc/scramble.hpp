#pragma once

#include "hqmc/qmc/sobol.hpp"

#include <cstdint>
#include <vector>

namespace hqmc::qmc {

// Owen nested uniform scrambling in base 2. Each binary digit of a
// coordinate is flipped or kept according to a random permutation indexed by
// the dimension and the preceding digit prefix; permutations with distinct
// indices are independent. Permutations are realized lazily by counter-based
// hashing of (seed, dimension, depth, prefix), so the state is O(1) and
// deterministic given the seed. Digits beyond digit_depth are filled with
// independent uniform bits.
class ScrambleState {
public:
    explicit ScrambleState(std::uint64_t seed, unsigned digit_depth = 32)
        : seed_(seed), depth_(digit_depth), identity_(false) {}

    // All permutations the identity: scrambling becomes a no-op.
    static ScrambleState identity() {
        ScrambleState s(0);
        s.identity_ = true;
        return s;
    }

    std::uint64_t seed() const { return seed_; }
    unsigned digit_depth() const { return depth_; }

    // Scramble the 32 leading fractional bits of coordinate dim; the result
    // carries 53 fractional bits (uniform tail below the scrambled digits)
    // and is clamped to [2^-64, 1 - 2^-53].
    double apply_bits(std::uint32_t bits, unsigned dim) const;
    double apply(double x, unsigned dim) const;

    std::vector<double> apply(const std::vector<double>& point) const;
    // All scrambled points of a net.
    std::vector<std::vector<double>> apply(const DigitalNet& net) const;

private:
    std::uint64_t seed_;
    unsigned depth_;
    bool identity_;
};

} // namespace hqmc::qmc
