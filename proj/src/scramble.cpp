#include "hqmc/qmc/scramble.hpp"

#include <algorithm>
#include <cmath>

namespace hqmc::qmc {

namespace {

inline std::uint64_t mix(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x ^= x >> 30;
    x *= 0xbf58476d1ce4e5b9ull;
    x ^= x >> 27;
    x *= 0x94d049bb133111ebull;
    x ^= x >> 31;
    return x;
}

constexpr double kLow = 0x1p-64;
constexpr double kHigh = 1.0 - 0x1p-53;

} // namespace

double ScrambleState::apply_bits(std::uint32_t bits, unsigned dim) const {
    if (identity_)
        return bits * 0x1p-32;

    const std::uint64_t base = mix(seed_ ^ mix(0x51ed270b0a1ull + dim));
    const unsigned nd = std::min(depth_, 32u);
    std::uint32_t y = 0;
    for (unsigned k = 0; k < nd; ++k) {
        std::uint64_t prefix = (k == 0) ? 0 : (bits >> (32 - k));
        std::uint64_t flip = mix(base ^ mix((std::uint64_t{k + 1} << 32) | prefix)) & 1u;
        std::uint32_t digit = (bits >> (31 - k)) & 1u;
        y |= (digit ^ static_cast<std::uint32_t>(flip)) << (31 - k);
    }
    // uniform fill below the scrambled digits
    std::uint64_t tail_bits = 53 - nd;
    std::uint64_t prefix = (nd == 0) ? 0 : (bits >> (32 - nd));
    std::uint64_t tail = mix(mix(base ^ 0xdeadbeefcafef00dull) ^ prefix);
    double val = (y >> (32 - nd)) * std::ldexp(1.0, -static_cast<int>(nd)) +
                 (tail >> (64 - tail_bits)) * 0x1p-53;
    return std::clamp(val, kLow, kHigh);
}

double ScrambleState::apply(double x, unsigned dim) const {
    if (identity_)
        return x;
    auto bits = static_cast<std::uint32_t>(std::floor(x * 0x1p32));
    return apply_bits(bits, dim);
}

std::vector<double> ScrambleState::apply(const std::vector<double>& point) const {
    std::vector<double> out(point.size());
    for (std::size_t j = 0; j < point.size(); ++j)
        out[j] = apply(point[j], static_cast<unsigned>(j));
    return out;
}

std::vector<std::vector<double>> ScrambleState::apply(const DigitalNet& net) const {
    std::vector<std::vector<double>> pts(net.count(), std::vector<double>(net.dimension()));
    for (std::uint64_t i = 0; i < net.count(); ++i)
        for (unsigned j = 0; j < net.dimension(); ++j)
            pts[i][j] = apply_bits(net.coord_bits(i, j), j);
    return pts;
}

} // namespace hqmc::qmc
