#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace hqmc::qmc {

// Base-2 digital net from Sobol direction numbers (Joe-Kuo layout).
// Point i, coordinate j is the XOR of the direction numbers selected by the
// binary digits of i; coordinate 0 is the van der Corput sequence.
class DigitalNet {
public:
    // Uses the direction-number table bundled with the library.
    DigitalNet(unsigned dimension, unsigned log2_count);
    DigitalNet(unsigned dimension, unsigned log2_count, const std::string& table_path);

    unsigned dimension() const { return d_; }
    unsigned log2_count() const { return m_; }
    std::uint64_t count() const { return std::uint64_t{1} << m_; }

    // 32 fractional bits of coordinate j of point i.
    std::uint32_t coord_bits(std::uint64_t i, unsigned j) const;
    double coord(std::uint64_t i, unsigned j) const {
        return coord_bits(i, j) * 0x1p-32;
    }
    void point(std::uint64_t i, std::span<double> out) const;
    std::vector<std::vector<double>> points() const;

    // Path of the default table (for tooling and tests).
    static std::string default_table_path();

private:
    void init(const std::string& table_path);
    unsigned d_, m_;
    std::vector<std::uint32_t> dirs_;  // d_ x 32, row-major per dimension
};

} // namespace hqmc::qmc
