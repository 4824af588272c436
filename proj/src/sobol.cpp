#include "hqmc/qmc/sobol.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>

namespace hqmc::qmc {

namespace {
constexpr unsigned kBits = 32;
}

std::string DigitalNet::default_table_path() {
    if (const char* env = std::getenv("HQMC_SOBOL_TABLE"))
        return env;
#ifdef HQMC_DATA_DIR
    return std::string(HQMC_DATA_DIR) + "/new-joe-kuo-6.1281";
#else
    return "data/new-joe-kuo-6.1281";
#endif
}

DigitalNet::DigitalNet(unsigned dimension, unsigned log2_count)
    : DigitalNet(dimension, log2_count, default_table_path()) {}

DigitalNet::DigitalNet(unsigned dimension, unsigned log2_count,
                       const std::string& table_path)
    : d_(dimension), m_(log2_count) {
    if (d_ < 1)
        throw std::invalid_argument("DigitalNet: dimension must be positive");
    if (m_ >= 32)
        throw std::invalid_argument("DigitalNet: log2_count must be below 32");
    init(table_path);
}

void DigitalNet::init(const std::string& table_path) {
    dirs_.assign(std::size_t{d_} * kBits, 0);

    // dimension 1: van der Corput
    for (unsigned k = 0; k < kBits; ++k)
        dirs_[k] = 1u << (kBits - 1 - k);
    if (d_ == 1) return;

    std::ifstream in(table_path);
    if (!in)
        throw std::runtime_error("DigitalNet: cannot open direction-number table " + table_path);
    std::string header;
    std::getline(in, header);  // "d s a m_i"

    unsigned loaded = 1;
    std::string line;
    while (loaded < d_ && std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream ls(line);
        unsigned long d, s, a;
        if (!(ls >> d >> s >> a))
            throw std::runtime_error("DigitalNet: malformed table row: " + line);
        std::vector<std::uint64_t> m(s + 1);
        for (unsigned long i = 1; i <= s; ++i)
            if (!(ls >> m[i]))
                throw std::runtime_error("DigitalNet: malformed m_i list: " + line);

        std::uint32_t* v = &dirs_[std::size_t{loaded} * kBits];
        if (s >= kBits) {
            for (unsigned k = 0; k < kBits; ++k)
                v[k] = static_cast<std::uint32_t>(m[k + 1]) << (kBits - 1 - k);
        } else {
            std::vector<std::uint64_t> mm(kBits + 1);
            for (unsigned long k = 1; k <= s; ++k) mm[k] = m[k];
            for (unsigned k = static_cast<unsigned>(s) + 1; k <= kBits; ++k) {
                mm[k] = mm[k - s] ^ (mm[k - s] << s);
                for (unsigned long i = 1; i < s; ++i)
                    mm[k] ^= (((a >> (s - 1 - i)) & 1u) * mm[k - i]) << i;
            }
            for (unsigned k = 0; k < kBits; ++k)
                v[k] = static_cast<std::uint32_t>(mm[k + 1]) << (kBits - 1 - k);
        }
        ++loaded;
    }
    if (loaded < d_)
        throw std::runtime_error("DigitalNet: dimension exceeds direction-number table size");
}

std::uint32_t DigitalNet::coord_bits(std::uint64_t i, unsigned j) const {
    const std::uint32_t* v = &dirs_[std::size_t{j} * kBits];
    std::uint32_t x = 0;
    unsigned k = 0;
    while (i) {
        if (i & 1u) x ^= v[k];
        i >>= 1;
        ++k;
    }
    return x;
}

void DigitalNet::point(std::uint64_t i, std::span<double> out) const {
    for (unsigned j = 0; j < d_ && j < out.size(); ++j)
        out[j] = coord(i, j);
}

std::vector<std::vector<double>> DigitalNet::points() const {
    std::vector<std::vector<double>> pts(count(), std::vector<double>(d_));
    for (std::uint64_t i = 0; i < count(); ++i)
        point(i, pts[i]);
    return pts;
}

} // namespace hqmc::qmc
