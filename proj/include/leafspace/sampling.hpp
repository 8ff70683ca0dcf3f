#ifndef LEAFSPACE_SAMPLING_HPP
#define LEAFSPACE_SAMPLING_HPP

#include <cmath>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace leafspace {

inline uint64_t fnv1a(std::string_view data, uint64_t seed = 14695981039346656037ull) {
    uint64_t h = seed;
    for (char c : data) {
        h ^= static_cast<unsigned char>(c);
        h *= 1099511628211ull;
    }
    return h;
}

// Kronecker (additive-recurrence) low-discrepancy sequence: coordinate i of
// sample j is frac(offset_i + j * alpha_i) with alpha_i = frac(sqrt(prime_i)).
// The offsets are derived from the seed, so the sequence is reproducible.
class Sampler {
  public:
    explicit Sampler(uint64_t seed) : seed_(seed) {}

    // j-th sample in [0,1]^dim
    std::vector<double> unit(int dim, long j) const {
        static const int primes[] = {2, 3, 5, 7, 11, 13, 17, 19};
        std::vector<double> out(static_cast<size_t>(dim));
        for (int i = 0; i < dim; ++i) {
            double alpha = std::sqrt(static_cast<double>(primes[i % 8])) + (i / 8);
            alpha -= std::floor(alpha);
            uint64_t mixed = seed_ ^ (0x9e3779b97f4a7c15ull * static_cast<uint64_t>(i + 1));
            double offset = static_cast<double>(mixed >> 11) * 0x1.0p-53;
            double v = offset + static_cast<double>(j + 1) * alpha;
            out[static_cast<size_t>(i)] = v - std::floor(v);
        }
        return out;
    }

    // j-th sample strictly inside the box given by (lo,hi) pairs; a 5% margin
    // keeps samples away from the boundary.
    std::vector<double> in_box(const std::vector<std::pair<double, double>>& box, long j) const {
        std::vector<double> u = unit(static_cast<int>(box.size()), j);
        for (size_t i = 0; i < box.size(); ++i) {
            double lo = box[i].first, hi = box[i].second;
            double w = hi - lo;
            u[i] = lo + w * (0.05 + 0.9 * u[i]);
        }
        return u;
    }

  private:
    uint64_t seed_;
};

}  // namespace leafspace

#endif
