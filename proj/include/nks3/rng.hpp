#ifndef NKS3_RNG_HPP
#define NKS3_RNG_HPP

#include <cmath>
#include <cstdint>

#include "nks3/quat.hpp"

namespace nks3 {

// SplitMix64. Chosen as the sampling generator so seeded reports are
// bit-reproducible across platforms and standard library versions.
class SplitMix64 {
  public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    // uniform in [0, 1), 53-bit resolution
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Marsaglia's method: uniform on S^3, rejection-free.
    UnitQuat unit_quat() {
        const double u1 = uniform();
        const double a = 2.0 * M_PI * uniform();
        const double b = 2.0 * M_PI * uniform();
        const double r1 = std::sqrt(1.0 - u1), r2 = std::sqrt(u1);
        UnitQuat q;
        q.q = Quat{r1 * std::sin(a), r1 * std::cos(a), r2 * std::sin(b), r2 * std::cos(b)};
        return q;
    }

    ImQuat im_quat(double scale = 1.0) {
        return {uniform(-scale, scale), uniform(-scale, scale), uniform(-scale, scale)};
    }

  private:
    std::uint64_t state_;
};

}  // namespace nks3

#endif
