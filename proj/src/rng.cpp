#include "iqmimo/rng.hpp"

#include <cmath>
#include <numbers>

namespace iqmimo::rng {

std::uint64_t splitmix64_next(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

Xoshiro256pp::Xoshiro256pp(std::uint64_t seed) {
    for (auto& word : s_)
        word = splitmix64_next(seed);
}

namespace {
inline std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
}
} // namespace

Xoshiro256pp::result_type Xoshiro256pp::operator()() {
    const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
}

double uniform_unit(Xoshiro256pp& g) {
    return static_cast<double>(g() >> 11) * 0x1.0p-53;
}

double uniform(Xoshiro256pp& g, double lo, double hi) {
    return lo + (hi - lo) * uniform_unit(g);
}

double standard_normal(Xoshiro256pp& g) {
    // 1 - u in (0, 1] keeps the log argument away from zero.
    const double u1 = 1.0 - uniform_unit(g);
    const double u2 = uniform_unit(g);
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(2.0 * std::numbers::pi * u2);
}

std::complex<double> circular_normal(Xoshiro256pp& g) {
    const double u1 = 1.0 - uniform_unit(g);
    const double u2 = uniform_unit(g);
    const double r = std::sqrt(-std::log(u1)); // variance 1/2 per component
    const double a = 2.0 * std::numbers::pi * u2;
    return {r * std::cos(a), r * std::sin(a)};
}

} // namespace iqmimo::rng
