#pragma once

// Self-contained, platform-independent random number generation. The standard
// library's distributions are implementation-defined, so every draw here is
// pinned to a documented algorithm: xoshiro256++ for bits, SplitMix64 for
// seeding and seed derivation, Box-Muller for normals. Same seed, same stream,
// on every platform.

#include <array>
#include <complex>
#include <cstdint>

namespace iqmimo::rng {

// One SplitMix64 step: advances state and returns the next 64-bit output.
std::uint64_t splitmix64_next(std::uint64_t& state);

// xoshiro256++ by Blackman and Vigna; state seeded from SplitMix64 so that
// any 64-bit seed (including 0) yields a well-mixed nonzero state.
class Xoshiro256pp {
public:
    using result_type = std::uint64_t;

    explicit Xoshiro256pp(std::uint64_t seed);

    result_type operator()();

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return ~result_type{0}; }

private:
    std::array<std::uint64_t, 4> s_;
};

// Uniform on [0, 1): top 53 bits scaled by 2^-53.
double uniform_unit(Xoshiro256pp& g);

// Uniform on [lo, hi).
double uniform(Xoshiro256pp& g, double lo, double hi);

// Standard normal via Box-Muller; consumes exactly two uniforms.
double standard_normal(Xoshiro256pp& g);

// Circularly symmetric complex normal, E|z|^2 = 1; consumes two uniforms.
std::complex<double> circular_normal(Xoshiro256pp& g);

} // namespace iqmimo::rng
