#pragma once

#include <cstdint>

namespace neutro {

// SplitMix64 step: advances the state and returns the mixed output.
std::uint64_t splitmix64(std::uint64_t& state);

// Derives an independent seed for sub-stream `index` of `seed`
// (used for restarts).
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index);

// Portable random source used for every stochastic step in the library.
//
// Scheme (fixed so outputs are reproducible across platforms and languages):
//   * state: xoshiro256**, its four words filled by four SplitMix64 outputs
//     starting from the user seed;
//   * uniform(): (next() >> 11) * 2^-53, a double in [0, 1);
//   * normal(): Box-Muller on u1 = 1 - uniform() (in (0, 1]) and
//     u2 = uniform(); returns r*cos(2*pi*u2) first and caches r*sin(2*pi*u2)
//     for the following call.
class Rng {
public:
    explicit Rng(std::uint64_t seed);

    std::uint64_t next();
    double uniform();
    // Uniform integer in [0, n); n must be positive.
    std::uint64_t below(std::uint64_t n);
    double normal();

private:
    std::uint64_t s_[4];
    bool has_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace neutro
