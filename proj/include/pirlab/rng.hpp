// SPDX-License-Identifier: MIT
#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace pirlab {

// splitmix64 finalizer, used for seed derivation.
std::uint64_t mix64(std::uint64_t x);

// Seed for trial `index` of a run seeded with `seed`:
//   derive_seed(seed, i) = mix64(seed ^ mix64(i + 0x9e3779b97f4a7c15))
// Independent of thread count and trial ordering.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index);

// mt19937_64 with platform-independent bounded draws (std distributions
// are implementation-defined, which would break cross-platform replay).
class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    std::uint64_t next() { return eng_(); }

    // Uniform in [0, bound), bound >= 1.
    std::uint64_t below(std::uint64_t bound);

    // Uniform random permutation of 0..n-1 (Fisher-Yates).
    std::vector<std::size_t> permutation(std::size_t n);

    Rng split() { return Rng(mix64(next())); }

private:
    std::mt19937_64 eng_;
};

}  // namespace pirlab
