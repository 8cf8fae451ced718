// SPDX-License-Identifier: MIT
#include "pirlab/rng.hpp"

namespace pirlab {

std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
    return mix64(seed ^ mix64(index + 0x9e3779b97f4a7c15ULL));
}

std::uint64_t Rng::below(std::uint64_t bound) {
    if (bound <= 1) return 0;
    const std::uint64_t limit = ~0ULL - (~0ULL % bound);
    for (;;) {
        std::uint64_t x = eng_();
        if (x < limit) return x % bound;
    }
}

std::vector<std::size_t> Rng::permutation(std::size_t n) {
    std::vector<std::size_t> v(n);
    for (std::size_t i = 0; i < n; ++i) v[i] = i;
    for (std::size_t i = n; i > 1; --i) {
        std::size_t j = static_cast<std::size_t>(below(i));
        std::swap(v[i - 1], v[j]);
    }
    return v;
}

}  // namespace pirlab
