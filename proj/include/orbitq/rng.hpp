#pragma once

#include "orbitq/rational.hpp"

#include <cstdint>
#include <random>

namespace orbitq {

/// Deterministic seeded RNG. mt19937_64 is fully specified by the standard;
/// the bounded samplers below avoid std::uniform_int_distribution, whose
/// output is implementation-defined.
class Rng {
public:
    explicit Rng(uint64_t seed) : eng_(seed) {}

    uint64_t next() { return eng_(); }

    /// Uniform integer in [lo, hi], inclusive.
    long uniform(long lo, long hi) {
        if (hi < lo) throw std::invalid_argument("Rng: empty range");
        uint64_t span = static_cast<uint64_t>(hi - lo) + 1;
        uint64_t limit = UINT64_MAX - UINT64_MAX % span;
        uint64_t x;
        do {
            x = eng_();
        } while (x >= limit);
        return lo + static_cast<long>(x % span);
    }

    /// Uniform nonzero integer in [-bound, bound].
    long nonzero(long bound) {
        long x = uniform(1, 2 * bound);
        return x <= bound ? x : bound - x;  // maps to [1,bound] u [-bound,-1]
    }

    Rational rational_nonzero(long bound) { return Rational(nonzero(bound)); }

private:
    std::mt19937_64 eng_;
};

}  // namespace orbitq
