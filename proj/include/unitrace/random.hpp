#pragma once

#include <cstdint>
#include <random>

#include "unitrace/linalg.hpp"

namespace unitrace {

/// Seeded generator whose draws are identical on every platform
/// (std distributions are implementation-defined, so we avoid them).
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    /// Uniform in [0, 1).
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    /// Standard normal (Box-Muller).
    double normal();
    Complex complex_normal() { return {normal(), normal()}; }

private:
    std::mt19937_64 engine_;
};

/// Haar-distributed unitary via Gram-Schmidt on a complex Ginibre matrix.
ComplexMatrix random_unitary(std::size_t n, Rng& rng);
/// GUE-like Hermitian matrix with unit-variance entries.
ComplexMatrix random_hermitian(std::size_t n, Rng& rng);
/// Ginibre matrix (i.i.d. complex normal entries).
ComplexMatrix random_matrix(std::size_t n, Rng& rng);

}  // namespace unitrace
