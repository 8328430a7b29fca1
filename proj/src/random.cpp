#include "unitrace/random.hpp"

#include <cmath>

namespace unitrace {

double Rng::normal() {
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(kTwoPi * u2);
}

ComplexMatrix random_matrix(std::size_t n, Rng& rng) {
    ComplexMatrix m(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) m(i, j) = rng.complex_normal();
    return m;
}

ComplexMatrix random_unitary(std::size_t n, Rng& rng) {
    const ComplexMatrix g = random_matrix(n, rng);
    ComplexMatrix q(n);
    // Modified Gram-Schmidt, applied twice for orthogonality to machine precision.
    for (std::size_t j = 0; j < n; ++j) {
        CVector v = g.column(j);
        for (int pass = 0; pass < 2; ++pass) {
            for (std::size_t i = 0; i < j; ++i) {
                const CVector qi = q.column(i);
                const Complex c = inner(qi, v);
                for (std::size_t r = 0; r < n; ++r) v[r] -= c * qi[r];
            }
        }
        const double nv = norm2(v);
        for (auto& z : v) z /= nv;
        q.set_column(j, v);
    }
    return q;
}

ComplexMatrix random_hermitian(std::size_t n, Rng& rng) {
    const ComplexMatrix g = random_matrix(n, rng);
    return Complex(0.5) * (g + g.adjoint());
}

}  // namespace unitrace
