#pragma once

// Independent oracles shared by the unit and acceptance tests. Nothing here
// calls into the code under test beyond the value types.

#include <cmath>
#include <vector>

#include "unitrace/linalg.hpp"

namespace unitrace::test {

inline ComplexMatrix naive_product(const ComplexMatrix& a, const ComplexMatrix& b) {
    const std::size_t n = a.dim();
    ComplexMatrix c(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            for (std::size_t l = 0; l < n; ++l) c(i, j) += a(i, l) * b(l, j);
    return c;
}

inline Complex cofactor_det(const ComplexMatrix& a) {
    const std::size_t n = a.dim();
    if (n == 1) return a(0, 0);
    Complex det = 0.0;
    for (std::size_t col = 0; col < n; ++col) {
        ComplexMatrix minor(n - 1);
        for (std::size_t i = 1; i < n; ++i)
            for (std::size_t j = 0, jj = 0; j < n; ++j)
                if (j != col) minor(i - 1, jj++) = a(i, j);
        det += (col % 2 == 0 ? 1.0 : -1.0) * a(0, col) * cofactor_det(minor);
    }
    return det;
}

/// Q diag(e^{i theta}) Q^dagger
inline ComplexMatrix with_spectrum(const ComplexMatrix& q, const std::vector<double>& theta) {
    CVector d;
    for (double t : theta) d.push_back(std::polar(1.0, t));
    return naive_product(naive_product(q, ComplexMatrix::diagonal(d)), q.adjoint());
}

inline double max_abs_diff(const ComplexMatrix& a, const ComplexMatrix& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.dim(); ++i)
        for (std::size_t j = 0; j < a.dim(); ++j) m = std::max(m, std::abs(a(i, j) - b(i, j)));
    return m;
}

inline ComplexMatrix naive_power(const ComplexMatrix& u, int m) {
    ComplexMatrix p = ComplexMatrix::identity(u.dim());
    const ComplexMatrix step = m >= 0 ? u : u.adjoint();
    for (int i = 0; i < std::abs(m); ++i) p = naive_product(p, step);
    return p;
}

/// Wraps into (-pi, pi].
inline double wrap_phase(double x) {
    double y = std::remainder(x, 2.0 * 3.141592653589793);
    if (y <= -3.141592653589793) y += 2.0 * 3.141592653589793;
    return y;
}

}  // namespace unitrace::test
