#include "unitrace/newton.hpp"

#include <cmath>
#include <string>

#include "unitrace/errors.hpp"

namespace unitrace {

Complex CharPoly::operator()(Complex lambda) const {
    Complex acc = 0.0;
    for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) acc = acc * lambda + *it;
    return acc;
}

Complex CharPoly::at_one() const {
    Complex s = 0.0;
    for (const auto& c : coeffs) s += c;
    return s;
}

CharPoly char_poly(const ComplexMatrix& u) {
    const std::size_t n = u.dim();
    if (n == 0 || n > kMaxCharPolyDim) {
        throw DimensionMismatchError("char_poly: supported for 1 <= n <= " + std::to_string(kMaxCharPolyDim));
    }
    CharPoly p{CVector(n + 1)};
    p.coeffs[n] = 1.0;
    // M_1 = I, c_{n-1} = -tr(U); M_k = U M_{k-1} + c_{n-k+1} I, c_{n-k} = -tr(U M_k) / k.
    ComplexMatrix m = ComplexMatrix::identity(n);
    for (std::size_t k = 1; k <= n; ++k) {
        if (k > 1) {
            m = matmul(u, m);
            for (std::size_t i = 0; i < n; ++i) m(i, i) += p.coeffs[n - k + 1];
        }
        p.coeffs[n - k] = -matmul(u, m).trace() / static_cast<double>(k);
    }
    return p;
}

CVector power_traces(const ComplexMatrix& u, int j_min, int j_max) {
    if (j_min > j_max) throw ConfigError("power_traces: j_min > j_max");
    const std::size_t n = u.dim();
    CVector out(static_cast<std::size_t>(j_max - j_min + 1));
    auto store = [&](int j, Complex v) {
        if (j >= j_min && j <= j_max) out[static_cast<std::size_t>(j - j_min)] = v;
    };
    store(0, static_cast<double>(n));
    ComplexMatrix power = ComplexMatrix::identity(n);
    for (int j = 1; j <= j_max; ++j) {
        power = matmul(power, u);
        store(j, power.trace());
    }
    const ComplexMatrix ua = u.adjoint();
    power = ComplexMatrix::identity(n);
    for (int j = 1; j <= -j_min; ++j) {
        power = matmul(power, ua);
        store(-j, power.trace());
    }
    return out;
}

double newton_residual(const ComplexMatrix& u, int j) {
    const CharPoly p = char_poly(u);
    const int n = static_cast<int>(p.degree());
    const CVector traces = power_traces(u, std::min(j, 0), std::max(j + n, 0));
    const int offset = std::min(j, 0);
    Complex s = 0.0;
    for (int i = 0; i <= n; ++i) s += p.coeffs[static_cast<std::size_t>(i)] * traces[static_cast<std::size_t>(i + j - offset)];
    return std::abs(s);
}

double cayley_hamilton_residual(const ComplexMatrix& u) {
    const CharPoly p = char_poly(u);
    const std::size_t n = u.dim();
    // Horner: (((c_n U + c_{n-1}) U + ...) U + c_0)
    ComplexMatrix acc(n);
    for (std::size_t i = p.coeffs.size(); i-- > 0;) {
        acc = matmul(acc, u);
        for (std::size_t r = 0; r < n; ++r) acc(r, r) += p.coeffs[i];
    }
    return acc.frobenius_norm();
}

PartialSum partial_sum_terms(const ComplexMatrix& u, int n_max) {
    if (n_max < 0) throw ConfigError("partial_sum_terms: N must be non-negative");
    const CVector traces = power_traces(u, -n_max, n_max);
    PartialSum out;
    for (const auto& tr : traces) out.partial_sum += tr;
    out.h_at_one = char_poly(u).at_one();
    out.remainder = out.h_at_one * out.partial_sum;
    return out;
}

PartialSum partial_sum_remainder(const UnitaryFamily& f, double k, int n_max) {
    const ComplexMatrix u = f.evaluate(k);
    const Complex h1 = char_poly(u).at_one();
    if (std::abs(h1) <= 1e-12) {
        throw NearSingularError("partial_sum_remainder: |h(1,k)| = " + num(std::abs(h1)) +
                                " at k=" + num(k) + " (k is at or near a crossing)");
    }
    return partial_sum_terms(u, n_max);
}

std::vector<double> remainder_profile(const ComplexMatrix& u, int n_max) {
    if (n_max < 0) throw ConfigError("remainder_profile: N must be non-negative");
    const std::size_t n = u.dim();
    const Complex h1 = char_poly(u).at_one();
    const ComplexMatrix ua = u.adjoint();
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(n_max) + 1);
    Complex partial = static_cast<double>(n);
    out.push_back(std::abs(h1 * partial));
    ComplexMatrix forward = ComplexMatrix::identity(n);
    ComplexMatrix backward = ComplexMatrix::identity(n);
    for (int j = 1; j <= n_max; ++j) {
        forward = matmul(forward, u);
        backward = matmul(backward, ua);
        partial += forward.trace() + backward.trace();
        out.push_back(std::abs(h1 * partial));
    }
    return out;
}

double remainder_bound(const CharPoly& p, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < p.coeffs.size(); ++i) s += static_cast<double>(i) * std::abs(p.coeffs[i]);
    return 2.0 * static_cast<double>(n) * s;
}

}  // namespace unitrace
