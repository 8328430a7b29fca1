#include "unitrace/trace_formula.hpp"

#include <cmath>
#include <string>

#include "unitrace/errors.hpp"

namespace unitrace {

namespace {

void check_abel_t(double t) {
    if (!(t > 0.0 && t < 1.0)) throw ConfigError("Abel parameter t must lie in (0, 1), got " + num(t));
}

}  // namespace

Complex crossing_weight(const UnitaryFamily& f, const ObservableFamily& a, const Crossing& c) {
    const double speed = std::abs(expectation(c.eigvec, f.derivative(c.k0)));
    if (speed <= 1e-10) {
        throw ZeroSpeedError("crossing_weight: zero eigenvalue speed at k0=" + num(c.k0));
    }
    return expectation(c.eigvec, observable(a, f, c.k0)) / speed;
}

Complex abel_kernel_eval(const UnitaryFamily& f, const ObservableFamily& a, double k, double t) {
    check_abel_t(t);
    const auto pairs = eig_unitary(f.evaluate(k));
    const ComplexMatrix obs = observable(a, f, k);
    const bool identity = std::holds_alternative<IdentityObservable>(a);
    Complex sum = 0.0;
    for (const auto& p : pairs) {
        const double kernel = (1.0 - t * t) / std::norm(t - p.value);
        sum += kernel * (identity ? Complex(1.0) : expectation(p.vector, obs));
    }
    return sum / kTwoPi;
}

Complex abel_sum_direct(const UnitaryFamily& f, const ObservableFamily& a, double k, const AbelParams& p) {
    check_abel_t(p.t);
    if (p.m_max < 0) throw ConfigError("abel_sum_direct: m_max must be non-negative");
    const ComplexMatrix u = f.evaluate(k);
    const ComplexMatrix ua = u.adjoint();
    const ComplexMatrix obs = observable(a, f, k);

    Complex sum = obs.trace();
    ComplexMatrix forward = obs;   // U^m A
    ComplexMatrix backward = obs;  // U^{-m} A
    double weight = 1.0;
    for (int m = 1; m <= p.m_max; ++m) {
        forward = matmul(u, forward);
        backward = matmul(ua, backward);
        weight *= p.t;
        sum += weight * (forward.trace() + backward.trace());
    }
    return sum / kTwoPi;
}

ComplexMatrix cesaro_projection(const ComplexMatrix& u, int n_terms) {
    if (n_terms < 0) throw ConfigError("cesaro_projection: N must be non-negative");
    const double defect = unitarity_defect(u);
    if (!(defect <= 1e-10)) throw NotUnitaryError("cesaro_projection: ||u^dagger u - I||_F = " + num(defect));
    const std::size_t n = u.dim();
    const ComplexMatrix ua = u.adjoint();
    ComplexMatrix sum = ComplexMatrix::identity(n);
    ComplexMatrix forward = ComplexMatrix::identity(n);
    ComplexMatrix backward = ComplexMatrix::identity(n);
    for (int m = 1; m <= n_terms; ++m) {
        forward = matmul(forward, u);
        backward = matmul(backward, ua);
        sum += forward;
        sum += backward;
    }
    sum *= Complex(1.0 / (2.0 * n_terms + 1.0));
    return sum;
}

}  // namespace unitrace
