#include "unitrace/family.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "unitrace/errors.hpp"

namespace unitrace {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

constexpr double kStructureTol = 1e-10;

}  // namespace

UnitaryFamily::UnitaryFamily(Description d, std::size_t dim) : desc_(std::move(d)), dim_(dim) {}

UnitaryFamily UnitaryFamily::diag_phase(std::vector<double> lengths, ComplexMatrix s) {
    if (lengths.empty() || lengths.size() != s.dim()) {
        throw DimensionMismatchError("diag_phase: " + std::to_string(lengths.size()) +
                                     " lengths for a " + std::to_string(s.dim()) + "x" +
                                     std::to_string(s.dim()) + " S");
    }
    for (double l : lengths) {
        if (!(l > 0.0) || !std::isfinite(l)) throw ConfigError("diag_phase: lengths must be finite and > 0");
    }
    if (!(unitarity_defect(s) <= kStructureTol)) throw NotUnitaryError("diag_phase: S is not unitary");
    const double bound = *std::max_element(lengths.begin(), lengths.end());
    const std::size_t n = s.dim();
    UnitaryFamily f(DiagPhase{std::move(lengths), std::move(s)}, n);
    f.speed_bound_ = bound;
    return f;
}

UnitaryFamily UnitaryFamily::exp_path(ComplexMatrix h, ComplexMatrix u0) {
    if (h.dim() == 0 || h.dim() != u0.dim()) throw DimensionMismatchError("exp_path: H and U0 differ in size");
    if (!(hermiticity_defect(h) <= kStructureTol)) throw ConfigError("exp_path: H is not Hermitian");
    if (!(unitarity_defect(u0) <= kStructureTol)) throw NotUnitaryError("exp_path: U0 is not unitary");
    HermitianEigen e = eig_hermitian(h);
    const std::size_t n = h.dim();
    UnitaryFamily f(ExpPath{std::move(h), std::move(u0)}, n);
    f.speed_bound_ = std::max(std::abs(e.values.front()), std::abs(e.values.back()));
    f.h_values_ = std::move(e.values);
    f.h_vectors_ = std::move(e.vectors);
    return f;
}

UnitaryFamily UnitaryFamily::scalar(double omega) {
    if (!(omega > 0.0) || !std::isfinite(omega)) throw ConfigError("scalar: omega must be finite and > 0");
    UnitaryFamily f(Scalar{omega}, 1);
    f.speed_bound_ = omega;
    return f;
}

ComplexMatrix UnitaryFamily::evaluate(double k) const {
    return std::visit(
        Overloaded{
            [&](const DiagPhase& d) {
                ComplexMatrix u = d.s;
                for (std::size_t i = 0; i < dim_; ++i) {
                    const Complex p = std::polar(1.0, k * d.lengths[i]);
                    for (std::size_t j = 0; j < dim_; ++j) u(i, j) *= p;
                }
                return u;
            },
            [&](const ExpPath& e) {
                // V diag(e^{ik theta}) V^dagger U0
                ComplexMatrix vd = h_vectors_;
                for (std::size_t j = 0; j < dim_; ++j) {
                    const Complex p = std::polar(1.0, k * h_values_[j]);
                    for (std::size_t i = 0; i < dim_; ++i) vd(i, j) *= p;
                }
                return matmul(matmul(vd, h_vectors_.adjoint()), e.u0);
            },
            [&](const Scalar& s) {
                ComplexMatrix u(1);
                u(0, 0) = std::polar(1.0, s.omega * k);
                return u;
            },
        },
        desc_);
}

ComplexMatrix UnitaryFamily::derivative(double k) const {
    const Complex i1(0.0, 1.0);
    return std::visit(
        Overloaded{
            [&](const DiagPhase& d) {
                ComplexMatrix u = d.s;
                for (std::size_t i = 0; i < dim_; ++i) {
                    const Complex p = i1 * d.lengths[i] * std::polar(1.0, k * d.lengths[i]);
                    for (std::size_t j = 0; j < dim_; ++j) u(i, j) *= p;
                }
                return u;
            },
            [&](const ExpPath& e) {
                ComplexMatrix vd = h_vectors_;
                for (std::size_t j = 0; j < dim_; ++j) {
                    const Complex p = i1 * h_values_[j] * std::polar(1.0, k * h_values_[j]);
                    for (std::size_t i = 0; i < dim_; ++i) vd(i, j) *= p;
                }
                return matmul(matmul(vd, h_vectors_.adjoint()), e.u0);
            },
            [&](const Scalar& s) {
                ComplexMatrix u(1);
                u(0, 0) = i1 * s.omega * std::polar(1.0, s.omega * k);
                return u;
            },
        },
        desc_);
}

ComplexMatrix UnitaryFamily::generator(double /*k*/) const {
    return std::visit(Overloaded{
                          [&](const DiagPhase& d) {
                              CVector diag(d.lengths.begin(), d.lengths.end());
                              return ComplexMatrix::diagonal(diag);
                          },
                          [&](const ExpPath& e) { return e.h; },
                          [&](const Scalar& s) {
                              ComplexMatrix g(1);
                              g(0, 0) = s.omega;
                              return g;
                          },
                      },
                      desc_);
}

ComplexMatrix observable(const ObservableFamily& a, const UnitaryFamily& f, double k) {
    return std::visit(Overloaded{
                          [&](const ConstantObservable& c) {
                              if (c.a.dim() != f.dim()) {
                                  throw DimensionMismatchError(
                                      "observable: constant A is " + std::to_string(c.a.dim()) +
                                      "x" + std::to_string(c.a.dim()) + ", family has dimension " +
                                      std::to_string(f.dim()));
                              }
                              return c.a;
                          },
                          [&](const DerivativeOfU&) { return f.derivative(k); },
                          [&](const IdentityObservable&) { return ComplexMatrix::identity(f.dim()); },
                      },
                      a);
}

}  // namespace unitrace
