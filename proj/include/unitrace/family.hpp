#pragma once

#include <variant>
#include <vector>

#include "unitrace/linalg.hpp"

namespace unitrace {

/// U(k) = diag(e^{i k l_1}, ..., e^{i k l_N}) S with all l_j > 0 and S unitary.
struct DiagPhase {
    std::vector<double> lengths;
    ComplexMatrix s;
};

/// U(k) = e^{i k H} U0 with H Hermitian and U0 unitary.
struct ExpPath {
    ComplexMatrix h;
    ComplexMatrix u0;
};

/// The 1x1 family U(k) = e^{i omega k}.
struct Scalar {
    double omega = 1.0;
};

/// A closed-form smooth one-parameter unitary family k -> U(k). All variants
/// have analytic derivatives; construction validates the variant invariants.
class UnitaryFamily {
public:
    using Description = std::variant<DiagPhase, ExpPath, Scalar>;

    static UnitaryFamily diag_phase(std::vector<double> lengths, ComplexMatrix s);
    static UnitaryFamily exp_path(ComplexMatrix h, ComplexMatrix u0);
    static UnitaryFamily scalar(double omega);

    const Description& description() const noexcept { return desc_; }
    std::size_t dim() const noexcept { return dim_; }

    bool is_diag_phase() const noexcept { return std::holds_alternative<DiagPhase>(desc_); }

    /// Upper bound on |d theta_j / dk| for every eigenphase (largest generator eigenvalue modulus).
    double speed_bound() const noexcept { return speed_bound_; }

    ComplexMatrix evaluate(double k) const;
    ComplexMatrix derivative(double k) const;
    /// D(k) = -i U'(k) U(k)^{-1}, returned in closed form.
    ComplexMatrix generator(double k) const;

private:
    UnitaryFamily(Description d, std::size_t dim);

    Description desc_;
    std::size_t dim_ = 0;
    double speed_bound_ = 0.0;
    // Spectral data of H for ExpPath.
    std::vector<double> h_values_;
    ComplexMatrix h_vectors_;
};

inline ComplexMatrix evaluate(const UnitaryFamily& f, double k) { return f.evaluate(k); }
inline ComplexMatrix derivative(const UnitaryFamily& f, double k) { return f.derivative(k); }
inline ComplexMatrix generator(const UnitaryFamily& f, double k) { return f.generator(k); }

struct ConstantObservable {
    ComplexMatrix a;
};
struct DerivativeOfU {};
struct IdentityObservable {};

/// A(k) in the trace formula.
using ObservableFamily = std::variant<ConstantObservable, DerivativeOfU, IdentityObservable>;

/// A(k) for the given family; throws DimensionMismatchError for a constant of the wrong size.
ComplexMatrix observable(const ObservableFamily& a, const UnitaryFamily& f, double k);

}  // namespace unitrace
