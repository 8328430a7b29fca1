#pragma once

#include <complex>
#include <cstddef>
#include <initializer_list>
#include <optional>
#include <span>
#include <vector>

namespace unitrace {

using Complex = std::complex<double>;
using CVector = std::vector<Complex>;

inline constexpr double kPi = 3.141592653589793238462643383279502884;
inline constexpr double kTwoPi = 2.0 * kPi;

/// Dense square complex matrix, row-major. Sized for n <= 64.
class ComplexMatrix {
public:
    ComplexMatrix() = default;
    explicit ComplexMatrix(std::size_t dim);
    ComplexMatrix(std::initializer_list<std::initializer_list<Complex>> rows);

    static ComplexMatrix identity(std::size_t dim);
    static ComplexMatrix diagonal(std::span<const Complex> entries);

    std::size_t dim() const noexcept { return dim_; }

    Complex& operator()(std::size_t i, std::size_t j) { return data_[i * dim_ + j]; }
    const Complex& operator()(std::size_t i, std::size_t j) const { return data_[i * dim_ + j]; }

    std::span<const Complex> data() const noexcept { return data_; }

    CVector column(std::size_t j) const;
    void set_column(std::size_t j, std::span<const Complex> v);

    ComplexMatrix adjoint() const;
    Complex trace() const;
    double frobenius_norm() const;
    bool all_finite() const;

    ComplexMatrix& operator+=(const ComplexMatrix& other);
    ComplexMatrix& operator-=(const ComplexMatrix& other);
    ComplexMatrix& operator*=(Complex scale);

    friend bool operator==(const ComplexMatrix&, const ComplexMatrix&) = default;

private:
    std::size_t dim_ = 0;
    std::vector<Complex> data_;
};

ComplexMatrix operator+(ComplexMatrix a, const ComplexMatrix& b);
ComplexMatrix operator-(ComplexMatrix a, const ComplexMatrix& b);
ComplexMatrix operator*(Complex s, ComplexMatrix a);
ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b);

/// Matrix product; throws DimensionMismatchError.
ComplexMatrix matmul(const ComplexMatrix& a, const ComplexMatrix& b);
CVector matvec(const ComplexMatrix& a, std::span<const Complex> v);

/// <a|b>, conjugate-linear in the first argument.
Complex inner(std::span<const Complex> a, std::span<const Complex> b);
double norm2(std::span<const Complex> v);
/// <v|m|v>
Complex expectation(std::span<const Complex> v, const ComplexMatrix& m);

/// ||u^dagger u - I||_F
double unitarity_defect(const ComplexMatrix& u);
/// ||h - h^dagger||_F
double hermiticity_defect(const ComplexMatrix& h);

/// Determinant via LU with partial pivoting.
Complex determinant(const ComplexMatrix& a);

/// Unit vector spanning ker(m). The largest-magnitude entry is made real
/// positive. Throws RankDeficiencyError unless exactly one elimination pivot
/// is <= tol. Default tol is 1e-8 * max(||m||_F, 1).
CVector nullspace_vector(const ComplexMatrix& m, std::optional<double> tol = std::nullopt);

struct EigenPair {
    double phase = 0.0;  // in (-pi, pi]
    Complex value;       // e^{i phase}
    CVector vector;      // unit norm
};

/// Eigendecomposition of a unitary matrix, sorted by phase. Degenerate
/// eigenspaces come back with a non-canonical orthonormal basis.
/// Throws NotUnitaryError if ||u^dagger u - I||_F > 1e-10.
std::vector<EigenPair> eig_unitary(const ComplexMatrix& u);

struct HermitianEigen {
    std::vector<double> values;  // ascending
    ComplexMatrix vectors;       // columns
};

/// Cyclic Jacobi eigendecomposition of a Hermitian matrix.
HermitianEigen eig_hermitian(const ComplexMatrix& h);

/// Largest singular value.
double spectral_norm(const ComplexMatrix& a);

}  // namespace unitrace
