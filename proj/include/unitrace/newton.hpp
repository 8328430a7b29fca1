#pragma once

#include <vector>

#include "unitrace/family.hpp"
#include "unitrace/linalg.hpp"

namespace unitrace {

/// Monic characteristic polynomial h(lambda) = det(lambda I - U) = sum_i coeffs[i] lambda^i.
struct CharPoly {
    CVector coeffs;  // c_0 .. c_n, c_n = 1

    std::size_t degree() const { return coeffs.empty() ? 0 : coeffs.size() - 1; }
    Complex operator()(Complex lambda) const;
    /// h(1) = det(I - U) = sum_i c_i
    Complex at_one() const;
};

inline constexpr std::size_t kMaxCharPolyDim = 16;

/// Faddeev-LeVerrier recursion; no eigendecomposition involved.
/// Throws DimensionMismatchError above kMaxCharPolyDim.
CharPoly char_poly(const ComplexMatrix& u);

/// tr(u^j) for j = j_min..j_max; negative powers use u^dagger (u assumed unitary).
CVector power_traces(const ComplexMatrix& u, int j_min, int j_max);

/// |sum_i c_i tr(u^{i+j})|, which Newton's identities make vanish.
double newton_residual(const ComplexMatrix& u, int j);

/// ||sum_i c_i u^i||_F (Cayley-Hamilton).
double cayley_hamilton_residual(const ComplexMatrix& u);

struct PartialSum {
    Complex partial_sum;  // sum_{j=-N}^{N} tr(U^j)
    Complex remainder;    // h(1,k) * partial_sum
    Complex h_at_one;     // det(I - U(k))
};

/// Partial sum and bounded remainder at one k. Throws NearSingularError when |h(1,k)| <= 1e-12.
PartialSum partial_sum_remainder(const UnitaryFamily& f, double k, int n_max);

/// The same quantities without the singularity check.
PartialSum partial_sum_terms(const ComplexMatrix& u, int n_max);

/// |R(n, N, k)| for every N = 0..n_max, built incrementally.
std::vector<double> remainder_profile(const ComplexMatrix& u, int n_max);

/// Bound 2 n sum_i i |c_i| on |R| obtained by telescoping Newton's identities.
double remainder_bound(const CharPoly& p, std::size_t n);

}  // namespace unitrace
