#pragma once

#include "unitrace/family.hpp"
#include "unitrace/linalg.hpp"
#include "unitrace/spectral_flow.hpp"

namespace unitrace {

/// Abel regularization parameters for the direct Fourier-side sum.
struct AbelParams {
    double t = 0.9;     // in (0, 1)
    int m_max = 400;    // terms with |m| <= m_max are kept
};

/// Atom weight <v|A(k0)|v> / |<v|U'(k0)|v>|. Throws ZeroSpeedError.
Complex crossing_weight(const UnitaryFamily& f, const ObservableFamily& a, const Crossing& c);

/// (1/2pi) sum_lambda (1 - t^2) / |t - lambda(k)|^2 <lambda|A(k)|lambda>, the
/// Poisson-kernel closed form of the Abel-summed Fourier side.
Complex abel_kernel_eval(const UnitaryFamily& f, const ObservableFamily& a, double k, double t);

/// (1/2pi) sum_{|m| <= m_max} t^|m| tr(U(k)^m A(k)), negative powers through U^dagger.
Complex abel_sum_direct(const UnitaryFamily& f, const ObservableFamily& a, double k, const AbelParams& p);

/// Symmetric Cesaro mean (1/(2N+1)) sum_{m=-N}^{N} u^m; tends to the
/// orthogonal projection onto ker(u - I). Throws NotUnitaryError.
ComplexMatrix cesaro_projection(const ComplexMatrix& u, int n_terms);

}  // namespace unitrace
