#pragma once

#include <optional>
#include <span>
#include <vector>

#include "unitrace/family.hpp"
#include "unitrace/linalg.hpp"
#include "unitrace/spectral_flow.hpp"

namespace unitrace {

struct Atom {
    double position = 0.0;
    Complex weight;
    int track_index = -1;
    Complex speed;
};

/// sum_atoms w * delta(k - k0), valid on [k_min, k_max].
struct AtomicMeasure {
    std::vector<Atom> atoms;  // strictly increasing positions
    double k_min = 0.0;
    double k_max = 0.0;
};

/// amplitude * exp(-(k - center)^2 / (2 width^2))
struct GaussianTestFunction {
    double center = 0.0;
    double width = 1.0;
    Complex amplitude = 1.0;

    Complex operator()(double k) const;
    Complex integral() const;
};

/// Pairing against a measure whose range does not contain the test function.
struct TruncationWarning {
    double outside_mass = 0.0;  // integral of |g| outside [k_min, k_max]
};

struct MeasurePairing {
    Complex value;
    std::optional<TruncationWarning> truncation;
};

/// Measure built from the validated crossings in [k_min, k_max]; atoms with
/// |w| <= 1e-14 are dropped. `step` defaults to default_step(f).
AtomicMeasure build_measure(const UnitaryFamily& f, const ObservableFamily& a, double k_min, double k_max,
                            std::optional<double> step = std::nullopt);

/// sum_atoms w g(k0). Flags a truncation when |g| exceeds 1e-16 |amplitude| outside the range.
MeasurePairing pair_measure(const AtomicMeasure& mu, const GaussianTestFunction& g);

/// Integral of abel_kernel_eval(f, a, k, t) g(k) over center +- 10 width,
/// adaptive Simpson to 1e-10 |amplitude|. Throws QuadratureError past depth 30.
Complex pair_abel(const UnitaryFamily& f, const ObservableFamily& a, const GaussianTestFunction& g, double t);

struct VerificationRow {
    double t = 0.0;
    Complex lhs;    // pair_abel at t
    Complex rhs;    // pair_measure
    double error = 0.0;
};

struct VerificationReport {
    std::vector<VerificationRow> rows;
    AtomicMeasure measure;
    /// Quadratic extrapolation of lhs to t = 1 through the last three rows (an estimate).
    std::optional<Complex> lhs_limit_estimate;
    double scale = 0.0;           // max(|rhs|, |integral of g| / 2pi, 1e-12)
    double relative_error = 0.0;  // last error / scale
    double tolerance = 0.0;       // max(10 (1 - t_last), 1e-6)
    bool errors_non_increasing = false;
    bool pass = false;
};

/// Compares both sides of the trace formula along an increasing t schedule.
/// The measure is built on center +- 10 width. PASS iff the last error is at
/// most max(10 (1 - t_last), 1e-6) * scale and the errors do not increase
/// over the last three t values.
VerificationReport verify_trace_formula(const UnitaryFamily& f, const ObservableFamily& a,
                                        const GaussianTestFunction& g, std::span<const double> t_schedule);

/// Lagrange extrapolation to h = 0 of samples (h_i, y_i).
Complex extrapolate_to_zero(std::span<const double> h, std::span<const Complex> y);

/// One exponential of the expanded Fourier side: coeff * e^{i k freq}.
struct ExpSumTerm {
    double freq = 0.0;
    Complex coeff;
    std::vector<int> multi_index;  // n_1..n_N, all of the sign of `order`
    int order = 0;                 // power m of U
};

/// Expands tr(U(k)^m A) for |m| <= m_max into exponentials grouped by
/// multi-index. Requires a DiagPhase (or Scalar) family and a constant observable.
std::vector<ExpSumTerm> crystalline_expand(const UnitaryFamily& f, const ObservableFamily& a, int m_max);

/// sum over terms of the given order of coeff e^{i k freq}.
Complex exp_sum(std::span<const ExpSumTerm> terms, double k, int order);
/// sum over all terms of t^|order| coeff e^{i k freq}.
Complex abel_exp_sum(std::span<const ExpSumTerm> terms, double k, double t);

}  // namespace unitrace
