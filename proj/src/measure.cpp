#include "unitrace/measure.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <optional>
#include <string>

#include "unitrace/errors.hpp"
#include "unitrace/trace_formula.hpp"

namespace unitrace {

namespace {

constexpr double kWindowWidths = 10.0;
constexpr int kInitialPanels = 64;
constexpr int kMaxDepth = 30;
constexpr double kRelativeFloor = 1e-12;

void check_gaussian(const GaussianTestFunction& g) {
    if (!(g.width > 0.0) || !std::isfinite(g.width) || !std::isfinite(g.center)) {
        throw ConfigError("Gaussian test function needs a finite center and width > 0");
    }
}

using Integrand = std::function<Complex(double)>;

Complex simpson_panel(const Integrand& fn, double a, double b, Complex fa, Complex fm, Complex fb, Complex whole,
                      double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const Complex flm = fn(lm);
    const Complex frm = fn(rm);
    const Complex left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const Complex right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const Complex delta = left + right - whole;
    // second test: kernel values near a sharp peak carry roundoff ~1e-13 relative,
    // so halving the absolute budget forever never converges there
    if (std::abs(delta) <= 15.0 * tol || std::abs(delta) <= kRelativeFloor * (std::abs(left) + std::abs(right))) {
        return left + right + delta / 15.0;
    }
    if (depth >= kMaxDepth) {
        throw QuadratureError("pair_abel: adaptive Simpson exceeded depth " + std::to_string(kMaxDepth) +
                              " on [" + num(a) + ", " + num(b) + "]");
    }
    return simpson_panel(fn, a, m, fa, flm, fm, left, 0.5 * tol, depth + 1) +
           simpson_panel(fn, m, b, fm, frm, fb, right, 0.5 * tol, depth + 1);
}

Complex adaptive_simpson(const Integrand& fn, double lo, double hi, double tol) {
    const double h = (hi - lo) / kInitialPanels;
    Complex total = 0.0;
    Complex fa = fn(lo);
    for (int i = 0; i < kInitialPanels; ++i) {
        const double a = lo + h * i;
        const double b = (i + 1 == kInitialPanels) ? hi : lo + h * (i + 1);
        const double m = 0.5 * (a + b);
        const Complex fm = fn(m);
        const Complex fb = fn(b);
        const Complex whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
        total += simpson_panel(fn, a, b, fa, fm, fb, whole, tol / kInitialPanels, 0);
        fa = fb;
    }
    return total;
}

}  // namespace

Complex GaussianTestFunction::operator()(double k) const {
    const double x = (k - center) / width;
    return amplitude * std::exp(-0.5 * x * x);
}

Complex GaussianTestFunction::integral() const { return amplitude * width * std::sqrt(kTwoPi); }

AtomicMeasure build_measure(const UnitaryFamily& f, const ObservableFamily& a, double k_min, double k_max,
                            std::optional<double> step) {
    const std::vector<Crossing> crossings = find_crossings(f, k_min, k_max, step.value_or(default_step(f)));
    AtomicMeasure mu;
    mu.k_min = k_min;
    mu.k_max = k_max;
    for (const auto& c : crossings) {
        const Complex w = crossing_weight(f, a, c);
        if (std::abs(w) <= 1e-14) continue;
        mu.atoms.push_back(Atom{c.k0, w, c.track_index, c.speed});
    }
    return mu;
}

MeasurePairing pair_measure(const AtomicMeasure& mu, const GaussianTestFunction& g) {
    check_gaussian(g);
    MeasurePairing out;
    for (const auto& atom : mu.atoms) out.value += atom.weight * g(atom.position);

    const double amp = std::abs(g.amplitude);
    auto tail_value = [&](double edge) {
        const double x = (edge - g.center) / g.width;
        return amp * std::exp(-0.5 * x * x);
    };
    const bool inside = g.center >= mu.k_min && g.center <= mu.k_max;
    const double peak_outside = inside ? std::max(tail_value(mu.k_min), tail_value(mu.k_max)) : amp;
    if (peak_outside > 1e-16 * amp) {
        const double s = g.width * std::sqrt(2.0);
        const double mass = amp * g.width * std::sqrt(kPi / 2.0) *
                            (std::erfc((g.center - mu.k_min) / s) + std::erfc((mu.k_max - g.center) / s));
        out.truncation = TruncationWarning{mass};
    }
    return out;
}

Complex pair_abel(const UnitaryFamily& f, const ObservableFamily& a, const GaussianTestFunction& g, double t) {
    check_gaussian(g);
    if (!(t > 0.0 && t < 1.0)) throw ConfigError("pair_abel: t must lie in (0, 1)");
    const Integrand fn = [&](double k) { return abel_kernel_eval(f, a, k, t) * g(k); };
    const double lo = g.center - kWindowWidths * g.width;
    const double hi = g.center + kWindowWidths * g.width;
    return adaptive_simpson(fn, lo, hi, 1e-10 * std::abs(g.amplitude));
}

Complex extrapolate_to_zero(std::span<const double> h, std::span<const Complex> y) {
    Complex sum = 0.0;
    for (std::size_t i = 0; i < h.size(); ++i) {
        double basis = 1.0;
        for (std::size_t j = 0; j < h.size(); ++j) {
            if (j != i) basis *= (0.0 - h[j]) / (h[i] - h[j]);
        }
        sum += basis * y[i];
    }
    return sum;
}

VerificationReport verify_trace_formula(const UnitaryFamily& f, const ObservableFamily& a,
                                        const GaussianTestFunction& g, std::span<const double> t_schedule) {
    check_gaussian(g);
    if (t_schedule.empty()) throw ConfigError("verify_trace_formula: empty t schedule");
    for (std::size_t i = 0; i < t_schedule.size(); ++i) {
        if (!(t_schedule[i] > 0.0 && t_schedule[i] < 1.0) || (i > 0 && !(t_schedule[i] > t_schedule[i - 1]))) {
            throw ConfigError("verify_trace_formula: t schedule must increase strictly inside (0, 1)");
        }
    }

    VerificationReport report;
    report.measure = build_measure(f, a, g.center - kWindowWidths * g.width, g.center + kWindowWidths * g.width);
    const Complex rhs = pair_measure(report.measure, g).value;
    for (double t : t_schedule) {
        const Complex lhs = pair_abel(f, a, g, t);
        report.rows.push_back(VerificationRow{t, lhs, rhs, std::abs(lhs - rhs)});
    }

    const std::size_t r = report.rows.size();
    if (r >= 3) {
        const double h[3] = {1.0 - report.rows[r - 3].t, 1.0 - report.rows[r - 2].t, 1.0 - report.rows[r - 1].t};
        const Complex y[3] = {report.rows[r - 3].lhs, report.rows[r - 2].lhs, report.rows[r - 1].lhs};
        report.lhs_limit_estimate = extrapolate_to_zero(h, y);
    }
    report.errors_non_increasing = true;
    for (std::size_t i = (r >= 3 ? r - 2 : 1); i < r; ++i) {
        if (report.rows[i].error > report.rows[i - 1].error) report.errors_non_increasing = false;
    }
    const double t_last = report.rows.back().t;
    // |rhs| alone is meaningless when g sits between atoms; fall back to the
    // pairing magnitude of a single unit-density eigenphase branch.
    report.scale = std::max({std::abs(rhs), std::abs(g.integral()) / kTwoPi, 1e-12});
    report.relative_error = report.rows.back().error / report.scale;
    report.tolerance = std::max(10.0 * (1.0 - t_last), 1e-6);
    report.pass = report.errors_non_increasing && report.relative_error <= report.tolerance;
    return report;
}

std::vector<ExpSumTerm> crystalline_expand(const UnitaryFamily& f, const ObservableFamily& a, int m_max) {
    // a scalar family is the 1x1 diag_phase with S = [1]
    std::optional<DiagPhase> as_diag;
    if (const auto* sc = std::get_if<Scalar>(&f.description())) {
        as_diag = DiagPhase{{sc->omega}, ComplexMatrix::identity(1)};
    }
    const auto* diag = as_diag ? &*as_diag : std::get_if<DiagPhase>(&f.description());
    if (diag == nullptr) throw ConfigError("crystalline_expand: requires a diag_phase or scalar family");
    const auto* constant = std::get_if<ConstantObservable>(&a);
    if (constant == nullptr) throw ConfigError("crystalline_expand: requires a constant observable");
    const std::size_t n = f.dim();
    if (constant->a.dim() != n) throw DimensionMismatchError("crystalline_expand: A and U differ in size");
    if (m_max < 0) throw ConfigError("crystalline_expand: m_max must be non-negative");

    const ComplexMatrix& s = diag->s;
    const ComplexMatrix& amat = constant->a;
    std::vector<ExpSumTerm> terms;
    terms.push_back(ExpSumTerm{0.0, amat.trace(), std::vector<int>(n, 0), 0});

    // tr(U^m A) for m > 0 is a sum over index paths i_1..i_m of
    //   e^{ik(l_{i_1}+..+l_{i_m})} S_{i_1 i_2} ... S_{i_{m-1} i_m} (S A)_{i_m i_1};
    // for m < 0 the same with S -> S^dagger, (S A) -> (A S^dagger) and negated lengths.
    auto expand_sign = [&](const ComplexMatrix& step, const ComplexMatrix& close, int sign) {
        std::vector<ExpSumTerm> out;
        for (int p = 1; p <= m_max; ++p) {
            std::map<std::vector<int>, Complex> by_index;
            for (std::size_t start = 0; start < n; ++start) {
                // counts -> coefficient per current index
                std::map<std::vector<int>, CVector> states;
                std::vector<int> init(n, 0);
                init[start] = 1;
                states[init] = CVector(n);
                states[init][start] = 1.0;
                for (int len = 1; len < p; ++len) {
                    std::map<std::vector<int>, CVector> next;
                    for (const auto& [counts, coeff] : states) {
                        for (std::size_t i = 0; i < n; ++i) {
                            if (coeff[i] == Complex{}) continue;
                            for (std::size_t l = 0; l < n; ++l) {
                                if (step(i, l) == Complex{}) continue;
                                std::vector<int> c2 = counts;
                                c2[l] += 1;
                                auto& slot = next[c2];
                                if (slot.empty()) slot.assign(n, 0.0);
                                slot[l] += coeff[i] * step(i, l);
                            }
                        }
                    }
                    states = std::move(next);
                }
                for (const auto& [counts, coeff] : states) {
                    Complex c = 0.0;
                    for (std::size_t i = 0; i < n; ++i) c += coeff[i] * close(i, start);
                    by_index[counts] += c;
                }
            }
            for (const auto& [counts, coeff] : by_index) {
                if (std::abs(coeff) <= 1e-15) continue;
                ExpSumTerm term;
                term.order = sign * p;
                term.coeff = coeff;
                term.multi_index.resize(n);
                for (std::size_t j = 0; j < n; ++j) {
                    term.multi_index[j] = sign * counts[j];
                    term.freq += term.multi_index[j] * diag->lengths[j];
                }
                out.push_back(std::move(term));
            }
        }
        return out;
    };

    const ComplexMatrix sa = s.adjoint();
    auto positive = expand_sign(s, matmul(s, amat), +1);
    auto negative = expand_sign(sa, matmul(amat, sa), -1);

    std::vector<ExpSumTerm> all;
    all.reserve(positive.size() + negative.size() + 1);
    for (auto it = negative.rbegin(); it != negative.rend(); ++it) all.push_back(std::move(*it));
    if (std::abs(terms.front().coeff) > 1e-15) all.push_back(terms.front());
    for (auto& t : positive) all.push_back(std::move(t));
    std::stable_sort(all.begin(), all.end(), [](const ExpSumTerm& x, const ExpSumTerm& y) {
        if (x.order != y.order) return x.order < y.order;
        return x.multi_index < y.multi_index;
    });
    return all;
}

Complex exp_sum(std::span<const ExpSumTerm> terms, double k, int order) {
    Complex s = 0.0;
    for (const auto& term : terms)
        if (term.order == order) s += term.coeff * std::polar(1.0, k * term.freq);
    return s;
}

Complex abel_exp_sum(std::span<const ExpSumTerm> terms, double k, double t) {
    Complex s = 0.0;
    for (const auto& term : terms) s += std::pow(t, std::abs(term.order)) * term.coeff * std::polar(1.0, k * term.freq);
    return s;
}

}  // namespace unitrace
