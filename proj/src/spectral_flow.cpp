#include "unitrace/spectral_flow.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "unitrace/errors.hpp"

namespace unitrace {

namespace {

constexpr double kAmbiguityGap = 0.05;
constexpr double kMaxPhaseStep = kPi / 2;  // larger jumps are refined, never unwrapped
constexpr double kPhaseTol = 1e-12;
constexpr double kMergeTol = 1e-9;

// Minimum-cost perfect assignment (Hungarian method); returns row -> column.
std::vector<std::size_t> solve_assignment(const std::vector<std::vector<double>>& cost) {
    const std::size_t n = cost.size();
    const double inf = std::numeric_limits<double>::infinity();
    std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
    std::vector<std::size_t> p(n + 1, 0), way(n + 1, 0);
    for (std::size_t i = 1; i <= n; ++i) {
        p[0] = i;
        std::size_t j0 = 0;
        std::vector<double> minv(n + 1, inf);
        std::vector<char> used(n + 1, 0);
        do {
            used[j0] = 1;
            const std::size_t i0 = p[j0];
            double delta = inf;
            std::size_t j1 = 0;
            for (std::size_t j = 1; j <= n; ++j) {
                if (used[j]) continue;
                const double cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
                if (cur < minv[j]) {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if (minv[j] < delta) {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for (std::size_t j = 0; j <= n; ++j) {
                if (used[j]) {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
        } while (p[j0] != 0);
        do {
            const std::size_t j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
        } while (j0 != 0);
    }
    std::vector<std::size_t> row_to_col(n);
    for (std::size_t j = 1; j <= n; ++j) row_to_col[p[j] - 1] = j - 1;
    return row_to_col;
}

struct Match {
    std::vector<std::size_t> assignment;  // track j -> index into the new eigenpairs
    double worst_overlap = 0.0;
};

Match match_tracks(const std::vector<CVector>& previous, const std::vector<EigenPair>& next) {
    const std::size_t n = previous.size();
    std::vector<std::vector<double>> overlap(n, std::vector<double>(n));
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t l = 0; l < n; ++l) overlap[j][l] = std::abs(inner(previous[j], next[l].vector));

    // Greedy row maxima; fall back to a global assignment if they collide or
    // a row has two candidates within kAmbiguityGap.
    Match m{std::vector<std::size_t>(n), 1.0};
    std::vector<char> taken(n, 0);
    bool ambiguous = false;
    for (std::size_t j = 0; j < n && !ambiguous; ++j) {
        std::size_t best = 0;
        double first = -1.0, second = -1.0;
        for (std::size_t l = 0; l < n; ++l) {
            if (overlap[j][l] > first) {
                second = first;
                first = overlap[j][l];
                best = l;
            } else if (overlap[j][l] > second) {
                second = overlap[j][l];
            }
        }
        if (taken[best] || (n > 1 && first - second < kAmbiguityGap)) ambiguous = true;
        taken[best] = 1;
        m.assignment[j] = best;
    }
    if (ambiguous) {
        std::vector<std::vector<double>> cost(n, std::vector<double>(n));
        for (std::size_t j = 0; j < n; ++j)
            for (std::size_t l = 0; l < n; ++l) cost[j][l] = -overlap[j][l];
        m.assignment = solve_assignment(cost);
    }
    for (std::size_t j = 0; j < n; ++j) m.worst_overlap = std::min(m.worst_overlap, overlap[j][m.assignment[j]]);
    return m;
}

double unwrap_near(double reference, double raw) { return reference + std::remainder(raw - reference, kTwoPi); }

class Tracker {
public:
    Tracker(const UnitaryFamily& f, const ScanOptions& options, PhaseTrack& out)
        : f_(f), opt_(options), out_(out) {}

    void start(double k) {
        const auto pairs = eig_unitary(f_.evaluate(k));
        std::vector<double> ph;
        std::vector<CVector> vec;
        for (const auto& p : pairs) {
            ph.push_back(p.phase);
            vec.push_back(p.vector);
        }
        out_.grid.push_back(k);
        out_.phases.push_back(std::move(ph));
        out_.vectors.push_back(std::move(vec));
    }

    void advance(double b, int depth = 0) {
        const double a = out_.grid.back();
        const auto pairs = eig_unitary(f_.evaluate(b));
        const Match m = match_tracks(out_.vectors.back(), pairs);
        const auto& prev = out_.phases.back();
        bool ok = m.worst_overlap >= opt_.min_overlap;
        std::vector<double> ph(prev.size());
        std::vector<CVector> vec(prev.size());
        for (std::size_t j = 0; j < prev.size() && ok; ++j) {
            const EigenPair& p = pairs[m.assignment[j]];
            ph[j] = unwrap_near(prev[j], p.phase);
            vec[j] = p.vector;
            if (std::abs(ph[j] - prev[j]) > kMaxPhaseStep) ok = false;
        }
        if (ok) {
            out_.grid.push_back(b);
            out_.phases.push_back(std::move(ph));
            out_.vectors.push_back(std::move(vec));
            out_.overlaps.push_back(m.worst_overlap);
            return;
        }
        if (depth >= opt_.max_refinements) {
            throw TrackingError("scan_eigenphases: eigenvector overlap " + num(m.worst_overlap) +
                                " between k=" + num(a) + " and k=" + num(b) +
                                " (step too coarse or eigenvalues degenerate)");
        }
        const double mid = 0.5 * (a + b);
        advance(mid, depth + 1);
        advance(b, depth + 1);
    }

private:
    const UnitaryFamily& f_;
    const ScanOptions& opt_;
    PhaseTrack& out_;
};

// Phase of the eigenvalue continuing (reference_vector, reference_phase) at k.
struct TrackedPoint {
    double phase;
    CVector vector;
};

TrackedPoint follow(const UnitaryFamily& f, double k, const CVector& reference_vector, double reference_phase) {
    auto pairs = eig_unitary(f.evaluate(k));
    std::size_t best = 0;
    double best_overlap = -1.0;
    for (std::size_t l = 0; l < pairs.size(); ++l) {
        const double o = std::abs(inner(reference_vector, pairs[l].vector));
        if (o > best_overlap) {
            best_overlap = o;
            best = l;
        }
    }
    return {unwrap_near(reference_phase, pairs[best].phase), std::move(pairs[best].vector)};
}

struct Candidate {
    double k0;
    int track;
};

// Bisection on theta_j(k) - target over [a, b], then one secant step.
double refine_crossing(const UnitaryFamily& f, double a, double theta_a, const CVector& vec_a, double b,
                       double theta_b, const CVector& vec_b, double target) {
    double fa = theta_a - target;
    double fb = theta_b - target;
    if (std::abs(fa) <= kPhaseTol) return a;
    if (std::abs(fb) <= kPhaseTol) return b;
    CVector va = vec_a, vb = vec_b;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (a + b);
        if (mid <= a || mid >= b) break;
        const TrackedPoint p = follow(f, mid, va, theta_a);
        const double fm = p.phase - target;
        if (fm == 0.0) return mid;
        if ((fm < 0.0) == (fa < 0.0)) {
            a = mid;
            fa = fm;
            theta_a = p.phase;
            va = p.vector;
        } else {
            b = mid;
            fb = fm;
            vb = p.vector;
        }
        if (std::abs(fm) <= kPhaseTol) break;
        if (b - a <= 4.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(mid))) break;
    }
    // secant polish on the final bracket
    if (fb == fa) return 0.5 * (a + b);
    const double secant = a - fa * (b - a) / (fb - fa);
    return std::clamp(secant, a, b);
}

}  // namespace

double default_step(const UnitaryFamily& f) {
    const double rate = f.speed_bound();
    if (!(rate > 0.0)) return kTwoPi / 40.0;
    return kTwoPi / rate / 40.0;
}

PhaseTrack scan_eigenphases(const UnitaryFamily& f, double k_min, double k_max, double step,
                            const ScanOptions& options) {
    if (!(k_min < k_max)) throw ConfigError("scan_eigenphases: need k_min < k_max");
    if (!(step > 0.0)) throw ConfigError("scan_eigenphases: step must be positive");
    const double span = k_max - k_min;
    const auto intervals = static_cast<std::size_t>(std::max(1.0, std::ceil(span / step - 1e-9)));

    PhaseTrack out;
    Tracker tracker(f, options, out);
    tracker.start(k_min);
    for (std::size_t i = 1; i <= intervals; ++i) {
        const double k = (i == intervals) ? k_max : k_min + span * static_cast<double>(i) / static_cast<double>(intervals);
        tracker.advance(k);
    }
    return out;
}

Crossing validate_simple_zero(const UnitaryFamily& f, double k0) {
    const std::size_t n = f.dim();
    const ComplexMatrix u = f.evaluate(k0);
    const ComplexMatrix shifted = u - ComplexMatrix::identity(n);
    Crossing c;
    c.k0 = k0;
    c.eigvec = nullspace_vector(shifted);
    c.residual = norm2(matvec(shifted, c.eigvec));
    c.speed = expectation(c.eigvec, f.derivative(k0));

    const double det = std::abs(determinant(shifted));
    if (det > 1e-8 * static_cast<double>(n)) {
        throw RankDeficiencyError("validate_simple_zero: |det(U(k0)-I)| = " + num(det) +
                                      " at k0=" + num(k0) + " is not a zero",
                                  0);
    }
    if (c.residual > 1e-8) {
        throw NumericalError("validate_simple_zero: eigenvector residual " + num(c.residual));
    }
    if (std::abs(c.speed) <= 1e-10) {
        throw ZeroSpeedError("validate_simple_zero: eigenvalue speed |<v|U'|v>| = " +
                             num(std::abs(c.speed)) + " at k0=" + num(k0));
    }
    return c;
}

std::vector<Crossing> find_crossings(const UnitaryFamily& f, double k_min, double k_max, double step,
                                     const ScanOptions& options) {
    const PhaseTrack track = scan_eigenphases(f, k_min, k_max, step, options);
    const std::size_t n = track.tracks();
    std::vector<Candidate> candidates;

    for (std::size_t j = 0; j < n; ++j) {
        // Samples sitting on a multiple of 2 pi.
        for (std::size_t i = 0; i < track.grid.size(); ++i) {
            const double theta = track.phases[i][j];
            const double m = std::round(theta / kTwoPi);
            if (std::abs(theta - kTwoPi * m) <= kPhaseTol) candidates.push_back({track.grid[i], static_cast<int>(j)});
        }
        for (std::size_t i = 0; i + 1 < track.grid.size(); ++i) {
            const double ta = track.phases[i][j];
            const double tb = track.phases[i + 1][j];
            const double fa = std::floor(ta / kTwoPi);
            const double fb = std::floor(tb / kTwoPi);
            if (fa == fb) continue;
            const double target = kTwoPi * std::max(fa, fb);
            if (std::abs(ta - target) <= kPhaseTol || std::abs(tb - target) <= kPhaseTol) continue;
            const double k0 = refine_crossing(f, track.grid[i], ta, track.vectors[i][j], track.grid[i + 1], tb,
                                              track.vectors[i + 1][j], target);
            candidates.push_back({k0, static_cast<int>(j)});
        }
    }

    std::sort(candidates.begin(), candidates.end(), [](const Candidate& a, const Candidate& b) {
        return a.k0 < b.k0 || (a.k0 == b.k0 && a.track < b.track);
    });
    std::vector<Candidate> unique;
    for (const auto& c : candidates) {
        if (!unique.empty() && c.k0 - unique.back().k0 <= kMergeTol) {
            if (c.track == unique.back().track) continue;
            throw DegenerateCrossingError("find_crossings: tracks " + std::to_string(unique.back().track) + " and " +
                                              std::to_string(c.track) + " both reach eigenvalue 1 near k0=" +
                                              num(c.k0),
                                          unique.back().track, c.track, c.k0);
        }
        unique.push_back(c);
    }

    std::vector<Crossing> out;
    out.reserve(unique.size());
    for (const auto& c : unique) {
        Crossing x = validate_simple_zero(f, c.k0);
        x.track_index = c.track;
        out.push_back(std::move(x));
    }
    return out;
}

}  // namespace unitrace
