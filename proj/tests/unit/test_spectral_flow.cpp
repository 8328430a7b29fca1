#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "support.hpp"
#include "unitrace/errors.hpp"
#include "unitrace/random.hpp"
#include "unitrace/spectral_flow.hpp"

using namespace unitrace;

namespace {

const ComplexMatrix kSwap{{0.0, 1.0}, {1.0, 0.0}};

UnitaryFamily swap_family() { return UnitaryFamily::diag_phase({1.0, std::sqrt(2.0)}, kSwap); }

double abs_det_shifted(const UnitaryFamily& f, double k) {
    return std::abs(determinant(f.evaluate(k) - ComplexMatrix::identity(f.dim())));
}

// Local minima of |det(U - I)| on a grid of spacing h, each narrowed by
// ternary search and kept when it reaches `threshold`.
std::vector<double> dense_det_minima(const UnitaryFamily& f, double lo, double hi, double h, double threshold) {
    std::vector<double> out;
    const auto count = static_cast<std::size_t>(std::ceil((hi - lo) / h));
    std::vector<double> vals(count + 1);
    for (std::size_t i = 0; i <= count; ++i) vals[i] = abs_det_shifted(f, std::min(hi, lo + h * i));
    for (std::size_t i = 0; i <= count; ++i) {
        const bool left = i == 0 || vals[i] <= vals[i - 1];
        const bool right = i == count || vals[i] < vals[i + 1];
        if (!left || !right) continue;
        double a = std::max(lo, lo + h * (static_cast<double>(i) - 1)), b = std::min(hi, lo + h * (i + 1.0));
        for (int it = 0; it < 200; ++it) {
            const double m1 = a + (b - a) / 3, m2 = b - (b - a) / 3;
            if (abs_det_shifted(f, m1) < abs_det_shifted(f, m2)) b = m2;
            else a = m1;
        }
        const double k = 0.5 * (a + b);
        if (abs_det_shifted(f, k) <= threshold) out.push_back(k);
    }
    return out;
}

std::vector<UnitaryFamily> random_diag_corpus(std::uint64_t seed, int count) {
    Rng rng(seed);
    std::vector<UnitaryFamily> out;
    for (int i = 0; i < count; ++i) {
        const std::size_t n = 2 + static_cast<std::size_t>(i % 3);
        std::vector<double> lengths;
        for (std::size_t j = 0; j < n; ++j) lengths.push_back(rng.uniform(0.5, 3.0));
        out.push_back(UnitaryFamily::diag_phase(lengths, random_unitary(n, rng)));
    }
    return out;
}

}  // namespace

TEST(ScanEigenphases, ScalarIsLinear) {
    const auto f = UnitaryFamily::scalar(1.0);
    const PhaseTrack t = scan_eigenphases(f, 0.0, 7.0, default_step(f));
    ASSERT_EQ(t.tracks(), 1u);
    EXPECT_EQ(t.grid.front(), 0.0);
    EXPECT_EQ(t.grid.back(), 7.0);
    for (std::size_t i = 0; i < t.grid.size(); ++i) EXPECT_NEAR(t.phases[i][0], t.grid[i], 1e-12);
}

TEST(ScanEigenphases, DecoupledPhases) {
    const auto f = UnitaryFamily::diag_phase({1.0, 2.0}, ComplexMatrix::identity(2));
    const PhaseTrack t = scan_eigenphases(f, 0.0, 7.0, default_step(f));
    ASSERT_EQ(t.tracks(), 2u);
    // which track carries which length is an ordering detail; identify by the end slope
    const std::size_t fast = (t.phases.back()[1] > t.phases.back()[0]) ? 1 : 0;
    for (std::size_t i = 0; i < t.grid.size(); ++i) {
        EXPECT_NEAR(t.phases[i][fast] - t.phases[0][fast], 2.0 * t.grid[i], 1e-12);
        EXPECT_NEAR(t.phases[i][1 - fast] - t.phases[0][1 - fast], t.grid[i], 1e-12);
    }
}

TEST(ScanEigenphases, AgreesWithPointwiseDiagonalization) {
    for (const auto& f : random_diag_corpus(1, 3)) {
        const PhaseTrack t = scan_eigenphases(f, -3.0, 9.0, default_step(f));
        for (std::size_t i = 0; i < t.grid.size(); ++i) {
            const auto pairs = eig_unitary(f.evaluate(t.grid[i]));
            for (double theta : t.phases[i]) {
                double best = 10.0;
                for (const auto& p : pairs) best = std::min(best, std::abs(test::wrap_phase(theta - p.phase)));
                EXPECT_LE(best, 1e-10);
            }
        }
    }
}

TEST(ScanEigenphases, ContinuityAndOverlaps) {
    for (const auto& f : random_diag_corpus(2, 6)) {
        const PhaseTrack t = scan_eigenphases(f, 0.0, 20.0, default_step(f));
        ASSERT_EQ(t.overlaps.size() + 1, t.grid.size());
        for (double o : t.overlaps) EXPECT_GE(o, 0.7);
        for (std::size_t i = 0; i + 1 < t.grid.size(); ++i) {
            EXPECT_LT(t.grid[i], t.grid[i + 1]);
            for (std::size_t j = 0; j < t.tracks(); ++j) EXPECT_LT(std::abs(t.phases[i + 1][j] - t.phases[i][j]), kPi);
        }
    }
}

TEST(ScanEigenphases, PositiveGeneratorPhasesIncrease) {
    Rng rng(3);
    std::vector<UnitaryFamily> families = random_diag_corpus(4, 6);
    // exp path with a positive definite H
    ComplexMatrix h = random_hermitian(3, rng);
    const double shift = 1.0 - eig_hermitian(h).values.front();
    h += shift * ComplexMatrix::identity(3);
    families.push_back(UnitaryFamily::exp_path(h, random_unitary(3, rng)));
    for (const auto& f : families) {
        const PhaseTrack t = scan_eigenphases(f, -5.0, 15.0, default_step(f));
        for (std::size_t i = 0; i + 1 < t.grid.size(); ++i)
            for (std::size_t j = 0; j < t.tracks(); ++j) EXPECT_GT(t.phases[i + 1][j], t.phases[i][j]);
    }
}

TEST(ScanEigenphases, RejectsBadArguments) {
    const auto f = UnitaryFamily::scalar(1.0);
    EXPECT_THROW(scan_eigenphases(f, 1.0, 1.0, 0.1), ConfigError);
    EXPECT_THROW(scan_eigenphases(f, 0.0, 1.0, 0.0), ConfigError);
}

TEST(ScanEigenphases, CoarseStepWithoutRefinementFailsLoudly) {
    Rng rng(5);
    const auto f = UnitaryFamily::diag_phase({5.0, 7.0, 11.0}, random_unitary(3, rng));
    EXPECT_THROW(scan_eigenphases(f, 0.0, 10.0, 1.0, ScanOptions{0.7, 0}), TrackingError);
    // the same step is fine once refinement is allowed
    EXPECT_NO_THROW(scan_eigenphases(f, 0.0, 10.0, 1.0));
}

TEST(FindCrossings, ScalarComb) {
    const auto f = UnitaryFamily::scalar(1.0);
    const auto c = find_crossings(f, -0.5, 13.0, default_step(f));
    ASSERT_EQ(c.size(), 3u);
    const double expected[] = {0.0, kTwoPi, 2 * kTwoPi};
    for (std::size_t i = 0; i < 3; ++i) {
        EXPECT_NEAR(c[i].k0, expected[i], 1e-10);
        EXPECT_EQ(c[i].track_index, 0);
        EXPECT_LE(c[i].residual, 1e-8);
    }
}

TEST(FindCrossings, DecoupledRangeExcludesTwoPi) {
    const auto f = UnitaryFamily::diag_phase({1.0, 2.0}, ComplexMatrix::identity(2));
    const auto c = find_crossings(f, 0.5, 5.0, default_step(f));
    ASSERT_EQ(c.size(), 1u);
    EXPECT_NEAR(c[0].k0, kPi, 1e-10);
    // the crossing belongs to the 2k track: its speed is 2i
    EXPECT_LE(std::abs(c[0].speed - Complex(0, 2)), 1e-9);
}

TEST(FindCrossings, SwapFamilyMatchesAnalyticZeros) {
    // det(U - I) = 1 - e^{i k (1 + sqrt 2)}
    const auto f = swap_family();
    const auto c = find_crossings(f, 0.0, 20.0, default_step(f));
    std::vector<double> expected;
    for (int m = 0; kTwoPi * m / (1 + std::sqrt(2.0)) <= 20.0; ++m) expected.push_back(kTwoPi * m / (1 + std::sqrt(2.0)));
    ASSERT_EQ(c.size(), expected.size());
    for (std::size_t i = 0; i < c.size(); ++i) {
        EXPECT_NEAR(c[i].k0, expected[i], 1e-10);
        EXPECT_NEAR(abs_det_shifted(f, expected[i]), 0.0, 1e-14);
    }
}

TEST(FindCrossings, SwapFamilyMatchesDenseDeterminantScan) {
    const auto f = swap_family();
    const auto c = find_crossings(f, 0.0, 20.0, default_step(f));
    const auto oracle = dense_det_minima(f, 0.0, 20.0, 1e-4, 1e-6);
    ASSERT_EQ(c.size(), oracle.size());
    for (std::size_t i = 0; i < c.size(); ++i) EXPECT_NEAR(c[i].k0, oracle[i], 1e-7);
}

TEST(FindCrossings, RandomFamiliesMatchDenseDeterminantScan) {
    for (const auto& f : random_diag_corpus(6, 4)) {
        const auto c = find_crossings(f, 0.0, 15.0, default_step(f));
        const auto oracle = dense_det_minima(f, 0.0, 15.0, 1e-3, 1e-6);
        ASSERT_EQ(c.size(), oracle.size());
        for (std::size_t i = 0; i < c.size(); ++i) EXPECT_NEAR(c[i].k0, oracle[i], 1e-6);
    }
}

TEST(FindCrossings, UncoupledLengthsGiveExactLattice) {
    const std::vector<double> lengths{1.0, std::sqrt(3.0), std::exp(1.0)};
    const auto f = UnitaryFamily::diag_phase(lengths, ComplexMatrix::identity(3));
    // k = 0 is shared by every length, a degenerate point
    EXPECT_THROW(find_crossings(f, -4.0, 30.0, default_step(f)), DegenerateCrossingError);
    std::vector<double> expected;
    for (double l : lengths)
        for (int m = -10; m <= 20; ++m)
            if (kTwoPi * m / l >= -4.0 && kTwoPi * m / l <= 30.0) expected.push_back(kTwoPi * m / l);
    std::sort(expected.begin(), expected.end());
    const auto away = find_crossings(f, 0.5, 30.0, default_step(f));
    std::vector<double> positive;
    for (double e : expected)
        if (e >= 0.5) positive.push_back(e);
    ASSERT_EQ(away.size(), positive.size());
    for (std::size_t i = 0; i < away.size(); ++i) EXPECT_NEAR(away[i].k0, positive[i], 1e-9);
}

TEST(FindCrossings, CompletenessAgainstFinerGrid) {
    for (const auto& f : random_diag_corpus(7, 6)) {
        const double step = default_step(f);
        const auto c = find_crossings(f, -2.0, 18.0, step);
        const PhaseTrack fine = scan_eigenphases(f, -2.0, 18.0, step / 10);
        std::size_t changes = 0;
        for (std::size_t j = 0; j < fine.tracks(); ++j)
            for (std::size_t i = 0; i + 1 < fine.grid.size(); ++i)
                if (std::floor(fine.phases[i][j] / kTwoPi) != std::floor(fine.phases[i + 1][j] / kTwoPi)) ++changes;
        EXPECT_EQ(c.size(), changes);
    }
}

TEST(FindCrossings, InvariantsAtEveryCrossing) {
    for (const auto& f : random_diag_corpus(8, 9)) {
        const auto c = find_crossings(f, 0.0, 25.0, default_step(f));
        for (std::size_t i = 0; i < c.size(); ++i) {
            EXPECT_LE(abs_det_shifted(f, c[i].k0), 1e-8 * f.dim());
            EXPECT_LE(c[i].residual, 1e-8);
            EXPECT_GT(std::abs(c[i].speed), 1e-10);
            EXPECT_NEAR(norm2(c[i].eigvec), 1.0, 1e-12);
            if (i > 0) EXPECT_LT(c[i - 1].k0, c[i].k0);
        }
    }
}

TEST(FindCrossings, SpeedIsTheEigenvalueVelocity) {
    // d lambda/dk = i lambda theta' with lambda = 1 at the crossing
    const double h = 1e-5;
    for (const auto& f : random_diag_corpus(9, 6)) {
        for (const auto& c : find_crossings(f, 0.0, 12.0, default_step(f))) {
            auto phase_near_zero = [&](double k) {
                double best = 10.0;
                for (const auto& p : eig_unitary(f.evaluate(k)))
                    if (std::abs(p.phase) < std::abs(best)) best = p.phase;
                return best;
            };
            const Complex fd = Complex(0, 1) * (phase_near_zero(c.k0 + h) - phase_near_zero(c.k0 - h)) / (2 * h);
            EXPECT_LE(std::abs(fd - c.speed) / std::abs(c.speed), 1e-6);
        }
    }
}

TEST(FindCrossings, DegenerateCrossingIsAnError) {
    const auto f = UnitaryFamily::diag_phase({1.0, 1.0}, ComplexMatrix::identity(2));
    try {
        find_crossings(f, 1.0, 8.0, default_step(f));
        FAIL() << "expected DegenerateCrossingError";
    } catch (const DegenerateCrossingError& e) {
        EXPECT_NE(e.track_a(), e.track_b());
        EXPECT_NEAR(e.k0(), kTwoPi, 1e-9);
    }
}

TEST(ValidateSimpleZero, ScalarAtTwoPi) {
    const Crossing c = validate_simple_zero(UnitaryFamily::scalar(1.0), kTwoPi);
    ASSERT_EQ(c.eigvec.size(), 1u);
    EXPECT_EQ(c.eigvec[0], Complex(1.0));
    EXPECT_LE(std::abs(c.speed - Complex(0, 1)), 1e-12);
}

TEST(ValidateSimpleZero, DoubleEigenvalueRejected) {
    const auto f = UnitaryFamily::diag_phase({1.0, 1.0}, ComplexMatrix::identity(2));
    EXPECT_THROW(validate_simple_zero(f, kTwoPi), RankDeficiencyError);
}

TEST(ValidateSimpleZero, NotAZeroRejected) {
    EXPECT_THROW(validate_simple_zero(UnitaryFamily::scalar(1.0), 1.0), RankDeficiencyError);
}

TEST(ValidateSimpleZero, ZeroSpeedRejected) {
    // U(k) = diag(1, e^{ik}): the first eigenvalue sits at 1 without moving
    const ComplexMatrix h{{0.0, 0.0}, {0.0, 1.0}};
    const auto f = UnitaryFamily::exp_path(h, ComplexMatrix::identity(2));
    EXPECT_THROW(validate_simple_zero(f, 1.0), ZeroSpeedError);
}

TEST(ValidateSimpleZero, SwapFamilyFirstCrossingSpeed) {
    const auto f = swap_family();
    const auto c = find_crossings(f, 1.0, 4.0, default_step(f));
    ASSERT_FALSE(c.empty());
    const PhaseTrack t = scan_eigenphases(f, c[0].k0 - 1e-5, c[0].k0 + 1e-5, 1e-5);
    const double dtheta = (t.phases.back()[c[0].track_index] - t.phases.front()[c[0].track_index]) / 2e-5;
    const Complex fd = Complex(0, 1) * dtheta;
    EXPECT_LE(std::abs(fd - c[0].speed) / std::abs(c[0].speed), 1e-6);
    // both lengths contribute equally: theta' = (1 + sqrt 2) / 2
    EXPECT_NEAR(c[0].speed.imag(), 0.5 * (1 + std::sqrt(2.0)), 1e-9);
}
