#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "support.hpp"
#include "unitrace/errors.hpp"
#include "unitrace/linalg.hpp"
#include "unitrace/random.hpp"

using namespace unitrace;
using unitrace::test::cofactor_det;
using unitrace::test::max_abs_diff;
using unitrace::test::naive_product;
using unitrace::test::with_spectrum;

TEST(Matmul, IdentityIsNeutral) {
    Rng rng(1);
    const ComplexMatrix a = random_matrix(3, rng);
    EXPECT_EQ(matmul(ComplexMatrix::identity(3), a), a);
}

TEST(Matmul, SwapIsAnInvolution) {
    const ComplexMatrix x{{0.0, 1.0}, {1.0, 0.0}};
    EXPECT_EQ(matmul(x, x), ComplexMatrix::identity(2));
}

TEST(Matmul, MatchesTripleLoop) {
    Rng rng(2);
    const ComplexMatrix a = random_matrix(4, rng);
    const ComplexMatrix b = random_matrix(4, rng);
    EXPECT_LE(max_abs_diff(matmul(a, b), naive_product(a, b)), 1e-13);
}

TEST(Matmul, RejectsMismatchedSizes) {
    EXPECT_THROW(matmul(ComplexMatrix::identity(2), ComplexMatrix::identity(3)), DimensionMismatchError);
}

TEST(Matmul, Associative) {
    Rng rng(3);
    for (int trial = 0; trial < 20; ++trial) {
        const ComplexMatrix a = random_matrix(4, rng), b = random_matrix(4, rng), c = random_matrix(4, rng);
        EXPECT_LE(max_abs_diff(matmul(matmul(a, b), c), matmul(a, matmul(b, c))), 1e-12);
    }
}

TEST(Determinant, Examples) {
    EXPECT_LE(std::abs(determinant(ComplexMatrix::identity(3)) - 1.0), 1e-15);
    const ComplexMatrix d{{Complex(0, 2), 0.0}, {0.0, 3.0}};
    EXPECT_LE(std::abs(determinant(d) - Complex(0, 6)), 1e-15);
    const ComplexMatrix one{{Complex(0.3, -0.7)}};
    EXPECT_EQ(determinant(one), Complex(0.3, -0.7));
}

TEST(Determinant, MatchesCofactorExpansion) {
    Rng rng(4);
    for (int trial = 0; trial < 5; ++trial) {
        const ComplexMatrix a = random_matrix(4, rng);
        EXPECT_LE(std::abs(determinant(a) - cofactor_det(a)), 1e-12);
    }
}

TEST(Determinant, SingularGivesZero) {
    const ComplexMatrix s{{1.0, 2.0}, {2.0, 4.0}};
    EXPECT_LE(std::abs(determinant(s)), 1e-15);
}

TEST(Determinant, UnitModulusForUnitary) {
    Rng rng(5);
    for (std::size_t n = 1; n <= 8; ++n) EXPECT_NEAR(std::abs(determinant(random_unitary(n, rng))), 1.0, 1e-10);
}

TEST(Nullspace, CoordinateAxis) {
    const ComplexMatrix m{{0.0, 0.0}, {0.0, 1.0}};
    const CVector v = nullspace_vector(m);
    EXPECT_NEAR(v[0].real(), 1.0, 1e-15);
    EXPECT_EQ(v[0].imag(), 0.0);
    EXPECT_LE(std::abs(v[1]), 1e-15);
}

TEST(Nullspace, FixedAxisOfRotation) {
    const double c = std::cos(kTwoPi / 3), s = std::sin(kTwoPi / 3);
    const ComplexMatrix u{{c, -s, 0.0}, {s, c, 0.0}, {0.0, 0.0, 1.0}};
    const CVector v = nullspace_vector(u - ComplexMatrix::identity(3));
    EXPECT_LE(std::abs(v[0]), 1e-12);
    EXPECT_LE(std::abs(v[1]), 1e-12);
    EXPECT_NEAR(v[2].real(), 1.0, 1e-12);
}

TEST(Nullspace, ZeroMatrixHasNullityTwo) {
    try {
        nullspace_vector(ComplexMatrix(2));
        FAIL() << "expected RankDeficiencyError";
    } catch (const RankDeficiencyError& e) {
        EXPECT_EQ(e.nullity(), 2);
    }
}

TEST(Nullspace, FullRankRejected) {
    EXPECT_THROW(nullspace_vector(ComplexMatrix::identity(3)), RankDeficiencyError);
}

TEST(Nullspace, RandomRankOneDeficit) {
    Rng rng(6);
    for (int trial = 0; trial < 10; ++trial) {
        const ComplexMatrix q = random_unitary(4, rng);
        const ComplexMatrix u = with_spectrum(q, {0.0, 1.0, -2.0, 2.5});
        const CVector v = nullspace_vector(u - ComplexMatrix::identity(4));
        EXPECT_NEAR(norm2(v), 1.0, 1e-12);
        EXPECT_GE(std::abs(inner(q.column(0), v)), 1.0 - 1e-10);
        // largest entry real positive
        const auto big = std::max_element(v.begin(), v.end(), [](Complex a, Complex b) { return std::abs(a) < std::abs(b); });
        EXPECT_GT(big->real(), 0.0);
        EXPECT_EQ(big->imag(), 0.0);
    }
}

TEST(EigUnitary, Identity) {
    const auto pairs = eig_unitary(ComplexMatrix::identity(2));
    ASSERT_EQ(pairs.size(), 2u);
    for (const auto& p : pairs) EXPECT_NEAR(p.phase, 0.0, 1e-15);
    EXPECT_LE(std::abs(inner(pairs[0].vector, pairs[1].vector)), 1e-14);
}

TEST(EigUnitary, Diagonal) {
    const ComplexMatrix u{{Complex(0, 1), 0.0}, {0.0, -1.0}};
    const auto pairs = eig_unitary(u);
    EXPECT_NEAR(pairs[0].phase, kPi / 2, 1e-14);
    EXPECT_NEAR(pairs[1].phase, kPi, 1e-14);
}

TEST(EigUnitary, RecoversConstructedSpectrum) {
    Rng rng(7);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<double> theta;
        for (int j = 0; j < 4; ++j) theta.push_back(rng.uniform(-kPi, kPi));
        const ComplexMatrix u = with_spectrum(random_unitary(4, rng), theta);
        const auto pairs = eig_unitary(u);
        std::sort(theta.begin(), theta.end());
        for (std::size_t j = 0; j < 4; ++j) {
            EXPECT_NEAR(pairs[j].phase, theta[j], 1e-10);
            EXPECT_NEAR(std::abs(pairs[j].value), 1.0, 1e-12);
            EXPECT_NEAR(norm2(pairs[j].vector), 1.0, 1e-12);
            CVector r = matvec(u, pairs[j].vector);
            for (std::size_t i = 0; i < 4; ++i) r[i] -= pairs[j].value * pairs[j].vector[i];
            EXPECT_LE(norm2(r), 1e-10);
        }
        for (std::size_t a = 0; a < 4; ++a)
            for (std::size_t b = a + 1; b < 4; ++b) EXPECT_LE(std::abs(inner(pairs[a].vector, pairs[b].vector)), 1e-10);
    }
}

TEST(EigUnitary, ResolvesConjugatePairsAndNearDegeneracy) {
    Rng rng(8);
    // cos(theta) alone cannot separate +-theta; 1e-9 apart needs the refinement stage
    const std::vector<double> theta{-1.2, 1.2, 0.5, 0.5 + 1e-9};
    const ComplexMatrix u = with_spectrum(random_unitary(4, rng), theta);
    const auto pairs = eig_unitary(u);
    for (const auto& p : pairs) {
        CVector r = matvec(u, p.vector);
        for (std::size_t i = 0; i < 4; ++i) r[i] -= p.value * p.vector[i];
        EXPECT_LE(norm2(r), 1e-10);
    }
    EXPECT_NEAR(pairs[0].phase, -1.2, 1e-10);
    EXPECT_NEAR(pairs[3].phase, 1.2, 1e-10);
}

TEST(EigUnitary, DegenerateEigenspaceGivesOrthonormalBasis) {
    Rng rng(9);
    const ComplexMatrix u = with_spectrum(random_unitary(3, rng), {0.7, 0.7, -2.0});
    const auto pairs = eig_unitary(u);
    EXPECT_NEAR(pairs[1].phase, 0.7, 1e-10);
    EXPECT_NEAR(pairs[2].phase, 0.7, 1e-10);
    EXPECT_LE(std::abs(inner(pairs[1].vector, pairs[2].vector)), 1e-10);
}

TEST(EigUnitary, RejectsNonUnitary) {
    const ComplexMatrix m{{2.0, 0.0}, {0.0, 1.0}};
    EXPECT_THROW(eig_unitary(m), NotUnitaryError);
}

TEST(EigUnitary, PhaseSumIsArgDet) {
    Rng rng(10);
    for (std::size_t n = 1; n <= 8; ++n) {
        for (int trial = 0; trial < 5; ++trial) {
            const ComplexMatrix u = random_unitary(n, rng);
            double sum = 0.0;
            for (const auto& p : eig_unitary(u)) sum += p.phase;
            EXPECT_LE(std::abs(test::wrap_phase(sum - std::arg(determinant(u)))), 1e-9);
        }
    }
}

TEST(EigUnitary, AgreesWithNullspaceNearPhaseZero) {
    Rng rng(11);
    for (int trial = 0; trial < 10; ++trial) {
        const double eps = rng.uniform(-1e-7, 1e-7);
        const ComplexMatrix u = with_spectrum(random_unitary(3, rng), {eps, 2.0, -1.5});
        const auto pairs = eig_unitary(u);
        const auto nearest = std::min_element(pairs.begin(), pairs.end(), [](const EigenPair& a, const EigenPair& b) {
            return std::abs(a.phase) < std::abs(b.phase);
        });
        // a phase of 1e-7 is a pivot of 1e-7, so the rank decision needs a looser tol
        const CVector v = nullspace_vector(u - ComplexMatrix::identity(3), 1e-5);
        EXPECT_GE(std::abs(inner(nearest->vector, v)), 1.0 - 1e-8);
    }
}

TEST(EigHermitian, Diagonalizes) {
    Rng rng(12);
    const ComplexMatrix h = random_hermitian(5, rng);
    const HermitianEigen e = eig_hermitian(h);
    EXPECT_TRUE(std::is_sorted(e.values.begin(), e.values.end()));
    for (std::size_t j = 0; j < 5; ++j) {
        CVector r = matvec(h, e.vectors.column(j));
        for (std::size_t i = 0; i < 5; ++i) r[i] -= e.values[j] * e.vectors(i, j);
        EXPECT_LE(norm2(r), 1e-11);
    }
    EXPECT_LE(unitarity_defect(e.vectors), 1e-12);
}

TEST(SpectralNorm, DiagonalAndUnitary) {
    const CVector d{Complex(0, -3), 2.0, 0.5};
    EXPECT_NEAR(spectral_norm(ComplexMatrix::diagonal(d)), 3.0, 1e-12);
    Rng rng(13);
    EXPECT_NEAR(spectral_norm(random_unitary(4, rng)), 1.0, 1e-12);
}
