#include <gtest/gtest.h>

#include <cmath>

#include "focklift/operators.hpp"
#include "focklift/random.hpp"

using namespace focklift;

namespace {

Matrix scalar(cplx v) { return Matrix::Constant(1, 1, v); }

} // namespace

TEST(RowNorm, Examples)
{
    EXPECT_NEAR(row_norm({scalar(0.6), scalar(0.8)}), 1.0, 1e-15);
    EXPECT_NEAR(row_norm({scalar(0.5)}), 0.5, 1e-15);
    Matrix a = Matrix::Zero(2, 2), b = Matrix::Zero(2, 2);
    a(0, 0) = 1.0;
    b(1, 1) = 1.0;
    EXPECT_NEAR(row_norm({a, b}), 1.0, 1e-15);
}

TEST(RowNorm, MatchesSqrtOfSumTTStar)
{
    auto rng = rnd::stream(7, 0);
    for (int t = 0; t < 20; ++t) {
        const auto T = rnd::row_contraction(rng, 3, 3);
        Matrix G = Matrix::Zero(3, 3);
        for (const auto& b : T)
            G += b * b.adjoint();
        EXPECT_NEAR(row_norm(T), std::sqrt(max_eigenvalue(G)), 1e-12);
    }
}

TEST(RowContraction, Predicate)
{
    EXPECT_TRUE(is_row_contraction({scalar(0.6), scalar(0.8)}));
    EXPECT_FALSE(is_row_contraction({scalar(0.8), scalar(0.8)}));
    EXPECT_THROW(check_tuple({Matrix::Zero(1, 1), Matrix::Zero(2, 2)}), InvalidInput);
}

TEST(Defect, ScalarAndRow)
{
    EXPECT_NEAR(std::abs(defect(scalar(0.6)).D(0, 0)), 0.8, 1e-15);
    // D_T for T = [0.6, 0.8] is (I - T^*T)^{1/2}, 2x2 with rank 1
    const auto d = defect(RowTuple{scalar(0.6), scalar(0.8)});
    EXPECT_EQ(d.range_basis.cols(), 1);
    Matrix expect(2, 2);
    expect << 0.64, -0.48, -0.48, 0.36;
    EXPECT_LT((d.D * d.D - expect).cwiseAbs().maxCoeff(), 1e-14);
    EXPECT_THROW(defect(scalar(1.2)), InvalidInput);
}

TEST(Defect, IdentityOfDefects)
{
    // ||D x||^2 + ||T x||^2 = ||x||^2
    auto rng = rnd::stream(8, 0);
    for (int t = 0; t < 20; ++t) {
        const Matrix X = rnd::contraction(rng, 3, 4);
        const auto d = defect(X);
        const Matrix lhs = d.D * d.D + X.adjoint() * X;
        EXPECT_LT((lhs - Matrix::Identity(4, 4)).cwiseAbs().maxCoeff(), 1e-12);
        EXPECT_LT((d.D - d.D.adjoint()).cwiseAbs().maxCoeff(), 1e-14);
    }
}

TEST(PsdSqrt, ClampsNoiseAndRejectsNegative)
{
    Matrix G = Matrix::Zero(2, 2);
    G(0, 0) = 4.0;
    G(1, 1) = -1e-17;
    const Matrix s = psd_sqrt(G);
    EXPECT_NEAR(s(0, 0).real(), 2.0, 1e-15);
    EXPECT_EQ(s(1, 1), cplx(0.0));
    G(1, 1) = -1e-3;
    EXPECT_THROW(psd_sqrt(G), InvalidInput);
    EXPECT_THROW(psd_sqrt(Matrix::Zero(2, 3)), InvalidInput);
}

TEST(PsdSqrt, SquaresBack)
{
    auto rng = rnd::stream(9, 0);
    const Matrix X = rnd::gaussian(rng, 4, 4);
    const Matrix G = X * X.adjoint();
    const Matrix s = psd_sqrt(G);
    EXPECT_LT((s * s - G).cwiseAbs().maxCoeff(), 1e-12 * G.cwiseAbs().maxCoeff());
}

TEST(Douglas, ScalarAndRange)
{
    const auto d = douglas_solve(scalar(2.0), scalar(1.0));
    EXPECT_NEAR(d.L(0, 0).real(), 0.5, 1e-15);
    EXPECT_EQ(d.clipped, 0);
    EXPECT_THROW(douglas_solve(scalar(1.0), scalar(2.0)), NumericalFailure);
    // P = 0, Q = 0: L = 0
    const auto z = douglas_solve(Matrix::Zero(2, 2), Matrix::Zero(3, 2));
    EXPECT_EQ(z.L, Matrix::Zero(3, 2));
}

TEST(Douglas, RandomMajorized)
{
    auto rng = rnd::stream(10, 0);
    for (int t = 0; t < 30; ++t) {
        const Matrix P = rnd::gaussian(rng, 4, 3);
        const Matrix K = rnd::contraction(rng, 2, 4);
        const Matrix Q = K * P;      // Q^*Q <= P^*P
        const auto d = douglas_solve(P, Q);
        EXPECT_LE(op_norm(d.L), 1.0 + 1e-12);
        EXPECT_LT(d.residual, 1e-10);
    }
}

TEST(SpectralRadius, Examples)
{
    EXPECT_NEAR(spectral_radius({scalar(0.5)}).value, 0.5, 1e-12);
    // nilpotent: Phi^2(I) = 0
    Matrix N = Matrix::Zero(2, 2);
    N(0, 1) = 1.0;
    EXPECT_EQ(spectral_radius({N}).value, 0.0);
    // scalars z_i: r = ||z||
    const auto r = spectral_radius({scalar(0.3), scalar(cplx(0.0, 0.4))});
    EXPECT_NEAR(r.value, 0.5, 1e-12);
}

TEST(SpectralRadius, UpperBoundOfEigenvalues)
{
    // a Jordan block has r = |lambda| but norm > |lambda|; the infimum
    // estimate decreases toward r
    Matrix J(2, 2);
    J << 0.5, 1.0, 0.0, 0.5;
    const auto r = spectral_radius({J}, 256);
    EXPECT_GE(r.value, 0.5 - 1e-12);
    EXPECT_LT(r.value, 0.56);
    EXPECT_LT(r.value, op_norm(J));
}

TEST(CpMaps, DualPairing)
{
    auto rng = rnd::stream(11, 0);
    const auto Z = rnd::row_contraction(rng, 2, 3);
    const Matrix X = rnd::gaussian(rng, 3, 3), Y = rnd::gaussian(rng, 3, 3);
    // tr(Phi(X) Y) = tr(X Phi^*(Y))
    EXPECT_LT(std::abs((cp_map(Z, X) * Y).trace() - (X * cp_dual(Z, Y)).trace()), 1e-12);
}

TEST(RangeBasis, ZeroAndRankDeficient)
{
    EXPECT_EQ(range_basis(Matrix::Zero(3, 2)).cols(), 0);
    Matrix X(3, 2);
    X << 1, 2, 2, 4, 3, 6;
    const Matrix U = range_basis(X);
    EXPECT_EQ(U.cols(), 1);
    EXPECT_LT((U.adjoint() * U - Matrix::Identity(1, 1)).norm(), 1e-14);
}
