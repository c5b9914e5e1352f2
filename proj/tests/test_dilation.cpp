#include <gtest/gtest.h>

#include <cmath>

#include "focklift/dilation.hpp"
#include "focklift/random.hpp"

using namespace focklift;

namespace {

Matrix scalar(cplx v) { return Matrix::Constant(1, 1, v); }

// V_i^* V_j on the part of K below the top Fock degree
double interior_orthogonality_error(const Dilation& dil)
{
    const Index lo = dil.interior_dim();
    double err = 0.0;
    for (int i = 0; i < dil.n; ++i)
        for (int j = 0; j < dil.n; ++j) {
            const Matrix Vi = dil.dense(i).leftCols(lo);
            const Matrix Vj = dil.dense(j).leftCols(lo);
            const Matrix target = i == j ? Matrix(Matrix::Identity(lo, lo)) : Matrix(Matrix::Zero(lo, lo));
            err = std::max(err, (Vi.adjoint() * Vj - target).cwiseAbs().maxCoeff());
        }
    return err;
}

} // namespace

TEST(Dilation, ZeroIsTheShift)
{
    const auto dil = minimal_isometric_dilation({scalar(0.0)}, 3);
    EXPECT_EQ(dil.d, 1);
    EXPECT_EQ(dil.dim(), 1 + 4);
    const Matrix V = dil.dense(0);
    // H -> 1 (x) D_T, then e_p -> e_{p+1}
    Matrix expect = Matrix::Zero(5, 5);
    for (Index r = 1; r < 5; ++r)
        expect(r, r - 1) = 1.0;
    EXPECT_LT((V - expect).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(Dilation, UnitaryHasNoDefect)
{
    // D_T = 0: the dilation is T itself
    const auto dil = minimal_isometric_dilation({scalar(std::polar(1.0, 0.3))}, 3);
    EXPECT_EQ(dil.d, 0);
    EXPECT_EQ(dil.dim(), 1);
    EXPECT_LT(std::abs(dil.dense(0)(0, 0) - std::polar(1.0, 0.3)), 1e-15);
}

TEST(Dilation, ScalarPairOrthogonality)
{
    const auto dil = minimal_isometric_dilation({scalar(0.6), scalar(0.8)}, 4);
    EXPECT_EQ(dil.d, 1);
    EXPECT_LT(interior_orthogonality_error(dil), 1e-12);
}

TEST(Dilation, CompressionAndIsometryRandom)
{
    auto rng = rnd::stream(21, 0);
    for (int t = 0; t < 20; ++t) {
        const int n = 1 + t % 3;
        const auto T = rnd::row_contraction(rng, n, 1 + t % 4);
        const auto dil = minimal_isometric_dilation(T, n == 3 ? 3 : 4);
        const Matrix P = dil.embedding();
        for (int i = 0; i < n; ++i) {
            // P_H V_i = T_i P_H
            const Matrix lhs = P.adjoint() * dil.dense(i);
            const Matrix rhs = T[static_cast<std::size_t>(i)] * P.adjoint();
            EXPECT_EQ(lhs, rhs);
            EXPECT_EQ(dil.apply_adjoint(i, Matrix::Identity(dil.dim(), dil.dim())), dil.dense(i).adjoint());
        }
        EXPECT_LT(interior_orthogonality_error(dil), 1e-12);
    }
}

TEST(Dilation, RejectsNonContraction)
{
    EXPECT_THROW(minimal_isometric_dilation({scalar(0.9), scalar(0.9)}, 2), InvalidInput);
}

TEST(Dilation, Minimality)
{
    auto rng = rnd::stream(22, 0);
    const auto T = rnd::row_contraction(rng, 2, 2);
    const auto dil = minimal_isometric_dilation(T, 3);
    // words of length <= D reach the Fock degrees <= D-1
    EXPECT_EQ(reachable_dimension(dil), dil.interior_dim());
}

TEST(LiftSubspace, ExactIntertwiningGivesEquality)
{
    // X = C^2 (+) C^2 (+) C^2, A = [A0, T_1 A0, T_2 A0], X_i = block i+1,
    // R_i = first-block inclusion: T_i A R_i = A J_i
    auto rng = rnd::stream(23, 0);
    const auto T = rnd::row_contraction(rng, 2, 2);
    const Matrix A0 = rnd::contraction(rng, 2, 2);
    LiftProblem prob;
    prob.T = T;
    prob.A = Matrix(2, 6);
    prob.A << A0, T[0] * A0, T[1] * A0;
    prob.degree = 10;
    for (int i = 0; i < 2; ++i) {
        Matrix J = Matrix::Zero(6, 2), R = Matrix::Zero(6, 2);
        J.middleRows(2 * (i + 1), 2) = Matrix::Identity(2, 2);
        R.topRows(2) = Matrix::Identity(2, 2);
        prob.J.push_back(J);
        prob.R.push_back(R);
    }
    LiftOptions lo;
    lo.normalize = true;
    const auto r = lift_subspace(prob, lo);
    EXPECT_TRUE(r.exact_regime);
    EXPECT_LT(r.gamma, 1e-12);
    for (double v : r.residuals)
        EXPECT_LT(v, 1e-8);
    EXPECT_NEAR(r.norm_B, op_norm(prob.A), 1e-10);
    const auto rep = verify_lifting(r, prob);
    EXPECT_TRUE(rep.all_pass);
    EXPECT_TRUE(rep.degenerate);
}

TEST(LiftSubspace, ZeroAGivesZeroB)
{
    auto rng = rnd::stream(24, 0);
    LiftProblem prob;
    prob.T = rnd::row_contraction(rng, 2, 2);
    prob.A = Matrix::Zero(2, 4);
    Matrix J1 = Matrix::Zero(4, 2), J2 = Matrix::Zero(4, 2);
    J1.topRows(2) = Matrix::Identity(2, 2);
    J2.bottomRows(2) = Matrix::Identity(2, 2);
    prob.J = {J1, J2};
    prob.R = {J2, J1};
    prob.degree = 6;
    const auto r = lift_subspace(prob);
    ASSERT_TRUE(r.B.has_value());
    EXPECT_LT(r.B->cwiseAbs().maxCoeff(), 1e-14);
    for (double v : r.residuals)
        EXPECT_LT(v, 1e-14);
}

TEST(LiftSubspace, RandomInequalityBothRoutes)
{
    auto rng = rnd::stream(25, 0);
    for (int t = 0; t < 10; ++t) {
        LiftProblem prob;
        prob.T = rnd::row_contraction(rng, 2, 3);
        // X = C^6 split into two orthogonal 3-dim pieces
        const Matrix U = Eigen::HouseholderQR<Matrix>(rnd::gaussian(rng, 6, 6)).householderQ();
        prob.J = {U.leftCols(3), U.rightCols(3)};
        prob.R = {rnd::contraction(rng, 6, 3), rnd::contraction(rng, 6, 3)};
        prob.A = rnd::contraction(rng, 3, 6);
        prob.degree = 12;
        const auto r = lift_subspace(prob);
        // independent recomputation of the right side
        Matrix M(3, 6);
        for (int i = 0; i < 2; ++i)
            M.middleCols(3 * i, 3) = prob.T[static_cast<std::size_t>(i)] * prob.A * prob.R[static_cast<std::size_t>(i)] -
                                     prob.A * prob.J[static_cast<std::size_t>(i)];
        const double rhs = std::sqrt(2.0 * op_norm(M));
        EXPECT_NEAR(r.rhs, rhs, 1e-12);
        for (double v : r.residuals)
            EXPECT_LE(v, rhs + r.tail_bound + 1e-8);
        EXPECT_LE(r.norm_B, 1.0 + 1e-8);
        EXPECT_LE(r.lambda_certificate, 1.0 + 1e-8);
        const auto rep = verify_lifting(r, prob);
        EXPECT_TRUE(rep.all_pass);
        EXPECT_TRUE(rep.dense);
        // Gram route agrees with the dense route
        LiftResult g = r;
        g.B.reset();
        const auto rg = verify_lifting(g, prob);
        EXPECT_NEAR(rg.max_residual, rep.max_residual, 1e-9);
        EXPECT_TRUE(rg.all_pass);
    }
}

TEST(LiftSubspace, PreconditionErrors)
{
    LiftProblem prob;
    prob.T = {scalar(0.5)};
    prob.A = Matrix::Constant(1, 1, 1.5);
    prob.J = {Matrix::Identity(1, 1)};
    prob.R = {Matrix::Identity(1, 1)};
    EXPECT_THROW(lift_subspace(prob), InvalidInput);
    prob.A = scalar(0.5);
    prob.J = {Matrix::Constant(1, 1, 2.0)};
    EXPECT_THROW(lift_subspace(prob), InvalidInput);
    prob.J = {Matrix::Identity(1, 1)};
    prob.R = {Matrix::Constant(1, 1, 1.5)};
    EXPECT_THROW(lift_subspace(prob), InvalidInput);
}

TEST(LiftCommutator, IdentityOnSameTuple)
{
    auto rng = rnd::stream(26, 0);
    const auto T = rnd::row_contraction(rng, 2, 2);
    const auto res = lift_commutator(T, T, Matrix::Identity(2, 2), 8);
    EXPECT_NEAR(res.diff_norm, 0.0, 1e-15);
    EXPECT_NEAR(res.rhs_direct, 0.0, 1e-7);
    for (double v : res.commutator_residuals)
        EXPECT_LT(v, 1e-8);
    EXPECT_TRUE(verify_lifting(res.lift, res.problem).all_pass);
    // B^*|H = A^*: the top block is A extended by zero
    EXPECT_EQ(res.lift.A.leftCols(2), Matrix::Identity(2, 2));
}

TEST(LiftCommutator, ZeroA)
{
    auto rng = rnd::stream(27, 0);
    const auto res = lift_commutator(rnd::row_contraction(rng, 2, 2), rnd::row_contraction(rng, 2, 1),
                                     Matrix::Zero(2, 1), 8);
    EXPECT_LT(res.lift.norm_B, 1e-14);
}

TEST(LiftCommutator, RandomScalarY)
{
    auto rng = rnd::stream(28, 0);
    for (int t = 0; t < 10; ++t) {
        const auto T = rnd::row_contraction(rng, 2, 2);
        const auto Y = rnd::row_contraction(rng, 2, 1);
        const Matrix A = rnd::contraction(rng, 2, 1);
        const auto res = lift_commutator(T, Y, A, 12);
        for (double v : res.commutator_residuals)
            EXPECT_LE(v, res.rhs_direct + res.lift.tail_bound + 1e-8);
        const auto rep = verify_lifting(res.lift, res.problem);
        EXPECT_TRUE(rep.all_pass);
        EXPECT_LE(rep.ratio, std::sqrt(2.0) + 1e-6);
    }
}

TEST(LiftCommutator, SingleOperatorCase)
{
    auto rng = rnd::stream(29, 0);
    for (int t = 0; t < 10; ++t) {
        const auto res = lift_commutator(rnd::row_contraction(rng, 1, 3), rnd::row_contraction(rng, 1, 2),
                                         rnd::contraction(rng, 3, 2), 12);
        EXPECT_TRUE(verify_lifting(res.lift, res.problem).all_pass);
    }
}

TEST(LiftCommutator, ClassicalCommutantLifting)
{
    // Y_i = [[T_i, 0], [G_i, N_i]] and A = [c I, 0] give T_i A = A Y_i
    auto rng = rnd::stream(30, 0);
    const auto T = rnd::row_contraction(rng, 2, 2, 0.5);
    RowTuple Y;
    for (int i = 0; i < 2; ++i) {
        Matrix y = Matrix::Zero(4, 4);
        y.topLeftCorner(2, 2) = T[static_cast<std::size_t>(i)];
        y.bottomRows(2) = 0.3 * rnd::contraction(rng, 2, 4);
        Y.push_back(y);
    }
    ASSERT_TRUE(is_row_contraction(Y));
    Matrix A = Matrix::Zero(2, 4);
    A.leftCols(2) = 0.9 * Matrix::Identity(2, 2);
    CommutatorOptions opt;
    opt.equal_norm = true;
    const auto res = lift_commutator(T, Y, A, 8, opt);
    EXPECT_TRUE(res.lift.exact_regime);
    for (double v : res.commutator_residuals)
        EXPECT_LT(v, 1e-8);
    EXPECT_NEAR(res.lift.norm_B, 0.9, 1e-8);
    EXPECT_TRUE(verify_lifting(res.lift, res.problem).all_pass);
}

TEST(LiftIntertwining, ZeroAndEqualityMode)
{
    auto rng = rnd::stream(31, 0);
    // subspace data with exact intertwining, run through both entry points
    const int n = 1;
    const auto T = rnd::row_contraction(rng, n, 2);
    // X = C^2 (+) C^2; X_1 = second copy, R_1 = first-copy inclusion,
    // A = [A0, T_1 A0] gives T_1 A R_1 = T_1 A0 = A J_1
    const Matrix A0 = rnd::contraction(rng, 2, 2, 1.0);
    Matrix A(2, 4);
    A.leftCols(2) = A0;
    A.rightCols(2) = T[0] * A0;
    Matrix J = Matrix::Zero(4, 2), R = Matrix::Zero(4, 2);
    J.bottomRows(2) = Matrix::Identity(2, 2);
    R.topRows(2) = Matrix::Identity(2, 2);
    LiftProblem prob;
    prob.T = T;
    prob.A = A;
    prob.J = {J};
    prob.R = {R};
    prob.degree = 8;
    LiftOptions lo;
    lo.normalize = true;
    const auto direct = lift_subspace(prob, lo);
    const auto via = lift_intertwining(T, A, {R}, {J}, 8);
    ASSERT_TRUE(direct.B && via.B);
    EXPECT_LT((*direct.B - *via.B).cwiseAbs().maxCoeff(), 1e-8);
    EXPECT_NEAR(via.norm_B, op_norm(A), 1e-10);
    for (double v : via.pair_residuals)
        EXPECT_LT(v, 1e-8);
    EXPECT_TRUE(verify_lifting(via, intertwining_problem(T, A, {R}, {J}, 8)).all_pass);

    const auto zero = lift_intertwining(T, Matrix::Zero(2, 4), {R}, {J}, 8);
    ASSERT_TRUE(zero.B.has_value());
    EXPECT_LT(zero.B->cwiseAbs().maxCoeff(), 1e-14);
}

TEST(LiftIntertwining, Preconditions)
{
    const RowTuple T{scalar(0.5)};
    // C^*C <= Q^*Q fails
    EXPECT_THROW(lift_intertwining(T, scalar(0.0), {scalar(2.0)}, {scalar(1.0)}, 4), InvalidInput);
    // intertwining fails
    EXPECT_THROW(lift_intertwining(T, scalar(1.0), {scalar(1.0)}, {scalar(1.0)}, 4), InvalidInput);
}

TEST(Verify, CorruptedBIsCaught)
{
    auto rng = rnd::stream(32, 0);
    const auto res = lift_commutator(rnd::row_contraction(rng, 2, 2), rnd::row_contraction(rng, 2, 1),
                                     rnd::contraction(rng, 2, 1), 6);
    LiftResult bad = res.lift;
    ASSERT_TRUE(bad.B.has_value());
    (*bad.B)(bad.dilation.h + 1, 0) += 1.0;
    EXPECT_FALSE(verify_lifting(bad, res.problem).all_pass);
    LiftResult top = res.lift;
    (*top.B)(0, 0) += 1e-3;
    EXPECT_FALSE(verify_lifting(top, res.problem).all_pass);
}
