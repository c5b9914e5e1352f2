#ifndef FOCKLIFT_DILATION_HPP
#define FOCKLIFT_DILATION_HPP

//
// Minimal isometric dilation of a row contraction and the commutator
// lifting construction on top of it.
//
// K = H (+) F^2_{<=D} (x) DT, coordinates: first the h coordinates of H,
// then the Fock part in Fock-major order.
//
// Lifted operators B : X -> K are kept factored as
//   B x = A x (+) sum_a e_a (x) C Z_{rev(a)} DA x,
// with every norm of B and of the residuals evaluated in Gram form by
// recursions over Fock levels.  A dense copy of B is built when it fits.
//

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "focklift/fock.hpp"
#include "focklift/operators.hpp"

namespace focklift {

struct Dilation {
    RowTuple T;
    int n = 1;
    int degree = 0;
    Index h = 0;
    Index d = 0;                // dim of the defect space
    Matrix DT;                  // (I - T^*T)^{1/2}, nh x nh
    Matrix UT;                  // range basis of DT, nh x d
    std::vector<Matrix> Di;     // D_i h = U_T^* D_T (0,..,h,..,0), d x h

    FockBasis basis() const { return FockBasis(n, degree); }
    Index fock_size() const { return fock_dim(n, degree); }
    Index dim() const { return h + fock_size() * d; }
    // H plus the Fock degrees <= degree-1, where V is isometric
    Index interior_dim() const { return h + fock_dim_below(n, degree) * d; }

    Matrix embedding() const
    {
        Matrix E = Matrix::Zero(dim(), h);
        E.topRows(h).setIdentity();
        return E;
    }

    // V_i x, letter index i in 0..n-1, x with dim() rows
    Matrix apply(int i, const Matrix& x) const
    {
        check_rows(x);
        Matrix out = Matrix::Zero(x.rows(), x.cols());
        out.topRows(h) = T[static_cast<std::size_t>(i)] * x.topRows(h);
        if (d == 0)
            return out;
        out.middleRows(h, d) = Di[static_cast<std::size_t>(i)] * x.topRows(h);
        const FockBasis b = basis();
        for (int p = 0; p < degree; ++p) {
            const Index src = h + b.level_begin(p) * d;
            const Index dst = h + (b.level_begin(p + 1) + i * b.level_size(p)) * d;
            out.middleRows(dst, b.level_size(p) * d) += x.middleRows(src, b.level_size(p) * d);
        }
        return out;
    }

    Matrix apply_adjoint(int i, const Matrix& x) const
    {
        check_rows(x);
        Matrix out = Matrix::Zero(x.rows(), x.cols());
        out.topRows(h) = T[static_cast<std::size_t>(i)].adjoint() * x.topRows(h);
        if (d == 0)
            return out;
        out.topRows(h) += Di[static_cast<std::size_t>(i)].adjoint() * x.middleRows(h, d);
        const FockBasis b = basis();
        for (int p = 0; p < degree; ++p) {
            const Index dst = h + b.level_begin(p) * d;
            const Index src = h + (b.level_begin(p + 1) + i * b.level_size(p)) * d;
            out.middleRows(dst, b.level_size(p) * d) = x.middleRows(src, b.level_size(p) * d);
        }
        return out;
    }

    Matrix dense(int i) const { return apply(i, Matrix::Identity(dim(), dim())); }

private:
    void check_rows(const Matrix& x) const
    {
        if (x.rows() != dim())
            throw InvalidInput("dilation: vector has " + std::to_string(x.rows()) + " rows, expected " +
                               std::to_string(dim()));
    }
};

inline Dilation minimal_isometric_dilation(const RowTuple& T, int degree, double tol = default_psd_tol)
{
    check_tuple(T, true);
    detail::check_nd(static_cast<int>(T.size()), degree);
    if (!is_row_contraction(T, tol))
        throw InvalidInput("dilation: T is not a row contraction (row norm " + std::to_string(row_norm(T)) + ")");
    Dilation dil;
    dil.T = T;
    dil.n = static_cast<int>(T.size());
    dil.degree = degree;
    dil.h = T[0].rows();
    auto dp = defect(row_matrix(T), tol);
    dil.DT = dp.D;
    dil.UT = dp.range_basis;
    dil.d = dil.UT.cols();
    const Matrix UD = dil.UT.adjoint() * dil.DT;
    for (int i = 0; i < dil.n; ++i)
        dil.Di.push_back(UD.middleCols(i * dil.h, dil.h));
    return dil;
}

// dim span{V_a H : |a| <= D}; equals h + fock_dim(n, D-1) * d for the
// minimal dilation
inline Index reachable_dimension(const Dilation& dil)
{
    Matrix level = dil.embedding();
    std::vector<Matrix> blocks{level};
    Index cols = level.cols();
    for (int p = 1; p <= dil.degree; ++p) {
        Matrix next(dil.dim(), level.cols() * dil.n);
        for (int i = 0; i < dil.n; ++i)
            next.middleCols(i * level.cols(), level.cols()) = dil.apply(i, level);
        level = next;
        blocks.push_back(level);
        cols += level.cols();
    }
    Matrix all(dil.dim(), cols);
    Index c = 0;
    for (const auto& b : blocks) {
        all.middleCols(c, b.cols()) = b;
        c += b.cols();
    }
    return range_basis(all, 1e-9).cols();
}

// ---------------------------------------------------------------------------

struct LiftOptions {
    double tol = 1e-8;
    bool normalize = false;        // run on A/||A|| and rescale B
    bool force_exact = false;      // treat M as zero (intertwining input)
    Index dense_cap = 2'000'000;   // max entries of a materialized B
};

struct LiftProblem {
    RowTuple T;                    // on H
    Matrix A;                      // X -> H
    std::vector<Matrix> J;         // X_i -> X, orthonormal columns, mutually orthogonal
    std::vector<Matrix> R;         // X_i -> X, contractions
    int degree = 12;
    // optional second residual form V_i B F_i - B G_i
    std::vector<Matrix> pair_F, pair_G;
};

struct LiftResult {
    Dilation dilation;
    Matrix A;                      // caller's A
    double scale = 1.0;            // B = scale * (lift of A/scale)
    bool normalized = false;
    double m_norm = 0.0;           // ||M|| for the caller's A
    double gamma = 0.0;            // 2 ||M||
    double rhs = 0.0;              // sqrt(gamma)
    bool exact_regime = false;
    std::vector<double> residuals;       // ||V_i B R_i - B|X_i||
    std::vector<double> pair_residuals;  // ||V_i B F_i - B G_i||
    double tail_bound = 0.0;
    double norm_B = 0.0;           // norm of the truncated B
    double lambda_certificate = 0.0;     // lambda_max(sum_{|a|<=D} Z^* C^*C Z)
    double douglas_residual = 0.0;
    int douglas_clipped = 0;

    // factors, all for the normalized A
    Matrix DA;                     // d_A x x, U_A^* D_A
    Matrix UA;
    Matrix DMg;                    // D_{M,gamma}, empty in the exact regime
    Matrix C, E, F;
    std::vector<Matrix> Z;

    std::optional<Matrix> B;       // dense, caller scale, rows dilation.dim()

    double norm_interval_hi() const { return std::sqrt(norm_B * norm_B + tail_bound * tail_bound); }
};

namespace detail {

struct LiftGrams {
    Matrix below;      // sum_{|a|<=D-1} Z_a^* C^*C Z_a
    Matrix full;       // sum_{|a|<=D}
    Matrix tail;       // sum_{|b|=D+1} Z_b^* Z_b
};

inline LiftGrams lift_grams(const Matrix& C, const std::vector<Matrix>& Z, int D)
{
    const Index dA = C.cols();
    LiftGrams g;
    g.below = Matrix::Zero(dA, dA);
    g.full  = Matrix::Zero(dA, dA);
    if (dA == 0) {
        g.tail = g.full;
        return g;
    }
    Matrix Gk = C.adjoint() * C;
    Matrix Hk = Matrix::Identity(dA, dA);
    for (int k = 0; k <= D; ++k) {
        if (k < D)
            g.below += Gk;
        g.full += Gk;
        Gk = cp_dual(Z, Gk);
        Hk = cp_dual(Z, Hk);
    }
    g.tail = Hk;   // level D+1
    return g;
}

// Squared norm form of V_i B F - B G for the normalized factors.
inline Matrix residual_form(const LiftResult& r, const Matrix& An, int i, const Matrix& Fm, const Matrix& Gm,
                            const Matrix& below)
{
    const auto& dil = r.dilation;
    const std::size_t ui = static_cast<std::size_t>(i);
    Matrix r1 = dil.T[ui] * An * Fm - An * Gm;
    Matrix Q = r1.adjoint() * r1;
    if (r.DA.rows() == 0) {
        if (dil.d > 0) {
            Matrix r2 = dil.Di[ui] * An * Fm;
            Q += r2.adjoint() * r2;
        }
        return Q;
    }
    const Matrix u = r.DA * Fm;
    const Matrix v = r.DA * Gm;
    if (dil.d > 0) {
        Matrix r2 = dil.Di[ui] * An * Fm - r.C * v;
        Q += r2.adjoint() * r2;
    }
    const Matrix w = u - r.Z[ui] * v;
    Q += w.adjoint() * below * w;
    for (std::size_t j = 0; j < r.Z.size(); ++j) {
        if (j == ui)
            continue;
        const Matrix zj = r.Z[j] * v;
        Q += zj.adjoint() * below * zj;
    }
    return Q;
}

inline double form_norm(const Matrix& Q) { return std::sqrt(std::max(0.0, max_eigenvalue(Q))); }

// Z_{rev(a)} DA for every word a with |a| <= D, in basis order
inline std::vector<Matrix> lambda_blocks(const LiftResult& r)
{
    const FockBasis b = r.dilation.basis();
    std::vector<Matrix> K(static_cast<std::size_t>(b.dim()));
    K[0] = r.DA;
    const int n = r.dilation.n;
    for (Index q = 1; q < b.dim(); ++q) {
        const int p = b.length_of(q);
        const Index digits = q - b.level_begin(p);
        const Index parent = b.level_begin(p - 1) + digits / n;
        const int j = static_cast<int>(digits % n);
        K[static_cast<std::size_t>(q)] = r.Z[static_cast<std::size_t>(j)] * K[static_cast<std::size_t>(parent)];
    }
    return K;
}

inline Matrix materialize_B(const LiftResult& r)
{
    const auto& dil = r.dilation;
    const Index x = r.A.cols();
    Matrix B = Matrix::Zero(dil.dim(), x);
    B.topRows(dil.h) = r.A;
    if (dil.d == 0 || r.DA.rows() == 0)
        return B;
    const auto K = lambda_blocks(r);
    for (std::size_t q = 0; q < K.size(); ++q)
        B.middleRows(dil.h + static_cast<Index>(q) * dil.d, dil.d) = r.scale * (r.C * K[q]);
    return B;
}

} // namespace detail

inline LiftResult lift_subspace(const LiftProblem& prob, const LiftOptions& opt = {})
{
    check_tuple(prob.T, true);
    const int n = static_cast<int>(prob.T.size());
    const Index h = prob.T[0].rows();
    if (prob.A.rows() != h)
        throw InvalidInput("lift: A must map into H (rows " + std::to_string(h) + ")");
    if (prob.J.size() != static_cast<std::size_t>(n) || prob.R.size() != static_cast<std::size_t>(n))
        throw InvalidInput("lift: need one subspace embedding and one R_i per letter");
    const Index x = prob.A.cols();
    std::vector<Index> xi;
    Index xsum = 0;
    for (int i = 0; i < n; ++i) {
        const auto& J = prob.J[static_cast<std::size_t>(i)];
        const auto& R = prob.R[static_cast<std::size_t>(i)];
        if (J.rows() != x || R.rows() != x || R.cols() != J.cols())
            throw InvalidInput("lift: J_" + std::to_string(i + 1) + " / R_" + std::to_string(i + 1) +
                               " have inconsistent shapes");
        if (op_norm(R) > 1.0 + opt.tol)
            throw InvalidInput("lift: R_" + std::to_string(i + 1) + " is not a contraction");
        xi.push_back(J.cols());
        xsum += J.cols();
    }
    {
        Matrix Jall(x, xsum);
        Index c = 0;
        for (const auto& J : prob.J) {
            Jall.middleCols(c, J.cols()) = J;
            c += J.cols();
        }
        const double err = xsum ? (Jall.adjoint() * Jall - Matrix::Identity(xsum, xsum)).cwiseAbs().maxCoeff() : 0.0;
        if (err > 1e-8)
            throw InvalidInput("lift: subspace embeddings are not orthonormal and mutually orthogonal (error " +
                               std::to_string(err) + ")");
    }
    const double normA = op_norm(prob.A);
    if (!opt.normalize && normA > 1.0 + opt.tol)
        throw InvalidInput("lift: A is not a contraction (norm " + std::to_string(normA) + ")");

    LiftResult r;
    r.dilation = minimal_isometric_dilation(prob.T, prob.degree);
    const auto& dil = r.dilation;
    r.A = prob.A;
    r.normalized = opt.normalize && normA > 0.0;
    r.scale = r.normalized ? normA : 1.0;
    const Matrix An = prob.A / r.scale;

    // M = [T_i A R_i - A|X_i]
    Matrix M(h, xsum);
    {
        Index c = 0;
        for (int i = 0; i < n; ++i) {
            const std::size_t ui = static_cast<std::size_t>(i);
            M.middleCols(c, xi[ui]) = prob.T[ui] * An * prob.R[ui] - An * prob.J[ui];
            c += xi[ui];
        }
    }
    const double mn = op_norm(M);
    r.exact_regime = opt.force_exact || mn <= 1e-13 * (1.0 + op_norm(An));
    const double gamma_n = r.exact_regime ? 0.0 : 2.0 * mn;
    r.m_norm = r.scale * mn;
    r.gamma = 2.0 * r.m_norm;
    r.rhs = std::sqrt(r.gamma);
    if (!r.exact_regime)
        r.DMg = psd_sqrt(gamma_n * Matrix::Identity(xsum, xsum) - M.adjoint() * M);

    auto dA = defect(An, 3.0 * opt.tol);
    r.UA = dA.range_basis;
    r.DA = r.UA.adjoint() * dA.D;
    const Index da = r.DA.rows();
    const Index dt = dil.d;

    // Douglas system L P = Q
    const Index prow = da + (r.exact_regime ? 0 : xsum);
    Matrix P = Matrix::Zero(prow, xsum);
    Matrix Q = Matrix::Zero(dt + n * da, xsum);
    {
        Index c = 0;
        for (int i = 0; i < n; ++i) {
            const std::size_t ui = static_cast<std::size_t>(i);
            P.block(0, c, da, xi[ui]) = r.DA * prob.J[ui];
            if (dt)
                Q.block(0, c, dt, xi[ui]) = dil.Di[ui] * An * prob.R[ui];
            Q.block(dt + i * da, c, da, xi[ui]) = r.DA * prob.R[ui];
            c += xi[ui];
        }
        if (!r.exact_regime)
            P.bottomRows(xsum) = r.DMg;
    }
    auto dg = douglas_solve(P, Q, std::max(opt.tol, 1e-8));
    r.douglas_residual = dg.residual;
    r.douglas_clipped = dg.clipped;
    const Matrix& L = dg.L;
    r.C = L.block(0, 0, dt, da);
    r.E = L.block(0, da, dt, prow - da);
    r.F = L.block(dt, da, n * da, prow - da);
    for (int i = 0; i < n; ++i)
        r.Z.push_back(L.block(dt + i * da, 0, da, da));

    const auto g = detail::lift_grams(r.C, r.Z, prob.degree);
    r.lambda_certificate = max_eigenvalue(g.full);
    const double bn2 = max_eigenvalue(An.adjoint() * An + r.DA.adjoint() * g.full * r.DA);
    r.norm_B = r.scale * std::sqrt(std::max(0.0, bn2));
    r.tail_bound = r.scale * (da ? detail::form_norm(r.DA.adjoint() * g.tail * r.DA) : 0.0);

    for (int i = 0; i < n; ++i) {
        const std::size_t ui = static_cast<std::size_t>(i);
        r.residuals.push_back(
            r.scale * detail::form_norm(detail::residual_form(r, An, i, prob.R[ui], prob.J[ui], g.below)));
    }
    if (!prob.pair_F.empty()) {
        if (prob.pair_F.size() != static_cast<std::size_t>(n) || prob.pair_G.size() != static_cast<std::size_t>(n))
            throw InvalidInput("lift: residual pairs need one entry per letter");
        for (int i = 0; i < n; ++i) {
            const std::size_t ui = static_cast<std::size_t>(i);
            r.pair_residuals.push_back(
                r.scale *
                detail::form_norm(detail::residual_form(r, An, i, prob.pair_F[ui], prob.pair_G[ui], g.below)));
        }
    }

    if (dil.dim() * x <= opt.dense_cap)
        r.B = detail::materialize_B(r);
    return r;
}

// ---------------------------------------------------------------------------

struct CommutatorOptions {
    int y_degree = -1;             // truncation of the dilation of Y; -1 = automatic
    Index y_dim_cap = 64;
    bool equal_norm = false;       // run on A/||A||, so that ||B|| = ||A||
    LiftOptions lift{};
};

struct CommutatorResult {
    LiftResult lift;
    LiftProblem problem;
    Dilation W;                    // dilation of Y
    int y_degree = 0;
    Index interior = 0;            // dim of X_{<y_degree}
    double rhs_direct = 0.0;       // sqrt(2) * ||[T_i A - A Y_i]||^{1/2}
    double diff_norm = 0.0;        // ||[T_i A - A Y_i]||
    std::vector<double> commutator_residuals;   // ||(V_i B - B W_i)|X_{<y_degree}||
};

inline int auto_y_degree(const RowTuple& Y, int D, Index cap)
{
    const auto dp = defect(row_matrix(Y));
    const Index y = Y[0].rows();
    const Index d = dp.range_basis.cols();
    const int n = static_cast<int>(Y.size());
    int best = 1;
    for (int k = 1; k <= D; ++k)
        if (y + fock_dim(n, k) * d <= cap)
            best = k;
    return best;
}

inline CommutatorResult lift_commutator(const RowTuple& T, const RowTuple& Y, const Matrix& A, int D,
                                        const CommutatorOptions& opt = {})
{
    check_tuple(T, true);
    check_tuple(Y, true);
    if (T.size() != Y.size())
        throw InvalidInput("lift_commutator: T and Y need the same number of letters");
    if (A.rows() != T[0].rows() || A.cols() != Y[0].rows())
        throw InvalidInput("lift_commutator: A must map the Y space into the T space");
    if (!is_row_contraction(T))
        throw InvalidInput("lift_commutator: T is not a row contraction");
    if (!is_row_contraction(Y))
        throw InvalidInput("lift_commutator: Y is not a row contraction");
    const double normA = op_norm(A);
    if (!opt.equal_norm && normA > 1.0 + opt.lift.tol)
        throw InvalidInput("lift_commutator: A is not a contraction (norm " + std::to_string(normA) + ")");

    CommutatorResult out;
    out.y_degree = opt.y_degree >= 0 ? opt.y_degree : auto_y_degree(Y, D, opt.y_dim_cap);
    if (out.y_degree < 1)
        throw InvalidInput("lift_commutator: y_degree must be >= 1");
    out.W = minimal_isometric_dilation(Y, out.y_degree);
    const Index xk = out.W.dim();
    out.interior = out.W.interior_dim();
    const int n = static_cast<int>(T.size());

    Matrix diff(T[0].rows(), A.cols() * n);
    for (int i = 0; i < n; ++i)
        diff.middleCols(i * A.cols(), A.cols()) = T[static_cast<std::size_t>(i)] * A - A * Y[static_cast<std::size_t>(i)];
    out.diff_norm = op_norm(diff);
    out.rhs_direct = std::sqrt(2.0) * std::sqrt(out.diff_norm);

    LiftProblem prob;
    prob.T = T;
    prob.degree = D;
    prob.A = Matrix::Zero(A.rows(), xk);
    prob.A.leftCols(A.cols()) = A;
    // X_i = range W_i = W_i X_{<y_degree}, where W_i is isometric; then
    // R_i = W_i^* J_i is the inclusion of X_{<y_degree}
    const Matrix inc = Matrix::Identity(xk, out.interior);
    for (int i = 0; i < n; ++i) {
        Matrix Ji = out.W.apply(i, inc);
        prob.J.push_back(Ji);
        prob.R.push_back(inc);
        prob.pair_F.push_back(inc);
        prob.pair_G.push_back(Ji);
    }
    LiftOptions lo = opt.lift;
    lo.normalize = opt.equal_norm;
    out.lift = lift_subspace(prob, lo);
    out.problem = std::move(prob);
    out.commutator_residuals = out.lift.pair_residuals;
    return out;
}

// ---------------------------------------------------------------------------

// Validates the intertwining data and turns it into a subspace problem:
// X_i = range Q_i, C_i = R_i Q_i.
inline LiftProblem intertwining_problem(const RowTuple& T, const Matrix& A, const std::vector<Matrix>& Cs,
                                        const std::vector<Matrix>& Qs, int D, const LiftOptions& opt = {})
{
    check_tuple(T, true);
    const int n = static_cast<int>(T.size());
    if (Cs.size() != static_cast<std::size_t>(n) || Qs.size() != static_cast<std::size_t>(n))
        throw InvalidInput("lift_intertwining: need one C_i and one Q_i per letter");
    if (A.rows() != T[0].rows())
        throw InvalidInput("lift_intertwining: A must map into H");
    const Index x = A.cols();
    const double normA = op_norm(A);
    for (int i = 0; i < n; ++i) {
        const auto& C = Cs[static_cast<std::size_t>(i)];
        const auto& Q = Qs[static_cast<std::size_t>(i)];
        const std::string tag = std::to_string(i + 1);
        if (C.rows() != x || Q.rows() != x || C.cols() != Q.cols())
            throw InvalidInput("lift_intertwining: C_" + tag + " / Q_" + tag + " have inconsistent shapes");
        const Matrix gap = Q.adjoint() * Q - C.adjoint() * C;
        if (gap.rows() && min_eigenvalue(gap) < -opt.tol)
            throw InvalidInput("lift_intertwining: C_" + tag + "^*C_" + tag + " <= Q_" + tag + "^*Q_" + tag +
                               " fails (min eigenvalue " + std::to_string(min_eigenvalue(gap)) + ")");
        for (int j = 0; j < i; ++j) {
            const double cross = op_norm(Qs[static_cast<std::size_t>(j)].adjoint() * Q);
            if (cross > opt.tol)
                throw InvalidInput("lift_intertwining: ranges of Q_" + std::to_string(j + 1) + " and Q_" + tag +
                                   " are not orthogonal (" + std::to_string(cross) + ")");
        }
        const double res = op_norm(T[static_cast<std::size_t>(i)] * A * C - A * Q);
        if (res > opt.tol * std::max(1.0, normA))
            throw InvalidInput("lift_intertwining: T_" + tag + " A C_" + tag + " = A Q_" + tag +
                               " violated, residual " + std::to_string(res));
    }

    LiftProblem prob;
    prob.T = T;
    prob.A = A;
    prob.degree = D;
    for (int i = 0; i < n; ++i) {
        const auto& C = Cs[static_cast<std::size_t>(i)];
        const auto& Q = Qs[static_cast<std::size_t>(i)];
        // C_i = R_i Q_i with R_i a contraction on range Q_i
        auto dg = douglas_solve(Q, C, std::max(opt.tol, 1e-8));
        Matrix J = range_basis(Q, 1e-10);
        prob.J.push_back(J);
        prob.R.push_back(dg.L * J);
        prob.pair_F.push_back(C);
        prob.pair_G.push_back(Q);
    }
    return prob;
}

inline LiftResult lift_intertwining(const LiftProblem& prob, const LiftOptions& opt = {})
{
    LiftOptions lo = opt;
    lo.normalize = true;
    lo.force_exact = true;
    return lift_subspace(prob, lo);
}

inline LiftResult lift_intertwining(const RowTuple& T, const Matrix& A, const std::vector<Matrix>& Cs,
                                    const std::vector<Matrix>& Qs, int D, const LiftOptions& opt = {})
{
    return lift_intertwining(intertwining_problem(T, A, Cs, Qs, D, opt), opt);
}

// ---------------------------------------------------------------------------

struct Check {
    std::string name;
    bool pass = false;
    double value = 0.0;
    double bound = 0.0;
};

struct VerificationReport {
    std::vector<Check> checks;
    bool all_pass = true;
    bool dense = false;
    double max_residual = 0.0;
    double max_pair_residual = 0.0;
    double ratio = 0.0;            // max residual / ||M||^{1/2}
    bool degenerate = false;       // ||M|| = 0, ratio 0/0

    void add(std::string name, bool pass, double value, double bound)
    {
        checks.push_back({std::move(name), pass, value, bound});
        all_pass = all_pass && pass;
    }
};

// Recomputes every certificate of a lifting from scratch: from the dense B
// when present (so corruption of B is caught), otherwise from the factors.
inline VerificationReport verify_lifting(const LiftResult& r, const LiftProblem& prob, double tol = 1e-8)
{
    VerificationReport rep;
    const auto& dil = r.dilation;
    const int n = dil.n;
    const double normA = op_norm(prob.A);

    // rhs recomputed from the inputs
    Index xsum = 0;
    for (const auto& J : prob.J)
        xsum += J.cols();
    Matrix M(prob.A.rows(), xsum);
    {
        Index c = 0;
        for (int i = 0; i < n; ++i) {
            const std::size_t ui = static_cast<std::size_t>(i);
            M.middleCols(c, prob.J[ui].cols()) = prob.T[ui] * prob.A * prob.R[ui] - prob.A * prob.J[ui];
            c += prob.J[ui].cols();
        }
    }
    const double mn = op_norm(M);
    const double rhs = std::sqrt(2.0 * mn);

    const auto g = detail::lift_grams(r.C, r.Z, dil.degree);
    const double tail = r.scale * (r.DA.rows() ? detail::form_norm(r.DA.adjoint() * g.tail * r.DA) : 0.0);
    const double bound_B = r.normalized ? std::max(1.0, normA) : 1.0;

    std::vector<double> res, pres;
    double normB = 0.0;
    bool top_exact = true;
    if (r.B) {
        rep.dense = true;
        const Matrix& B = *r.B;
        normB = op_norm(B);
        top_exact = B.rows() == dil.dim() && B.topRows(dil.h) == prob.A;
        auto dense_res = [&](int i, const Matrix& Fm, const Matrix& Gm) {
            return op_norm(dil.apply(i, B * Fm) - B * Gm);
        };
        for (int i = 0; i < n; ++i)
            res.push_back(dense_res(i, prob.R[static_cast<std::size_t>(i)], prob.J[static_cast<std::size_t>(i)]));
        for (std::size_t i = 0; i < prob.pair_F.size(); ++i)
            pres.push_back(dense_res(static_cast<int>(i), prob.pair_F[i], prob.pair_G[i]));
    } else {
        const Matrix An = prob.A / r.scale;
        normB = r.scale * std::sqrt(std::max(0.0, max_eigenvalue(An.adjoint() * An + r.DA.adjoint() * g.full * r.DA)));
        for (int i = 0; i < n; ++i)
            res.push_back(r.scale * detail::form_norm(detail::residual_form(
                                        r, An, i, prob.R[static_cast<std::size_t>(i)],
                                        prob.J[static_cast<std::size_t>(i)], g.below)));
        for (std::size_t i = 0; i < prob.pair_F.size(); ++i)
            pres.push_back(r.scale * detail::form_norm(detail::residual_form(r, An, static_cast<int>(i),
                                                                             prob.pair_F[i], prob.pair_G[i], g.below)));
    }

    rep.add("contraction", normB <= bound_B + tol, normB, bound_B + tol);
    rep.add("top_block_equals_A", top_exact, top_exact ? 0.0 : 1.0, 0.0);
    for (int i = 0; i < n; ++i) {
        const double v = res[static_cast<std::size_t>(i)];
        rep.max_residual = std::max(rep.max_residual, v);
        rep.add("residual_" + std::to_string(i + 1), v <= rhs + tail + tol, v, rhs + tail + tol);
    }
    for (std::size_t i = 0; i < pres.size(); ++i) {
        const double v = pres[i];
        rep.max_pair_residual = std::max(rep.max_pair_residual, v);
        rep.add("pair_residual_" + std::to_string(i + 1), v <= rhs + tail + tol, v, rhs + tail + tol);
    }
    const double lam = max_eigenvalue(g.full + g.tail);
    rep.add("lambda_certificate", lam <= 1.0 + tol, lam, 1.0 + tol);
    if (r.exact_regime && r.normalized) {
        const double gap = std::abs(normB - normA);
        rep.add("norm_equality", gap <= tol, gap, tol);
    }
    if (mn <= 1e-13 * (1.0 + normA)) {
        rep.degenerate = true;
        rep.ratio = 0.0;
    } else {
        rep.ratio = std::max(rep.max_residual, rep.max_pair_residual) / std::sqrt(mn);
    }
    return rep;
}

} // namespace focklift

#endif // FOCKLIFT_DILATION_HPP
