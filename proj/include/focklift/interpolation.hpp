#ifndef FOCKLIFT_INTERPOLATION_HPP
#define FOCKLIFT_INTERPOLATION_HPP

//
// Interpolation on Fock spaces through the lifting machinery:
// lifting characterization of compressions, Sarason distance,
// Schur-Caratheodory completion, tangential Nevanlinna-Pick with operator
// arguments, and the scalar Pick matrices on the ball.
//
// A co-invariant subspace H of F^2 (x) K' is handled through an isometry
// E : C^h -> F^2 (x) K' onto H, described by
//   E_0 = the degree-0 rows of E,   T_i = E^*(S_i (x) I)E,
// which determines every Fock component: [E y]_a = E_0 T_a^* y.
//

#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include <unsupported/Eigen/KroneckerProduct>

#include "focklift/dilation.hpp"
#include "focklift/fock.hpp"
#include "focklift/multianalytic.hpp"
#include "focklift/operators.hpp"

namespace focklift {

// ---------------------------------------------------------------------------
// grammians

struct GrammianResult {
    Matrix G;
    double residual = 0.0;     // ||G - (sum Z_i G Z_i^* + CC^*)||
    int iterations = 0;
};

inline void check_stable(const RowTuple& Z, const char* who)
{
    check_tuple(Z, true);
    const auto sr = spectral_radius(Z, 256);
    if (sr.value >= 1.0)
        throw InvalidInput(std::string(who) + ": spectral radius estimate " + std::to_string(sr.value) + " >= 1");
}

inline GrammianResult controllability_grammian(const RowTuple& Z, const Matrix& C, double tol = 1e-15,
                                               int max_iter = 100000)
{
    check_stable(Z, "controllability_grammian");
    if (C.rows() != Z[0].rows())
        throw InvalidInput("controllability_grammian: C must map into the tuple space");
    const Matrix CC = C * C.adjoint();
    GrammianResult r;
    r.G = CC;
    double prev = std::numeric_limits<double>::infinity();
    for (r.iterations = 1; r.iterations <= max_iter; ++r.iterations) {
        Matrix next = cp_map(Z, r.G) + CC;
        const double step = (next - r.G).cwiseAbs().maxCoeff();
        r.G = std::move(next);
        const double scale = 1.0 + r.G.cwiseAbs().maxCoeff();
        if (step <= tol * scale || (step >= prev && step <= 1e3 * tol * scale))
            break;
        prev = step;
    }
    if (r.iterations > max_iter)
        throw NumericalFailure("controllability_grammian: no convergence within the iteration cap");
    r.G = hermitian_part(r.G);
    r.residual = op_norm(r.G - (cp_map(Z, r.G) + CC));
    return r;
}

// sum_{p<=k} sum_{|a|=p} Z_a CC^* Z_a^*
inline Matrix k_grammian(const RowTuple& Z, const Matrix& C, int k)
{
    check_tuple(Z, true);
    if (k < 0)
        throw InvalidInput("k_grammian: k must be >= 0");
    if (C.rows() != Z[0].rows())
        throw InvalidInput("k_grammian: C must map into the tuple space");
    Matrix level = C * C.adjoint();
    Matrix sum = level;
    for (int p = 1; p <= k; ++p) {
        level = cp_map(Z, level);
        sum += level;
    }
    return hermitian_part(sum);
}

// ---------------------------------------------------------------------------
// the operators C_i, Q_i : P_{k-1} (x) K -> P_k (x) K

struct CQ {
    std::vector<Matrix> C;
    std::vector<Matrix> Q;
};

inline CQ cq_operators(int n, int k, Index factor)
{
    detail::check_nd(n, k);
    if (factor < 1)
        throw InvalidInput("cq_operators: factor must be >= 1");
    CQ out;
    const Index rows = fock_dim(n, k) * factor;
    const Index cols = fock_dim_below(n, k) * factor;
    const FockBasis b(n, k);
    for (int i = 1; i <= n; ++i) {
        Matrix C = Matrix::Zero(rows, cols);
        Matrix Q = Matrix::Zero(rows, cols);
        for (Index w = 0; w < fock_dim_below(n, k); ++w) {
            const Index p = b.prepend(i, w);
            for (Index f = 0; f < factor; ++f) {
                C(w * factor + f, w * factor + f) = 1.0;
                Q(p * factor + f, w * factor + f) = 1.0;
            }
        }
        out.C.push_back(std::move(C));
        out.Q.push_back(std::move(Q));
    }
    return out;
}

// ---------------------------------------------------------------------------
// co-invariant subspaces

struct SubspaceH {
    int n = 1;
    int degree = 0;       // ambient P_degree (x) K'
    Index factor = 1;     // dim K'
    Matrix basis;         // orthonormal columns
};

struct HRealization {
    int n = 1;
    Index factor = 1;     // dim K'
    Matrix E0;            // factor x h
    RowTuple T;           // compressed shifts, h x h
};

inline HRealization realize(const SubspaceH& H, double tol = 1e-10)
{
    const Index amb = fock_dim(H.n, H.degree) * H.factor;
    if (H.basis.rows() != amb)
        throw InvalidInput("subspace basis has " + std::to_string(H.basis.rows()) + " rows, ambient dimension is " +
                           std::to_string(amb));
    const Index h = H.basis.cols();
    if (h && (H.basis.adjoint() * H.basis - Matrix::Identity(h, h)).cwiseAbs().maxCoeff() > tol)
        throw InvalidInput("subspace basis is not orthonormal");
    HRealization r;
    r.n = H.n;
    r.factor = H.factor;
    r.E0 = H.basis.topRows(H.factor);
    for (int i = 1; i <= H.n; ++i) {
        const Matrix S = tensor_identity(creation_matrix(i, H.n, H.degree, Side::left), H.factor).matrix;
        const Matrix adj = S.adjoint() * H.basis;
        const double leak = h ? op_norm(adj - H.basis * (H.basis.adjoint() * adj)) : 0.0;
        if (leak > std::max(tol, 1e-8))
            throw InvalidInput("subspace is not invariant under S_" + std::to_string(i) + "^* (x) I (leak " +
                               std::to_string(leak) + ")");
        r.T.push_back(H.basis.adjoint() * S * H.basis);
    }
    return r;
}

// ---------------------------------------------------------------------------
// From a lifting B of A : P_k (x) K -> H to the symbol theta with
// M_theta|P_k = Phi B, where Phi identifies the minimal dilation of T with
// the restriction of S (x) I to the span of S_a H.
//
// The coefficient of e_b in theta(1 (x) h) is scale * E_0 s_b, where the
// state x_b = (s_b, v_b) follows x_{b g_j} = Acal_j x_b.

struct SymbolRealization {
    int n = 1;
    Index rows = 1;                // dim K'
    Index cols = 1;                // dim K
    double scale = 1.0;
    Matrix E0;
    RowTuple Acal;                 // state transitions
    Matrix x0;                     // initial states, (h + d_A) x cols
    Matrix weight0;                // quadratic form bounding ||S_b^* theta|| from the state
    Index h = 0;

    // theta(1 (x) .) at e_b for every word b with |b| <= D, in basis order
    std::vector<Matrix> components(int D) const
    {
        const FockBasis b(n, D);
        std::vector<Matrix> state(static_cast<std::size_t>(b.dim()));
        std::vector<Matrix> out(static_cast<std::size_t>(b.dim()));
        state[0] = x0;
        for (Index q = 0; q < b.dim(); ++q) {
            if (q > 0) {
                const int p = b.length_of(q);
                const Index digits = q - b.level_begin(p);
                const Index parent = b.level_begin(p - 1) + digits / n;
                state[static_cast<std::size_t>(q)] =
                    Acal[static_cast<std::size_t>(digits % n)] * state[static_cast<std::size_t>(parent)];
            }
            out[static_cast<std::size_t>(q)] = scale * E0 * state[static_cast<std::size_t>(q)].topRows(h);
        }
        return out;
    }

    // || sum_{|w| > D} theta_(w)^* theta_(w) ||^{1/2}
    double tail_norm(int D) const
    {
        Matrix W = weight0;
        for (int p = 0; p <= D; ++p)
            W = cp_dual(Acal, W);
        return scale * std::sqrt(std::max(0.0, max_eigenvalue(x0.adjoint() * W * x0)));
    }

    Symbol to_symbol(int D) const
    {
        Symbol s(n, rows, cols);
        const auto comp = components(D);
        const FockBasis b(n, D);
        for (Index q = 0; q < b.dim(); ++q) {
            const Matrix& m = comp[static_cast<std::size_t>(q)];
            if (m.cwiseAbs().maxCoeff() > 0.0)
                s.set(b.word(q).reversed(), m);
        }
        s.cutoff = D;
        s.tail_norm = tail_norm(D);
        return s;
    }

    // sum_a Y_a L A_(a), with A_(a) the component at e_a: the Stein
    // equation Gamma = L E_0 [I 0] + sum_j Y_j Gamma Acal_j
    Matrix controllability_value(const RowTuple& Y, const Matrix& L) const
    {
        const Index ny = Y[0].rows();
        const Index st = x0.rows();
        Matrix base = Matrix::Zero(ny, st);
        base.leftCols(h) = L * E0;
        const Index N = ny * st;
        Matrix Gamma;
        if (N <= 3000) {
            Matrix K = Matrix::Identity(N, N);
            for (std::size_t j = 0; j < Y.size(); ++j)
                K -= Eigen::kroneckerProduct(Acal[j].transpose(), Y[j]);
            Vector rhs = Eigen::Map<const Vector>(base.data(), N);
            Vector sol = K.partialPivLu().solve(rhs);
            Gamma = Eigen::Map<Matrix>(sol.data(), ny, st);
        } else {
            Gamma = base;
            for (int it = 0; it < 100000; ++it) {
                Matrix next = base;
                for (std::size_t j = 0; j < Y.size(); ++j)
                    next += Y[j] * Gamma * Acal[j];
                const double step = (next - Gamma).cwiseAbs().maxCoeff();
                Gamma = std::move(next);
                if (step <= 1e-15 * (1.0 + Gamma.cwiseAbs().maxCoeff()))
                    break;
            }
        }
        return scale * Gamma * x0;
    }
};

namespace detail {

inline SymbolRealization realize_lift(const HRealization& H, const LiftResult& r, Index kin, int gram_levels = 64)
{
    const auto& dil = r.dilation;
    const Index h = dil.h;
    const Index dA = r.DA.rows();
    const int n = dil.n;
    SymbolRealization s;
    s.n = n;
    s.rows = H.factor;
    s.cols = kin;
    s.scale = r.scale;
    s.E0 = H.E0;
    s.h = h;

    // Xhat = D_T^+ U_T C : defect coordinates -> (+)_i H
    Matrix Xhat = Matrix::Zero(n * h, dA);
    if (dil.d > 0 && dA > 0) {
        const Matrix core = dil.UT.adjoint() * dil.DT * dil.UT;
        Xhat = dil.UT * core.partialPivLu().solve(r.C);
    }
    const Matrix TX = row_matrix(dil.T) * Xhat;

    const Index st = h + dA;
    for (int j = 0; j < n; ++j) {
        const std::size_t uj = static_cast<std::size_t>(j);
        Matrix Aj = Matrix::Zero(st, st);
        Aj.topLeftCorner(h, h) = dil.T[uj].adjoint();
        if (dA) {
            Aj.topRightCorner(h, dA) = Xhat.middleRows(j * h, h) - TX * r.Z[uj];
            Aj.bottomRightCorner(dA, dA) = r.Z[uj];
        }
        s.Acal.push_back(std::move(Aj));
    }

    const Matrix An = r.A / r.scale;
    s.x0 = Matrix::Zero(st, kin);
    s.x0.topRows(h) = An.leftCols(kin);
    if (dA) {
        s.x0.bottomRows(dA) = r.DA.leftCols(kin);
        s.x0.topRows(h) -= TX * r.DA.leftCols(kin);
    }

    // ||S_b^* theta x||^2 = ||s + TX v||^2 + v^* G_inf v, and
    // G_inf <= G_{<=L} + sum_{|b|=L+1} Z_b^* Z_b
    Matrix Ginf = Matrix::Zero(dA, dA);
    if (dA) {
        const auto g = lift_grams(r.C, r.Z, gram_levels);
        Ginf = g.full + g.tail;
    }
    Matrix top = Matrix::Zero(h, st);
    top.leftCols(h).setIdentity();
    if (dA)
        top.rightCols(dA) = TX;
    s.weight0 = top.adjoint() * top;
    if (dA)
        s.weight0.bottomRightCorner(dA, dA) += Ginf;
    return s;
}

} // namespace detail

struct CharacterizationOptions {
    int cutoff = 8;             // degree up to which symbol coefficients are listed
    int lift_degree = 4;        // truncation of the dilation used for the lifting
    double tol = 1e-8;
};

struct Characterization {
    bool feasible = false;
    std::string reason;
    double norm_A = 0.0;
    std::vector<double> intertwining_residuals;   // ||T_i A C_i - A Q_i||
    int worst = 0;                                // letter (1-based) with the largest residual

    // present when a symbol was built
    std::optional<SymbolRealization> realization;
    std::optional<Symbol> theta;                  // cutoff symbol
    double pk_norm_lo = 0.0;                      // certified bounds on ||M_theta||_{P_k}
    double pk_norm_hi = 0.0;
    double reproduce_residual = -1.0;             // ||P_H M_theta|P_k - A||, when checkable
    std::optional<LiftResult> lift;
};

namespace detail {

inline void build_symbol(Characterization& out, const HRealization& H, const Matrix& Ap, int k, Index kin,
                         const CharacterizationOptions& opt)
{
    const auto cq = cq_operators(H.n, k, kin);
    LiftOptions lo;
    lo.tol = opt.tol;
    lo.dense_cap = 0;
    LiftResult r = lift_intertwining(H.T, Ap, cq.C, cq.Q, opt.lift_degree, lo);
    out.realization = realize_lift(H, r, kin);
    out.theta = out.realization->to_symbol(opt.cutoff);

    // ||M_theta|P_k|| = ||B||; ||B|| <= scale when [C; Z] is a contraction
    const Index dA = r.DA.rows();
    double cz = 0.0;
    if (dA) {
        Matrix CZ(r.C.rows() + H.n * dA, dA);
        CZ.topRows(r.C.rows()) = r.C;
        for (int i = 0; i < H.n; ++i)
            CZ.middleRows(r.C.rows() + i * dA, dA) = r.Z[static_cast<std::size_t>(i)];
        cz = op_norm(CZ);
    }
    out.pk_norm_lo = r.norm_B;
    double hi = r.norm_interval_hi();
    if (cz <= 1.0 + 1e-14 && op_norm(Ap / r.scale) <= 1.0 + 1e-14)
        hi = std::min(hi, r.scale * std::max(1.0, cz));
    out.pk_norm_hi = std::max(hi, out.pk_norm_lo);
    out.lift = std::move(r);
}

} // namespace detail

// Coordinates form: A' : P_k (x) K -> C^h with H given by its realization.
inline Characterization lifting_characterization(const HRealization& H, const Matrix& Ap, int k, Index kin,
                                                 const CharacterizationOptions& opt = {}, bool build_always = false)
{
    detail::check_nd(H.n, k);
    const Index h = H.E0.cols();
    if (Ap.rows() != h || Ap.cols() != fock_dim(H.n, k) * kin)
        throw InvalidInput("lifting_characterization: A has shape " + std::to_string(Ap.rows()) + "x" +
                           std::to_string(Ap.cols()) + ", expected " + std::to_string(h) + "x" +
                           std::to_string(fock_dim(H.n, k) * kin));
    Characterization out;
    out.norm_A = op_norm(Ap);
    const auto cq = cq_operators(H.n, k, kin);
    double worst = 0.0;
    for (int i = 0; i < H.n; ++i) {
        const std::size_t ui = static_cast<std::size_t>(i);
        const double res = k > 0 ? op_norm(H.T[ui] * Ap * cq.C[ui] - Ap * cq.Q[ui]) : 0.0;
        out.intertwining_residuals.push_back(res);
        if (res > worst) {
            worst = res;
            out.worst = i + 1;
        }
    }
    const bool intertwines = worst <= opt.tol * std::max(1.0, out.norm_A);
    out.feasible = intertwines && out.norm_A <= 1.0 + opt.tol;
    if (!intertwines)
        out.reason = "T_i A C_i = A Q_i fails for i = " + std::to_string(out.worst) + " (residual " +
                     std::to_string(worst) + ")";
    else if (!out.feasible)
        out.reason = "||A|| = " + std::to_string(out.norm_A) + " > 1";
    if (intertwines && (out.feasible || build_always))
        detail::build_symbol(out, H, Ap, k, kin, opt);
    return out;
}

// Ambient form: A : P_k (x) K -> P_D (x) K' with range in H.
inline Characterization lifting_characterization(const SubspaceH& H, const Matrix& A, int k, Index kin,
                                                 CharacterizationOptions opt = {}, bool build_always = false)
{
    const auto real = realize(H);
    if (A.rows() != H.basis.rows())
        throw InvalidInput("lifting_characterization: A must land in the ambient space of H");
    const Matrix Ap = H.basis.adjoint() * A;
    const double outside = op_norm(A - H.basis * Ap);
    if (outside > opt.tol * std::max(1.0, op_norm(A)))
        throw InvalidInput("lifting_characterization: A does not map into H (distance " + std::to_string(outside) +
                           ")");
    opt.cutoff = std::max(opt.cutoff, H.degree);
    auto out = lifting_characterization(real, Ap, k, kin, opt, build_always);
    if (out.theta) {
        Symbol head = *out.theta;
        head.tail_norm.reset();
        const Matrix M = symbol_to_matrix(head, k, H.degree, true).matrix;
        out.reproduce_residual = op_norm(H.basis.adjoint() * M - Ap);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Sarason

struct SarasonResult {
    double distance = 0.0;               // ||A|| = min_psi ||M_phi - M_theta M_psi||_{P_k}
    int degree = 0;
    Index h_dim = 0;
    std::optional<Symbol> psi;           // cutoff symbol
    std::optional<Symbol> f;             // phi - theta psi
    double achieved_lo = 0.0;            // bounds on ||M_f||_{P_k}
    double achieved_hi = 0.0;
    double reproduce_residual = -1.0;
};

inline Matrix complement_basis(const Matrix& R, Index ambient)
{
    if (R.cols() == 0)
        return Matrix::Identity(ambient, ambient);
    Eigen::JacobiSVD<Matrix> svd(R, Eigen::ComputeFullU);
    const auto& s = svd.singularValues();
    Index r = 0;
    while (r < s.size() && s(r) > 1e-10 * std::max(1.0, s(0)))
        ++r;
    return svd.matrixU().rightCols(ambient - r);
}

inline SarasonResult sarason_distance(const Symbol& phi, const Symbol& theta, int k, int D, bool want_psi = false,
                                      CharacterizationOptions opt = {})
{
    phi.validate();
    theta.validate();
    if (phi.n != theta.n || phi.rows != theta.rows)
        throw InvalidInput("sarason: phi and theta must share n and the output space");
    if (phi.is_cutoff() || theta.is_cutoff())
        throw InvalidInput("sarason: phi and theta must be polynomial symbols");
    const int need = k + phi.degree() + theta.degree();
    if (D < need)
        throw InvalidInput("sarason: degree " + std::to_string(D) + " is below k + deg phi + deg theta = " +
                           std::to_string(need));
    if (!is_inner(theta, D))
        throw InvalidInput("sarason: theta is not inner");
    const int n = phi.n;
    const Index amb = fock_dim(n, D) * phi.rows;

    SarasonResult out;
    out.degree = D;
    const Matrix Mt = symbol_to_matrix(theta, D, D, true).matrix;
    SubspaceH H{n, D, phi.rows, complement_basis(range_basis(Mt, 1e-10), amb)};
    out.h_dim = H.basis.cols();
    const Matrix Mp = symbol_to_matrix(phi, k, D).matrix;
    const Matrix A = H.basis * (H.basis.adjoint() * Mp);
    out.distance = op_norm(H.basis.adjoint() * Mp);
    if (!want_psi)
        return out;

    opt.cutoff = std::max(opt.cutoff, D + theta.degree());
    auto ch = lifting_characterization(H, A, k, phi.cols, opt, true);
    if (!ch.theta)
        throw NumericalFailure("sarason: lifting failed: " + ch.reason);
    const Symbol& f = *ch.theta;
    out.f = f;
    out.achieved_lo = ch.pk_norm_lo;
    out.achieved_hi = ch.pk_norm_hi;
    out.reproduce_residual = ch.reproduce_residual;

    // psi = M_theta^*(phi - f): psi_(v) = sum_w theta_(w)^* (phi - f)_(wv)
    const Symbol u = phi - f;
    const int cf = f.cutoff;
    const int cpsi = cf - theta.degree();
    Symbol psi(n, theta.cols, phi.cols);
    for (const auto& v : enumerate_words(n, cpsi)) {
        Matrix acc = Matrix::Zero(theta.cols, phi.cols);
        for (const auto& [w, tw] : theta.coeff)
            acc += tw.adjoint() * u.at(w.concat(v));
        if (acc.cwiseAbs().maxCoeff() > 0.0)
            psi.set(v, acc);
    }
    Matrix band = Matrix::Zero(phi.cols, phi.cols);
    for (const auto& [w, m] : u.coeff)
        if (w.length() > cpsi)
            band += m.adjoint() * m;
    psi.cutoff = cpsi;
    psi.tail_norm = std::sqrt(std::max(0.0, max_eigenvalue(band)) + std::pow(*f.tail_norm, 2));
    out.psi = std::move(psi);
    return out;
}

// ---------------------------------------------------------------------------
// Schur-Caratheodory

struct SchurResult {
    bool feasible = false;
    double min_norm = 0.0;          // ||A||
    int m = 0;
    Matrix A;                       // P_{P_m} Theta |P_k, ambient coordinates
    std::optional<Symbol> phi;      // completion
    double coefficient_residual = -1.0;
    double pk_norm_lo = 0.0;
    double pk_norm_hi = 0.0;
};

inline SchurResult schur_caratheodory(const Symbol& Theta, int k, bool want_completion = true,
                                      double tol = 1e-12, CharacterizationOptions opt = {})
{
    Theta.validate();
    if (Theta.is_cutoff())
        throw InvalidInput("schur: prescribed coefficients must be a polynomial symbol");
    detail::check_nd(Theta.n, k);
    const int n = Theta.n;
    SchurResult out;
    out.m = Theta.degree();
    for (const auto& [w, mm] : Theta.coeff)
        out.m = std::max(out.m, w.length());
    // A = P_{P_m} Theta | P_k; the columns of degree > m vanish, which is
    // the k > m branch of the criterion
    out.A = symbol_to_matrix(Theta, k, out.m, true).matrix;
    out.min_norm = op_norm(out.A);
    out.feasible = out.min_norm <= 1.0 + tol;
    if (!want_completion)
        return out;

    const Index amb = fock_dim(n, out.m) * Theta.rows;
    SubspaceH H{n, out.m, Theta.rows, Matrix::Identity(amb, amb)};
    opt.cutoff = std::max(opt.cutoff, out.m);
    auto ch = lifting_characterization(H, out.A, k, Theta.cols, opt, true);
    if (!ch.theta)
        throw NumericalFailure("schur: lifting failed: " + ch.reason);
    out.phi = ch.theta;
    out.pk_norm_lo = ch.pk_norm_lo;
    out.pk_norm_hi = ch.pk_norm_hi;
    double err = 0.0;
    for (const auto& w : enumerate_words(n, out.m))
        err = std::max(err, (out.phi->at(w) - Theta.at(w)).cwiseAbs().maxCoeff());
    out.coefficient_residual = err;
    return out;
}

// ---------------------------------------------------------------------------
// Nevanlinna-Pick with operator arguments

struct NPNode {
    RowTuple Z;    // on Y_j
    Matrix B;      // K -> Y_j
    Matrix C;      // H -> Y_j
};

struct NPData {
    int k = 0;
    std::vector<NPNode> nodes;

    int n() const { return static_cast<int>(nodes.at(0).Z.size()); }
    Index dim_K() const { return nodes.at(0).B.cols(); }
    Index dim_H() const { return nodes.at(0).C.cols(); }

    void validate() const
    {
        if (nodes.empty())
            throw InvalidInput("NP data needs at least one node");
        if (k < 0)
            throw InvalidInput("NP constraint level k must be >= 0");
        for (std::size_t j = 0; j < nodes.size(); ++j) {
            const auto& nd = nodes[j];
            const std::string tag = "node " + std::to_string(j + 1);
            check_tuple(nd.Z, true);
            if (static_cast<int>(nd.Z.size()) != n())
                throw InvalidInput(tag + ": letter count differs from node 1");
            const Index y = nd.Z[0].rows();
            if (nd.B.rows() != y || nd.C.rows() != y)
                throw InvalidInput(tag + ": B and C must map into the node space");
            if (nd.B.cols() != dim_K() || nd.C.cols() != dim_H())
                throw InvalidInput(tag + ": B and C domains must be shared across nodes");
            const auto sr = spectral_radius(nd.Z, 256);
            if (sr.value >= 1.0)
                throw InvalidInput(tag + ": spectral radius estimate " + std::to_string(sr.value) + " >= 1");
        }
    }
};

struct Stacked {
    RowTuple Y;
    Matrix B;
    Matrix C;
};

inline Stacked stack_nodes(const NPData& data)
{
    Index ny = 0;
    for (const auto& nd : data.nodes)
        ny += nd.Z[0].rows();
    const int n = data.n();
    Stacked s;
    s.Y.assign(static_cast<std::size_t>(n), Matrix::Zero(ny, ny));
    s.B = Matrix::Zero(ny, data.dim_K());
    s.C = Matrix::Zero(ny, data.dim_H());
    Index off = 0;
    for (const auto& nd : data.nodes) {
        const Index y = nd.Z[0].rows();
        for (int i = 0; i < n; ++i)
            s.Y[static_cast<std::size_t>(i)].block(off, off, y, y) = nd.Z[static_cast<std::size_t>(i)];
        s.B.middleRows(off, y) = nd.B;
        s.C.middleRows(off, y) = nd.C;
        off += y;
    }
    return s;
}

struct NPFeasibility {
    bool feasible = false;
    bool marginal = false;
    double min_eig = 0.0;
    double threshold = 0.0;       // feasibility band: min_eig >= -threshold
    Matrix lhs;                   // G_{Y,B}
    Matrix rhs;                   // G_{Y,C,k}
    double lyapunov_residual = 0.0;
};

inline NPFeasibility psd_verdict(const Matrix& lhs, const Matrix& rhs, double tol)
{
    NPFeasibility f;
    f.lhs = lhs;
    f.rhs = rhs;
    f.min_eig = min_eigenvalue(lhs - rhs);
    f.threshold = tol * (1.0 + op_norm(lhs));
    f.feasible = f.min_eig >= -f.threshold;
    f.marginal = std::abs(f.min_eig) <= f.threshold;
    return f;
}

inline NPFeasibility np_feasible(const NPData& data, double tol = 1e-9)
{
    data.validate();
    const auto s = stack_nodes(data);
    const auto g = controllability_grammian(s.Y, s.B);
    auto f = psd_verdict(g.G, k_grammian(s.Y, s.C, data.k), tol);
    f.lyapunov_residual = g.residual;
    return f;
}

// columns Y_a C for |a| <= k, Fock-major
inline Matrix k_controllability(const RowTuple& Y, const Matrix& C, int k)
{
    const int n = static_cast<int>(Y.size());
    const FockBasis b(n, k);
    const Index hc = C.cols();
    Matrix W(C.rows(), b.dim() * hc);
    std::vector<Matrix> Ya(static_cast<std::size_t>(b.dim()));
    Ya[0] = Matrix::Identity(C.rows(), C.rows());
    for (Index q = 1; q < b.dim(); ++q) {
        const int p = b.length_of(q);
        const Index digits = q - b.level_begin(p);
        Ya[static_cast<std::size_t>(q)] =
            Ya[static_cast<std::size_t>(b.level_begin(p - 1) + digits / n)] * Y[static_cast<std::size_t>(digits % n)];
    }
    for (Index q = 0; q < b.dim(); ++q)
        W.middleCols(q * hc, hc) = Ya[static_cast<std::size_t>(q)] * C;
    return W;
}

struct NPMinNorm {
    double value = 0.0;
    bool controllable = true;
    double condition = 1.0;
    bool fallback = false;
};

inline NPMinNorm np_min_norm(const NPData& data)
{
    data.validate();
    const auto s = stack_nodes(data);
    const Matrix G = controllability_grammian(s.Y, s.B).G;
    const Matrix Gk = k_grammian(s.Y, s.C, data.k);
    NPMinNorm r;
    const auto ev = hermitian_eigenvalues(G);
    const double top = ev.maxCoeff();
    r.condition = ev.minCoeff() > 0.0 ? top / ev.minCoeff() : std::numeric_limits<double>::infinity();
    if (top > 0.0 && r.condition <= 1e12) {
        Eigen::LLT<Matrix> llt(G);
        if (llt.info() == Eigen::Success) {
            const Matrix L = llt.matrixL();
            const Matrix X = L.triangularView<Eigen::Lower>().solve(Gk);
            const Matrix Y = L.triangularView<Eigen::Lower>().solve(X.adjoint());
            r.value = std::sqrt(std::max(0.0, max_eigenvalue(Y)));
            return r;
        }
    }
    // pseudo-inverse on range(G)
    r.controllable = false;
    r.fallback = true;
    Eigen::SelfAdjointEigenSolver<Matrix> es(hermitian_part(G));
    const auto& lam = es.eigenvalues();
    std::vector<Index> keep;
    for (Index i = 0; i < lam.size(); ++i)
        if (lam(i) > 1e-12 * std::max(top, 0.0))
            keep.push_back(i);
    Matrix U(G.rows(), static_cast<Index>(keep.size()));
    Eigen::VectorXd inv(static_cast<Index>(keep.size()));
    for (std::size_t c = 0; c < keep.size(); ++c) {
        U.col(static_cast<Index>(c)) = es.eigenvectors().col(keep[c]);
        inv(static_cast<Index>(c)) = 1.0 / std::sqrt(lam(keep[c]));
    }
    const Matrix P = U * U.adjoint();
    const Matrix Id = Matrix::Identity(G.rows(), G.rows());
    if (op_norm((Id - P) * Gk * (Id - P)) > 1e-10 * (1.0 + op_norm(Gk))) {
        r.value = std::numeric_limits<double>::infinity();
        return r;
    }
    const Matrix M = inv.asDiagonal() * U.adjoint() * Gk * U * inv.asDiagonal();
    r.value = std::sqrt(std::max(0.0, max_eigenvalue(M)));
    return r;
}

struct NPSolution {
    NPFeasibility feasibility;
    double min_norm = 0.0;
    std::optional<Symbol> phi;                 // cutoff symbol
    std::optional<SymbolRealization> realization;
    std::vector<double> constraint_residuals;  // sum_a Z_{j,a} B_j A_(a) - C_j
    std::vector<double> printed_residuals;     // sum_a Z_{j,rev a} B_j A_(a) - C_j, from the cutoff symbol
    std::vector<double> printed_bounds;        // certified tail of the printed evaluation
    std::vector<double> series_residuals;      // the constraint summed from the cutoff symbol
    std::vector<double> series_bounds;
    double pk_norm_lo = 0.0;
    double pk_norm_hi = 0.0;
};

inline NPSolution np_solve(const NPData& data, CharacterizationOptions opt = {}, double tol = 1e-9)
{
    NPSolution out;
    out.feasibility = np_feasible(data, tol);
    if (!out.feasibility.feasible)
        return out;
    const auto s = stack_nodes(data);
    const int n = data.n();
    const Matrix& G = out.feasibility.lhs;

    // coordinates of H' = closure of range W^*: E = W^* U L^{-1/2}
    Eigen::SelfAdjointEigenSolver<Matrix> es(G);
    const auto& lam = es.eigenvalues();
    const double top = lam.maxCoeff();
    std::vector<Index> keep;
    for (Index i = 0; i < lam.size(); ++i)
        if (lam(i) > 1e-12 * top)
            keep.push_back(i);
    const Index h = static_cast<Index>(keep.size());
    Matrix U(G.rows(), h);
    Eigen::VectorXd isq(h), sq(h);
    for (Index c = 0; c < h; ++c) {
        U.col(c) = es.eigenvectors().col(keep[static_cast<std::size_t>(c)]);
        sq(c) = std::sqrt(lam(keep[static_cast<std::size_t>(c)]));
        isq(c) = 1.0 / sq(c);
    }
    HRealization H;
    H.n = n;
    H.factor = data.dim_K();
    H.E0 = s.B.adjoint() * U * isq.asDiagonal();
    for (int i = 0; i < n; ++i)
        H.T.push_back(isq.asDiagonal() * U.adjoint() * s.Y[static_cast<std::size_t>(i)] * U * sq.asDiagonal());
    const Matrix Wk = k_controllability(s.Y, s.C, data.k);
    const Matrix Ap = isq.asDiagonal() * U.adjoint() * Wk;
    out.min_norm = op_norm(Ap);

    auto ch = lifting_characterization(H, Ap, data.k, data.dim_H(), opt, true);
    if (!ch.theta)
        throw NumericalFailure("np_solve: lifting failed: " + ch.reason);
    out.phi = ch.theta;
    out.realization = ch.realization;
    out.pk_norm_lo = ch.pk_norm_lo;
    out.pk_norm_hi = ch.pk_norm_hi;

    for (const auto& nd : data.nodes) {
        const Matrix val = ch.realization->controllability_value(nd.Z, nd.B);
        out.constraint_residuals.push_back(op_norm(val - nd.C));
        const auto ev = evaluate_at_tuple(*out.phi, nd.Z, 1e-12, Convention::printed, &nd.B);
        out.printed_residuals.push_back(op_norm(ev.value - nd.C));
        out.printed_bounds.push_back(ev.residual_bound);
        const auto cv = evaluate_at_tuple(*out.phi, nd.Z, 1e-12, Convention::controllability, &nd.B);
        out.series_residuals.push_back(op_norm(cv.value - nd.C));
        out.series_bounds.push_back(cv.residual_bound);
    }
    return out;
}

// ---------------------------------------------------------------------------
// scalar points in the ball

struct PickPair {
    Matrix lhs;
    Matrix rhs;
    NPFeasibility verdict;
    double threshold_scale = 0.0;   // largest t with (lhs, t^2 rhs) feasible
};

inline cplx ball_inner(const std::vector<cplx>& z, const std::vector<cplx>& w)
{
    cplx s = 0.0;
    for (std::size_t i = 0; i < z.size(); ++i)
        s += z[i] * std::conj(w[i]);
    return s;
}

inline void check_points(const std::vector<std::vector<cplx>>& pts)
{
    if (pts.empty())
        throw InvalidInput("need at least one point");
    const std::size_t n = pts[0].size();
    if (n == 0)
        throw InvalidInput("points need at least one coordinate");
    for (std::size_t j = 0; j < pts.size(); ++j) {
        if (pts[j].size() != n)
            throw InvalidInput("points have different dimensions");
        if (std::real(ball_inner(pts[j], pts[j])) >= 1.0)
            throw InvalidInput("point " + std::to_string(j + 1) + " is not in the open unit ball");
        for (std::size_t q = 0; q < j; ++q) {
            double d = 0.0;
            for (std::size_t i = 0; i < n; ++i)
                d += std::norm(pts[j][i] - pts[q][i]);
            if (d == 0.0)
                throw InvalidInput("points " + std::to_string(q + 1) + " and " + std::to_string(j + 1) +
                                   " coincide");
        }
    }
}

// Bs[j], Cs[j] are the 1 x dim K and 1 x dim H rows attached to point j.
inline PickPair scalar_pick_matrices(const std::vector<std::vector<cplx>>& pts, const std::vector<Matrix>& Bs,
                                     const std::vector<Matrix>& Cs, int k, double tol = 1e-9)
{
    check_points(pts);
    if (k < 0)
        throw InvalidInput("k must be >= 0");
    const std::size_t m = pts.size();
    if (Bs.size() != m || Cs.size() != m)
        throw InvalidInput("one B and one C per point");
    Index rb = 0, rc = 0;
    for (std::size_t j = 0; j < m; ++j) {
        if (j == 0) {
            rb = Bs[0].cols();
            rc = Cs[0].cols();
        }
        if (Bs[j].rows() != Cs[j].rows() || Bs[j].cols() != rb || Cs[j].cols() != rc)
            throw InvalidInput("B_j / C_j shapes are inconsistent");
    }
    std::vector<Index> off(m + 1, 0);
    for (std::size_t j = 0; j < m; ++j)
        off[j + 1] = off[j] + Bs[j].rows();
    const Index N = off[m];
    PickPair p;
    p.lhs = Matrix::Zero(N, N);
    p.rhs = Matrix::Zero(N, N);
    for (std::size_t j = 0; j < m; ++j)
        for (std::size_t q = 0; q < m; ++q) {
            const cplx ip = ball_inner(pts[j], pts[q]);
            const cplx ker = 1.0 / (1.0 - ip);
            const cplx trunc = (1.0 - std::pow(ip, k + 1)) * ker;
            p.lhs.block(off[j], off[q], Bs[j].rows(), Bs[q].rows()) = ker * Bs[j] * Bs[q].adjoint();
            p.rhs.block(off[j], off[q], Cs[j].rows(), Cs[q].rows()) = trunc * Cs[j] * Cs[q].adjoint();
        }
    p.verdict = psd_verdict(p.lhs, p.rhs, tol);
    // lhs >= t^2 rhs  <=>  t <= 1 / sqrt(lambda_max(lhs^{-1/2} rhs lhs^{-1/2}))
    Eigen::LLT<Matrix> llt(hermitian_part(p.lhs));
    if (llt.info() == Eigen::Success) {
        const Matrix L = llt.matrixL();
        const Matrix X = L.triangularView<Eigen::Lower>().solve(p.rhs);
        const Matrix Y = L.triangularView<Eigen::Lower>().solve(X.adjoint());
        const double lm = max_eigenvalue(Y);
        p.threshold_scale = lm > 0.0 ? 1.0 / std::sqrt(lm) : std::numeric_limits<double>::infinity();
    }
    return p;
}

inline PickPair scalar_pick_matrices(const std::vector<std::vector<cplx>>& pts, const std::vector<cplx>& values,
                                     int k, double tol = 1e-9)
{
    std::vector<Matrix> Bs, Cs;
    for (auto w : values) {
        Bs.push_back(Matrix::Ones(1, 1));
        Cs.push_back(Matrix::Constant(1, 1, w));
    }
    return scalar_pick_matrices(pts, Bs, Cs, k, tol);
}

// The same data as an operator-argument problem: Z_{j,i} = z_{j,i}.
inline NPData scalar_np_data(const std::vector<std::vector<cplx>>& pts, const std::vector<cplx>& values, int k)
{
    check_points(pts);
    if (values.size() != pts.size())
        throw InvalidInput("one value per point");
    NPData d;
    d.k = k;
    for (std::size_t j = 0; j < pts.size(); ++j) {
        NPNode nd;
        for (auto c : pts[j])
            nd.Z.push_back(Matrix::Constant(1, 1, c));
        nd.B = Matrix::Ones(1, 1);
        nd.C = Matrix::Constant(1, 1, values[j]);
        d.nodes.push_back(std::move(nd));
    }
    return d;
}

} // namespace focklift

#endif // FOCKLIFT_INTERPOLATION_HPP
