#ifndef FOCKLIFT_OPERATORS_HPP
#define FOCKLIFT_OPERATORS_HPP

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "focklift/errors.hpp"
#include "focklift/fock.hpp"

namespace focklift {

// n blocks T_1..T_n, read as the row operator [T_1 ... T_n].
using RowTuple = std::vector<Matrix>;

inline constexpr double default_psd_tol   = 1e-10;
inline constexpr double pinv_cutoff       = 1e-12;
inline constexpr double psd_clamp_rel     = 1e-13;

inline void check_tuple(const RowTuple& T, bool square = false)
{
    if (T.empty())
        throw InvalidInput("row tuple must have at least one block");
    for (const auto& b : T) {
        if (b.rows() != T[0].rows() || b.cols() != T[0].cols())
            throw InvalidInput("row tuple blocks have mismatched shapes");
        if (square && b.rows() != b.cols())
            throw InvalidInput("row tuple blocks must be square");
    }
}

inline Matrix row_matrix(const RowTuple& T)
{
    check_tuple(T);
    const Index r = T[0].rows(), c = T[0].cols();
    Matrix out(r, c * static_cast<Index>(T.size()));
    for (std::size_t i = 0; i < T.size(); ++i)
        out.middleCols(static_cast<Index>(i) * c, c) = T[i];
    return out;
}

inline Matrix hermitian_part(const Matrix& G) { return 0.5 * (G + G.adjoint()); }

inline Eigen::VectorXd hermitian_eigenvalues(const Matrix& G)
{
    if (G.rows() == 0)
        return Eigen::VectorXd();
    Eigen::SelfAdjointEigenSolver<Matrix> es(hermitian_part(G), Eigen::EigenvaluesOnly);
    return es.eigenvalues();
}

inline double min_eigenvalue(const Matrix& G)
{
    auto ev = hermitian_eigenvalues(G);
    return ev.size() ? ev.minCoeff() : 0.0;
}

inline double max_eigenvalue(const Matrix& G)
{
    auto ev = hermitian_eigenvalues(G);
    return ev.size() ? ev.maxCoeff() : 0.0;
}

// Largest singular value.  Goes through the smaller Gram matrix when the
// shape is lopsided, which is the common case for tall lifted operators.
inline double op_norm(const Matrix& X)
{
    if (X.size() == 0)
        return 0.0;
    if (X.rows() > 4 * X.cols())
        return std::sqrt(std::max(0.0, max_eigenvalue(X.adjoint() * X)));
    if (X.cols() > 4 * X.rows())
        return std::sqrt(std::max(0.0, max_eigenvalue(X * X.adjoint())));
    Eigen::JacobiSVD<Matrix> svd(X);
    return svd.singularValues()(0);
}

inline double row_norm(const RowTuple& T) { return op_norm(row_matrix(T)); }

inline bool is_row_contraction(const RowTuple& T, double tol = default_psd_tol)
{
    check_tuple(T);
    Matrix G = Matrix::Identity(T[0].rows(), T[0].rows());
    for (const auto& b : T)
        G -= b * b.adjoint();
    return min_eigenvalue(G) >= -tol;
}

// Hermitian PSD square root.  Eigenvalues below psd_clamp_rel * max(1, lambda_max)
// are set to zero, so rounding noise in a singular G does not turn into
// sqrt(eps)-sized entries.
inline Matrix psd_sqrt(const Matrix& G, double tol = default_psd_tol)
{
    if (G.rows() != G.cols())
        throw InvalidInput("psd_sqrt needs a square matrix");
    if (G.rows() == 0)
        return G;
    Eigen::SelfAdjointEigenSolver<Matrix> es(hermitian_part(G));
    const Eigen::VectorXd& ev = es.eigenvalues();
    const double top   = std::max(std::abs(ev.minCoeff()), std::abs(ev.maxCoeff()));
    if (ev.minCoeff() < -tol * std::max(1.0, top))
        throw InvalidInput("psd_sqrt: matrix is not positive semidefinite (min eigenvalue " +
                           std::to_string(ev.minCoeff()) + ")");
    const double floor = psd_clamp_rel * std::max(1.0, ev.maxCoeff());
    Eigen::VectorXd s(ev.size());
    for (Index i = 0; i < ev.size(); ++i)
        s(i) = ev(i) > floor ? std::sqrt(ev(i)) : 0.0;
    return es.eigenvectors() * s.asDiagonal() * es.eigenvectors().adjoint();
}

// Orthonormal basis of the numerical range of X (singular values above
// rel_cutoff * sigma_max).  Returns an rows x 0 matrix for X = 0.
inline Matrix range_basis(const Matrix& X, double rel_cutoff = 1e-10)
{
    if (X.size() == 0)
        return Matrix(X.rows(), 0);
    Eigen::JacobiSVD<Matrix> svd(X, Eigen::ComputeThinU);
    const auto& s = svd.singularValues();
    if (s(0) <= 0.0)
        return Matrix(X.rows(), 0);
    Index r = 0;
    while (r < s.size() && s(r) > rel_cutoff * s(0))
        ++r;
    return svd.matrixU().leftCols(r);
}

struct DefectPair {
    Matrix D;
    Matrix range_basis;
};

// (I - X^*X)^{1/2} together with a basis of its range.
inline DefectPair defect(const Matrix& X, double tol = default_psd_tol)
{
    const Index c = X.cols();
    Matrix G = Matrix::Identity(c, c) - X.adjoint() * X;
    if (c > 0 && min_eigenvalue(G) < -tol)
        throw InvalidInput("defect: operator is not a contraction (norm " + std::to_string(op_norm(X)) + ")");
    DefectPair out;
    out.D = psd_sqrt(G, tol);
    // the clamp in psd_sqrt already removed the noise floor, so any positive
    // singular value belongs to the range
    out.range_basis = range_basis(out.D, 1e-7);
    return out;
}

inline DefectPair defect(const RowTuple& T, double tol = default_psd_tol) { return defect(row_matrix(T), tol); }

struct DouglasResult {
    Matrix L;
    double residual = 0.0;       // ||L P - Q||
    double majorization = 0.0;   // min eigenvalue of P^*P - Q^*Q
    int clipped = 0;             // singular values of L pulled back to 1
};

// Contraction L with L P = Q, given Q^*Q <= P^*P.  L = Q P^+ on range(P),
// zero on its complement.
inline DouglasResult douglas_solve(const Matrix& P, const Matrix& Q, double tol = 1e-8)
{
    if (P.cols() != Q.cols())
        throw InvalidInput("douglas_solve: P and Q must share the domain");
    DouglasResult out;
    out.L = Matrix::Zero(Q.rows(), P.rows());
    if (P.cols() == 0 || Q.rows() == 0 || P.rows() == 0) {
        if (P.rows() == 0 && Q.size() > 0 && Q.norm() > tol)
            throw NumericalFailure("douglas_solve: P = 0 but Q != 0");
        return out;
    }
    const Matrix gap = P.adjoint() * P - Q.adjoint() * Q;
    out.majorization = min_eigenvalue(gap);
    if (out.majorization < -tol * std::max(1.0, op_norm(P) * op_norm(P)))
        throw NumericalFailure("douglas_solve: majorization Q^*Q <= P^*P fails (min eigenvalue " +
                               std::to_string(out.majorization) + ")");

    Eigen::JacobiSVD<Matrix> svd(P, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& s = svd.singularValues();
    if (s(0) > 0.0) {
        Index r = 0;
        while (r < s.size() && s(r) > pinv_cutoff * s(0))
            ++r;
        Eigen::VectorXd inv = s.head(r).cwiseInverse();
        out.L = Q * svd.matrixV().leftCols(r) * inv.asDiagonal() * svd.matrixU().leftCols(r).adjoint();
    }

    Eigen::JacobiSVD<Matrix> ls(out.L, Eigen::ComputeThinU | Eigen::ComputeThinV);
    Eigen::VectorXd sv = ls.singularValues();
    for (Index i = 0; i < sv.size(); ++i)
        if (sv(i) > 1.0) {
            sv(i) = 1.0;
            ++out.clipped;
        }
    if (out.clipped)
        out.L = ls.matrixU() * sv.asDiagonal() * ls.matrixV().adjoint();
    out.residual = op_norm(out.L * P - Q);
    return out;
}

// X -> sum_i Z_i X Z_i^*
inline Matrix cp_map(const RowTuple& Z, const Matrix& X)
{
    Matrix out = Matrix::Zero(Z[0].rows(), Z[0].rows());
    for (const auto& z : Z)
        out.noalias() += z * X * z.adjoint();
    return out;
}

// X -> sum_i Z_i^* X Z_i
inline Matrix cp_dual(const RowTuple& Z, const Matrix& X)
{
    Matrix out = Matrix::Zero(Z[0].cols(), Z[0].cols());
    for (const auto& z : Z)
        out.noalias() += z.adjoint() * X * z;
    return out;
}

struct SpectralRadiusReport {
    double value = 0.0;
    int best_k = 0;
    std::vector<double> phi;        // phi[k-1] = || sum_{|a|=k} Z_a Z_a^* ||
    std::vector<double> estimates;  // phi_k^{1/2k}
};

// inf_k || sum_{|a|=k} Z_a Z_a^* ||^{1/2k}, with Phi^k(I) computed by the
// completely positive recursion.
inline SpectralRadiusReport spectral_radius(const RowTuple& Z, int max_k = 64, double tol = 0.0)
{
    check_tuple(Z, true);
    if (max_k < 1)
        throw InvalidInput("spectral_radius: max_k must be >= 1");
    SpectralRadiusReport rep;
    rep.value = std::numeric_limits<double>::infinity();
    const Index d = Z[0].rows();
    Matrix X = Matrix::Identity(d, d);
    double log_scale = 0.0;
    for (int k = 1; k <= max_k; ++k) {
        X = cp_map(Z, X);
        const double nrm = max_eigenvalue(X);
        if (nrm <= 0.0) {
            rep.phi.push_back(0.0);
            rep.estimates.push_back(0.0);
            rep.value = 0.0;
            rep.best_k = k;
            break;
        }
        log_scale += std::log(nrm);
        X /= nrm;
        rep.phi.push_back(std::exp(log_scale));
        const double est = std::exp(log_scale / (2.0 * k));
        rep.estimates.push_back(est);
        if (est < rep.value) {
            rep.value = est;
            rep.best_k = k;
        }
        if (tol > 0.0 && k > 1 && std::abs(rep.estimates[static_cast<std::size_t>(k) - 2] - est) < tol)
            break;
    }
    return rep;
}

} // namespace focklift

#endif // FOCKLIFT_OPERATORS_HPP
