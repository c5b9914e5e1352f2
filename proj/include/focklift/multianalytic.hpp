#ifndef FOCKLIFT_MULTIANALYTIC_HPP
#define FOCKLIFT_MULTIANALYTIC_HPP

//
// Symbols theta : K -> F^2 (x) K' and their multi-analytic operators.
//
// Coefficients are stored by the word w of theta_(w), the convention in
//   <theta_(rev a) h, h'> = <M_theta (1 (x) h), e_a (x) h'>,
// so that M_theta (e_b (x) h) = sum_w e_{b rev(w)} (x) theta_(w) h and
// M_theta ~ sum_w R_w (x) theta_(w).
//

#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "focklift/fock.hpp"
#include "focklift/operators.hpp"

namespace focklift {

struct Symbol {
    int n = 1;
    Index rows = 1;                  // dim K'
    Index cols = 1;                  // dim K
    std::map<Word, Matrix> coeff;    // theta_(w)
    // Cutoff symbols: coefficients known for |w| <= cutoff, and
    // || sum_{|w| > cutoff} theta_(w)^* theta_(w) ||^{1/2} <= tail_norm.
    std::optional<double> tail_norm;
    int cutoff = -1;

    Symbol() = default;
    Symbol(int n_, Index rows_, Index cols_) : n(n_), rows(rows_), cols(cols_) {}

    static Symbol constant(int n, const Matrix& c)
    {
        Symbol s(n, c.rows(), c.cols());
        s.set(Word(), c);
        return s;
    }

    static Symbol monomial(int n, const Word& w, cplx value = 1.0)
    {
        Symbol s(n, 1, 1);
        s.set(w, Matrix::Constant(1, 1, value));
        return s;
    }

    bool is_cutoff() const { return tail_norm.has_value(); }

    void set(const Word& w, const Matrix& m)
    {
        w.validate(n);
        if (m.rows() != rows || m.cols() != cols)
            throw InvalidInput("symbol block for " + w.to_string() + " has shape " + std::to_string(m.rows()) + "x" +
                               std::to_string(m.cols()) + ", expected " + std::to_string(rows) + "x" +
                               std::to_string(cols));
        coeff[w] = m;
    }

    void add(const Word& w, const Matrix& m)
    {
        auto it = coeff.find(w);
        if (it == coeff.end())
            set(w, m);
        else
            it->second += m;
    }

    Matrix at(const Word& w) const
    {
        auto it = coeff.find(w);
        return it == coeff.end() ? Matrix::Zero(rows, cols) : it->second;
    }

    // largest |w| with a nonzero block; the cutoff for cutoff symbols
    int degree() const
    {
        if (is_cutoff())
            return cutoff;
        int d = 0;
        for (const auto& [w, m] : coeff)
            if (m.cwiseAbs().maxCoeff() > 0.0)
                d = std::max(d, w.length());
        return d;
    }

    void validate() const
    {
        if (n < 1 || rows < 1 || cols < 1)
            throw InvalidInput("symbol needs n >= 1 and nonempty blocks");
        for (const auto& [w, m] : coeff) {
            w.validate(n);
            if (m.rows() != rows || m.cols() != cols)
                throw InvalidInput("symbol blocks do not share a shape");
        }
        if (tail_norm && *tail_norm < 0.0)
            throw InvalidInput("symbol tail norm must be nonnegative");
    }
};

inline Symbol operator-(const Symbol& a, const Symbol& b)
{
    if (a.n != b.n || a.rows != b.rows || a.cols != b.cols)
        throw InvalidInput("symbol difference: shapes differ");
    Symbol out = a;
    for (const auto& [w, m] : b.coeff)
        out.add(w, -m);
    if (a.is_cutoff() || b.is_cutoff()) {
        out.cutoff = std::min(a.is_cutoff() ? a.cutoff : b.cutoff, b.is_cutoff() ? b.cutoff : a.cutoff);
        out.tail_norm = a.tail_norm.value_or(0.0) + b.tail_norm.value_or(0.0);
    }
    return out;
}

// theta * psi, the symbol of M_theta M_psi: (theta psi)_(u w) += theta_(u) psi_(w)
inline Symbol symbol_product(const Symbol& a, const Symbol& b)
{
    if (a.n != b.n || a.cols != b.rows)
        throw InvalidInput("symbol product: shapes are not composable");
    if (a.is_cutoff() || b.is_cutoff())
        throw InvalidInput("symbol product is only defined here for polynomial symbols");
    Symbol out(a.n, a.rows, b.cols);
    for (const auto& [u, mu] : a.coeff)
        for (const auto& [w, mw] : b.coeff)
            out.add(u.concat(w), mu * mw);
    return out;
}

namespace detail {

inline Index word_digits(const Word& w, int n)
{
    Index d = 0;
    for (int l : w.letters())
        d = d * n + (l - 1);
    return d;
}

} // namespace detail

// Matrix of M_theta restricted to P_{k_in} (x) K, landing in P_{D_out} (x) K'.
// Without allow_truncation, D_out must be at least k_in + degree.
inline TruncOp symbol_to_matrix(const Symbol& theta, int k_in, int D_out, bool allow_truncation = false)
{
    theta.validate();
    detail::check_nd(theta.n, k_in);
    detail::check_nd(theta.n, D_out);
    if (!allow_truncation && (theta.is_cutoff() || D_out < k_in + theta.degree()))
        throw InvalidInput("symbol_to_matrix: D_out = " + std::to_string(D_out) + " < k_in + degree = " +
                           std::to_string(k_in + theta.degree()) + " (pass allow_truncation for an approximation)");
    const int n = theta.n;
    FockBasis in(n, k_in), out(n, D_out);
    TruncOp op{n, k_in, D_out, theta.cols, theta.rows, Matrix::Zero(out.dim() * theta.rows, in.dim() * theta.cols)};
    for (const auto& [w, m] : theta.coeff) {
        const Word rw = w.reversed();
        const int lw = rw.length();
        const Index dw = detail::word_digits(rw, n);
        const Index span = detail::ipow(n, lw);
        for (int p = 0; p <= k_in && p + lw <= D_out; ++p) {
            for (Index b = 0; b < in.level_size(p); ++b) {
                const Index col = in.level_begin(p) + b;
                const Index row = out.level_begin(p + lw) + b * span + dw;
                op.matrix.block(row * theta.rows, col * theta.cols, theta.rows, theta.cols) += m;
            }
        }
    }
    return op;
}

inline Matrix fourier_coefficient(const Symbol& theta, const Word& w)
{
    w.validate(theta.n);
    if (theta.is_cutoff() && w.length() > theta.cutoff)
        throw InvalidInput("fourier_coefficient: " + w.to_string() + " is beyond the symbol cutoff " +
                           std::to_string(theta.cutoff));
    return theta.at(w);
}

// theta_(w) read off the matrix form: the block of M_theta (1 (x) .) at e_{rev w}
inline Matrix fourier_coefficient(const TruncOp& M, const Word& w)
{
    M.validate();
    w.validate(M.n);
    if (w.length() > M.out_degree)
        throw InvalidInput("fourier_coefficient: word longer than the output degree");
    const Index row = word_index(w.reversed(), M.n);
    return M.matrix.block(row * M.out_factor, 0, M.out_factor, M.in_factor);
}

// All coefficients up to degree D of the operator's symbol.
inline Symbol symbol_from_matrix(const TruncOp& M, int D)
{
    Symbol s(M.n, M.out_factor, M.in_factor);
    for (const auto& w : enumerate_words(M.n, std::min(D, M.out_degree))) {
        Matrix b = fourier_coefficient(M, w);
        if (b.cwiseAbs().maxCoeff() > 0.0)
            s.set(w, b);
    }
    return s;
}

struct PkNorm {
    double value = 0.0;      // norm of the truncated operator
    double lo = 0.0;
    double hi = 0.0;
    bool exact = true;
};

// ||M_theta||_{P_k}.  For cutoff symbols the truncation error is at most
// sqrt(k+1) * tail_norm: each homogeneous degree of P_k contributes at most
// tail_norm and there are k+1 of them.
inline PkNorm pk_norm(const Symbol& theta, int k)
{
    PkNorm r;
    if (theta.is_cutoff()) {
        Symbol head = theta;
        head.tail_norm.reset();
        const int d = theta.cutoff;
        r.value = op_norm(symbol_to_matrix(head, k, k + d, true).matrix);
        const double slack = std::sqrt(static_cast<double>(k) + 1.0) * *theta.tail_norm;
        r.lo = std::max(0.0, r.value - slack);
        r.hi = r.value + slack;
        r.exact = slack == 0.0;
        return r;
    }
    r.value = op_norm(symbol_to_matrix(theta, k, k + theta.degree()).matrix);
    r.lo = r.hi = r.value;
    return r;
}

struct PkNormDiagnostic {
    std::vector<double> norms;
    std::vector<double> differences;   // norms[k+1] - norms[k]
};

// The P_k norms increase to ||M_theta|| for bounded multi-analytic
// operators; a finite run can only show the trend.
inline PkNormDiagnostic pk_norm_diagnostic(const Symbol& theta, int k_max)
{
    PkNormDiagnostic d;
    for (int k = 0; k <= k_max; ++k) {
        d.norms.push_back(pk_norm(theta, k).value);
        if (k > 0)
            d.differences.push_back(d.norms[static_cast<std::size_t>(k)] - d.norms[static_cast<std::size_t>(k) - 1]);
    }
    return d;
}

// ---------------------------------------------------------------------------

// phi[p] = || sum_{|a|=p} Z_a Z_a^* ||, p = 0..K
inline std::vector<double> level_norms(const RowTuple& Z, int K)
{
    std::vector<double> phi;
    Matrix X = Matrix::Identity(Z[0].rows(), Z[0].rows());
    phi.push_back(1.0);
    for (int p = 1; p <= K; ++p) {
        X = cp_map(Z, X);
        phi.push_back(std::max(0.0, max_eigenvalue(X)));
    }
    return phi;
}

// Upper bound on sum_{p > K} phi_p^power from phi_0..phi_K, using
// phi_{a+b} <= phi_a phi_b.  Infinity when no phi_q < 1 is available.
inline double level_tail_bound(const std::vector<double>& phi, int K, double power)
{
    int q = -1;
    double best = 1.0;
    for (int p = 1; p <= K && p < static_cast<int>(phi.size()); ++p)
        if (phi[static_cast<std::size_t>(p)] < best) {
            best = phi[static_cast<std::size_t>(p)];
            q = p;
        }
    if (q < 0)
        return std::numeric_limits<double>::infinity();
    double head = 0.0;
    for (int r = K - q + 1; r <= K; ++r)
        head += std::pow(phi[static_cast<std::size_t>(r)], power);
    const double g = std::pow(best, power);
    return head * g / (1.0 - g);
}

enum class Convention {
    printed,           // sum_w Z_w theta_(w), i.e. sum_a Z_{rev a} A_(a)
    controllability,   // sum_w Z_{rev w} theta_(w), i.e. sum_a Z_a A_(a)
};

struct Evaluation {
    Matrix value;
    double residual_bound = 0.0;     // bound on the omitted part of the series
    std::vector<double> level_terms; // || sum_{|w|=p} term ||
    std::vector<double> level_bounds;// phi_p^{1/2} * ||psi_p||
};

// psi(Z) with A_(a) = theta_(rev a) the coefficient of e_a in psi(1 (x) .).
// `left` multiplies every coefficient from the left (the B of (I (x) B) psi).
inline Evaluation evaluate_at_tuple(const Symbol& psi, const RowTuple& Z, double tol = 1e-12,
                                    Convention conv = Convention::printed, const Matrix* left = nullptr)
{
    check_tuple(Z, true);
    if (static_cast<int>(Z.size()) != psi.n)
        throw InvalidInput("evaluate_at_tuple: tuple has " + std::to_string(Z.size()) + " letters, symbol has " +
                           std::to_string(psi.n));
    const Index y = Z[0].rows();
    const Index kout = left ? left->rows() : psi.rows;
    if (left && left->cols() != psi.rows)
        throw InvalidInput("evaluate_at_tuple: left factor is not composable with the symbol");
    if (kout != y)
        throw InvalidInput("evaluate_at_tuple: symbol output dimension must match the tuple space");
    const auto sr = spectral_radius(Z, 64);
    if (sr.value >= 1.0)
        throw InvalidInput("evaluate_at_tuple: spectral radius " + std::to_string(sr.value) + " >= 1");

    const int deg = psi.degree();
    const auto phi = level_norms(Z, deg + 64);
    Evaluation ev;
    ev.value = Matrix::Zero(y, psi.cols);
    std::vector<Matrix> level(static_cast<std::size_t>(deg) + 1, Matrix::Zero(y, psi.cols));
    std::vector<Matrix> gram(static_cast<std::size_t>(deg) + 1, Matrix::Zero(psi.cols, psi.cols));
    for (const auto& [w, m] : psi.coeff) {
        Matrix Zw = Matrix::Identity(y, y);
        const Word& order = conv == Convention::printed ? w : w.reversed();
        for (int l : order.letters())
            Zw = Zw * Z[static_cast<std::size_t>(l) - 1];
        const Matrix coef = left ? Matrix((*left) * m) : m;
        level[static_cast<std::size_t>(w.length())] += Zw * coef;
        gram[static_cast<std::size_t>(w.length())] += coef.adjoint() * coef;
    }
    for (int p = 0; p <= deg; ++p) {
        ev.value += level[static_cast<std::size_t>(p)];
        ev.level_terms.push_back(op_norm(level[static_cast<std::size_t>(p)]));
        ev.level_bounds.push_back(std::sqrt(phi[static_cast<std::size_t>(p)]) *
                                  std::sqrt(std::max(0.0, max_eigenvalue(gram[static_cast<std::size_t>(p)]))));
    }
    if (psi.is_cutoff()) {
        const double lnorm = left ? op_norm(*left) : 1.0;
        ev.residual_bound = lnorm * *psi.tail_norm * level_tail_bound(phi, deg + 64, 0.5);
        // the terms at levels deg+1 .. deg+64 are covered separately
        double mid = 0.0;
        for (int p = deg + 1; p <= deg + 64; ++p)
            mid += std::sqrt(phi[static_cast<std::size_t>(p)]);
        ev.residual_bound += lnorm * *psi.tail_norm * mid;
    }
    if (ev.residual_bound > tol && psi.is_cutoff() && !std::isfinite(ev.residual_bound))
        throw NumericalFailure("evaluate_at_tuple: no certified bound for the series tail");
    return ev;
}

inline Matrix evaluate_at_point(const Symbol& f, const std::vector<cplx>& z)
{
    if (static_cast<int>(z.size()) != f.n)
        throw InvalidInput("evaluate_at_point: point has the wrong number of coordinates");
    double r2 = 0.0;
    for (auto c : z)
        r2 += std::norm(c);
    if (r2 >= 1.0)
        throw InvalidInput("evaluate_at_point: point is not in the open unit ball");
    Matrix out = Matrix::Zero(f.rows, f.cols);
    for (const auto& [w, m] : f.coeff) {
        cplx zw = 1.0;
        for (int l : w.letters())
            zw *= z[static_cast<std::size_t>(l) - 1];
        out += zw * m;
    }
    return out;
}

inline bool is_inner(const Symbol& theta, int D, double tol = 1e-10)
{
    if (theta.is_cutoff())
        throw InvalidInput("is_inner: cannot certify isometry of a cutoff symbol");
    const int d = theta.degree();
    if (D < d)
        throw InvalidInput("is_inner: D must be at least the symbol degree");
    const Matrix M = symbol_to_matrix(theta, D - d, D).matrix;
    const Matrix G = M.adjoint() * M - Matrix::Identity(M.cols(), M.cols());
    return G.size() == 0 || G.cwiseAbs().maxCoeff() <= tol;
}

} // namespace focklift

#endif // FOCKLIFT_MULTIANALYTIC_HPP
