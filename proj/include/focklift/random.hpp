#ifndef FOCKLIFT_RANDOM_HPP
#define FOCKLIFT_RANDOM_HPP

// Seeded random operators for tests and sweeps.

#include <cstdint>
#include <random>

#include "focklift/fock.hpp"
#include "focklift/multianalytic.hpp"
#include "focklift/operators.hpp"

namespace focklift::rnd {

using Rng = std::mt19937_64;

// independent stream for instance `index` of a run seeded with `seed`
inline Rng stream(std::uint64_t seed, std::uint64_t index)
{
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
    return Rng(seq);
}

inline int uniform_int(Rng& rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }

inline double uniform(Rng& rng, double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }

inline Matrix gaussian(Rng& rng, Index rows, Index cols)
{
    std::normal_distribution<double> g(0.0, 1.0);
    Matrix m(rows, cols);
    for (Index c = 0; c < cols; ++c)
        for (Index r = 0; r < rows; ++r) {
            const double re = g(rng);
            const double im = g(rng);
            m(r, c) = cplx(re, im);
        }
    return m;
}

// Gaussian matrix scaled by (norm + slack)^{-1}
inline Matrix contraction(Rng& rng, Index rows, Index cols, double slack = 0.1)
{
    Matrix m = gaussian(rng, rows, cols);
    return m / (op_norm(m) + slack);
}

inline RowTuple row_contraction(Rng& rng, int n, Index dim, double slack = 0.1)
{
    RowTuple T;
    for (int i = 0; i < n; ++i)
        T.push_back(gaussian(rng, dim, dim));
    const double s = row_norm(T) + slack;
    for (auto& t : T)
        t /= s;
    return T;
}

// row norm equal to `radius`, so the spectral radius is at most `radius`
inline RowTuple stable_tuple(Rng& rng, int n, Index dim, double radius)
{
    RowTuple T;
    for (int i = 0; i < n; ++i)
        T.push_back(gaussian(rng, dim, dim));
    const double s = row_norm(T);
    for (auto& t : T)
        t *= radius / s;
    return T;
}

inline std::vector<cplx> ball_point(Rng& rng, int n, double max_norm)
{
    Matrix g = gaussian(rng, n, 1);
    const double r = max_norm * std::pow(uniform(rng, 0.0, 1.0), 1.0 / (2.0 * n));
    g *= r / g.norm();
    std::vector<cplx> z(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i)
        z[static_cast<std::size_t>(i)] = g(i, 0);
    return z;
}

inline Symbol polynomial_symbol(Rng& rng, int n, int degree, Index rows, Index cols, double density = 0.7)
{
    Symbol s(n, rows, cols);
    for (const auto& w : enumerate_words(n, degree))
        if (uniform(rng, 0.0, 1.0) < density)
            s.set(w, gaussian(rng, rows, cols));
    if (s.coeff.empty())
        s.set(Word(), gaussian(rng, rows, cols));
    return s;
}

} // namespace focklift::rnd

#endif // FOCKLIFT_RANDOM_HPP
