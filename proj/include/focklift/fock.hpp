#ifndef FOCKLIFT_FOCK_HPP
#define FOCKLIFT_FOCK_HPP

//
// Free-semigroup words and truncated full Fock spaces.
//
// The basis {e_alpha : |alpha| <= D} of F^2_{<=D}(H_n) is ordered
// graded-lexicographically: by length first, then letterwise with
// 1 < 2 < ... < n.  Letters are 1-based, the empty word is g_0.
//
// Operators on F^2_{<=D} (x) K use a Fock-major layout:
//   index = word_index * factor + coefficient index.
//

#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "focklift/errors.hpp"

namespace focklift {

using cplx   = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using Index  = Eigen::Index;

class Word {
public:
    Word() = default;
    explicit Word(std::vector<int> letters) : letters_(std::move(letters)) {}
    Word(std::initializer_list<int> letters) : letters_(letters) {}

    static Word identity() { return Word(); }

    int length() const { return static_cast<int>(letters_.size()); }
    bool empty() const { return letters_.empty(); }
    const std::vector<int>& letters() const { return letters_; }
    int operator[](std::size_t i) const { return letters_[i]; }

    Word reversed() const { return Word(std::vector<int>(letters_.rbegin(), letters_.rend())); }

    // this followed by other, i.e. e_{this other} = e_this (x) e_other
    Word concat(const Word& other) const
    {
        auto out = letters_;
        out.insert(out.end(), other.letters_.begin(), other.letters_.end());
        return Word(std::move(out));
    }

    Word prepend(int letter) const
    {
        std::vector<int> out;
        out.reserve(letters_.size() + 1);
        out.push_back(letter);
        out.insert(out.end(), letters_.begin(), letters_.end());
        return Word(std::move(out));
    }

    Word append(int letter) const
    {
        auto out = letters_;
        out.push_back(letter);
        return Word(std::move(out));
    }

    // "g0", "g1g2g2"
    std::string to_string() const
    {
        if (letters_.empty())
            return "g0";
        std::string s;
        for (int l : letters_)
            s += "g" + std::to_string(l);
        return s;
    }

    void validate(int n) const
    {
        for (int l : letters_)
            if (l < 1 || l > n)
                throw InvalidInput("word letter " + std::to_string(l) + " outside 1.." + std::to_string(n));
    }

    friend bool operator==(const Word&, const Word&) = default;
    friend auto operator<=>(const Word& a, const Word& b)
    {
        // graded-lex, matching the basis order
        if (a.length() != b.length())
            return a.length() <=> b.length();
        return a.letters_ <=> b.letters_;
    }

private:
    std::vector<int> letters_;
};

inline Word reverse_word(const Word& w) { return w.reversed(); }

namespace detail {

inline void check_nd(int n, int D)
{
    if (n < 1)
        throw InvalidInput("letter count n must be >= 1, got " + std::to_string(n));
    if (D < 0)
        throw InvalidInput("degree must be >= 0, got " + std::to_string(D));
}

inline Index ipow(Index base, int e)
{
    Index r = 1;
    for (int i = 0; i < e; ++i)
        r *= base;
    return r;
}

} // namespace detail

// sum_{p=0}^{D} n^p
inline Index fock_dim(int n, int D)
{
    detail::check_nd(n, D);
    Index total = 0, level = 1;
    for (int p = 0; p <= D; ++p) {
        total += level;
        level *= n;
    }
    return total;
}

// fock_dim with the convention fock_dim(n, -1) = 0
inline Index fock_dim_below(int n, int len) { return len <= 0 ? 0 : fock_dim(n, len - 1); }

inline Index word_index(const Word& w, int n)
{
    if (n < 1)
        throw InvalidInput("letter count n must be >= 1");
    w.validate(n);
    Index digits = 0;
    for (int l : w.letters())
        digits = digits * n + (l - 1);
    return fock_dim_below(n, w.length()) + digits;
}

// Inverse of word_index.
inline Word word_at(Index index, int n)
{
    if (n < 1 || index < 0)
        throw InvalidInput("word_at: bad arguments");
    int len = 0;
    Index level = 1, offset = 0;
    while (index >= offset + level) {
        offset += level;
        level *= n;
        ++len;
    }
    Index digits = index - offset;
    std::vector<int> letters(static_cast<std::size_t>(len));
    for (int p = len - 1; p >= 0; --p) {
        letters[static_cast<std::size_t>(p)] = static_cast<int>(digits % n) + 1;
        digits /= n;
    }
    return Word(std::move(letters));
}

inline std::vector<Word> enumerate_words(int n, int D)
{
    const Index dim = fock_dim(n, D);
    std::vector<Word> words;
    words.reserve(static_cast<std::size_t>(dim));
    words.emplace_back();
    // words of length p+1 are the words of length p with one letter appended;
    // appending in letter order to a graded-lex list of length p keeps it graded-lex
    std::size_t begin = 0;
    for (int p = 0; p < D; ++p) {
        const std::size_t end = words.size();
        for (std::size_t w = begin; w < end; ++w)
            for (int l = 1; l <= n; ++l)
                words.push_back(words[w].append(l));
        begin = end;
    }
    return words;
}

//
// Index arithmetic on a truncated basis without materializing words.
//
class FockBasis {
public:
    FockBasis(int n, int D) : n_(n), D_(D), dim_(fock_dim(n, D))
    {
        offsets_.resize(static_cast<std::size_t>(D) + 2);
        offsets_[0] = 0;
        Index level = 1;
        for (int p = 0; p <= D; ++p) {
            offsets_[static_cast<std::size_t>(p) + 1] = offsets_[static_cast<std::size_t>(p)] + level;
            level *= n;
        }
    }

    int n() const { return n_; }
    int degree() const { return D_; }
    Index dim() const { return dim_; }

    // first index of words of length p
    Index level_begin(int p) const { return offsets_[static_cast<std::size_t>(p)]; }
    Index level_end(int p) const { return offsets_[static_cast<std::size_t>(p) + 1]; }
    Index level_size(int p) const { return level_end(p) - level_begin(p); }

    int length_of(Index idx) const
    {
        int p = 0;
        while (idx >= level_end(p))
            ++p;
        return p;
    }

    // index of g_i alpha, or -1 when it leaves the truncation
    Index prepend(int letter, Index idx) const
    {
        const int p = length_of(idx);
        if (p >= D_)
            return -1;
        const Index digits = idx - level_begin(p);
        return level_begin(p + 1) + (letter - 1) * detail::ipow(n_, p) + digits;
    }

    // index of alpha g_i, or -1
    Index append(Index idx, int letter) const
    {
        const int p = length_of(idx);
        if (p >= D_)
            return -1;
        const Index digits = idx - level_begin(p);
        return level_begin(p + 1) + digits * n_ + (letter - 1);
    }

    // first letter of a nonempty word and the index of the remainder
    std::pair<int, Index> split_first(Index idx) const
    {
        const int p = length_of(idx);
        const Index digits = idx - level_begin(p);
        const Index tail_count = detail::ipow(n_, p - 1);
        return {static_cast<int>(digits / tail_count) + 1, level_begin(p - 1) + digits % tail_count};
    }

    Word word(Index idx) const { return word_at(idx, n_); }

private:
    int n_;
    int D_;
    Index dim_;
    std::vector<Index> offsets_;
};

// Dense operator between truncated spaces F^2_{<=in_degree} (x) C^{in_factor}
// and F^2_{<=out_degree} (x) C^{out_factor}.
struct TruncOp {
    int n = 1;
    int in_degree = 0;
    int out_degree = 0;
    Index in_factor = 1;
    Index out_factor = 1;
    Matrix matrix;

    Index expected_rows() const { return fock_dim(n, out_degree) * out_factor; }
    Index expected_cols() const { return fock_dim(n, in_degree) * in_factor; }

    void validate() const
    {
        if (in_factor < 1 || out_factor < 1)
            throw InvalidInput("TruncOp factors must be >= 1");
        if (matrix.rows() != expected_rows() || matrix.cols() != expected_cols())
            throw InvalidInput("TruncOp matrix shape " + std::to_string(matrix.rows()) + "x" +
                               std::to_string(matrix.cols()) + " does not match degrees/factors (" +
                               std::to_string(expected_rows()) + "x" + std::to_string(expected_cols()) + ")");
    }
};

enum class Side { left, right };

// Left creation S_i: e_alpha -> e_{g_i alpha}; right creation R_i:
// e_alpha -> e_{alpha g_i}.  Top-degree vectors are sent to 0.
inline TruncOp creation_matrix(int letter, int n, int D, Side side)
{
    detail::check_nd(n, D);
    if (letter < 1 || letter > n)
        throw InvalidInput("creation letter " + std::to_string(letter) + " outside 1.." + std::to_string(n));
    FockBasis basis(n, D);
    TruncOp op{n, D, D, 1, 1, Matrix::Zero(basis.dim(), basis.dim())};
    for (Index col = 0; col < basis.dim(); ++col) {
        const Index row = side == Side::left ? basis.prepend(letter, col) : basis.append(col, letter);
        if (row >= 0)
            op.matrix(row, col) = 1.0;
    }
    return op;
}

// op (x) I_factor in the Fock-major layout
inline TruncOp tensor_identity(const TruncOp& op, Index factor)
{
    if (factor < 1)
        throw InvalidInput("tensor factor must be >= 1");
    TruncOp out = op;
    out.in_factor *= factor;
    out.out_factor *= factor;
    out.matrix = Matrix::Zero(op.matrix.rows() * factor, op.matrix.cols() * factor);
    for (Index c = 0; c < op.matrix.cols(); ++c)
        for (Index r = 0; r < op.matrix.rows(); ++r) {
            const cplx v = op.matrix(r, c);
            if (v == cplx(0.0))
                continue;
            for (Index f = 0; f < factor; ++f)
                out.matrix(r * factor + f, c * factor + f) = v;
        }
    return out;
}

} // namespace focklift

#endif // FOCKLIFT_FOCK_HPP
