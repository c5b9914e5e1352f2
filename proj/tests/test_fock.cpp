#include <gtest/gtest.h>

#include "focklift/fock.hpp"

using namespace focklift;

TEST(FockDim, GeometricSums)
{
    EXPECT_EQ(fock_dim(2, 3), 15);
    EXPECT_EQ(fock_dim(1, 5), 6);
    EXPECT_EQ(fock_dim(3, 2), 13);
    EXPECT_EQ(fock_dim(4, 0), 1);
}

TEST(FockDim, RejectsBadArguments)
{
    EXPECT_THROW(fock_dim(0, 2), InvalidInput);
    EXPECT_THROW(fock_dim(2, -1), InvalidInput);
    EXPECT_THROW(enumerate_words(0, 1), InvalidInput);
}

TEST(Words, GradedLexOrder)
{
    const auto w = enumerate_words(2, 2);
    ASSERT_EQ(w.size(), 7u);
    const std::vector<std::string> expect{"g0", "g1", "g2", "g1g1", "g1g2", "g2g1", "g2g2"};
    for (std::size_t i = 0; i < w.size(); ++i)
        EXPECT_EQ(w[i].to_string(), expect[i]);
    for (std::size_t i = 1; i < w.size(); ++i)
        EXPECT_LT(w[i - 1], w[i]);
}

TEST(Words, IndexIsBijection)
{
    for (int n : {1, 2, 3})
        for (int D : {0, 1, 4}) {
            const auto words = enumerate_words(n, D);
            ASSERT_EQ(static_cast<Index>(words.size()), fock_dim(n, D));
            for (std::size_t i = 0; i < words.size(); ++i) {
                EXPECT_EQ(word_index(words[i], n), static_cast<Index>(i));
                EXPECT_EQ(word_at(static_cast<Index>(i), n), words[i]);
            }
        }
    EXPECT_EQ(word_index(Word(), 3), 0);
    EXPECT_EQ(word_index(Word{2, 1}, 2), 5);
}

TEST(Words, LetterOutOfRange)
{
    EXPECT_THROW(word_index(Word{3}, 2), InvalidInput);
    EXPECT_THROW(Word({0}).validate(2), InvalidInput);
}

TEST(Words, Reverse)
{
    const Word w{1, 2, 2, 3};
    EXPECT_EQ(reverse_word(w), (Word{3, 2, 2, 1}));
    EXPECT_EQ(reverse_word(reverse_word(w)), w);
    EXPECT_EQ(reverse_word(Word()), Word());
    EXPECT_EQ((Word{1}).concat(Word{2, 3}), (Word{1, 2, 3}));
}

TEST(FockBasis, PrependAppendSplit)
{
    const FockBasis b(3, 3);
    for (Index i = 0; i < b.dim(); ++i) {
        const Word w = b.word(i);
        for (int l = 1; l <= 3; ++l) {
            const Index p = b.prepend(l, i);
            const Index a = b.append(i, l);
            if (w.length() == 3) {
                EXPECT_EQ(p, -1);
                EXPECT_EQ(a, -1);
            } else {
                EXPECT_EQ(b.word(p), w.prepend(l));
                EXPECT_EQ(b.word(a), w.append(l));
            }
        }
        if (i > 0) {
            auto [first, rest] = b.split_first(i);
            EXPECT_EQ(b.word(rest).prepend(first), w);
        }
    }
}

TEST(Creation, LeftN2D1)
{
    // S_1 on P_1(H_2): basis 1, e1, e2; 1 -> e1, degree-1 vectors -> 0
    const auto S1 = creation_matrix(1, 2, 1, Side::left).matrix;
    Matrix expect = Matrix::Zero(3, 3);
    expect(1, 0) = 1.0;
    EXPECT_EQ(S1, expect);
}

TEST(Creation, LeftAndRightDifferOnLongWords)
{
    const int n = 2, D = 3;
    const auto S1 = creation_matrix(1, n, D, Side::left).matrix;
    const auto R1 = creation_matrix(1, n, D, Side::right).matrix;
    const Index e2 = word_index(Word{2}, n);
    EXPECT_EQ(S1(word_index(Word{1, 2}, n), e2), cplx(1.0));
    EXPECT_EQ(R1(word_index(Word{2, 1}, n), e2), cplx(1.0));
    EXPECT_NE(S1, R1);
}

TEST(Creation, RowIsometryBelowTop)
{
    for (int n : {1, 2, 3}) {
        const int D = 3;
        const Index low = fock_dim(n, D - 1);
        for (Side side : {Side::left, Side::right}) {
            std::vector<Matrix> S;
            for (int i = 1; i <= n; ++i)
                S.push_back(creation_matrix(i, n, D, side).matrix.leftCols(low));
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) {
                    const Matrix G = S[static_cast<std::size_t>(i)].adjoint() * S[static_cast<std::size_t>(j)];
                    const Matrix target = i == j ? Matrix(Matrix::Identity(low, low)) : Matrix(Matrix::Zero(low, low));
                    EXPECT_EQ(G, target);
                }
        }
    }
}

TEST(Creation, LeftCommutesWithRight)
{
    const int n = 2, D = 4;
    for (int i = 1; i <= n; ++i)
        for (int j = 1; j <= n; ++j) {
            const auto S = creation_matrix(i, n, D, Side::left).matrix;
            const auto R = creation_matrix(j, n, D, Side::right).matrix;
            EXPECT_EQ(S * R, R * S);
        }
}

TEST(Creation, BadLetter)
{
    EXPECT_THROW(creation_matrix(3, 2, 2, Side::left), InvalidInput);
}

TEST(TensorIdentity, KroneckerLayout)
{
    const auto S = creation_matrix(1, 1, 1, Side::left);
    const auto T = tensor_identity(S, 2);
    EXPECT_EQ(T.in_factor, 2);
    EXPECT_EQ(T.out_factor, 2);
    T.validate();
    Matrix expect = Matrix::Zero(4, 4);
    expect(2, 0) = 1.0;
    expect(3, 1) = 1.0;
    EXPECT_EQ(T.matrix, expect);
    EXPECT_THROW(tensor_identity(S, 0), InvalidInput);
}

TEST(TruncOp, ShapeValidation)
{
    TruncOp op{2, 1, 2, 1, 1, Matrix::Zero(7, 3)};
    EXPECT_NO_THROW(op.validate());
    op.matrix = Matrix::Zero(6, 3);
    EXPECT_THROW(op.validate(), InvalidInput);
}
