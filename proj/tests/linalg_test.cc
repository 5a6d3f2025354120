#include "fixedspec/linalg.h"

#include <cmath>
#include <limits>

#include <gtest/gtest.h>

#include "fixedspec/errors.h"
#include "fixedspec/instances.h"
#include "fixedspec/random.h"

namespace fixedspec {
namespace {

using Eigen::Index;

ComplexMatrix Real(const Eigen::MatrixXd& m) { return m.cast<Complex>(); }

GTEST_TEST(RankToleranceTest, RejectsOutOfRange) {
  EXPECT_NO_THROW(RankTolerance(1e-9));
  EXPECT_THROW(RankTolerance(0.0), InputError);
  EXPECT_THROW(RankTolerance(1.0), InputError);
  EXPECT_THROW(RankTolerance(-1e-3), InputError);
  EXPECT_THROW(RankTolerance(std::nan("")), InputError);
}

GTEST_TEST(NumericRankTest, TrivialCases) {
  EXPECT_EQ(numeric_rank(ComplexMatrix::Zero(3, 3)), 0u);
  EXPECT_EQ(numeric_rank(ComplexMatrix::Identity(4, 4)), 4u);
  EXPECT_EQ(numeric_rank(ComplexMatrix(0, 3)), 0u);
  EXPECT_EQ(numeric_rank(ComplexMatrix(2, 0)), 0u);
}

// U diag(1, 1e-14, 0) V with orthogonal U, V: the middle singular value is
// below the 1e-9 relative cutoff.
GTEST_TEST(NumericRankTest, KnownSingularValues) {
  Rng rng(11);
  const Eigen::MatrixXd u = random_orthogonal(rng, 5).leftCols(3);
  const Eigen::MatrixXd v = random_orthogonal(rng, 3);
  const Eigen::Vector3d s(1.0, 1e-14, 0.0);
  const ComplexMatrix m = Real(u * s.asDiagonal() * v);
  EXPECT_EQ(numeric_rank(m, RankTolerance(1e-9)), 1u);
  const Eigen::VectorXd sv = singular_values(m);
  EXPECT_NEAR(sv(0), 1.0, 1e-12);
  // A looser cutoff can only lower the rank.
  EXPECT_EQ(numeric_rank(Real(u * Eigen::Vector3d(1.0, 1e-3, 0.0).asDiagonal() * v),
                         RankTolerance(1e-2)),
            1u);
}

GTEST_TEST(NumericRankTest, RejectsNonFinite) {
  ComplexMatrix m = ComplexMatrix::Identity(2, 2);
  m(1, 0) = std::numeric_limits<double>::infinity();
  EXPECT_THROW(numeric_rank(m), InputError);
  m(1, 0) = Complex(0.0, std::nan(""));
  EXPECT_THROW(numeric_rank(m), InputError);
}

GTEST_TEST(EigenvaluesTest, Diagonal) {
  const auto eig = eigenvalues(Real(Eigen::Vector2d(2.0, 1.0).asDiagonal()));
  ASSERT_EQ(eig.size(), 2u);
  EXPECT_NEAR(std::abs(eig[0] - Complex(1.0, 0.0)), 0.0, 1e-12);
  EXPECT_NEAR(std::abs(eig[1] - Complex(2.0, 0.0)), 0.0, 1e-12);
}

GTEST_TEST(EigenvaluesTest, RotationSortedByImaginaryPart) {
  Eigen::Matrix2d a;
  a << 0, 1, -1, 0;
  const auto eig = eigenvalues(Real(a));
  ASSERT_EQ(eig.size(), 2u);
  EXPECT_NEAR(std::abs(eig[0] - Complex(0.0, -1.0)), 0.0, 1e-12);
  EXPECT_NEAR(std::abs(eig[1] - Complex(0.0, 1.0)), 0.0, 1e-12);
}

GTEST_TEST(EigenvaluesTest, ResidualOnRandomMatrices) {
  Rng rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    const ComplexMatrix a = random_complex_matrix(rng, 5, 5);
    const auto eig = eigenvalues(a);
    ASSERT_EQ(eig.size(), 5u);
    for (std::size_t i = 1; i < eig.size(); ++i) EXPECT_FALSE(complex_less(eig[i], eig[i - 1]));
    for (const Complex& z : eig) {
      const Eigen::VectorXd sv = singular_values(z * ComplexMatrix::Identity(5, 5) - a);
      EXPECT_LT(sv(4), 1e-10 * sv(0));
    }
  }
}

GTEST_TEST(EigenvaluesTest, NonSquareIsInputError) {
  EXPECT_THROW(eigenvalues(ComplexMatrix::Zero(2, 3)), InputError);
}

GTEST_TEST(RankFactorizeTest, Zero) {
  const RankFactorization f = rank_factorize(ComplexMatrix::Zero(3, 4));
  EXPECT_EQ(f.rank, 0u);
  EXPECT_EQ(f.left.rows(), 3);
  EXPECT_EQ(f.left.cols(), 0);
  EXPECT_EQ(f.right.rows(), 0);
  EXPECT_EQ(f.right.cols(), 4);
}

GTEST_TEST(RankFactorizeTest, Identity) {
  const RankFactorization f = rank_factorize(ComplexMatrix::Identity(3, 3));
  EXPECT_EQ(f.rank, 3u);
  EXPECT_LT((f.left * f.right - ComplexMatrix::Identity(3, 3)).norm(), 1e-12);
}

GTEST_TEST(RankFactorizeTest, KnownFactors) {
  Rng rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    const ComplexMatrix m = random_complex_matrix(rng, 4, 2) * random_complex_matrix(rng, 2, 5);
    const RankFactorization f = rank_factorize(m);
    EXPECT_EQ(f.rank, 2u);
    EXPECT_LT((f.left * f.right - m).norm(), 1e-9);
    EXPECT_EQ(numeric_rank(f.left), 2u);
    EXPECT_EQ(numeric_rank(f.right), 2u);
  }
}

GTEST_TEST(BorderedRankTest, Examples) {
  const ComplexMatrix z = ComplexMatrix::Zero(2, 2);
  EXPECT_EQ(bordered_rank(z, ComplexMatrix(2, 0), ComplexMatrix(0, 2)), 0u);
  EXPECT_EQ(bordered_rank(z, ComplexMatrix::Identity(2, 2), ComplexMatrix::Identity(2, 2)), 4u);
}

GTEST_TEST(BorderedRankTest, MatchesExplicitAssembly) {
  Rng rng(8);
  for (int trial = 0; trial < 30; ++trial) {
    const Index n = static_cast<Index>(rng.uniform_int(1, 4));
    const Index m = static_cast<Index>(rng.uniform_int(0, 3));
    const Index l = static_cast<Index>(rng.uniform_int(0, 3));
    const ComplexMatrix a = random_low_rank(rng, n, n, static_cast<Index>(rng.uniform_int(0, n)));
    const ComplexMatrix b = random_complex_matrix(rng, n, m);
    const ComplexMatrix c = random_complex_matrix(rng, l, n);
    ComplexMatrix full = ComplexMatrix::Zero(n + l, n + m);
    full.block(0, 0, n, n) = a;
    full.block(0, n, n, m) = b;
    full.block(n, 0, l, n) = c;
    EXPECT_EQ(bordered_rank(a, b, c), numeric_rank(full));
  }
}

GTEST_TEST(BorderedRankTest, DimensionMismatch) {
  EXPECT_THROW(bordered_rank(ComplexMatrix::Zero(2, 3), ComplexMatrix(2, 0), ComplexMatrix(0, 3)),
               InputError);
  EXPECT_THROW(bordered_rank(ComplexMatrix::Zero(2, 2), ComplexMatrix::Zero(3, 1),
                             ComplexMatrix(0, 2)),
               InputError);
  EXPECT_THROW(bordered_rank(ComplexMatrix::Zero(2, 2), ComplexMatrix(2, 0),
                             ComplexMatrix::Zero(1, 3)),
               InputError);
}

GTEST_TEST(RankRestoringGainsTest, AlreadyFullRank) {
  const auto gains =
      rank_restoring_gains(ComplexMatrix::Identity(2, 2), ComplexMatrix(2, 0), ComplexMatrix(0, 2));
  ASSERT_TRUE(gains.has_value());
  EXPECT_EQ(gains->input_gain.size(), 0);
  EXPECT_EQ(gains->output_injection.size(), 0);
}

GTEST_TEST(RankRestoringGainsTest, SingleInputRestoresScalar) {
  const ComplexMatrix a = ComplexMatrix::Zero(1, 1);
  const ComplexMatrix b = ComplexMatrix::Ones(1, 1);
  const auto gains = rank_restoring_gains(a, b, ComplexMatrix(0, 1));
  ASSERT_TRUE(gains.has_value());
  EXPECT_EQ(numeric_rank(a + b * gains->input_gain), 1u);
}

// A = diag(1, 0), B = e1, C = [1 0]. With C the bordered rank is 2 = n
// (A + BE + KC = [[1 + e1, e2], [k2, 0]]); without it row two stays zero.
GTEST_TEST(RankRestoringGainsTest, DeficientReturnsNothing) {
  ComplexMatrix a = ComplexMatrix::Zero(2, 2);
  a(0, 0) = 1.0;
  ComplexMatrix b = ComplexMatrix::Zero(2, 1);
  b(0, 0) = 1.0;
  ComplexMatrix c = ComplexMatrix::Zero(1, 2);
  c(0, 0) = 1.0;
  EXPECT_EQ(bordered_rank(a, b, c), 2u);
  EXPECT_TRUE(rank_restoring_gains(a, b, c).has_value());
  EXPECT_EQ(bordered_rank(a, b, ComplexMatrix(0, 2)), 1u);
  EXPECT_FALSE(rank_restoring_gains(a, b, ComplexMatrix(0, 2)).has_value());
}

GTEST_TEST(RankRestoringGainsTest, RandomTriples) {
  Rng rng(21);
  int restored = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const BorderedTriple t = random_bordered_triple(rng, 6);
    const auto n = static_cast<std::size_t>(t.a.rows());
    const auto gains = rank_restoring_gains(t.a, t.b, t.c, RankTolerance(), trial);
    ASSERT_EQ(gains.has_value(), bordered_rank(t.a, t.b, t.c) >= n);
    if (!gains) continue;
    ++restored;
    EXPECT_EQ(numeric_rank(t.a + t.b * gains->input_gain + gains->output_injection * t.c), n);
  }
  EXPECT_GT(restored, 20);
}

GTEST_TEST(BorderedFeedbackEquivalenceTest, Examples) {
  EXPECT_TRUE(lemma1_equivalence_check(ComplexMatrix::Zero(2, 2), ComplexMatrix::Identity(2, 2),
                                       ComplexMatrix(0, 2), RankTolerance(), 5, 0));
  Rng rng(1);
  for (int trial = 0; trial < 50; ++trial) {
    const BorderedTriple t = random_bordered_triple(rng, 5);
    EXPECT_TRUE(lemma1_equivalence_check(t.a, t.b, t.c, RankTolerance(), 5, trial));
  }
}

GTEST_TEST(SpanBasisTest, DetectsDependence) {
  SpanBasis basis(3, 1e-9);
  EXPECT_TRUE(basis.add(ComplexVector::Unit(3, 0)));
  EXPECT_TRUE(basis.add(ComplexVector::Unit(3, 0) + ComplexVector::Unit(3, 1)));
  EXPECT_FALSE(basis.add(2.0 * ComplexVector::Unit(3, 1)));
  EXPECT_FALSE(basis.add(ComplexVector::Zero(3)));
  EXPECT_EQ(basis.size(), 2u);
  EXPECT_NEAR(basis.residual_norm(3.0 * ComplexVector::Unit(3, 2)), 3.0, 1e-12);
}

}  // namespace
}  // namespace fixedspec
