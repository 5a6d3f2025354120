#pragma once

#include <complex>
#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace fixedspec {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using ComplexRowVector = Eigen::RowVectorXcd;

/// Relative singular-value cutoff: a singular value counts as zero when it is
/// at most `relative() * sigma_max`.
class RankTolerance {
 public:
  static constexpr double kDefault = 1e-9;

  /// Throws InputError unless 0 < relative < 1.
  explicit RankTolerance(double relative = kDefault);

  double relative() const { return relative_; }

 private:
  double relative_;
};

/// Throws InputError naming `what` if any entry of `m` is NaN or infinite.
void require_finite(const ComplexMatrix& m, std::string_view what);

/// Singular values in decreasing order.
Eigen::VectorXd singular_values(const ComplexMatrix& m);

std::size_t numeric_rank(const ComplexMatrix& m, RankTolerance tol = RankTolerance());

/// Lexicographic order on (real, imag). Used for every reported spectrum.
bool complex_less(const Complex& a, const Complex& b);

/// All n eigenvalues with multiplicity, sorted by complex_less.
std::vector<Complex> eigenvalues(const ComplexMatrix& a);

/// M = left * right with `left` of full column rank and `right` of full row
/// rank, both with inner dimension `rank`.
struct RankFactorization {
  std::size_t rank = 0;
  ComplexMatrix left;   // n1 x rank
  ComplexMatrix right;  // rank x n2
};

RankFactorization rank_factorize(const ComplexMatrix& m, RankTolerance tol = RankTolerance());

/// [[A, B], [C, 0]]. A must be n x n, B n x m, C l x n; m or l may be zero.
ComplexMatrix assemble_bordered(const ComplexMatrix& a, const ComplexMatrix& b,
                                const ComplexMatrix& c);

std::size_t bordered_rank(const ComplexMatrix& a, const ComplexMatrix& b, const ComplexMatrix& c,
                          RankTolerance tol = RankTolerance());

/// E (m x n) and K (n x l) such that A + B E + K C is nonsingular.
struct RankRestoringGains {
  ComplexMatrix input_gain;      // E
  ComplexMatrix output_injection;  // K
};

/// Returns nullopt iff bordered_rank(A, B, C) < n. Otherwise the gains are
/// built by greedy completion: E feeds columns of B into the null space of
/// [A; C], then K feeds rows of C into the left null space of A + B E. If
/// rounding defeats the construction, seeded random gains are tried.
std::optional<RankRestoringGains> rank_restoring_gains(const ComplexMatrix& a,
                                                       const ComplexMatrix& b,
                                                       const ComplexMatrix& c,
                                                       RankTolerance tol = RankTolerance(),
                                                       std::uint64_t seed = 0);

/// Self-test of the pencil/feedback equivalence. Side one is
/// bordered_rank(A, B, C) < n; side two is that A + B E + K C stays singular
/// for `trials` random complex (E, K) and, when side one is false, for the
/// constructive gains too. Returns whether the two sides agree.
bool lemma1_equivalence_check(const ComplexMatrix& a, const ComplexMatrix& b,
                              const ComplexMatrix& c, RankTolerance tol, std::size_t trials,
                              std::uint64_t seed);

/// Orthonormal basis grown one vector at a time. A candidate is independent
/// of the current span when its residual norm exceeds `threshold`.
class SpanBasis {
 public:
  SpanBasis(Eigen::Index dim, double threshold);

  /// Appends v if it is independent of the span. Returns whether it was.
  bool add(const ComplexVector& v);
  /// Norm of v after projecting out the span.
  double residual_norm(const ComplexVector& v) const;
  bool is_independent(const ComplexVector& v) const { return residual_norm(v) > threshold_; }

  std::size_t size() const { return basis_.size(); }

 private:
  ComplexVector project_out(const ComplexVector& v) const;

  Eigen::Index dim_;
  double threshold_;
  std::vector<ComplexVector> basis_;
};

}  // namespace fixedspec
