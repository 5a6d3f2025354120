#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "fixedspec/linalg.h"
#include "fixedspec/subsets.h"

namespace fixedspec {

/// Subset enumeration is refused above this many ground elements (2^20
/// subsets). Larger instances go through matroid intersection or sampling.
inline constexpr std::size_t kDefaultEnumerationCap = 20;

/// One term w * p * r of a parameterized sum. Identical pairs are distinct
/// elements.
struct VectorPair {
  ComplexVector column;
  ComplexRowVector row;
};

struct VectorPairFamily {
  Eigen::Index n1 = 0;  // length of every column vector
  Eigen::Index n2 = 0;  // length of every row vector
  std::vector<VectorPair> pairs;

  std::size_t size() const { return pairs.size(); }
  /// Throws InputError on length mismatches or non-finite entries.
  void validate() const;
};

/// One term W * P * R where P is a fully parameterized block.
struct MatrixMember {
  ComplexMatrix left;   // n1 x alpha
  ComplexMatrix right;  // beta x n2
};

struct MatrixFamily {
  Eigen::Index n1 = 0;
  Eigen::Index n2 = 0;
  std::vector<MatrixMember> members;

  std::size_t size() const { return members.size(); }
  void validate() const;
};

/// rank(columns in S) + rank(rows outside S). Minimizers certify an upper
/// bound on the generic rank.
struct SubsetCertificate {
  Subset subset;
  std::size_t value = 0;
};

/// Result of linear matroid intersection on a pair family.
struct MatroidIntersection {
  std::size_t rank = 0;
  /// Jointly independent pair indices; |witness| == rank.
  Subset witness;
  /// Dual certificate read off the final exchange graph; value == rank.
  SubsetCertificate certificate;
};

/// Matrix whose columns are the column vectors indexed by `s`, in order.
ComplexMatrix aggregate_columns(const VectorPairFamily& fam, const Subset& s);
/// Matrix whose rows are the row vectors indexed by `s`, in order.
ComplexMatrix aggregate_rows(const VectorPairFamily& fam, const Subset& s);
/// [W_i1 W_i2 ...] for members i in `s`.
ComplexMatrix aggregate_left(const MatrixFamily& fam, const Subset& s);
/// [R_j1; R_j2; ...] for members j in `s`.
ComplexMatrix aggregate_right(const MatrixFamily& fam, const Subset& s);

std::size_t certificate_value(const VectorPairFamily& fam, const Subset& s, RankTolerance tol);
std::size_t certificate_value(const MatrixFamily& fam, const Subset& s, RankTolerance tol);

/// Both the selected columns and the selected rows are linearly independent.
bool is_jointly_independent(const VectorPairFamily& fam, const Subset& s, RankTolerance tol);

/// Maximum jointly independent subset via shortest augmenting paths in the
/// exchange graph of the column matroid and the row matroid.
MatroidIntersection grank_pairs_matroid(const VectorPairFamily& fam,
                                        RankTolerance tol = RankTolerance());

/// Minimum certificate over all 2^d subsets; ties go to the lex-smallest
/// subset. Throws CapacityError when d exceeds `cap`.
SubsetCertificate grank_pairs_minformula(const VectorPairFamily& fam,
                                         RankTolerance tol = RankTolerance(),
                                         std::size_t cap = kDefaultEnumerationCap);

/// Matrix-level minimum over subsets of members.
SubsetCertificate grank_matrix_minformula(const MatrixFamily& fam,
                                          RankTolerance tol = RankTolerance(),
                                          std::size_t cap = kDefaultEnumerationCap);

/// Largest numeric rank of the sum over `trials` random parameter draws.
/// Parameters are uniform by area on the annulus 0.5 <= |p| <= 1.5.
std::size_t grank_sampled(const VectorPairFamily& fam, std::size_t trials, std::uint64_t seed,
                          RankTolerance tol = RankTolerance());
std::size_t grank_sampled(const MatrixFamily& fam, std::size_t trials, std::uint64_t seed,
                          RankTolerance tol = RankTolerance());

/// Which (member, column of W, row of R) an expanded pair came from.
struct ExpandedOrigin {
  std::size_t member = 0;
  std::size_t column = 0;
  std::size_t row = 0;
};

struct ExpandedFamily {
  VectorPairFamily pairs;
  std::vector<ExpandedOrigin> origin;  // parallel to pairs.pairs
};

/// Every (column of W_t, row of R_t) pair, ordered by member, then column,
/// then row.
ExpandedFamily expand_matrix_family(const MatrixFamily& fam);

/// Turns a minimizer over expanded pair indices into a member-level subset
/// whose certificate value is no larger: a member joins the column side when
/// every column of its W appears on the column side of `expanded_subset`,
/// otherwise it goes to the row side.
SubsetCertificate refine_min_subset(const MatrixFamily& fam, const Subset& expanded_subset,
                                    RankTolerance tol = RankTolerance());

/// Rank factors of M as t pairs, followed by the expansion of `fam`.
VectorPairFamily prepend_rank_factors(const ComplexMatrix& m, const MatrixFamily& fam,
                                      RankTolerance tol = RankTolerance());

/// rank [M, W_S; R_{d-S}, 0] for the member subset S. Bounds the rank of
/// M + sum W P R from above for every choice of the P.
std::size_t constant_certificate_value(const ComplexMatrix& m, const MatrixFamily& fam,
                                       const Subset& s, RankTolerance tol);

/// Minimum of constant_certificate_value over member subsets, lex-smallest
/// minimizer. With M = 0 this is grank_matrix_minformula.
SubsetCertificate grank_constant_minformula(const ComplexMatrix& m, const MatrixFamily& fam,
                                            RankTolerance tol = RankTolerance(),
                                            std::size_t cap = kDefaultEnumerationCap);

struct ConstantPlusFamilyRank {
  /// Bordered min-formula with M kept as one block.
  std::size_t combinatorial = 0;
  SubsetCertificate certificate;
  /// Largest sampled rank of M + sum W P R.
  std::size_t sampled = 0;
  /// Matroid intersection on the rank factors of M followed by the expanded
  /// family, i.e. with the factor weights made free. Never below the true
  /// value, and strictly above it for some structured inputs.
  std::size_t prepended = 0;
  /// Rank of the constant term.
  std::size_t constant_rank = 0;

  bool consistent() const { return combinatorial == sampled; }
};

/// Generic rank of M + sum W_i P_i R_i with M held constant.
ConstantPlusFamilyRank grank_constant_plus_family(const ComplexMatrix& m, const MatrixFamily& fam,
                                                  RankTolerance tol, std::size_t trials,
                                                  std::uint64_t seed,
                                                  std::size_t cap = kDefaultEnumerationCap);

}  // namespace fixedspec
