#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "fixedspec/generic_rank.h"
#include "fixedspec/linalg.h"
#include "fixedspec/subsets.h"

namespace fixedspec {

/// Channel subsets are enumerated exhaustively; above this many channels the
/// analysis refuses with CapacityError.
inline constexpr std::size_t kDefaultChannelCap = 20;
/// Computed eigenvalues closer than this are treated as one eigenvalue.
inline constexpr double kDefaultClusterTolerance = 1e-7;
/// Closed-loop eigenvalues within this distance of an open-loop one count as
/// the same mode in the feedback oracle.
inline constexpr double kDefaultMatchTolerance = 1e-6;
inline constexpr std::size_t kDefaultOracleTrials = 8;

/// Input/output pair of one decentralized feedback path u_i = F_i y_i.
struct Channel {
  ComplexMatrix input;   // B_i, n x m_i
  ComplexMatrix output;  // C_i, l_i x n
};

/// x' = A x + sum_i B_i u_i, y_i = C_i x.
struct MultiChannelSystem {
  ComplexMatrix a;
  std::vector<Channel> channels;

  Eigen::Index states() const { return a.rows(); }
  std::size_t channel_count() const { return channels.size(); }
  /// Throws InputError on non-square A, mismatched channel blocks, an empty
  /// channel list, or non-finite entries.
  void validate() const;
};

/// [B_i1 B_i2 ...] over channels in `s` (ascending).
ComplexMatrix stacked_inputs(const MultiChannelSystem& sys, const Subset& s);
/// [C_j1; C_j2; ...] over channels in `s` (ascending).
ComplexMatrix stacked_outputs(const MultiChannelSystem& sys, const Subset& s);

struct PencilRank {
  bool deficient = false;
  std::size_t rank = 0;
};

/// Rank of [lambda I - A, B_S; C_{k-S}, 0] and whether it is below n.
PencilRank pencil_rank_test(const MultiChannelSystem& sys, Complex lambda, const Subset& s,
                            RankTolerance tol = RankTolerance());

/// A channel subset whose pencil is rank deficient at `lambda`.
struct FixedModeCertificate {
  Complex lambda;
  Subset subset;
  std::size_t deficiency = 0;  // n - pencil rank
};

/// First deficient subset in order of cardinality, then lexicographic, or
/// nullopt when none exists.
std::optional<FixedModeCertificate> find_blocking_subset(const MultiChannelSystem& sys,
                                                         Complex lambda,
                                                         RankTolerance tol = RankTolerance(),
                                                         std::size_t cap = kDefaultChannelCap);

/// The same question answered through generic rank: factor A - lambda I into
/// rank-one pairs, add each channel as a member (B_j, C_j), minimize over the
/// expanded family with matroid intersection, refine to a member subset, and
/// keep its channel part. Freeing the factor weights can raise the rank, so
/// this route may miss a fixed mode; any subset it does return is deficient.
struct GenericRankBlocking {
  std::size_t generic_rank = 0;  // of lambda I - A - sum B_j F_j C_j
  std::size_t factor_count = 0;  // rank of A - lambda I
  SubsetCertificate member_certificate;  // over factor pairs, then channels
  std::optional<Subset> channels;  // set iff generic_rank < n
};

GenericRankBlocking blocking_subset_via_generic_rank(const MultiChannelSystem& sys,
                                                     Complex lambda,
                                                     RankTolerance tol = RankTolerance());

/// Generic rank of lambda I - A - sum_j B_j F_j C_j over all gains, with
/// lambda I - A kept as one constant block. Equals n exactly when lambda is
/// not a fixed mode.
ConstantPlusFamilyRank grank_closed_loop(const MultiChannelSystem& sys, Complex lambda,
                                         RankTolerance tol, std::size_t trials,
                                         std::uint64_t seed);

/// A computed eigenvalue cluster: representative value and multiplicity.
struct EigenCluster {
  Complex value;
  std::size_t multiplicity = 0;
};

/// Groups sorted eigenvalues whose chain distance is below `tol`; each
/// cluster is represented by its mean.
std::vector<EigenCluster> cluster_eigenvalues(const std::vector<Complex>& sorted, double tol);

struct ModeVerdict {
  Complex lambda;
  std::size_t multiplicity = 1;
  bool is_fixed = false;
  std::optional<FixedModeCertificate> certificate;  // present iff is_fixed
  std::optional<bool> oracle_agrees;
  std::optional<std::size_t> closed_loop_generic_rank;

  bool operator==(const ModeVerdict&) const;
};

struct FixedSpectrumReport {
  std::size_t states = 0;
  std::size_t channels = 0;
  std::vector<Complex> eigenvalues;  // with multiplicity, sorted
  std::vector<ModeVerdict> modes;    // one per eigenvalue cluster
  double tolerance = RankTolerance::kDefault;
  double match_tolerance = kDefaultMatchTolerance;
  std::uint64_t seed = 0;
  std::size_t trials = 0;  // 0 when the oracles were not run

  std::vector<Complex> fixed_spectrum() const;
  bool has_fixed_spectrum() const;
  /// Every mode that ran the oracles agrees with the pencil verdict.
  bool oracles_consistent() const;

  bool operator==(const FixedSpectrumReport&) const;
};

/// Pencil test at every distinct eigenvalue of A. Oracle fields are left
/// empty; see analyze_system.
FixedSpectrumReport fixed_spectrum(const MultiChannelSystem& sys,
                                   RankTolerance tol = RankTolerance(),
                                   std::size_t cap = kDefaultChannelCap,
                                   double cluster_tol = kDefaultClusterTolerance);

/// Eigenvalues of A (with multiplicity) that survive `trials` random real
/// decentralized feedbacks with gains uniform on [-1, 1]. Matching is greedy
/// by increasing distance and one-to-one within each trial.
std::vector<Complex> fixed_spectrum_sampled(const MultiChannelSystem& sys, std::size_t trials,
                                            std::uint64_t seed,
                                            double match_tol = kDefaultMatchTolerance);

struct AnalysisOptions {
  RankTolerance tol;
  std::uint64_t seed = 0;
  std::size_t trials = kDefaultOracleTrials;
  double match_tol = kDefaultMatchTolerance;
  std::size_t cap = kDefaultChannelCap;
};

/// fixed_spectrum plus both oracles: the sampled-feedback intersection and
/// the closed-loop generic rank. oracle_agrees is true when both match the
/// pencil verdict for that mode.
FixedSpectrumReport analyze_system(const MultiChannelSystem& sys, const AnalysisOptions& opts);

/// True when a contains an element within `tol` of b's every element and
/// vice versa, with multiplicities ignored.
bool same_spectrum(const std::vector<Complex>& a, const std::vector<Complex>& b, double tol);

}  // namespace fixedspec
