#pragma once

#include <cstddef>

#include "fixedspec/fixed_spectrum.h"
#include "fixedspec/generic_rank.h"
#include "fixedspec/random.h"

namespace fixedspec {

// Seeded generators for the randomized cross-validation campaigns and the
// `gen` command. Every system they build has real entries.

/// Orthogonal factor of the QR factorization of a uniform random matrix.
Eigen::MatrixXd random_orthogonal(Rng& rng, Eigen::Index n);
Eigen::MatrixXd random_real_matrix(Rng& rng, Eigen::Index rows, Eigen::Index cols);
ComplexMatrix random_complex_matrix(Rng& rng, Eigen::Index rows, Eigen::Index cols);
/// Product of random rows x rank and rank x cols complex factors.
ComplexMatrix random_low_rank(Rng& rng, Eigen::Index rows, Eigen::Index cols, Eigen::Index rank);

/// Dense random A with every channel of size m x l.
MultiChannelSystem random_system(Rng& rng, std::size_t n, std::size_t k, std::size_t m,
                                 std::size_t l);

/// System whose pencil at `lambda` is deficient for the channel subset
/// `blocking`. A is built as lambda I - M with M carrying a zero block that
/// the inputs in `blocking` and the outputs outside it respect, then rotated
/// by a random orthogonal similarity.
MultiChannelSystem embed_fixed_mode(Rng& rng, std::size_t n, std::size_t k, std::size_t m,
                                    std::size_t l, double lambda, const Subset& blocking);

/// A = [[A11, A12], [0, A22]] in rotated coordinates. With `uncontrollable`
/// every B_i vanishes on the second block (eig A22 fixed); otherwise every
/// C_i vanishes on the first block (eig A11 fixed).
MultiChannelSystem block_triangular_system(Rng& rng, std::size_t n, std::size_t k,
                                           std::size_t m, std::size_t l, std::size_t split,
                                           bool uncontrollable);

/// Mixture used by the equivalence campaigns: dense, embedded, uncontrollable,
/// unobservable, and degenerate-channel systems with n <= max_n, k <= max_k
/// and channel sizes in 0..2.
MultiChannelSystem random_campaign_system(Rng& rng, std::size_t max_n, std::size_t max_k);

/// Vectors drawn from random low-dimensional subspaces, with occasional
/// repeats and zero vectors.
VectorPairFamily random_pair_family(Rng& rng, std::size_t max_d, Eigen::Index max_dim);

/// Members with alpha, beta in 0..max_block and at most max_expanded expanded
/// pairs in total (redrawn until the bound holds).
MatrixFamily random_matrix_family(Rng& rng, std::size_t max_d, std::size_t max_block,
                                  Eigen::Index max_dim, std::size_t max_expanded);

struct BorderedTriple {
  ComplexMatrix a;
  ComplexMatrix b;
  ComplexMatrix c;
};

/// Random (A, B, C) with n <= max_n. About half are built with a structural
/// zero pattern that forces the bordered rank below n.
BorderedTriple random_bordered_triple(Rng& rng, std::size_t max_n);

}  // namespace fixedspec
