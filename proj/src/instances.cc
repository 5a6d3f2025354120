#include "fixedspec/instances.h"

#include <Eigen/QR>

#include "fixedspec/errors.h"

namespace fixedspec {

namespace {

// Applies the orthogonal change of coordinates x -> T x to a system.
MultiChannelSystem rotate(MultiChannelSystem sys, const Eigen::MatrixXd& t) {
  const ComplexMatrix tc = t.cast<Complex>();
  sys.a = tc * sys.a * tc.transpose();
  for (auto& ch : sys.channels) {
    ch.input = tc * ch.input;
    ch.output = ch.output * tc.transpose();
  }
  return sys;
}

ComplexMatrix real_block(Rng& rng, Eigen::Index rows, Eigen::Index cols) {
  return random_real_matrix(rng, rows, cols).cast<Complex>();
}

// Column vector from a subspace basis, or a repeat / zero now and then.
ComplexVector draw_vector(Rng& rng, const ComplexMatrix& basis,
                          const std::vector<ComplexVector>& previous) {
  const double u = rng.uniform();
  if (u < 0.15 && !previous.empty()) return previous[rng.uniform_int(0, previous.size() - 1)];
  if (u < 0.2) return ComplexVector::Zero(basis.rows());
  if (u < 0.4) {
    // Coordinate-like sparse vector drawn from a single basis direction.
    return basis.col(static_cast<Eigen::Index>(rng.uniform_int(0, basis.cols() - 1))) *
           rng.complex_box();
  }
  return basis * random_complex_matrix(rng, basis.cols(), 1);
}

}  // namespace

Eigen::MatrixXd random_real_matrix(Rng& rng, Eigen::Index rows, Eigen::Index cols) {
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = rng.uniform(-1.0, 1.0);
  return m;
}

ComplexMatrix random_complex_matrix(Rng& rng, Eigen::Index rows, Eigen::Index cols) {
  ComplexMatrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = rng.complex_box();
  return m;
}

Eigen::MatrixXd random_orthogonal(Rng& rng, Eigen::Index n) {
  if (n == 0) return Eigen::MatrixXd(0, 0);
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(random_real_matrix(rng, n, n));
  return qr.householderQ() * Eigen::MatrixXd::Identity(n, n);
}

ComplexMatrix random_low_rank(Rng& rng, Eigen::Index rows, Eigen::Index cols, Eigen::Index rank) {
  return random_complex_matrix(rng, rows, rank) * random_complex_matrix(rng, rank, cols);
}

MultiChannelSystem random_system(Rng& rng, std::size_t n, std::size_t k, std::size_t m,
                                 std::size_t l) {
  if (n == 0 || k == 0) throw InputError("random_system needs n >= 1 and k >= 1");
  const auto ni = static_cast<Eigen::Index>(n);
  MultiChannelSystem sys;
  sys.a = real_block(rng, ni, ni);
  for (std::size_t i = 0; i < k; ++i) {
    sys.channels.push_back({real_block(rng, ni, static_cast<Eigen::Index>(m)),
                            real_block(rng, static_cast<Eigen::Index>(l), ni)});
  }
  return sys;
}

MultiChannelSystem embed_fixed_mode(Rng& rng, std::size_t n, std::size_t k, std::size_t m,
                                    std::size_t l, double lambda, const Subset& blocking) {
  if (n == 0 || k == 0) throw InputError("embed_fixed_mode needs n >= 1 and k >= 1");
  validate_subset(blocking, k, "blocking subset");
  const auto ni = static_cast<Eigen::Index>(n);
  // Pencil rows split as p free rows + q constrained rows, columns as p'
  // free + q' constrained, with p + p' = n - 1. The q x q' block of M is zero,
  // inputs in `blocking` vanish on the q rows and outputs outside it vanish on
  // the q' columns, so the pencil has rank at most p + p' < n.
  // With every channel blocking and p = 0 all inputs vanish (or with none
  // blocking and p = n - 1 all outputs do), which fixes every mode; avoid
  // those splits when n leaves room.
  std::size_t p_lo = 0;
  std::size_t p_hi = n - 1;
  if (n > 1 && blocking.size() == k) p_lo = 1;
  if (n > 1 && blocking.empty()) p_hi = n - 2;
  const auto p = static_cast<Eigen::Index>(rng.uniform_int(p_lo, p_hi));
  const Eigen::Index p_cols = ni - 1 - p;
  const Eigen::Index q = ni - p;
  const Eigen::Index q_cols = ni - p_cols;

  ComplexMatrix shift = real_block(rng, ni, ni);
  shift.bottomRightCorner(q, q_cols).setZero();

  MultiChannelSystem sys;
  sys.a = lambda * ComplexMatrix::Identity(ni, ni) - shift;
  std::size_t next = 0;
  for (std::size_t i = 0; i < k; ++i) {
    const bool in_blocking = next < blocking.size() && blocking[next] == i;
    if (in_blocking) ++next;
    Channel ch{real_block(rng, ni, static_cast<Eigen::Index>(m)),
               real_block(rng, static_cast<Eigen::Index>(l), ni)};
    if (in_blocking) {
      ch.input.bottomRows(q).setZero();
    } else {
      ch.output.rightCols(q_cols).setZero();
    }
    sys.channels.push_back(std::move(ch));
  }
  return rotate(std::move(sys), random_orthogonal(rng, ni));
}

MultiChannelSystem block_triangular_system(Rng& rng, std::size_t n, std::size_t k,
                                           std::size_t m, std::size_t l, std::size_t split,
                                           bool uncontrollable) {
  if (n == 0 || k == 0 || split > n) throw InputError("block_triangular_system: bad sizes");
  const auto ni = static_cast<Eigen::Index>(n);
  const auto top = static_cast<Eigen::Index>(split);
  MultiChannelSystem sys = random_system(rng, n, k, m, l);
  sys.a.bottomLeftCorner(ni - top, top).setZero();
  for (auto& ch : sys.channels) {
    if (uncontrollable) {
      ch.input.bottomRows(ni - top).setZero();
    } else {
      ch.output.leftCols(top).setZero();
    }
  }
  return rotate(std::move(sys), random_orthogonal(rng, ni));
}

MultiChannelSystem random_campaign_system(Rng& rng, std::size_t max_n, std::size_t max_k) {
  const std::size_t n = rng.uniform_int(1, max_n);
  const std::size_t k = rng.uniform_int(1, max_k);
  const std::size_t m = rng.uniform_int(1, 2);
  const std::size_t l = rng.uniform_int(1, 2);
  switch (rng.uniform_int(0, 4)) {
    case 0:
      return random_system(rng, n, k, m, l);
    case 1: {
      Subset blocking;
      for (std::size_t i = 0; i < k; ++i) {
        if (rng.bernoulli(0.5)) blocking.push_back(i);
      }
      const double lambda = static_cast<double>(rng.uniform_int(0, 4)) - 2.0;
      return embed_fixed_mode(rng, n, k, m, l, lambda, blocking);
    }
    case 2:
      return block_triangular_system(rng, n, k, m, l, rng.uniform_int(0, n - 1), true);
    case 3:
      return block_triangular_system(rng, n, k, m, l, rng.uniform_int(1, n), false);
    default: {
      // Some channels lose their input or output entirely.
      MultiChannelSystem sys = random_system(rng, n, k, m, l);
      for (auto& ch : sys.channels) {
        const auto choice = rng.uniform_int(0, 3);
        if (choice == 0) ch.input = ComplexMatrix::Zero(sys.states(), 0);
        if (choice == 1) ch.output = ComplexMatrix::Zero(0, sys.states());
        if (choice == 2) ch.input.setZero();
      }
      return sys;
    }
  }
}

VectorPairFamily random_pair_family(Rng& rng, std::size_t max_d, Eigen::Index max_dim) {
  VectorPairFamily fam;
  fam.n1 = static_cast<Eigen::Index>(rng.uniform_int(1, static_cast<std::size_t>(max_dim)));
  fam.n2 = static_cast<Eigen::Index>(rng.uniform_int(1, static_cast<std::size_t>(max_dim)));
  const std::size_t d = rng.uniform_int(0, max_d);
  const auto col_dim = static_cast<Eigen::Index>(rng.uniform_int(1, static_cast<std::size_t>(fam.n1)));
  const auto row_dim = static_cast<Eigen::Index>(rng.uniform_int(1, static_cast<std::size_t>(fam.n2)));
  const ComplexMatrix col_basis = random_complex_matrix(rng, fam.n1, col_dim);
  const ComplexMatrix row_basis = random_complex_matrix(rng, fam.n2, row_dim);
  std::vector<ComplexVector> cols, rows;
  for (std::size_t i = 0; i < d; ++i) {
    cols.push_back(draw_vector(rng, col_basis, cols));
    rows.push_back(draw_vector(rng, row_basis, rows));
    fam.pairs.push_back({cols.back(), rows.back().transpose()});
  }
  return fam;
}

MatrixFamily random_matrix_family(Rng& rng, std::size_t max_d, std::size_t max_block,
                                  Eigen::Index max_dim, std::size_t max_expanded) {
  while (true) {
    MatrixFamily fam;
    fam.n1 = static_cast<Eigen::Index>(rng.uniform_int(1, static_cast<std::size_t>(max_dim)));
    fam.n2 = static_cast<Eigen::Index>(rng.uniform_int(1, static_cast<std::size_t>(max_dim)));
    const std::size_t d = rng.uniform_int(0, max_d);
    const auto col_dim = static_cast<Eigen::Index>(rng.uniform_int(1, static_cast<std::size_t>(fam.n1)));
    const auto row_dim = static_cast<Eigen::Index>(rng.uniform_int(1, static_cast<std::size_t>(fam.n2)));
    const ComplexMatrix col_basis = random_complex_matrix(rng, fam.n1, col_dim);
    const ComplexMatrix row_basis = random_complex_matrix(rng, fam.n2, row_dim);
    std::vector<ComplexVector> cols, rows;
    std::size_t expanded = 0;
    for (std::size_t t = 0; t < d; ++t) {
      const auto alpha = static_cast<Eigen::Index>(rng.uniform_int(0, max_block));
      const auto beta = static_cast<Eigen::Index>(rng.uniform_int(0, max_block));
      MatrixMember member{ComplexMatrix(fam.n1, alpha), ComplexMatrix(beta, fam.n2)};
      for (Eigen::Index i = 0; i < alpha; ++i) {
        cols.push_back(draw_vector(rng, col_basis, cols));
        member.left.col(i) = cols.back();
      }
      for (Eigen::Index j = 0; j < beta; ++j) {
        rows.push_back(draw_vector(rng, row_basis, rows));
        member.right.row(j) = rows.back().transpose();
      }
      expanded += static_cast<std::size_t>(alpha * beta);
      fam.members.push_back(std::move(member));
    }
    if (expanded <= max_expanded) return fam;
  }
}

BorderedTriple random_bordered_triple(Rng& rng, std::size_t max_n) {
  const std::size_t n = rng.uniform_int(1, max_n);
  const auto ni = static_cast<Eigen::Index>(n);
  const auto m = static_cast<Eigen::Index>(rng.uniform_int(0, 3));
  const auto l = static_cast<Eigen::Index>(rng.uniform_int(0, 3));
  BorderedTriple t{random_complex_matrix(rng, ni, ni), random_complex_matrix(rng, ni, m),
                   random_complex_matrix(rng, l, ni)};
  switch (rng.uniform_int(0, 3)) {
    case 0:
      break;
    case 1: {
      // Low-rank A; the border may or may not restore full rank.
      t.a = random_low_rank(rng, ni, ni, static_cast<Eigen::Index>(rng.uniform_int(0, n - 1)));
      break;
    }
    default: {
      // p free rows and p' free columns with p + p' < n: the q x q' corner
      // of A, the bottom q rows of B and the right q' columns of C vanish.
      const auto p = static_cast<Eigen::Index>(rng.uniform_int(0, n - 1));
      const auto p_cols = static_cast<Eigen::Index>(rng.uniform_int(0, n - 1 - static_cast<std::size_t>(p)));
      const Eigen::Index q = ni - p;
      const Eigen::Index q_cols = ni - p_cols;
      t.a.bottomRightCorner(q, q_cols).setZero();
      t.b.bottomRows(q).setZero();
      t.c.rightCols(q_cols).setZero();
      // Independent row and column changes of basis preserve the bordered
      // rank.
      const ComplexMatrix row_change = random_orthogonal(rng, ni).cast<Complex>();
      const ComplexMatrix col_change = random_orthogonal(rng, ni).cast<Complex>();
      t.a = row_change * t.a * col_change;
      t.b = row_change * t.b;
      t.c = t.c * col_change;
      break;
    }
  }
  return t;
}

}  // namespace fixedspec
