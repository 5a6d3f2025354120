#include "fixedspec/linalg.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "fixedspec/errors.h"
#include "fixedspec/random.h"

namespace fixedspec {

namespace {

// Columns of `b` (zero-padded to the height of `x`) that extend the column
// space of `x`, chosen greedily left to right until `needed` are found.
std::vector<Eigen::Index> extend_column_space(const ComplexMatrix& x, const ComplexMatrix& b,
                                              std::size_t needed, RankTolerance tol) {
  std::vector<Eigen::Index> chosen;
  if (needed == 0) return chosen;
  double scale = x.size() > 0 ? singular_values(x)(0) : 0.0;
  for (Eigen::Index j = 0; j < b.cols(); ++j) scale = std::max(scale, b.col(j).norm());
  SpanBasis span(x.rows(), tol.relative() * scale);
  for (Eigen::Index j = 0; j < x.cols(); ++j) span.add(x.col(j));
  for (Eigen::Index j = 0; j < b.cols() && chosen.size() < needed; ++j) {
    ComplexVector candidate = ComplexVector::Zero(x.rows());
    candidate.head(b.rows()) = b.col(j);
    if (span.add(candidate)) chosen.push_back(j);
  }
  return chosen;
}

// E with rank [A + B E; C] == n, or nullopt when the columns of B cannot fill
// the null space of [A; C].
std::optional<ComplexMatrix> column_completion(const ComplexMatrix& a, const ComplexMatrix& b,
                                               const ComplexMatrix& c, RankTolerance tol) {
  const Eigen::Index n = a.rows();
  ComplexMatrix stacked(n + c.rows(), n);
  stacked.topRows(n) = a;
  stacked.bottomRows(c.rows()) = c;
  ComplexMatrix gain = ComplexMatrix::Zero(b.cols(), n);
  if (n == 0) return gain;
  Eigen::JacobiSVD<ComplexMatrix> svd(stacked, Eigen::ComputeFullV);
  const std::size_t r0 = numeric_rank(stacked, tol);
  const std::size_t deficit = static_cast<std::size_t>(n) - r0;
  if (deficit == 0) return gain;
  const auto chosen = extend_column_space(stacked, b, deficit, tol);
  if (chosen.size() < deficit) return std::nullopt;
  const ComplexMatrix null_basis = svd.matrixV().rightCols(static_cast<Eigen::Index>(deficit));
  for (std::size_t j = 0; j < deficit; ++j) {
    gain.row(chosen[j]) += null_basis.col(static_cast<Eigen::Index>(j)).adjoint();
  }
  return gain;
}

ComplexMatrix random_complex(Rng& rng, Eigen::Index rows, Eigen::Index cols) {
  ComplexMatrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = rng.complex_box();
  return m;
}

void check_bordered_dims(const ComplexMatrix& a, const ComplexMatrix& b, const ComplexMatrix& c) {
  if (a.rows() != a.cols()) {
    throw InputError("A must be square, got " + std::to_string(a.rows()) + "x" +
                     std::to_string(a.cols()));
  }
  if (b.rows() != a.rows()) {
    throw InputError("B must have " + std::to_string(a.rows()) + " rows, got " +
                     std::to_string(b.rows()));
  }
  if (c.cols() != a.cols()) {
    throw InputError("C must have " + std::to_string(a.cols()) + " columns, got " +
                     std::to_string(c.cols()));
  }
  require_finite(a, "A");
  require_finite(b, "B");
  require_finite(c, "C");
}

}  // namespace

RankTolerance::RankTolerance(double relative) : relative_(relative) {
  if (!(relative > 0.0 && relative < 1.0)) {
    throw InputError("rank tolerance must lie in (0, 1), got " + std::to_string(relative));
  }
}

void require_finite(const ComplexMatrix& m, std::string_view what) {
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      const Complex z = m(i, j);
      if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) {
        throw InputError(std::string(what) + ": non-finite entry at (" + std::to_string(i) +
                         ", " + std::to_string(j) + ")");
      }
    }
  }
}

Eigen::VectorXd singular_values(const ComplexMatrix& m) {
  if (m.size() == 0) return Eigen::VectorXd();
  Eigen::JacobiSVD<ComplexMatrix> svd(m);
  return svd.singularValues();
}

std::size_t numeric_rank(const ComplexMatrix& m, RankTolerance tol) {
  require_finite(m, "matrix");
  const Eigen::VectorXd sv = singular_values(m);
  if (sv.size() == 0 || sv(0) == 0.0) return 0;
  const double cutoff = tol.relative() * sv(0);
  std::size_t rank = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i) {
    if (sv(i) > cutoff) ++rank;
  }
  return rank;
}

bool complex_less(const Complex& a, const Complex& b) {
  if (a.real() != b.real()) return a.real() < b.real();
  return a.imag() < b.imag();
}

std::vector<Complex> eigenvalues(const ComplexMatrix& a) {
  if (a.rows() != a.cols()) {
    throw InputError("eigenvalues need a square matrix, got " + std::to_string(a.rows()) + "x" +
                     std::to_string(a.cols()));
  }
  require_finite(a, "A");
  std::vector<Complex> out;
  if (a.rows() == 0) return out;
  Eigen::ComplexEigenSolver<ComplexMatrix> solver(a, /*computeEigenvectors=*/false);
  if (solver.info() != Eigen::Success) throw std::runtime_error("eigenvalue iteration failed");
  out.assign(solver.eigenvalues().data(), solver.eigenvalues().data() + a.rows());
  std::sort(out.begin(), out.end(), complex_less);
  return out;
}

RankFactorization rank_factorize(const ComplexMatrix& m, RankTolerance tol) {
  require_finite(m, "matrix");
  RankFactorization f;
  f.rank = numeric_rank(m, tol);
  const auto t = static_cast<Eigen::Index>(f.rank);
  if (t == 0) {
    f.left = ComplexMatrix::Zero(m.rows(), 0);
    f.right = ComplexMatrix::Zero(0, m.cols());
    return f;
  }
  Eigen::JacobiSVD<ComplexMatrix> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  // Split each singular value evenly between the factors.
  const Eigen::VectorXd root = svd.singularValues().head(t).cwiseSqrt();
  f.left = svd.matrixU().leftCols(t) * root.asDiagonal();
  f.right = root.asDiagonal() * svd.matrixV().leftCols(t).adjoint();
  return f;
}

ComplexMatrix assemble_bordered(const ComplexMatrix& a, const ComplexMatrix& b,
                                const ComplexMatrix& c) {
  check_bordered_dims(a, b, c);
  const Eigen::Index n = a.rows();
  ComplexMatrix out = ComplexMatrix::Zero(n + c.rows(), n + b.cols());
  out.topLeftCorner(n, n) = a;
  out.topRightCorner(n, b.cols()) = b;
  out.bottomLeftCorner(c.rows(), n) = c;
  return out;
}

std::size_t bordered_rank(const ComplexMatrix& a, const ComplexMatrix& b, const ComplexMatrix& c,
                          RankTolerance tol) {
  return numeric_rank(assemble_bordered(a, b, c), tol);
}

std::optional<RankRestoringGains> rank_restoring_gains(const ComplexMatrix& a,
                                                       const ComplexMatrix& b,
                                                       const ComplexMatrix& c,
                                                       RankTolerance tol, std::uint64_t seed) {
  check_bordered_dims(a, b, c);
  const auto n = static_cast<std::size_t>(a.rows());
  if (bordered_rank(a, b, c, tol) < n) return std::nullopt;

  RankRestoringGains gains;
  gains.input_gain = ComplexMatrix::Zero(b.cols(), a.cols());
  gains.output_injection = ComplexMatrix::Zero(a.rows(), c.rows());
  auto restores = [&](const RankRestoringGains& g) {
    return numeric_rank(a + b * g.input_gain + g.output_injection * c, tol) == n;
  };

  if (auto e = column_completion(a, b, c, tol)) {
    gains.input_gain = *e;
    const ComplexMatrix closed = a + b * gains.input_gain;
    // Row completion is column completion on the transpose with no border.
    const ComplexMatrix empty = ComplexMatrix::Zero(0, a.rows());
    if (auto k = column_completion(closed.transpose(), c.transpose(), empty, tol)) {
      gains.output_injection = k->transpose();
      if (restores(gains)) return gains;
    }
  }

  Rng rng(seed);
  constexpr int kMaxDraws = 64;
  const double scale = std::max(1.0, a.norm());
  for (int draw = 0; draw < kMaxDraws; ++draw) {
    RankRestoringGains candidate{scale * random_complex(rng, b.cols(), a.cols()),
                                 scale * random_complex(rng, a.rows(), c.rows())};
    if (restores(candidate)) return candidate;
  }
  throw std::runtime_error("rank_restoring_gains: no restoring gains found although the "
                           "bordered matrix has full rank; the input is ill-conditioned");
}

bool lemma1_equivalence_check(const ComplexMatrix& a, const ComplexMatrix& b,
                              const ComplexMatrix& c, RankTolerance tol, std::size_t trials,
                              std::uint64_t seed) {
  check_bordered_dims(a, b, c);
  if (trials == 0) throw InputError("lemma1_equivalence_check needs at least one trial");
  const auto n = static_cast<std::size_t>(a.rows());
  const bool pencil_deficient = bordered_rank(a, b, c, tol) < n;

  Rng rng(derive_seed(seed, 0));
  bool always_singular = true;
  for (std::size_t trial = 0; trial < trials; ++trial) {
    const ComplexMatrix e = random_complex(rng, b.cols(), a.cols());
    const ComplexMatrix k = random_complex(rng, a.rows(), c.rows());
    if (numeric_rank(a + b * e + k * c, tol) == n) always_singular = false;
  }
  if (!pencil_deficient) {
    const auto gains = rank_restoring_gains(a, b, c, tol, derive_seed(seed, 1));
    if (!gains) return false;
    const ComplexMatrix closed = a + b * gains->input_gain + gains->output_injection * c;
    if (numeric_rank(closed, tol) == n) always_singular = false;
  }
  return pencil_deficient == always_singular;
}

SpanBasis::SpanBasis(Eigen::Index dim, double threshold) : dim_(dim), threshold_(threshold) {}

ComplexVector SpanBasis::project_out(const ComplexVector& v) const {
  ComplexVector r = v;
  // Two passes of modified Gram-Schmidt keep the residual orthogonal to
  // working precision.
  for (int pass = 0; pass < 2; ++pass) {
    for (const auto& q : basis_) r -= q * q.dot(r);
  }
  return r;
}

double SpanBasis::residual_norm(const ComplexVector& v) const {
  if (v.size() != dim_) throw InputError("SpanBasis: vector length mismatch");
  return project_out(v).norm();
}

bool SpanBasis::add(const ComplexVector& v) {
  if (v.size() != dim_) throw InputError("SpanBasis: vector length mismatch");
  ComplexVector r = project_out(v);
  const double norm = r.norm();
  if (!(norm > threshold_)) return false;
  basis_.push_back(r / norm);
  return true;
}

}  // namespace fixedspec
