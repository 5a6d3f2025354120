#include "fixedspec/generic_rank.h"

#include <algorithm>
#include <deque>
#include <limits>
#include <memory>
#include <string>
#include <thread>

#include "fixedspec/errors.h"
#include "fixedspec/random.h"

namespace fixedspec {

namespace {

constexpr double kAnnulusInner = 0.5;
constexpr double kAnnulusOuter = 1.5;
// Below this many subsets the scan stays on the calling thread.
constexpr std::uint64_t kParallelThreshold = 1U << 12;

bool better(const SubsetCertificate& a, const SubsetCertificate& b) {
  if (a.value != b.value) return a.value < b.value;
  return lex_less(a.subset, b.subset);
}

// Minimum of eval(S) over all subsets of {0..d-1}, ties broken by lex_less.
// Partitions of the mask range may run on separate threads; the merge uses
// the same total order, so the answer matches a sequential scan.
template <class Eval>
SubsetCertificate minimize_over_subsets(std::size_t d, std::size_t cap, const char* what,
                                        const Eval& eval) {
  if (d > cap) {
    throw CapacityError(std::string(what) + ": " + std::to_string(d) +
                        " elements exceeds the enumeration cap of " + std::to_string(cap) +
                        "; use the matroid-intersection or sampling route");
  }
  const std::uint64_t total = std::uint64_t{1} << d;
  std::size_t workers = 1;
  if (total >= kParallelThreshold) {
    workers = std::clamp<std::size_t>(std::thread::hardware_concurrency(), 1, 8);
  }
  std::vector<SubsetCertificate> best(workers);
  for (auto& b : best) b.value = std::numeric_limits<std::size_t>::max();

  auto scan = [&](std::size_t worker) {
    const std::uint64_t begin = total * worker / workers;
    const std::uint64_t end = total * (worker + 1) / workers;
    for (std::uint64_t mask = begin; mask < end; ++mask) {
      SubsetCertificate candidate{subset_from_mask(mask, d), 0};
      candidate.value = eval(candidate.subset);
      if (better(candidate, best[worker])) best[worker] = std::move(candidate);
    }
  };
  if (workers == 1) {
    scan(0);
  } else {
    std::vector<std::thread> threads;
    for (std::size_t w = 0; w < workers; ++w) threads.emplace_back(scan, w);
    for (auto& t : threads) t.join();
  }
  SubsetCertificate result = best[0];
  for (std::size_t w = 1; w < workers; ++w) {
    if (better(best[w], result)) result = best[w];
  }
  return result;
}

double max_column_norm(const std::vector<VectorPair>& pairs, bool rows) {
  double scale = 0.0;
  for (const auto& p : pairs) scale = std::max(scale, rows ? p.row.norm() : p.column.norm());
  return scale;
}

// Vectors of one side of the family as column vectors (rows are transposed,
// not conjugated; linear independence is unaffected).
std::vector<ComplexVector> side_vectors(const VectorPairFamily& fam, bool rows) {
  std::vector<ComplexVector> out;
  out.reserve(fam.size());
  for (const auto& p : fam.pairs) out.push_back(rows ? ComplexVector(p.row.transpose()) : p.column);
  return out;
}

// Independence structure of one linear matroid relative to the current
// common independent set.
class MatroidView {
 public:
  MatroidView(std::vector<ComplexVector> vectors, Eigen::Index dim, double threshold)
      : vectors_(std::move(vectors)), dim_(dim), threshold_(threshold) {}

  void rebuild(const Subset& current) {
    current_ = current;
    full_ = std::make_unique<SpanBasis>(dim_, threshold_);
    for (std::size_t x : current) full_->add(vectors_[x]);
    without_.clear();
    for (std::size_t skip = 0; skip < current.size(); ++skip) {
      SpanBasis basis(dim_, threshold_);
      for (std::size_t i = 0; i < current.size(); ++i) {
        if (i != skip) basis.add(vectors_[current[i]]);
      }
      without_.push_back(std::move(basis));
    }
  }

  /// current + y is independent.
  bool extends(std::size_t y) const { return full_->is_independent(vectors_[y]); }
  /// current - current[slot] + y is independent.
  bool exchanges(std::size_t slot, std::size_t y) const {
    return without_[slot].is_independent(vectors_[y]);
  }

 private:
  std::vector<ComplexVector> vectors_;
  Eigen::Index dim_;
  double threshold_;
  Subset current_;
  std::unique_ptr<SpanBasis> full_;
  std::vector<SpanBasis> without_;
};

ComplexMatrix sample_sum(const MatrixFamily& fam, Rng& rng) {
  ComplexMatrix sum = ComplexMatrix::Zero(fam.n1, fam.n2);
  for (const auto& m : fam.members) {
    if (m.left.cols() == 0 || m.right.rows() == 0) continue;
    ComplexMatrix p(m.left.cols(), m.right.rows());
    for (Eigen::Index i = 0; i < p.rows(); ++i)
      for (Eigen::Index j = 0; j < p.cols(); ++j)
        p(i, j) = rng.complex_annulus(kAnnulusInner, kAnnulusOuter);
    sum += m.left * p * m.right;
  }
  return sum;
}

}  // namespace

void VectorPairFamily::validate() const {
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    if (pairs[i].column.size() != n1 || pairs[i].row.size() != n2) {
      throw InputError("pair " + std::to_string(i + 1) + ": expected column length " +
                       std::to_string(n1) + " and row length " + std::to_string(n2));
    }
    require_finite(pairs[i].column, "pair " + std::to_string(i + 1) + " column");
    require_finite(pairs[i].row, "pair " + std::to_string(i + 1) + " row");
  }
}

void MatrixFamily::validate() const {
  for (std::size_t i = 0; i < members.size(); ++i) {
    const auto& m = members[i];
    const std::string label = "member " + std::to_string(i + 1);
    if (m.left.rows() != n1) {
      throw InputError(label + ": W must have " + std::to_string(n1) + " rows");
    }
    if (m.right.cols() != n2) {
      throw InputError(label + ": R must have " + std::to_string(n2) + " columns");
    }
    require_finite(m.left, label + " W");
    require_finite(m.right, label + " R");
  }
}

ComplexMatrix aggregate_columns(const VectorPairFamily& fam, const Subset& s) {
  ComplexMatrix out(fam.n1, static_cast<Eigen::Index>(s.size()));
  for (std::size_t j = 0; j < s.size(); ++j) out.col(j) = fam.pairs[s[j]].column;
  return out;
}

ComplexMatrix aggregate_rows(const VectorPairFamily& fam, const Subset& s) {
  ComplexMatrix out(static_cast<Eigen::Index>(s.size()), fam.n2);
  for (std::size_t i = 0; i < s.size(); ++i) out.row(i) = fam.pairs[s[i]].row;
  return out;
}

ComplexMatrix aggregate_left(const MatrixFamily& fam, const Subset& s) {
  Eigen::Index cols = 0;
  for (std::size_t i : s) cols += fam.members[i].left.cols();
  ComplexMatrix out(fam.n1, cols);
  Eigen::Index at = 0;
  for (std::size_t i : s) {
    const auto& w = fam.members[i].left;
    out.middleCols(at, w.cols()) = w;
    at += w.cols();
  }
  return out;
}

ComplexMatrix aggregate_right(const MatrixFamily& fam, const Subset& s) {
  Eigen::Index rows = 0;
  for (std::size_t i : s) rows += fam.members[i].right.rows();
  ComplexMatrix out(rows, fam.n2);
  Eigen::Index at = 0;
  for (std::size_t i : s) {
    const auto& r = fam.members[i].right;
    out.middleRows(at, r.rows()) = r;
    at += r.rows();
  }
  return out;
}

std::size_t certificate_value(const VectorPairFamily& fam, const Subset& s, RankTolerance tol) {
  validate_subset(s, fam.size(), "certificate subset");
  return numeric_rank(aggregate_columns(fam, s), tol) +
         numeric_rank(aggregate_rows(fam, complement(s, fam.size())), tol);
}

std::size_t certificate_value(const MatrixFamily& fam, const Subset& s, RankTolerance tol) {
  validate_subset(s, fam.size(), "certificate subset");
  return numeric_rank(aggregate_left(fam, s), tol) +
         numeric_rank(aggregate_right(fam, complement(s, fam.size())), tol);
}

bool is_jointly_independent(const VectorPairFamily& fam, const Subset& s, RankTolerance tol) {
  return numeric_rank(aggregate_columns(fam, s), tol) == s.size() &&
         numeric_rank(aggregate_rows(fam, s), tol) == s.size();
}

MatroidIntersection grank_pairs_matroid(const VectorPairFamily& fam, RankTolerance tol) {
  fam.validate();
  const std::size_t d = fam.size();
  MatroidView columns(side_vectors(fam, false), fam.n1,
                      tol.relative() * max_column_norm(fam.pairs, false));
  MatroidView rows(side_vectors(fam, true), fam.n2,
                   tol.relative() * max_column_norm(fam.pairs, true));

  std::vector<bool> in_set(d, false);
  constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();

  while (true) {
    Subset current;
    std::vector<std::size_t> slot(d, kNone);
    for (std::size_t i = 0; i < d; ++i) {
      if (in_set[i]) {
        slot[i] = current.size();
        current.push_back(i);
      }
    }
    columns.rebuild(current);
    rows.rebuild(current);

    // Exchange graph: x -> y when current - x + y is column-independent,
    // y -> x when it is row-independent (x in current, y outside).
    std::vector<std::vector<std::size_t>> out_edges(d);
    std::vector<bool> source(d, false), sink(d, false);
    for (std::size_t y = 0; y < d; ++y) {
      if (in_set[y]) continue;
      source[y] = columns.extends(y);
      sink[y] = rows.extends(y);
      for (std::size_t x : current) {
        if (columns.exchanges(slot[x], y)) out_edges[x].push_back(y);
        if (rows.exchanges(slot[x], y)) out_edges[y].push_back(x);
      }
    }

    // Breadth-first search gives a shortest source-to-sink path, which keeps
    // the augmented set independent in both matroids.
    std::vector<std::size_t> parent(d, kNone);
    std::vector<bool> seen(d, false);
    std::deque<std::size_t> queue;
    for (std::size_t y = 0; y < d; ++y) {
      if (source[y]) {
        seen[y] = true;
        queue.push_back(y);
      }
    }
    std::size_t reached = kNone;
    while (!queue.empty() && reached == kNone) {
      const std::size_t v = queue.front();
      queue.pop_front();
      if (sink[v]) {
        reached = v;
        break;
      }
      for (std::size_t u : out_edges[v]) {
        if (!seen[u]) {
          seen[u] = true;
          parent[u] = v;
          queue.push_back(u);
        }
      }
    }

    if (reached != kNone) {
      for (std::size_t v = reached; v != kNone; v = parent[v]) in_set[v] = !in_set[v];
      continue;
    }

    // No augmenting path: the elements that can still reach a sink form a
    // set U with rank_columns(U) + rank_rows(E - U) == |current|.
    std::vector<std::vector<std::size_t>> in_edges(d);
    for (std::size_t v = 0; v < d; ++v)
      for (std::size_t u : out_edges[v]) in_edges[u].push_back(v);
    std::vector<bool> reaches_sink(d, false);
    for (std::size_t y = 0; y < d; ++y) {
      if (sink[y]) {
        reaches_sink[y] = true;
        queue.push_back(y);
      }
    }
    while (!queue.empty()) {
      const std::size_t v = queue.front();
      queue.pop_front();
      for (std::size_t u : in_edges[v]) {
        if (!reaches_sink[u]) {
          reaches_sink[u] = true;
          queue.push_back(u);
        }
      }
    }

    MatroidIntersection result;
    result.rank = current.size();
    result.witness = current;
    for (std::size_t v = 0; v < d; ++v) {
      if (reaches_sink[v]) result.certificate.subset.push_back(v);
    }
    result.certificate.value = certificate_value(fam, result.certificate.subset, tol);
    return result;
  }
}

SubsetCertificate grank_pairs_minformula(const VectorPairFamily& fam, RankTolerance tol,
                                         std::size_t cap) {
  fam.validate();
  return minimize_over_subsets(fam.size(), cap, "grank_pairs_minformula",
                               [&](const Subset& s) { return certificate_value(fam, s, tol); });
}

SubsetCertificate grank_matrix_minformula(const MatrixFamily& fam, RankTolerance tol,
                                          std::size_t cap) {
  fam.validate();
  return minimize_over_subsets(fam.size(), cap, "grank_matrix_minformula",
                               [&](const Subset& s) { return certificate_value(fam, s, tol); });
}

std::size_t grank_sampled(const VectorPairFamily& fam, std::size_t trials, std::uint64_t seed,
                          RankTolerance tol) {
  fam.validate();
  if (trials == 0) throw InputError("grank_sampled needs at least one trial");
  Rng rng(seed);
  std::size_t best = 0;
  for (std::size_t trial = 0; trial < trials; ++trial) {
    ComplexMatrix sum = ComplexMatrix::Zero(fam.n1, fam.n2);
    for (const auto& p : fam.pairs) {
      sum += rng.complex_annulus(kAnnulusInner, kAnnulusOuter) * (p.column * p.row);
    }
    best = std::max(best, numeric_rank(sum, tol));
  }
  return best;
}

std::size_t grank_sampled(const MatrixFamily& fam, std::size_t trials, std::uint64_t seed,
                          RankTolerance tol) {
  fam.validate();
  if (trials == 0) throw InputError("grank_sampled needs at least one trial");
  Rng rng(seed);
  std::size_t best = 0;
  for (std::size_t trial = 0; trial < trials; ++trial) {
    best = std::max(best, numeric_rank(sample_sum(fam, rng), tol));
  }
  return best;
}

ExpandedFamily expand_matrix_family(const MatrixFamily& fam) {
  fam.validate();
  ExpandedFamily out;
  out.pairs.n1 = fam.n1;
  out.pairs.n2 = fam.n2;
  for (std::size_t t = 0; t < fam.size(); ++t) {
    const auto& m = fam.members[t];
    for (Eigen::Index i = 0; i < m.left.cols(); ++i) {
      for (Eigen::Index j = 0; j < m.right.rows(); ++j) {
        out.pairs.pairs.push_back({m.left.col(i), m.right.row(j)});
        out.origin.push_back(
            {t, static_cast<std::size_t>(i), static_cast<std::size_t>(j)});
      }
    }
  }
  return out;
}

SubsetCertificate refine_min_subset(const MatrixFamily& fam, const Subset& expanded_subset,
                                    RankTolerance tol) {
  const ExpandedFamily expanded = expand_matrix_family(fam);
  validate_subset(expanded_subset, expanded.pairs.size(), "refine_min_subset");

  // covered[t][i]: column i of W_t is used on the column side.
  std::vector<std::vector<bool>> covered(fam.size());
  for (std::size_t t = 0; t < fam.size(); ++t) {
    covered[t].assign(static_cast<std::size_t>(fam.members[t].left.cols()), false);
  }
  for (std::size_t e : expanded_subset) {
    const auto& o = expanded.origin[e];
    covered[o.member][o.column] = true;
  }

  SubsetCertificate refined;
  for (std::size_t t = 0; t < fam.size(); ++t) {
    // Either every column of W_t is on the column side (drop R_t's rows from
    // the row side) or some column is missing, in which case every row of
    // R_t is already on the row side (drop W_t's columns instead).
    if (std::all_of(covered[t].begin(), covered[t].end(), [](bool c) { return c; })) {
      refined.subset.push_back(t);
    }
  }
  refined.value = certificate_value(fam, refined.subset, tol);
  return refined;
}

VectorPairFamily prepend_rank_factors(const ComplexMatrix& m, const MatrixFamily& fam,
                                      RankTolerance tol) {
  if (m.rows() != fam.n1 || m.cols() != fam.n2) {
    throw InputError("constant term is " + std::to_string(m.rows()) + "x" +
                     std::to_string(m.cols()) + " but the family is " + std::to_string(fam.n1) +
                     "x" + std::to_string(fam.n2));
  }
  const RankFactorization factors = rank_factorize(m, tol);
  VectorPairFamily out;
  out.n1 = fam.n1;
  out.n2 = fam.n2;
  for (std::size_t i = 0; i < factors.rank; ++i) {
    const auto idx = static_cast<Eigen::Index>(i);
    out.pairs.push_back({factors.left.col(idx), factors.right.row(idx)});
  }
  for (auto& p : expand_matrix_family(fam).pairs.pairs) out.pairs.push_back(std::move(p));
  return out;
}

std::size_t constant_certificate_value(const ComplexMatrix& m, const MatrixFamily& fam,
                                       const Subset& s, RankTolerance tol) {
  validate_subset(s, fam.size(), "certificate subset");
  const ComplexMatrix w = aggregate_left(fam, s);
  const ComplexMatrix r = aggregate_right(fam, complement(s, fam.size()));
  ComplexMatrix bordered = ComplexMatrix::Zero(m.rows() + r.rows(), m.cols() + w.cols());
  bordered.topLeftCorner(m.rows(), m.cols()) = m;
  bordered.topRightCorner(m.rows(), w.cols()) = w;
  bordered.bottomLeftCorner(r.rows(), m.cols()) = r;
  return numeric_rank(bordered, tol);
}

SubsetCertificate grank_constant_minformula(const ComplexMatrix& m, const MatrixFamily& fam,
                                            RankTolerance tol, std::size_t cap) {
  fam.validate();
  if (m.rows() != fam.n1 || m.cols() != fam.n2) {
    throw InputError("constant term is " + std::to_string(m.rows()) + "x" +
                     std::to_string(m.cols()) + ", family is " + std::to_string(fam.n1) + "x" +
                     std::to_string(fam.n2));
  }
  require_finite(m, "M");
  return minimize_over_subsets(fam.size(), cap, "grank_constant_minformula", [&](const Subset& s) {
    return constant_certificate_value(m, fam, s, tol);
  });
}

ConstantPlusFamilyRank grank_constant_plus_family(const ComplexMatrix& m, const MatrixFamily& fam,
                                                  RankTolerance tol, std::size_t trials,
                                                  std::uint64_t seed, std::size_t cap) {
  if (trials == 0) throw InputError("grank_constant_plus_family needs at least one trial");
  ConstantPlusFamilyRank out;
  out.certificate = grank_constant_minformula(m, fam, tol, cap);
  out.combinatorial = out.certificate.value;
  out.constant_rank = numeric_rank(m, tol);
  out.prepended = grank_pairs_matroid(prepend_rank_factors(m, fam, tol), tol).rank;
  Rng rng(seed);
  for (std::size_t trial = 0; trial < trials; ++trial) {
    out.sampled = std::max(out.sampled, numeric_rank(m + sample_sum(fam, rng), tol));
  }
  return out;
}

}  // namespace fixedspec
