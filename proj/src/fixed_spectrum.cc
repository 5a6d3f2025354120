#include "fixedspec/fixed_spectrum.h"

#include <algorithm>
#include <string>
#include <tuple>

#include "fixedspec/errors.h"
#include "fixedspec/random.h"

namespace fixedspec {

namespace {

void check_channel_cap(const MultiChannelSystem& sys, std::size_t cap) {
  if (sys.channel_count() > cap) {
    throw CapacityError(std::to_string(sys.channel_count()) +
                        " channels exceeds the subset enumeration cap of " + std::to_string(cap));
  }
}

ComplexMatrix shifted(const MultiChannelSystem& sys, Complex lambda) {
  return lambda * ComplexMatrix::Identity(sys.states(), sys.states()) - sys.a;
}

Eigen::MatrixXd random_real(Rng& rng, Eigen::Index rows, Eigen::Index cols) {
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = rng.uniform(-1.0, 1.0);
  return m;
}

bool near_any(Complex z, const std::vector<Complex>& values, double tol) {
  return std::any_of(values.begin(), values.end(),
                     [&](const Complex& v) { return std::abs(v - z) <= tol; });
}

}  // namespace

void MultiChannelSystem::validate() const {
  if (a.rows() != a.cols()) {
    throw InputError("A must be square, got " + std::to_string(a.rows()) + "x" +
                     std::to_string(a.cols()));
  }
  if (channels.empty()) throw InputError("a system needs at least one channel");
  require_finite(a, "A");
  for (std::size_t i = 0; i < channels.size(); ++i) {
    const auto label = "channel " + std::to_string(i + 1);
    if (channels[i].input.rows() != a.rows()) {
      throw InputError(label + ": B must have " + std::to_string(a.rows()) + " rows, got " +
                       std::to_string(channels[i].input.rows()));
    }
    if (channels[i].output.cols() != a.cols()) {
      throw InputError(label + ": C must have " + std::to_string(a.cols()) + " columns, got " +
                       std::to_string(channels[i].output.cols()));
    }
    require_finite(channels[i].input, label + " B");
    require_finite(channels[i].output, label + " C");
  }
}

ComplexMatrix stacked_inputs(const MultiChannelSystem& sys, const Subset& s) {
  validate_subset(s, sys.channel_count(), "channel subset");
  Eigen::Index cols = 0;
  for (std::size_t i : s) cols += sys.channels[i].input.cols();
  ComplexMatrix out(sys.states(), cols);
  Eigen::Index at = 0;
  for (std::size_t i : s) {
    const auto& b = sys.channels[i].input;
    out.middleCols(at, b.cols()) = b;
    at += b.cols();
  }
  return out;
}

ComplexMatrix stacked_outputs(const MultiChannelSystem& sys, const Subset& s) {
  validate_subset(s, sys.channel_count(), "channel subset");
  Eigen::Index rows = 0;
  for (std::size_t i : s) rows += sys.channels[i].output.rows();
  ComplexMatrix out(rows, sys.states());
  Eigen::Index at = 0;
  for (std::size_t i : s) {
    const auto& c = sys.channels[i].output;
    out.middleRows(at, c.rows()) = c;
    at += c.rows();
  }
  return out;
}

PencilRank pencil_rank_test(const MultiChannelSystem& sys, Complex lambda, const Subset& s,
                            RankTolerance tol) {
  sys.validate();
  if (!std::isfinite(lambda.real()) || !std::isfinite(lambda.imag())) {
    throw InputError("lambda must be finite");
  }
  const ComplexMatrix b = stacked_inputs(sys, s);
  const ComplexMatrix c = stacked_outputs(sys, complement(s, sys.channel_count()));
  PencilRank out;
  out.rank = bordered_rank(shifted(sys, lambda), b, c, tol);
  out.deficient = out.rank < static_cast<std::size_t>(sys.states());
  return out;
}

std::optional<FixedModeCertificate> find_blocking_subset(const MultiChannelSystem& sys,
                                                         Complex lambda, RankTolerance tol,
                                                         std::size_t cap) {
  sys.validate();
  check_channel_cap(sys, cap);
  std::optional<FixedModeCertificate> found;
  for_each_subset_shortlex(sys.channel_count(), [&](const Subset& s) {
    const PencilRank pr = pencil_rank_test(sys, lambda, s, tol);
    if (!pr.deficient) return false;
    found = FixedModeCertificate{lambda, s, static_cast<std::size_t>(sys.states()) - pr.rank};
    return true;
  });
  return found;
}

GenericRankBlocking blocking_subset_via_generic_rank(const MultiChannelSystem& sys,
                                                     Complex lambda, RankTolerance tol) {
  sys.validate();
  const Eigen::Index n = sys.states();
  const RankFactorization factors = rank_factorize(-shifted(sys, lambda), tol);

  MatrixFamily family;
  family.n1 = n;
  family.n2 = n;
  for (std::size_t i = 0; i < factors.rank; ++i) {
    const auto idx = static_cast<Eigen::Index>(i);
    family.members.push_back({factors.left.col(idx), factors.right.row(idx)});
  }
  for (const auto& ch : sys.channels) family.members.push_back({ch.input, ch.output});

  const ExpandedFamily expanded = expand_matrix_family(family);
  const MatroidIntersection mi = grank_pairs_matroid(expanded.pairs, tol);

  GenericRankBlocking out;
  out.generic_rank = mi.rank;
  out.factor_count = factors.rank;
  out.member_certificate = refine_min_subset(family, mi.certificate.subset, tol);
  if (out.generic_rank < static_cast<std::size_t>(n)) {
    Subset channels;
    for (std::size_t member : out.member_certificate.subset) {
      if (member >= factors.rank) channels.push_back(member - factors.rank);
    }
    out.channels = std::move(channels);
  }
  return out;
}

ConstantPlusFamilyRank grank_closed_loop(const MultiChannelSystem& sys, Complex lambda,
                                         RankTolerance tol, std::size_t trials,
                                         std::uint64_t seed) {
  sys.validate();
  MatrixFamily family;
  family.n1 = sys.states();
  family.n2 = sys.states();
  for (const auto& ch : sys.channels) family.members.push_back({ch.input, ch.output});
  // The sign of the feedback term does not affect generic rank.
  return grank_constant_plus_family(shifted(sys, lambda), family, tol, trials, seed);
}

std::vector<EigenCluster> cluster_eigenvalues(const std::vector<Complex>& sorted, double tol) {
  std::vector<EigenCluster> out;
  std::vector<Complex> members;
  auto flush = [&] {
    if (members.empty()) return;
    Complex sum = 0.0;
    for (const auto& m : members) sum += m;
    out.push_back({sum / static_cast<double>(members.size()), members.size()});
    members.clear();
  };
  for (const auto& z : sorted) {
    if (!members.empty() && !near_any(z, members, tol)) flush();
    members.push_back(z);
  }
  flush();
  return out;
}

bool ModeVerdict::operator==(const ModeVerdict& o) const {
  auto cert_eq = [](const std::optional<FixedModeCertificate>& a,
                    const std::optional<FixedModeCertificate>& b) {
    if (a.has_value() != b.has_value()) return false;
    if (!a) return true;
    return a->lambda == b->lambda && a->subset == b->subset && a->deficiency == b->deficiency;
  };
  return lambda == o.lambda && multiplicity == o.multiplicity && is_fixed == o.is_fixed &&
         cert_eq(certificate, o.certificate) && oracle_agrees == o.oracle_agrees &&
         closed_loop_generic_rank == o.closed_loop_generic_rank;
}

std::vector<Complex> FixedSpectrumReport::fixed_spectrum() const {
  std::vector<Complex> out;
  for (const auto& m : modes) {
    if (m.is_fixed) out.push_back(m.lambda);
  }
  return out;
}

bool FixedSpectrumReport::has_fixed_spectrum() const {
  return std::any_of(modes.begin(), modes.end(), [](const ModeVerdict& m) { return m.is_fixed; });
}

bool FixedSpectrumReport::oracles_consistent() const {
  return std::all_of(modes.begin(), modes.end(),
                     [](const ModeVerdict& m) { return m.oracle_agrees.value_or(true); });
}

bool FixedSpectrumReport::operator==(const FixedSpectrumReport& o) const {
  return states == o.states && channels == o.channels && eigenvalues == o.eigenvalues &&
         modes == o.modes && tolerance == o.tolerance && match_tolerance == o.match_tolerance &&
         seed == o.seed && trials == o.trials;
}

FixedSpectrumReport fixed_spectrum(const MultiChannelSystem& sys, RankTolerance tol,
                                   std::size_t cap, double cluster_tol) {
  sys.validate();
  check_channel_cap(sys, cap);
  FixedSpectrumReport report;
  report.states = static_cast<std::size_t>(sys.states());
  report.channels = sys.channel_count();
  report.tolerance = tol.relative();
  report.eigenvalues = eigenvalues(sys.a);
  for (const auto& cluster : cluster_eigenvalues(report.eigenvalues, cluster_tol)) {
    ModeVerdict mode;
    mode.lambda = cluster.value;
    mode.multiplicity = cluster.multiplicity;
    mode.certificate = find_blocking_subset(sys, cluster.value, tol, cap);
    mode.is_fixed = mode.certificate.has_value();
    report.modes.push_back(std::move(mode));
  }
  return report;
}

std::vector<Complex> fixed_spectrum_sampled(const MultiChannelSystem& sys, std::size_t trials,
                                            std::uint64_t seed, double match_tol) {
  sys.validate();
  if (trials == 0) throw InputError("fixed_spectrum_sampled needs at least one trial");
  std::vector<Complex> alive = eigenvalues(sys.a);
  Rng rng(seed);
  for (std::size_t trial = 0; trial < trials && !alive.empty(); ++trial) {
    ComplexMatrix closed = sys.a;
    for (const auto& ch : sys.channels) {
      const Eigen::MatrixXd gain = random_real(rng, ch.input.cols(), ch.output.rows());
      closed += ch.input * gain.cast<Complex>() * ch.output;
    }
    const std::vector<Complex> moved = eigenvalues(closed);

    // Greedy one-to-one matching in order of increasing distance.
    std::vector<std::tuple<double, std::size_t, std::size_t>> candidates;
    for (std::size_t i = 0; i < alive.size(); ++i) {
      for (std::size_t j = 0; j < moved.size(); ++j) {
        const double dist = std::abs(alive[i] - moved[j]);
        if (dist <= match_tol) candidates.emplace_back(dist, i, j);
      }
    }
    std::sort(candidates.begin(), candidates.end());
    std::vector<bool> matched_open(alive.size(), false), used(moved.size(), false);
    for (const auto& [dist, i, j] : candidates) {
      if (matched_open[i] || used[j]) continue;
      matched_open[i] = true;
      used[j] = true;
    }
    std::vector<Complex> survivors;
    for (std::size_t i = 0; i < alive.size(); ++i) {
      if (matched_open[i]) survivors.push_back(alive[i]);
    }
    alive = std::move(survivors);
  }
  return alive;
}

FixedSpectrumReport analyze_system(const MultiChannelSystem& sys, const AnalysisOptions& opts) {
  FixedSpectrumReport report = fixed_spectrum(sys, opts.tol, opts.cap);
  report.seed = opts.seed;
  report.trials = opts.trials;
  report.match_tolerance = opts.match_tol;
  const std::vector<Complex> persistent =
      fixed_spectrum_sampled(sys, opts.trials, derive_seed(opts.seed, 0), opts.match_tol);
  const auto n = static_cast<std::size_t>(sys.states());
  for (std::size_t i = 0; i < report.modes.size(); ++i) {
    auto& mode = report.modes[i];
    const bool sampled_fixed =
        near_any(mode.lambda, persistent, opts.match_tol + kDefaultClusterTolerance);
    const ConstantPlusFamilyRank grank =
        grank_closed_loop(sys, mode.lambda, opts.tol, opts.trials, derive_seed(opts.seed, 1 + i));
    mode.closed_loop_generic_rank = grank.combinatorial;
    const bool grank_fixed = grank.combinatorial < n;
    mode.oracle_agrees =
        sampled_fixed == mode.is_fixed && grank_fixed == mode.is_fixed && grank.consistent();
  }
  return report;
}

bool same_spectrum(const std::vector<Complex>& a, const std::vector<Complex>& b, double tol) {
  return std::all_of(a.begin(), a.end(), [&](const Complex& z) { return near_any(z, b, tol); }) &&
         std::all_of(b.begin(), b.end(), [&](const Complex& z) { return near_any(z, a, tol); });
}

}  // namespace fixedspec
