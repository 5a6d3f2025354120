// Acceptance suite: one PASS/FAIL line per criterion.
//
//   acceptance [--known-red N]...
//
// Exits 0 when every criterion passes or is listed with --known-red (those
// still print FAIL). A known-red criterion that starts passing is reported,
// and the exit code is nonzero so the list gets updated.

#include <sys/wait.h>

#include <array>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "fixedspec/campaigns.h"
#include "fixedspec/fixed_spectrum.h"

namespace fixedspec {
namespace {

constexpr std::uint64_t kSeed = 20240607;

struct Verdict {
  bool pass = false;
  std::string detail;
};

Verdict FromCampaign(const CampaignResult& r, std::size_t required, double max_seconds) {
  std::ostringstream os;
  os << r.name << ": " << (r.instances - r.failures) << "/" << r.instances << " agree, "
     << r.seconds << " s";
  if (r.noted > 0) os << "; noted " << r.noted << " (" << r.note << ")";
  if (!r.first_failure.empty()) os << "; " << r.first_failure;
  const bool ok = r.passed() && r.instances >= required && r.seconds < max_seconds;
  if (r.seconds >= max_seconds) os << "; over the " << max_seconds << " s budget";
  return {ok, os.str()};
}

CampaignOptions Options(std::size_t instances, std::size_t max_n = 5, std::size_t max_k = 3) {
  CampaignOptions opts;
  opts.instances = instances;
  opts.seed = kSeed;
  opts.max_n = max_n;
  opts.max_k = max_k;
  return opts;
}

ComplexMatrix Scalar(double v) { return ComplexMatrix::Constant(1, 1, v); }

Verdict KnownInstances() {
  std::ostringstream os;
  bool ok = true;
  auto check = [&](bool cond, const std::string& what) {
    os << (cond ? "ok " : "MISMATCH ") << what << "; ";
    ok = ok && cond;
  };

  const MultiChannelSystem unactuated{Scalar(0), {{Scalar(0), Scalar(0)}}};
  const FixedSpectrumReport r1 = fixed_spectrum(unactuated);
  check(r1.modes.size() == 1 && r1.modes[0].is_fixed &&
            std::abs(r1.modes[0].lambda) < 1e-12 && r1.modes[0].certificate->subset.empty(),
        "unactuated scalar fixed at 0 with S = {}");

  ComplexMatrix a = ComplexMatrix::Zero(2, 2);
  a(0, 0) = 1.0;
  a(1, 1) = 2.0;
  ComplexMatrix b = ComplexMatrix::Zero(2, 1);
  b(0, 0) = 1.0;
  ComplexMatrix c = ComplexMatrix::Zero(1, 2);
  c(0, 0) = 1.0;
  const MultiChannelSystem diag{a, {{b, c}}};
  const FixedSpectrumReport r2 = fixed_spectrum(diag);
  const auto fixed2 = r2.fixed_spectrum();
  check(fixed2.size() == 1 && std::abs(fixed2[0] - Complex(2.0, 0.0)) < 1e-12,
        "diag(1,2) fixed spectrum = {2}");
  const auto cert = find_blocking_subset(diag, 2.0);
  check(cert && cert->subset == Subset{0},
        "diag(1,2) certificate S = {1} (got " + (cert ? format_subset(cert->subset) : "none") +
            ")");

  const MultiChannelSystem controllable{Scalar(0), {{Scalar(1), Scalar(1)}}};
  check(!fixed_spectrum(controllable).has_fixed_spectrum(),
        "controllable/observable scalar has empty fixed spectrum");
  return {ok, os.str()};
}

struct CliRun {
  int code = -1;
  std::string out;
};

CliRun Exec(const std::string& args) {
  const std::string cmd = std::string(FIXEDSPEC_CLI) + " " + args + " 2>/dev/null";
  CliRun run;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (pipe == nullptr) return run;
  std::array<char, 4096> buf;
  std::size_t n;
  while ((n = fread(buf.data(), 1, buf.size(), pipe)) > 0) run.out.append(buf.data(), n);
  const int status = pclose(pipe);
  run.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return run;
}

Verdict CliRoundTrip() {
  const std::string dir = std::getenv("TMPDIR") ? std::getenv("TMPDIR") : "/tmp";
  std::size_t cases = 0;
  std::size_t bad = 0;
  std::string first;
  const std::vector<std::array<int, 4>> shapes = {{2, 1, 1, 1}, {3, 2, 1, 1}, {4, 3, 1, 2},
                                                  {5, 2, 2, 1}, {5, 3, 1, 1}};
  const std::vector<double> lambdas = {1.0, -0.5, 2.0, 0.0};
  for (int seed = 0; seed < 10; ++seed) {
    for (std::size_t s = 0; s < shapes.size(); ++s) {
      const auto& [n, k, m, l] = shapes[s];
      const double lambda = lambdas[(seed + s) % lambdas.size()];
      std::ostringstream args;
      args << "--seed " << seed << " gen --n " << n << " --k " << k << " --dims " << m << ","
           << l << " --embed-fixed-mode --lambda " << lambda;
      ++cases;
      const CliRun gen1 = Exec(args.str());
      const CliRun gen2 = Exec(args.str());
      const std::string path = dir + "/fixedspec_acceptance_" + std::to_string(cases) + ".json";
      std::ofstream(path) << gen1.out;
      const CliRun rep1 = Exec("--json analyze " + path);
      const CliRun rep2 = Exec("--json analyze " + path);
      std::string problem;
      if (gen1.code != 0) problem = "gen exit " + std::to_string(gen1.code);
      if (problem.empty() && gen1.out != gen2.out) problem = "gen output differs between runs";
      if (problem.empty() && rep1.out != rep2.out) problem = "report differs between runs";
      if (problem.empty() && rep1.code != 1) problem = "analyze exit " + std::to_string(rep1.code);
      if (problem.empty()) {
        bool found = false;
        const nlohmann::json report = nlohmann::json::parse(rep1.out);
        for (const auto& z : report["fixed_spectrum"]) {
          found = found || (std::abs(z[0].get<double>() - lambda) < 1e-6 &&
                            std::abs(z[1].get<double>()) < 1e-6);
        }
        if (!found) problem = "embedded mode not reported";
      }
      std::remove(path.c_str());
      if (!problem.empty()) {
        if (bad++ == 0) first = args.str() + ": " + problem;
      }
    }
  }
  std::ostringstream os;
  os << (cases - bad) << "/" << cases << " gen/analyze round trips byte-identical and fixed";
  if (!first.empty()) os << "; first problem: " << first;
  return {bad == 0, os.str()};
}

}  // namespace
}  // namespace fixedspec

int main(int argc, char** argv) {
  using namespace fixedspec;
  std::set<int> known_red;
  for (int i = 1; i < argc; ++i) {
    if (std::string(argv[i]) == "--known-red" && i + 1 < argc) {
      known_red.insert(std::atoi(argv[++i]));
    } else {
      std::cerr << "usage: acceptance [--known-red N]...\n";
      return 2;
    }
  }

  struct Criterion {
    int id;
    std::string title;
    std::function<Verdict()> run;
  };
  const std::vector<Criterion> criteria = {
      {1, "fixed spectrum: pencil == sampled feedback == closed-loop generic rank",
       [] { return FromCampaign(run_fixed_spectrum_campaign(Options(200)), 200, 60.0); }},
      {2, "pair families: matroid == min-formula == sampled, witness meets certificate",
       [] { return FromCampaign(run_pair_family_campaign(Options(500)), 500, 60.0); }},
      {3, "matrix families: member min-formula == expanded == sampled, refinement exact",
       [] { return FromCampaign(run_matrix_family_campaign(Options(200)), 200, 1e9); }},
      {4, "constant term: combinatorial == sampled == prepended parameterized family",
       [] { return FromCampaign(run_constant_term_campaign(Options(200)), 200, 1e9); }},
      {5, "bordered rank vs feedback, constructive gains restore rank (n <= 6)",
       [] { return FromCampaign(run_pencil_feedback_campaign(Options(200, 6)), 200, 1e9); }},
      {6, "single channel: fixed spectrum == PBH verdict",
       [] { return FromCampaign(run_centralized_campaign(Options(100)), 100, 1e9); }},
      {7, "known instances reproduce exactly", [] { return KnownInstances(); }},
      {8, "CLI determinism and embedded-mode round trip", [] { return CliRoundTrip(); }},
  };

  int unexpected = 0;
  for (const auto& c : criteria) {
    Verdict v;
    try {
      v = c.run();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    const bool red_ok = known_red.count(c.id) > 0;
    std::cout << "criterion " << c.id << ": " << (v.pass ? "PASS" : "FAIL")
              << (red_ok ? (v.pass ? " (listed as known red but now passes)" : " (known red)")
                         : "")
              << "  " << c.title << "  [" << v.detail << "]" << std::endl;
    if (v.pass == red_ok) ++unexpected;
  }
  return unexpected == 0 ? 0 : 1;
}
