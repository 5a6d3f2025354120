#include "fixedspec/io.h"

#include <gtest/gtest.h>

#include "fixedspec/errors.h"
#include "fixedspec/instances.h"
#include "fixedspec/random.h"

namespace fixedspec {
namespace {

std::string ErrorOf(const std::string& text) {
  try {
    parse_system(Json::parse(text));
  } catch (const InputError& e) {
    return e.what();
  }
  return "";
}

GTEST_TEST(ParseSystemTest, RealAndComplexEntries) {
  const SystemFile file = parse_system(Json::parse(R"({
      "A": [[1, [0, 2]], [0, -1.5]],
      "channels": [{"B": [[1], [0]], "C": [[0, 1]]}, {"B": [], "C": []}],
      "tolerance": 1e-8, "seed": 42})"));
  EXPECT_EQ(file.system.states(), 2);
  EXPECT_EQ(file.system.a(0, 1), Complex(0, 2));
  EXPECT_EQ(file.system.a(1, 1), Complex(-1.5, 0));
  ASSERT_EQ(file.system.channel_count(), 2u);
  EXPECT_EQ(file.system.channels[1].input.rows(), 2);
  EXPECT_EQ(file.system.channels[1].input.cols(), 0);
  EXPECT_EQ(file.system.channels[1].output.rows(), 0);
  EXPECT_EQ(file.system.channels[1].output.cols(), 2);
  EXPECT_EQ(*file.tolerance, 1e-8);
  EXPECT_EQ(*file.seed, 42u);
}

GTEST_TEST(ParseSystemTest, LocatedErrors) {
  EXPECT_EQ(ErrorOf(R"({"A": [[1, 2], [3]], "channels": []})"),
            "A row 2: has 1 entries, expected 2");
  EXPECT_EQ(ErrorOf(R"({"A": [[1, 0], [0, 1]],
                        "channels": [{"B": [[1], [0]], "C": [[1, 0]]},
                                     {"B": [[1, 2], [3]], "C": [[1, 0]]}]})"),
            "channels[1].B row 2: has 1 entries, expected 2");
  EXPECT_EQ(ErrorOf(R"({"A": [[1, 0], [0, 1]], "channels": [{"B": [[1]], "C": [[1, 0]]}]})"),
            "channels[0].B: has 1 rows, expected 2");
  EXPECT_EQ(ErrorOf(R"({"A": [[1, "x"]], "channels": []})").substr(0, 18),
            "A entry (1, 2): ex");
  EXPECT_EQ(ErrorOf(R"({"channels": []})"), "system file: missing field \"A\"");
  EXPECT_EQ(ErrorOf(R"({"A": [[1, 0]], "channels": [{"B": [[1]], "C": [[1]]}]})"),
            "A: must be square, got 1x2");
  EXPECT_EQ(ErrorOf(R"({"A": [[1]], "channels": []})"), "channels: expected a non-empty array");
  EXPECT_EQ(ErrorOf(R"({"A": [[[1, 2, 3]]], "channels": []})").substr(0, 15), "A entry (1, 1):");
}

GTEST_TEST(ParseFamilyTest, PairsAndMembers) {
  const FamilyFile pairs = parse_family(Json::parse(R"({
      "pairs": [{"w": [1, 0], "r": [1, 0, 0]}, {"w": [0, [0, 1]], "r": [0, 1, 0]}]})"));
  ASSERT_TRUE(pairs.pairs.has_value());
  EXPECT_EQ(pairs.pairs->n1, 2);
  EXPECT_EQ(pairs.pairs->n2, 3);
  EXPECT_EQ(pairs.pairs->pairs[1].column(1), Complex(0, 1));

  const FamilyFile members = parse_family(Json::parse(R"({
      "members": [{"W": [[1], [0]], "R": [[1, 0]]}, {"W": [], "R": [[0, 1]]}],
      "M": [[1, 0], [0, 0]]})"));
  ASSERT_TRUE(members.members.has_value());
  EXPECT_EQ(members.members->members[1].left.rows(), 2);
  EXPECT_EQ(members.members->members[1].left.cols(), 0);
  ASSERT_TRUE(members.constant.has_value());

  const FamilyFile empty = parse_family(Json::parse(R"({"pairs": []})"));
  EXPECT_EQ(empty.pairs->size(), 0u);
}

GTEST_TEST(ParseFamilyTest, Errors) {
  EXPECT_THROW(parse_family(Json::parse(R"({})")), InputError);
  EXPECT_THROW(parse_family(Json::parse(R"({"pairs": [], "members": []})")), InputError);
  EXPECT_THROW(parse_family(Json::parse(R"({"pairs": [{"w": [1], "r": [1]},
                                                      {"w": [1, 0], "r": [1]}]})")),
               InputError);
  EXPECT_THROW(parse_family(Json::parse(R"({"pairs": [{"w": [1], "r": [1]}], "M": [[1, 0]]})")),
               InputError);
}

GTEST_TEST(ReadJsonFileTest, MissingAndMalformed) {
  EXPECT_THROW(read_json_file("/nonexistent/system.json"), InputError);
}

GTEST_TEST(SystemJsonTest, RoundTrip) {
  Rng rng(4);
  for (int trial = 0; trial < 20; ++trial) {
    MultiChannelSystem sys = random_campaign_system(rng, 4, 3);
    sys.a(0, 0) += Complex(0.0, 0.5);
    const SystemFile back = parse_system(Json::parse(system_to_json(sys).dump()));
    EXPECT_EQ(back.system.a, sys.a);
    ASSERT_EQ(back.system.channel_count(), sys.channel_count());
    for (std::size_t i = 0; i < sys.channel_count(); ++i) {
      EXPECT_EQ(back.system.channels[i].input, sys.channels[i].input);
      EXPECT_EQ(back.system.channels[i].output, sys.channels[i].output);
    }
  }
}

GTEST_TEST(ReportJsonTest, RoundTrip) {
  Rng rng(6);
  for (int trial = 0; trial < 20; ++trial) {
    const MultiChannelSystem sys = random_campaign_system(rng, 4, 3);
    AnalysisOptions opts;
    opts.seed = static_cast<std::uint64_t>(trial);
    const FixedSpectrumReport report = analyze_system(sys, opts);
    const Json j = report_to_json(report);
    EXPECT_TRUE(report_from_json(Json::parse(j.dump())) == report);
    EXPECT_EQ(report_to_json(report_from_json(j)).dump(), j.dump());
  }
  const FixedSpectrumReport plain = fixed_spectrum(random_campaign_system(rng, 3, 2));
  EXPECT_TRUE(report_from_json(report_to_json(plain)) == plain);
}

GTEST_TEST(FormatTest, Complex) {
  EXPECT_EQ(format_complex(Complex(1.5, 0.0)), "1.5+0i");
  EXPECT_EQ(format_complex(Complex(0.0, -1.0)), "0-1i");
  EXPECT_EQ(format_complex(Complex(-0.0, -0.0)), "0+0i");
  EXPECT_EQ(format_complex(Complex(2.0, 1e-17)), "2+0i");
}

GTEST_TEST(FormatTest, EmptyFixedSpectrumLine) {
  const MultiChannelSystem sys{ComplexMatrix::Zero(1, 1),
                               {{ComplexMatrix::Ones(1, 1), ComplexMatrix::Ones(1, 1)}}};
  const std::string text = format_report_text(fixed_spectrum(sys));
  EXPECT_NE(text.find("fixed spectrum: empty\n"), std::string::npos);
}

}  // namespace
}  // namespace fixedspec
