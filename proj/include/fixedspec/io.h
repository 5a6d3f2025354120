#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include <json.hpp>

#include "fixedspec/fixed_spectrum.h"
#include "fixedspec/generic_rank.h"

namespace fixedspec {

// JSON interchange. Matrices are arrays of rows; an entry is either a bare
// number (real) or a two-element [re, im] array. An empty array stands for
// an empty block whose other dimension is implied by the system size.
// Channel and pair indices in reports are one-based.

using Json = nlohmann::json;

struct SystemFile {
  MultiChannelSystem system;
  std::optional<double> tolerance;
  std::optional<std::uint64_t> seed;
};

struct FamilyFile {
  /// Exactly one of the two is populated, per the "pairs" / "members" key.
  std::optional<VectorPairFamily> pairs;
  std::optional<MatrixFamily> members;
  std::optional<ComplexMatrix> constant;  // "M"
  std::optional<double> tolerance;
  std::optional<std::uint64_t> seed;
};

/// Throws InputError with the JSON location of the first problem.
SystemFile parse_system(const Json& doc);
FamilyFile parse_family(const Json& doc);

/// Reads and parses a file; syntax errors become InputError.
Json read_json_file(const std::string& path);

Json complex_to_json(Complex z);
Complex complex_from_json(const Json& j, const std::string& where);
Json matrix_to_json(const ComplexMatrix& m);
Json system_to_json(const MultiChannelSystem& sys);

Json report_to_json(const FixedSpectrumReport& report);
FixedSpectrumReport report_from_json(const Json& j);

/// Human-readable analysis report, eigenvalues in sorted order.
std::string format_report_text(const FixedSpectrumReport& report);
/// "1.5+0i" style with six significant digits.
std::string format_complex(Complex z);

}  // namespace fixedspec
