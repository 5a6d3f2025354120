#include "fixedspec/io.h"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "fixedspec/errors.h"

namespace fixedspec {

namespace {

double number_at(const Json& j, const std::string& where) {
  if (!j.is_number()) throw InputError(where + ": expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) throw InputError(where + ": non-finite value");
  return v;
}

// Parses an array of rows. `rows_hint` / `cols_hint` (negative = unknown)
// give the size of an empty block written as [].
ComplexMatrix matrix_from_json(const Json& j, const std::string& where, Eigen::Index rows_hint,
                               Eigen::Index cols_hint) {
  if (!j.is_array()) throw InputError(where + ": expected an array of rows");
  if (j.empty()) {
    if (rows_hint > 0 && cols_hint > 0) {
      throw InputError(where + ": empty matrix where a " + std::to_string(rows_hint) + "x" +
                       std::to_string(cols_hint) + " block is required");
    }
    return ComplexMatrix(std::max<Eigen::Index>(rows_hint, 0),
                         std::max<Eigen::Index>(cols_hint, 0));
  }
  const auto rows = static_cast<Eigen::Index>(j.size());
  Eigen::Index cols = -1;
  for (Eigen::Index i = 0; i < rows; ++i) {
    const Json& row = j[static_cast<std::size_t>(i)];
    const std::string row_where = where + " row " + std::to_string(i + 1);
    if (!row.is_array()) throw InputError(row_where + ": expected an array of entries");
    const auto len = static_cast<Eigen::Index>(row.size());
    if (cols < 0) cols = len;
    if (len != cols) {
      throw InputError(row_where + ": has " + std::to_string(len) + " entries, expected " +
                       std::to_string(cols));
    }
  }
  ComplexMatrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index j2 = 0; j2 < cols; ++j2) {
      m(i, j2) = complex_from_json(j[static_cast<std::size_t>(i)][static_cast<std::size_t>(j2)],
                                   where + " entry (" + std::to_string(i + 1) + ", " +
                                       std::to_string(j2 + 1) + ")");
    }
  }
  return m;
}

ComplexVector vector_from_json(const Json& j, const std::string& where) {
  if (!j.is_array()) throw InputError(where + ": expected an array of entries");
  ComplexVector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    v(static_cast<Eigen::Index>(i)) = complex_from_json(j[i], where + " entry " + std::to_string(i + 1));
  }
  return v;
}

void read_options(const Json& doc, std::optional<double>& tolerance,
                  std::optional<std::uint64_t>& seed) {
  if (doc.contains("tolerance")) tolerance = number_at(doc["tolerance"], "tolerance");
  if (doc.contains("seed")) {
    if (!doc["seed"].is_number_unsigned() && !doc["seed"].is_number_integer()) {
      throw InputError("seed: expected a non-negative integer");
    }
    if (doc["seed"].is_number_integer() && doc["seed"].get<std::int64_t>() < 0) {
      throw InputError("seed: expected a non-negative integer");
    }
    seed = doc["seed"].get<std::uint64_t>();
  }
}

double clean(double v, double scale) {
  if (std::abs(v) <= 1e-12 * std::max(1.0, scale)) return 0.0;
  return v;
}

Json subset_to_json(const Subset& s) {
  Json out = Json::array();
  for (std::size_t i : s) out.push_back(i + 1);
  return out;
}

Subset subset_from_json(const Json& j, const std::string& where) {
  if (!j.is_array()) throw InputError(where + ": expected an array of indices");
  Subset s;
  for (const auto& e : j) {
    if (!e.is_number_unsigned() || e.get<std::size_t>() == 0) {
      throw InputError(where + ": indices are positive integers");
    }
    s.push_back(e.get<std::size_t>() - 1);
  }
  return s;
}

}  // namespace

Json complex_to_json(Complex z) { return Json::array({z.real(), z.imag()}); }

Complex complex_from_json(const Json& j, const std::string& where) {
  if (j.is_number()) return {number_at(j, where), 0.0};
  if (j.is_array() && j.size() == 2) {
    return {number_at(j[0], where + " real part"), number_at(j[1], where + " imaginary part")};
  }
  throw InputError(where + ": expected a number or a [re, im] pair");
}

Json matrix_to_json(const ComplexMatrix& m) {
  Json out = Json::array();
  if (m.rows() == 0 || m.cols() == 0) return out;
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      const Complex z = m(i, j);
      if (z.imag() == 0.0) {
        row.push_back(z.real());
      } else {
        row.push_back(complex_to_json(z));
      }
    }
    out.push_back(std::move(row));
  }
  return out;
}

Json system_to_json(const MultiChannelSystem& sys) {
  Json out;
  out["A"] = matrix_to_json(sys.a);
  Json channels = Json::array();
  for (const auto& ch : sys.channels) {
    channels.push_back({{"B", matrix_to_json(ch.input)}, {"C", matrix_to_json(ch.output)}});
  }
  out["channels"] = std::move(channels);
  return out;
}

SystemFile parse_system(const Json& doc) {
  if (!doc.is_object()) throw InputError("system file: expected a JSON object");
  if (!doc.contains("A")) throw InputError("system file: missing field \"A\"");
  if (!doc.contains("channels")) throw InputError("system file: missing field \"channels\"");
  SystemFile file;
  file.system.a = matrix_from_json(doc["A"], "A", -1, -1);
  const Eigen::Index n = file.system.a.rows();
  if (file.system.a.cols() != n) {
    throw InputError("A: must be square, got " + std::to_string(n) + "x" +
                     std::to_string(file.system.a.cols()));
  }
  if (n == 0) throw InputError("A: must have at least one state");
  const Json& channels = doc["channels"];
  if (!channels.is_array() || channels.empty()) {
    throw InputError("channels: expected a non-empty array");
  }
  for (std::size_t i = 0; i < channels.size(); ++i) {
    const std::string where = "channels[" + std::to_string(i) + "]";
    const Json& ch = channels[i];
    if (!ch.is_object() || !ch.contains("B") || !ch.contains("C")) {
      throw InputError(where + ": expected an object with fields \"B\" and \"C\"");
    }
    Channel parsed{matrix_from_json(ch["B"], where + ".B", n, -1),
                   matrix_from_json(ch["C"], where + ".C", -1, n)};
    if (parsed.input.rows() != n) {
      throw InputError(where + ".B: has " + std::to_string(parsed.input.rows()) +
                       " rows, expected " + std::to_string(n));
    }
    if (parsed.output.cols() != n) {
      throw InputError(where + ".C: has " + std::to_string(parsed.output.cols()) +
                       " columns, expected " + std::to_string(n));
    }
    file.system.channels.push_back(std::move(parsed));
  }
  read_options(doc, file.tolerance, file.seed);
  return file;
}

FamilyFile parse_family(const Json& doc) {
  if (!doc.is_object()) throw InputError("family file: expected a JSON object");
  const bool has_pairs = doc.contains("pairs");
  const bool has_members = doc.contains("members");
  if (has_pairs == has_members) {
    throw InputError("family file: expected exactly one of \"pairs\" or \"members\"");
  }
  FamilyFile file;
  read_options(doc, file.tolerance, file.seed);
  std::optional<ComplexMatrix> constant;
  if (doc.contains("M")) constant = matrix_from_json(doc["M"], "M", -1, -1);

  if (has_pairs) {
    const Json& pairs = doc["pairs"];
    if (!pairs.is_array()) throw InputError("pairs: expected an array");
    VectorPairFamily fam;
    fam.n1 = constant ? constant->rows() : -1;
    fam.n2 = constant ? constant->cols() : -1;
    for (std::size_t i = 0; i < pairs.size(); ++i) {
      const std::string where = "pairs[" + std::to_string(i) + "]";
      if (!pairs[i].is_object() || !pairs[i].contains("w") || !pairs[i].contains("r")) {
        throw InputError(where + ": expected an object with fields \"w\" and \"r\"");
      }
      VectorPair p{vector_from_json(pairs[i]["w"], where + ".w"),
                   vector_from_json(pairs[i]["r"], where + ".r").transpose()};
      if (fam.n1 < 0) fam.n1 = p.column.size();
      if (fam.n2 < 0) fam.n2 = p.row.size();
      if (p.column.size() != fam.n1) {
        throw InputError(where + ".w: has length " + std::to_string(p.column.size()) +
                         ", expected " + std::to_string(fam.n1));
      }
      if (p.row.size() != fam.n2) {
        throw InputError(where + ".r: has length " + std::to_string(p.row.size()) +
                         ", expected " + std::to_string(fam.n2));
      }
      fam.pairs.push_back(std::move(p));
    }
    if (doc.contains("n1")) fam.n1 = doc["n1"].get<Eigen::Index>();
    if (doc.contains("n2")) fam.n2 = doc["n2"].get<Eigen::Index>();
    fam.n1 = std::max<Eigen::Index>(fam.n1, 0);
    fam.n2 = std::max<Eigen::Index>(fam.n2, 0);
    fam.validate();
    file.pairs = std::move(fam);
  } else {
    const Json& members = doc["members"];
    if (!members.is_array()) throw InputError("members: expected an array");
    MatrixFamily fam;
    fam.n1 = constant ? constant->rows() : -1;
    fam.n2 = constant ? constant->cols() : -1;
    if (doc.contains("n1")) fam.n1 = doc["n1"].get<Eigen::Index>();
    if (doc.contains("n2")) fam.n2 = doc["n2"].get<Eigen::Index>();
    for (std::size_t i = 0; i < members.size(); ++i) {
      const std::string where = "members[" + std::to_string(i) + "]";
      if (!members[i].is_object() || !members[i].contains("W") || !members[i].contains("R")) {
        throw InputError(where + ": expected an object with fields \"W\" and \"R\"");
      }
      MatrixMember m{matrix_from_json(members[i]["W"], where + ".W", fam.n1, -1),
                     matrix_from_json(members[i]["R"], where + ".R", -1, fam.n2)};
      if (fam.n1 < 0 && m.left.size() > 0) fam.n1 = m.left.rows();
      if (fam.n2 < 0 && m.right.size() > 0) fam.n2 = m.right.cols();
      if (fam.n1 >= 0 && m.left.rows() != fam.n1) {
        if (m.left.size() == 0) {
          m.left.resize(fam.n1, 0);
        } else {
          throw InputError(where + ".W: has " + std::to_string(m.left.rows()) +
                           " rows, expected " + std::to_string(fam.n1));
        }
      }
      if (fam.n2 >= 0 && m.right.cols() != fam.n2) {
        if (m.right.size() == 0) {
          m.right.resize(0, fam.n2);
        } else {
          throw InputError(where + ".R: has " + std::to_string(m.right.cols()) +
                           " columns, expected " + std::to_string(fam.n2));
        }
      }
      fam.members.push_back(std::move(m));
    }
    fam.n1 = std::max<Eigen::Index>(fam.n1, 0);
    fam.n2 = std::max<Eigen::Index>(fam.n2, 0);
    // Empty blocks parsed before the dimensions were known.
    for (auto& m : fam.members) {
      if (m.left.size() == 0) m.left.resize(fam.n1, 0);
      if (m.right.size() == 0) m.right.resize(0, fam.n2);
    }
    fam.validate();
    file.members = std::move(fam);
  }
  if (constant) {
    const Eigen::Index n1 = file.pairs ? file.pairs->n1 : file.members->n1;
    const Eigen::Index n2 = file.pairs ? file.pairs->n2 : file.members->n2;
    if (constant->rows() != n1 || constant->cols() != n2) {
      throw InputError("M: is " + std::to_string(constant->rows()) + "x" +
                       std::to_string(constant->cols()) + " but the family is " +
                       std::to_string(n1) + "x" + std::to_string(n2));
    }
    file.constant = std::move(constant);
  }
  return file;
}

Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError(path + ": cannot open file");
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw InputError(path + ": " + e.what());
  }
}

Json report_to_json(const FixedSpectrumReport& report) {
  Json out;
  out["states"] = report.states;
  out["channels"] = report.channels;
  out["tolerance"] = report.tolerance;
  out["match_tolerance"] = report.match_tolerance;
  out["seed"] = report.seed;
  out["trials"] = report.trials;
  Json eigs = Json::array();
  for (const auto& z : report.eigenvalues) eigs.push_back(complex_to_json(z));
  out["eigenvalues"] = std::move(eigs);
  Json modes = Json::array();
  Json fixed = Json::array();
  for (const auto& m : report.modes) {
    Json mode;
    mode["lambda"] = complex_to_json(m.lambda);
    mode["multiplicity"] = m.multiplicity;
    mode["fixed"] = m.is_fixed;
    if (m.certificate) {
      mode["certificate"] = {{"subset", subset_to_json(m.certificate->subset)},
                             {"deficiency", m.certificate->deficiency}};
      fixed.push_back(complex_to_json(m.lambda));
    }
    if (m.oracle_agrees) mode["oracle_agrees"] = *m.oracle_agrees;
    if (m.closed_loop_generic_rank) mode["closed_loop_generic_rank"] = *m.closed_loop_generic_rank;
    modes.push_back(std::move(mode));
  }
  out["modes"] = std::move(modes);
  out["fixed_spectrum"] = std::move(fixed);
  return out;
}

FixedSpectrumReport report_from_json(const Json& j) {
  FixedSpectrumReport r;
  try {
    r.states = j.at("states").get<std::size_t>();
    r.channels = j.at("channels").get<std::size_t>();
    r.tolerance = j.at("tolerance").get<double>();
    r.match_tolerance = j.at("match_tolerance").get<double>();
    r.seed = j.at("seed").get<std::uint64_t>();
    r.trials = j.at("trials").get<std::size_t>();
    for (const auto& z : j.at("eigenvalues")) r.eigenvalues.push_back(complex_from_json(z, "eigenvalues"));
    for (const auto& m : j.at("modes")) {
      ModeVerdict mode;
      mode.lambda = complex_from_json(m.at("lambda"), "modes.lambda");
      mode.multiplicity = m.at("multiplicity").get<std::size_t>();
      mode.is_fixed = m.at("fixed").get<bool>();
      if (m.contains("certificate")) {
        const auto& c = m["certificate"];
        mode.certificate = FixedModeCertificate{mode.lambda,
                                                subset_from_json(c.at("subset"), "certificate"),
                                                c.at("deficiency").get<std::size_t>()};
      }
      if (m.contains("oracle_agrees")) mode.oracle_agrees = m["oracle_agrees"].get<bool>();
      if (m.contains("closed_loop_generic_rank")) {
        mode.closed_loop_generic_rank = m["closed_loop_generic_rank"].get<std::size_t>();
      }
      r.modes.push_back(std::move(mode));
    }
  } catch (const Json::exception& e) {
    throw InputError(std::string("report: ") + e.what());
  }
  return r;
}

std::string format_complex(Complex z) {
  const double scale = std::abs(z);
  const double re = clean(z.real(), scale);
  const double im = clean(z.imag(), scale);
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g%+.6gi", re + 0.0, im + 0.0);
  return buf;
}

std::string format_report_text(const FixedSpectrumReport& report) {
  std::ostringstream os;
  os << "states: " << report.states << ", channels: " << report.channels << "\n";
  os << "eigenvalues:";
  for (const auto& z : report.eigenvalues) os << " " << format_complex(z);
  os << "\n";
  os << "modes:\n";
  for (const auto& m : report.modes) {
    os << "  " << format_complex(m.lambda);
    if (m.multiplicity > 1) os << " (x" << m.multiplicity << ")";
    if (m.is_fixed) {
      os << "  fixed  S = " << format_subset(m.certificate->subset)
         << "  deficiency = " << m.certificate->deficiency;
    } else {
      os << "  not fixed";
    }
    if (m.closed_loop_generic_rank) {
      os << "  closed-loop generic rank = " << *m.closed_loop_generic_rank;
    }
    if (m.oracle_agrees) os << "  oracle: " << (*m.oracle_agrees ? "agrees" : "DISAGREES");
    os << "\n";
  }
  const auto fixed = report.fixed_spectrum();
  os << "fixed spectrum: ";
  if (fixed.empty()) {
    os << "empty";
  } else {
    os << "{";
    for (std::size_t i = 0; i < fixed.size(); ++i) os << (i ? ", " : "") << format_complex(fixed[i]);
    os << "}";
  }
  os << "\n";
  return os.str();
}

}  // namespace fixedspec
