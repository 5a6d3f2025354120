#include "fixedspec/subsets.h"

#include <algorithm>

#include "fixedspec/errors.h"

namespace fixedspec {

Subset subset_from_mask(std::uint64_t mask, std::size_t ground_size) {
  Subset s;
  for (std::size_t i = 0; i < ground_size; ++i) {
    if (mask >> i & 1U) s.push_back(i);
  }
  return s;
}

Subset complement(const Subset& s, std::size_t ground_size) {
  Subset out;
  auto it = s.begin();
  for (std::size_t i = 0; i < ground_size; ++i) {
    if (it != s.end() && *it == i) {
      ++it;
    } else {
      out.push_back(i);
    }
  }
  return out;
}

void validate_subset(const Subset& s, std::size_t ground_size, const char* what) {
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] >= ground_size) {
      throw InputError(std::string(what) + ": index " + std::to_string(s[i] + 1) +
                       " out of range 1.." + std::to_string(ground_size));
    }
    if (i > 0 && s[i] <= s[i - 1]) {
      throw InputError(std::string(what) + ": indices must be strictly increasing");
    }
  }
}

bool lex_less(const Subset& a, const Subset& b) {
  return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

bool shortlex_less(const Subset& a, const Subset& b) {
  if (a.size() != b.size()) return a.size() < b.size();
  return lex_less(a, b);
}

std::string format_subset(const Subset& s) {
  std::string out = "{";
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (i > 0) out += ", ";
    out += std::to_string(s[i] + 1);
  }
  return out + "}";
}

}  // namespace fixedspec
