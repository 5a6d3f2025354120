#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace fixedspec {

/// Strictly increasing zero-based indices into some ordered ground set.
using Subset = std::vector<std::size_t>;

Subset subset_from_mask(std::uint64_t mask, std::size_t ground_size);
Subset complement(const Subset& s, std::size_t ground_size);

/// Throws InputError unless `s` is strictly increasing and below ground_size.
void validate_subset(const Subset& s, std::size_t ground_size, const char* what);

/// Lexicographic order of the sorted index sequences; the empty set is least.
bool lex_less(const Subset& a, const Subset& b);
/// Smaller cardinality first, then lex_less.
bool shortlex_less(const Subset& a, const Subset& b);

/// Calls visit(S) for every subset of {0..n-1} in shortlex order until it
/// returns true. Returns whether some call returned true.
template <class Visit>
bool for_each_subset_shortlex(std::size_t n, Visit&& visit) {
  for (std::size_t size = 0; size <= n; ++size) {
    Subset s(size);
    for (std::size_t i = 0; i < size; ++i) s[i] = i;
    while (true) {
      if (visit(static_cast<const Subset&>(s))) return true;
      // Advance to the next combination in lexicographic order.
      std::size_t i = size;
      while (i > 0 && s[i - 1] == n - size + i - 1) --i;
      if (i == 0) break;
      ++s[i - 1];
      for (std::size_t j = i; j < size; ++j) s[j] = s[j - 1] + 1;
    }
  }
  return false;
}

/// One-based rendering, e.g. "{1, 3}" or "{}".
std::string format_subset(const Subset& s);

}  // namespace fixedspec
