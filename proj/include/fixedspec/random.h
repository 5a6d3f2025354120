#pragma once

#include <complex>
#include <cstdint>
#include <random>

namespace fixedspec {

/// SplitMix64 finalizer. Used to derive independent sub-seeds from one base
/// seed: stream `i` of base seed `s` is seeded with derive_seed(s, i).
std::uint64_t splitmix64(std::uint64_t x);
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t counter);

/// Seeded generator with platform-independent real sampling. The standard
/// distributions are implementation-defined, so uniforms are built directly
/// from the 53 high bits of mt19937_64 output.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform on [0, 1).
  double uniform();
  /// Uniform on [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  /// Uniform integer on [lo, hi].
  std::size_t uniform_int(std::size_t lo, std::size_t hi);
  bool bernoulli(double p) { return uniform() < p; }

  /// Real and imaginary parts independently uniform on [-1, 1).
  std::complex<double> complex_box();
  /// Uniform by area on the annulus inner <= |z| <= outer.
  std::complex<double> complex_annulus(double inner, double outer);

 private:
  std::mt19937_64 engine_;
};

}  // namespace fixedspec
