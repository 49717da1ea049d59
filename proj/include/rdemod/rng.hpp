#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <random>
#include <string_view>
#include <type_traits>

namespace rdemod {

/// Seeded random stream.
///
/// Every stream in the project is derived from one master seed and a list of
/// labels (strings or integers), e.g. `Rng::derive(seed, "grid", cell, trial)`.
/// Because derivation is a pure hash, a trial draws the same numbers no matter
/// which thread runs it or in which order. The value mappings below are written
/// out by hand rather than taken from `<random>` distributions so that the
/// streams are identical across standard library implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  template <typename... Labels>
  static std::uint64_t derive_seed(std::uint64_t master, const Labels&... labels) {
    std::uint64_t h = mix(master ^ 0x6a09e667f3bcc909ULL);
    ((h = mix(h ^ label_key(labels))), ...);
    return h;
  }

  template <typename... Labels>
  static Rng derive(std::uint64_t master, const Labels&... labels) {
    return Rng(derive_seed(master, labels...));
  }

  std::uint64_t next() { return engine_(); }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  /// Uniform integer in [0, n). Requires n > 0.
  std::size_t below(std::size_t n);

  int rademacher() { return (next() >> 63) ? 1 : -1; }

  /// Uniform point on the complex unit circle.
  std::complex<double> unit_phase();

  /// Standard normal (Box-Muller, one variate per call).
  double normal();

  /// Circularly symmetric complex normal with E|z|^2 = 1.
  std::complex<double> complex_normal();

  static std::uint64_t mix(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
  }

 private:
  template <typename T>
  static std::uint64_t label_key(const T& label) {
    if constexpr (std::is_integral_v<T>) {
      return mix(static_cast<std::uint64_t>(label) ^ 0x3c6ef372fe94f82bULL);
    } else {
      std::string_view s(label);
      std::uint64_t h = 0xcbf29ce484222325ULL;  // FNV-1a
      for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
      }
      return h;
    }
  }

  std::mt19937_64 engine_;
};

}  // namespace rdemod
