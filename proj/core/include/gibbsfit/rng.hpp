#pragma once

#include <cmath>
#include <cstdint>
#include <string_view>

namespace gibbsfit {

namespace detail {

inline constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ull;

inline constexpr std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

}  // namespace detail

/// Counter-based pseudorandom generator (splitmix64 output function).
///
/// The k-th output is a pure function of (key, k), so streams can be split
/// across parallel workers without coordination and replay is exact on any
/// platform with IEEE doubles.
class CounterRng {
public:
  explicit CounterRng(std::uint64_t seed) : key_(detail::mix64(seed ^ detail::kGolden)) {}

  /// Independent substream: deterministic function of (parent key, stream id).
  CounterRng derive(std::uint64_t stream) const {
    CounterRng out(0);
    out.key_ = detail::mix64(key_ + detail::mix64(stream + 1));
    out.counter_ = 0;
    return out;
  }

  /// Substream tagged by a short label, for auditable seed derivation.
  CounterRng derive(std::string_view tag) const {
    std::uint64_t h = 1469598103934665603ull;  // FNV-1a
    for (char c : tag) {
      h ^= static_cast<unsigned char>(c);
      h *= 1099511628211ull;
    }
    return derive(h);
  }

  std::uint64_t next_u64() { return detail::mix64(key_ + (++counter_) * detail::kGolden); }

  /// Uniform in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  /// Standard normal via the Marsaglia polar method (sqrt/log only).
  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u, v, s;
    do {
      u = 2.0 * uniform() - 1.0;
      v = 2.0 * uniform() - 1.0;
      s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double m = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * m;
    have_spare_ = true;
    return u * m;
  }

  /// Index in [0, n) from a single draw.
  std::size_t index(std::size_t n) { return static_cast<std::size_t>(uniform() * static_cast<double>(n)) % n; }

  std::uint64_t key() const { return key_; }

private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

}  // namespace gibbsfit
