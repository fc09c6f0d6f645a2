#pragma once

#include <cstdint>
#include <random>
#include <span>

namespace cvl {

// Deterministic uniform stream. mt19937_64 produces a portable bit stream;
// the double conversion below avoids std::uniform_real_distribution, whose
// output is implementation-defined.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  std::uint64_t next_u64() { return eng_(); }

  // Uniform in [0, 1).
  double uniform01() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  // Draws an index from a cumulative weight table (last entry ~= 1).
  std::size_t pick_cumulative(std::span<const double> cumulative) {
    const double u = uniform01();
    std::size_t lo = 0, hi = cumulative.size();
    while (lo < hi) {
      const std::size_t mid = (lo + hi) / 2;
      if (cumulative[mid] <= u) {
        lo = mid + 1;
      } else {
        hi = mid;
      }
    }
    return lo < cumulative.size() ? lo : cumulative.size() - 1;
  }

  std::size_t pick_index(std::size_t count) {
    const std::size_t i = static_cast<std::size_t>(uniform01() * static_cast<double>(count));
    return i < count ? i : count - 1;
  }

  // Derives an independent stream.
  Rng fork() { return Rng(eng_()); }

 private:
  std::mt19937_64 eng_;
};

}  // namespace cvl
