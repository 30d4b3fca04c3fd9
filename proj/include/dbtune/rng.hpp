#pragma once

#include <cassert>
#include <cstdint>
#include <random>
#include <vector>

namespace dbtune {

/// Seeded RNG with all derived draws (unit doubles, bounded integers,
/// shuffles) implemented locally. std::*_distribution is avoided because its
/// output is implementation-defined; every stream here is reproducible from
/// the seed alone.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform in [0, 1), 53 bits of resolution.
  double next_double() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  /// Uniform integer in [lo, hi], both inclusive. Unbiased via rejection.
  std::uint64_t uniform_u64(std::uint64_t lo, std::uint64_t hi) {
    assert(lo <= hi);
    const std::uint64_t span = hi - lo + 1;
    if (span == 0) return engine_();  // full range
    for (;;) {
      const std::uint64_t x = engine_();
      const std::uint64_t r = x % span;
      if (x - r <= UINT64_MAX - (span - 1)) return lo + r;
    }
  }

  int uniform_int(int lo, int hi) {
    return static_cast<int>(uniform_u64(static_cast<std::uint64_t>(lo),
                                        static_cast<std::uint64_t>(hi)));
  }

  /// Fisher-Yates shuffle.
  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      const std::size_t j = static_cast<std::size_t>(uniform_u64(0, i - 1));
      std::swap(v[i - 1], v[j]);
    }
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace dbtune
