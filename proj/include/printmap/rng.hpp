#pragma once

#include <cstdint>
#include <utility>
#include <vector>

namespace printmap {

// Deterministic 64-bit generator (splitmix64). All randomness in the library
// flows through this class so results are bit-identical across platforms;
// the <random> distributions are implementation defined and unusable here.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  // Uniform in [0, 1), 53-bit resolution.
  double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * next_double(); }

  // Inclusive bounds.
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) {
    const auto span = static_cast<std::uint64_t>(hi - lo) + 1u;
    return lo + static_cast<std::int64_t>(next_u64() % span);
  }

  bool bernoulli(double p) { return next_double() < p; }

  // Fisher-Yates.
  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      const auto j = static_cast<std::size_t>(next_u64() % i);
      std::swap(v[i - 1], v[j]);
    }
  }

 private:
  std::uint64_t state_;
};

// Splittable per-item seed: mixes (master, index) so each item owns an
// independent stream regardless of generation order.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
  Rng g(master ^ (0x9E3779B97F4A7C15ull * (index + 1u)));
  return g.next_u64();
}

}  // namespace printmap
