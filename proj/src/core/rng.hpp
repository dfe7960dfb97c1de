#pragma once

#include <cstdint>
#include <random>
#include <utility>
#include <vector>

namespace destim {

std::uint64_t splitmix64(std::uint64_t x);

/// Stream seed from a master seed and a stream key. For a fixed master the
/// map key -> seed is a bijection on 64-bit keys, so distinct keys never
/// collide.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t key);

/// Seeded random stream. All draws are produced from raw mt19937_64 output
/// with fixed arithmetic, so sequences are identical across platforms.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t next_u64() { return gen_(); }

  /// Uniform on the open interval (0,1).
  double uniform() { return (static_cast<double>(gen_() >> 11) + 0.5) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Standard normal via Box-Muller; the paired draw is cached.
  double normal();

  /// Uniform index in [0, n); n must be positive.
  std::size_t index(std::size_t n) {
    return static_cast<std::size_t>((static_cast<unsigned __int128>(gen_()) * n) >> 64);
  }

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[index(i)]);
  }

 private:
  std::mt19937_64 gen_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace destim
