#pragma once

#include <cstdint>
#include <limits>
#include <random>
#include <utility>

namespace latdisc {

std::uint64_t splitmix64(std::uint64_t x) noexcept;

/// Seed for stream `stream` of a run seeded with `master`. Used for per-restart
/// and per-sample streams so results do not depend on execution order.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) noexcept;

/// Seeded generator with a fully specified output sequence. The standard
/// distributions are implementation-defined, so bounded integers and shuffles
/// are implemented here on top of mt19937_64.
class Rng {
 public:
  using result_type = std::uint64_t;

  explicit Rng(std::uint64_t seed) : engine_(splitmix64(seed)) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }
  result_type operator()() { return engine_(); }

  /// Uniform integer in [0, bound); bound must be positive.
  std::uint64_t below(std::uint64_t bound);
  /// Uniform double in [0, 1).
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  bool coin() { return (engine_() >> 63) != 0; }

  template <class RandomIt>
  void shuffle(RandomIt first, RandomIt last) {
    const auto count = static_cast<std::uint64_t>(last - first);
    for (std::uint64_t i = count; i > 1; --i) {
      const auto j = below(i);
      using std::swap;
      swap(first[i - 1], first[j]);
    }
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace latdisc
