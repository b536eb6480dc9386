#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <utility>
#include <vector>

namespace dybm {

// Seedable generator whose output is identical on every conforming platform.
//
// std::mt19937_64 and std::seed_seq are bit-specified by the standard; the
// standard distributions are not, so values are derived from raw engine words
// here instead.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed_sequence({seed})) {}

  // Substream for time step `step` of a run seeded with `seed`. Sampling uses
  // one substream per generated slice, consumed unit by unit in ascending order.
  static Rng for_step(std::uint64_t seed, std::uint64_t step) { return Rng(seed, step); }

  std::uint64_t next_u64() { return engine_(); }

  // Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Uniform integer in [0, n), by rejection so there is no modulo bias.
  std::uint64_t below(std::uint64_t n) {
    const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
    std::uint64_t x;
    do {
      x = engine_();
    } while (x >= limit);
    return x % n;
  }

  bool bernoulli(double p) { return uniform() < p; }

  template <class T>
  void shuffle(std::vector<T>& xs) {
    for (std::size_t i = xs.size(); i > 1; --i) {
      std::swap(xs[i - 1], xs[static_cast<std::size_t>(below(i))]);
    }
  }

 private:
  Rng(std::uint64_t seed, std::uint64_t step) : engine_(seed_sequence({seed, step})) {}

  static std::mt19937_64 seed_sequence(std::initializer_list<std::uint64_t> words) {
    std::vector<std::uint32_t> halves;
    for (std::uint64_t w : words) {
      halves.push_back(static_cast<std::uint32_t>(w));
      halves.push_back(static_cast<std::uint32_t>(w >> 32));
    }
    std::seed_seq seq(halves.begin(), halves.end());
    return std::mt19937_64(seq);
  }

  std::mt19937_64 engine_;
};

}  // namespace dybm
