#pragma once

#include <cstdint>
#include <initializer_list>
#include <limits>
#include <random>

namespace fairnet {

// SplitMix64 finalizer. Used only to derive independent engine seeds.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Seed splitting: the seed of stream (i, j, ...) under `master` is obtained by
// folding each index into the state with mix64. Any single run can therefore
// be re-derived from the master seed and its stream path alone.
constexpr std::uint64_t derive_seed(std::uint64_t master,
                                    std::initializer_list<std::uint64_t> path) noexcept {
  std::uint64_t state = mix64(master);
  for (std::uint64_t index : path) state = mix64(state ^ mix64(index + 0x632be59bd9b4e019ULL));
  return state;
}

// Thin wrapper over mt19937_64. The draw helpers are written out here rather
// than using <random> distributions, whose algorithms vary between standard
// libraries, so that outputs are byte-identical across toolchains.
class Rng {
 public:
  using result_type = std::uint64_t;

  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  static constexpr result_type min() { return std::mt19937_64::min(); }
  static constexpr result_type max() { return std::mt19937_64::max(); }
  result_type operator()() { return engine_(); }

  // Uniform in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  // Uniform in [0, bound). bound must be > 0.
  std::uint64_t below(std::uint64_t bound) {
    // Lemire's multiply-shift with rejection.
    std::uint64_t x = engine_();
    __uint128_t product = static_cast<__uint128_t>(x) * bound;
    auto low = static_cast<std::uint64_t>(product);
    if (low < bound) {
      const std::uint64_t threshold = (0 - bound) % bound;
      while (low < threshold) {
        x = engine_();
        product = static_cast<__uint128_t>(x) * bound;
        low = static_cast<std::uint64_t>(product);
      }
    }
    return static_cast<std::uint64_t>(product >> 64);
  }

  bool bernoulli(double p) { return uniform() < p; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace fairnet
