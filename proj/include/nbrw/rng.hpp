#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace nbrw {

/// SplitMix64 finalizer. Used to derive independent stream seeds from a
/// master seed so that replica i always sees the same stream regardless of
/// which worker runs it.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z += 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// Stream tags keep the random streams of different consumers (particle
/// system, stairs process, bootstrap, ...) disjoint under one master seed.
enum class Stream : std::uint64_t {
  Particles = 1,
  Stairs = 2,
  Stable = 3,
  Bootstrap = 4,
  Serfling = 5,
  Jumps = 6,
};

constexpr std::uint64_t derive_seed(std::uint64_t master, Stream stream,
                                    std::uint64_t index) noexcept {
  return mix64(mix64(master ^ mix64(static_cast<std::uint64_t>(stream))) + index);
}

/// Random stream owned by exactly one replica.
class Rng {
 public:
  using result_type = std::uint64_t;

  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  Rng(std::uint64_t master, Stream stream, std::uint64_t index)
      : engine_(derive_seed(master, stream, index)) {}

  static constexpr result_type min() { return std::mt19937_64::min(); }
  static constexpr result_type max() { return std::mt19937_64::max(); }
  result_type operator()() { return engine_(); }

  /// Uniform on the open interval (0,1); never returns 0 or 1.
  double uniform() {
    return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
  }

  /// Exponential with the given rate; +inf when rate is 0.
  double exponential(double rate) {
    if (rate <= 0.0) return INFINITY;
    return -std::log(uniform()) / rate;
  }

  std::uint64_t poisson(double mean) {
    if (mean <= 0.0) return 0;
    std::poisson_distribution<std::uint64_t> dist(mean);
    return dist(engine_);
  }

  /// Uniform index in [0, n).
  std::size_t index(std::size_t n) {
    return static_cast<std::size_t>(uniform() * static_cast<double>(n)) % n;
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace nbrw
