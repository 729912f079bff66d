#pragma once

#include <complex>
#include <cstdint>
#include <limits>
#include <random>

namespace scmimo {

// SplitMix64: a counter-based 64-bit generator. Each output is a bijective
// mix of (state + i * golden), so a stream is fully determined by its key.
class SplitMix64 {
 public:
  using result_type = std::uint64_t;

  explicit SplitMix64(std::uint64_t state) noexcept : state_(state) {}

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept {
    return std::numeric_limits<result_type>::max();
  }

  result_type operator()() noexcept {
    state_ += 0x9E3779B97F4A7C15ULL;
    return mix(state_);
  }

  static constexpr std::uint64_t mix(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

 private:
  std::uint64_t state_;
};

// Independent purposes get disjoint key spaces.
enum class StreamDomain : std::uint64_t {
  kDoa = 1,
  kLargeScale = 2,
  kChannel = 3,
  kValidation = 4,
};

// A random substream keyed by (seed, domain, index, attempt). Two streams
// with different keys share no state, so trial results do not depend on
// which thread evaluates them or in what order.
class RngStream {
 public:
  RngStream(std::uint64_t seed, StreamDomain domain, std::uint64_t index,
            std::uint64_t attempt = 0) noexcept
      : engine_(derive_key(seed, domain, index, attempt)) {}

  static std::uint64_t derive_key(std::uint64_t seed, StreamDomain domain,
                                  std::uint64_t index,
                                  std::uint64_t attempt) noexcept {
    std::uint64_t k = SplitMix64::mix(seed ^ 0x6A09E667F3BCC909ULL);
    k = SplitMix64::mix(k ^ (static_cast<std::uint64_t>(domain) * 0xBB67AE8584CAA73BULL));
    k = SplitMix64::mix(k ^ (index + 0x3C6EF372FE94F82BULL));
    k = SplitMix64::mix(k ^ (attempt * 0xA54FF53A5F1D36F1ULL + 1));
    return k;
  }

  // Uniform on [0, 1).
  double uniform() { return uniform_(engine_); }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  double normal() { return normal_(engine_); }

  // Circularly-symmetric CN(0, 1): real and imaginary parts N(0, 1/2).
  std::complex<double> complex_normal() {
    constexpr double kScale = 0.70710678118654752440;
    const double re = normal();
    const double im = normal();
    return {kScale * re, kScale * im};
  }

 private:
  SplitMix64 engine_;
  std::uniform_real_distribution<double> uniform_{0.0, 1.0};
  std::normal_distribution<double> normal_{0.0, 1.0};
};

}  // namespace scmimo
