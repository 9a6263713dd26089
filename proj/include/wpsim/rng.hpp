#ifndef WPSIM_RNG_HPP
#define WPSIM_RNG_HPP

#include <cstdint>

namespace wpsim {

// SplitMix64 finalizer (Steele, Lea & Flood 2014; Vigna's fixed-increment
// variant). Used both as the per-stream generator core and to derive
// substream seeds.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z ^= z >> 30;
  z *= 0xbf58476d1ce4e5b9ULL;
  z ^= z >> 27;
  z *= 0x94d049bb133111ebULL;
  z ^= z >> 31;
  return z;
}

// Deterministic substream derivation: every random draw in the system
// descends from (master seed, id, id, ...) through this fold. No global RNG.
constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t id) noexcept {
  return mix64(seed ^ mix64(id + 0x9e3779b97f4a7c15ULL));
}

template <class... Ids>
constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t id,
                                    Ids... rest) noexcept {
  return derive_seed(derive_seed(seed, id), rest...);
}

// Counter-based SplitMix64 stream. Cheap to construct, so simulation code
// makes one per independent unit of work (game, replicate, bootstrap draw).
class Rng {
 public:
  explicit constexpr Rng(std::uint64_t seed) noexcept : state_(seed) {}

  constexpr std::uint64_t next_u64() noexcept {
    state_ += 0x9e3779b97f4a7c15ULL;
    return mix64(state_);
  }

  // Uniform in [0, 1), 53 random bits.
  double next_unit() noexcept {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  // Fair coin in {0, 1}.
  int next_coin() noexcept { return static_cast<int>(next_u64() >> 63); }

  // Fair +1/-1 step.
  int next_sign() noexcept { return next_coin() ? 1 : -1; }

  // Uniform in [0, n), n >= 1. Rejection sampling, no modulo bias.
  std::uint64_t next_below(std::uint64_t n) noexcept {
    const std::uint64_t threshold = (0 - n) % n;
    for (;;) {
      const std::uint64_t r = next_u64();
      if (r >= threshold) return r % n;
    }
  }

 private:
  std::uint64_t state_;
};

}  // namespace wpsim

#endif  // WPSIM_RNG_HPP
