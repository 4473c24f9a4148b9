#pragma once

#include <cstdint>
#include <random>

namespace advim {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Deterministic random stream. Every stochastic operation takes one of these
// explicitly; the same seed reproduces the same outputs bit for bit.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  // Uniform in [0, 1).
  double next_unit() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

  // Uniform in {0, ..., n-1}, unbiased.
  std::uint64_t next_below(std::uint64_t n) {
    const std::uint64_t threshold = (0 - n) % n;
    for (;;) {
      const std::uint64_t r = eng_();
      if (r >= threshold) return r % n;
    }
  }

  std::uint64_t next_raw() { return eng_(); }

  // Independently seeded child stream; advances this stream by one draw.
  Rng spawn() { return Rng(splitmix64(eng_())); }

 private:
  std::mt19937_64 eng_;
};

// Stable sub-seed for stage `a`, item `b` of a run keyed by `master`.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a,
                                 std::uint64_t b = 0) {
  return splitmix64(master ^ splitmix64(a ^ splitmix64(b + 0x51ed2701ULL)));
}

}  // namespace advim
