#pragma once

#include <cstdint>
#include <random>

namespace pdfuzz {

// Every seeded decision in the toolkit draws from this generator so that
// permutations, samples and corpora are reproducible across platforms:
//
//   engine      std::mt19937_64 seeded with the 64-bit seed (the engine is
//               bit-exactly specified by the C++ standard)
//   below(b)    rejection sampling: draw r until r >= (2^64 - b) mod b,
//               return r mod b
//   unit()      (r >> 11) * 2^-53, a double in [0, 1)
//
// std::uniform_*_distribution is avoided because its output is
// implementation defined.
class SeededRng {
 public:
  explicit SeededRng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  std::uint64_t below(std::uint64_t bound) {
    if (bound <= 1) return 0;
    const std::uint64_t threshold = (0 - bound) % bound;
    for (;;) {
      const std::uint64_t r = engine_();
      if (r >= threshold) return r % bound;
    }
  }

  // Uniform in [lo, hi].
  std::uint64_t between(std::uint64_t lo, std::uint64_t hi) { return lo + below(hi - lo + 1); }

  double unit() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

 private:
  std::mt19937_64 engine_;
};

// Derives independent per-item seeds from a base seed (splitmix64 finalizer).
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index) {
  std::uint64_t z = base + 0x9E3779B97F4A7C15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace pdfuzz
