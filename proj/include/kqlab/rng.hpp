#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace kqlab {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

// Deterministic seeded stream. Every derived variate uses an explicit
// formula on top of mt19937_64 output; the std:: distribution adaptors are
// implementation-defined and would break bit-exact reproducibility of
// reports across standard libraries.
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t stream)
      : gen_(splitmix64(splitmix64(seed) ^ splitmix64(~stream))) {}

  std::uint64_t next_u64() { return gen_(); }

  // Uniform in [0, 1) with 53 random bits.
  double uniform01() { return double(gen_() >> 11) * 0x1.0p-53; }

  // Exponential(1); uniform01() < 1 keeps the log argument positive.
  double exponential() { return -std::log1p(-uniform01()); }

  // Standard normal via the Marsaglia polar method (pairs cached).
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u, v, s;
    do {
      u = 2.0 * uniform01() - 1.0;
      v = 2.0 * uniform01() - 1.0;
      s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    double f = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * f;
    has_spare_ = true;
    return u * f;
  }

  // Uniform integer in [0, bound) by rejection; bound >= 1.
  std::uint64_t uniform_int(std::uint64_t bound) {
    std::uint64_t limit = std::uint64_t(-1) - std::uint64_t(-1) % bound;
    std::uint64_t x;
    do {
      x = gen_();
    } while (x >= limit);
    return x % bound;
  }

 private:
  std::mt19937_64 gen_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace kqlab
