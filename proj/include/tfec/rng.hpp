#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace tfec {

// Reproducibility helpers. Every random draw in the project flows through
// these: engines are seeded from a root seed mixed with fixed stream tags,
// and variates are derived from raw engine words with explicit arithmetic,
// so results are identical across standard libraries and platforms.

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t mix_seed(std::uint64_t seed) { return splitmix64(seed); }

template <typename... Rest>
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t next, Rest... rest) {
  return mix_seed(splitmix64(seed ^ (next + 0x9e3779b97f4a7c15ULL)), rest...);
}

template <typename... Tags>
std::mt19937_64 seeded_engine(std::uint64_t seed, Tags... tags) {
  return std::mt19937_64(mix_seed(seed, static_cast<std::uint64_t>(tags)...));
}

// Uniform double in [0, 1) from the top 53 bits of one engine word.
inline double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1p-53;
}

inline double uniform_range(std::mt19937_64& rng, double lo, double hi) {
  return lo + (hi - lo) * uniform01(rng);
}

// Unbiased-enough bounded integer in [0, n) via 128-bit multiply.
inline std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t n) {
  return static_cast<std::uint64_t>(
      (static_cast<unsigned __int128>(rng()) * n) >> 64);
}

inline std::int64_t uniform_int(std::mt19937_64& rng, std::int64_t lo,
                                std::int64_t hi) {
  return lo + static_cast<std::int64_t>(
                  uniform_below(rng, static_cast<std::uint64_t>(hi - lo + 1)));
}

// Standard normal via Box-Muller on explicit uniforms (no stdlib
// distribution objects, whose streams differ between implementations).
class GaussianDraw {
 public:
  double operator()(std::mt19937_64& rng) {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = uniform01(rng);
    while (u1 <= 0.0) u1 = uniform01(rng);
    const double u2 = uniform01(rng);
    const double r = std::sqrt(-2.0 * std::log(u1));
    spare_ = r * std::sin(2.0 * M_PI * u2);
    have_spare_ = true;
    return r * std::cos(2.0 * M_PI * u2);
  }

 private:
  bool have_spare_ = false;
  double spare_ = 0.0;
};

template <typename T>
void fisher_yates_shuffle(std::vector<T>& v, std::mt19937_64& rng) {
  for (std::size_t i = v.size(); i > 1; --i) {
    const std::size_t j = static_cast<std::size_t>(uniform_below(rng, i));
    std::swap(v[i - 1], v[j]);
  }
}

}  // namespace tfec
