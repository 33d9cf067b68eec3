#ifndef SDC_RNG_H_
#define SDC_RNG_H_

#include <cmath>
#include <cstdint>
#include <random>
#include <span>
#include <utility>

namespace sdc {

inline std::uint64_t SplitMix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Counter construction: stream `index` of `seed`. Streams of distinct
// indices are independent of the order in which they are consumed.
inline std::uint64_t DeriveSeed(std::uint64_t seed, std::uint64_t index) {
  return SplitMix64(seed ^ SplitMix64(index + 0x632be59bd9b4e019ULL));
}

// Bit-reproducible random stream. Every distribution is derived by hand from
// the raw 64-bit output of mt19937_64 (whose sequence is fixed by the
// standard), so results do not depend on the standard library vendor.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed), seed_(seed) {}

  Rng Fork(std::uint64_t index) const { return Rng(DeriveSeed(seed(), index)); }

  std::uint64_t NextU64() { return engine_(); }

  // Uniform on the open interval (0, 1), 53 bits of resolution.
  double Uniform01() {
    return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
  }

  double Uniform(double lo, double hi) { return lo + (hi - lo) * Uniform01(); }

  // Uniform integer in [0, n), unbiased by rejection.
  std::uint64_t UniformIndex(std::uint64_t n) {
    const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
    std::uint64_t x;
    do {
      x = engine_();
    } while (x >= limit);
    return x % n;
  }

  bool Bernoulli(double p) { return Uniform01() < p; }

  // Laplace(0, scale) by inverse CDF.
  double Laplace(double scale) {
    const double u = Uniform01() - 0.5;
    const double magnitude = -scale * std::log1p(-2.0 * std::abs(u));
    return u < 0 ? -magnitude : magnitude;
  }

  double Exponential(double scale) { return -scale * std::log(Uniform01()); }

  template <typename T>
  void Shuffle(std::span<T> values) {
    for (std::size_t i = values.size(); i > 1; --i) {
      const std::size_t j = UniformIndex(i);
      std::swap(values[i - 1], values[j]);
    }
  }

  std::uint64_t seed() const { return seed_; }

 private:
  std::mt19937_64 engine_;
  std::uint64_t seed_;
};

}  // namespace sdc

#endif  // SDC_RNG_H_
