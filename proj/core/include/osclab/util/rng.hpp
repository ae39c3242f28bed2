#pragma once

#include <cstdint>
#include <cmath>
#include <complex>

namespace osclab {

// Seed-mixing rule used everywhere randomness appears: the stream for
// (base seed, stream index) is one splitmix64 scramble of
// base ^ (index * 0x9E3779B97F4A7C15 + 0xD1B54A32D192ED03).  Draws are
// therefore reproducible from the two integers alone, on any platform.
inline std::uint64_t mix_seed(std::uint64_t base, std::uint64_t stream) {
  std::uint64_t z = base ^ (stream * 0x9E3779B97F4A7C15ull + 0xD1B54A32D192ED03ull);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

// splitmix64 generator with an own Box-Muller normal sampler; the standard
// library's distributions are not bit-reproducible across implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    state_ += 0x9E3779B97F4A7C15ull;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  // uniform in [0, 1), 53-bit resolution
  double next_unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // standard normal pair (Box-Muller)
  void next_normal_pair(double& g0, double& g1) {
    double u1 = next_unit();
    if (u1 < 0x1.0p-100) u1 = 0x1.0p-100;  // keep log finite
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 6.283185307179586476925286766559 * next_unit();
    g0 = r * std::cos(a);
    g1 = r * std::sin(a);
  }

  double next_normal() {
    double a, b;
    next_normal_pair(a, b);
    return a;
  }

  // complex Gaussian with E|z|^2 = 1
  std::complex<double> next_cgauss() {
    double a, b;
    next_normal_pair(a, b);
    return {a * 0.70710678118654752440, b * 0.70710678118654752440};
  }

 private:
  std::uint64_t state_;
};

}  // namespace osclab
