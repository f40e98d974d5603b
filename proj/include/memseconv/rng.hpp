#pragma once

#include <cmath>
#include <cstdint>

namespace memseconv {

/// PCG32 (pcg32-oneseq, O'Neill 2014). The generator is pinned here so that
/// every seeded artifact the tools emit is reproducible byte for byte;
/// std::random distributions are implementation-defined and must not be used
/// for anything persisted.
class Pcg32 {
 public:
  explicit Pcg32(std::uint64_t seed, std::uint64_t stream = 0)
      : state_(0), inc_((stream << 1u) | 1u) {
    next_u32();
    state_ += seed;
    next_u32();
  }

  std::uint32_t next_u32() {
    const std::uint64_t old = state_;
    state_ = old * 6364136223846793005ULL + inc_;
    const auto xorshifted = static_cast<std::uint32_t>(((old >> 18u) ^ old) >> 27u);
    const auto rot = static_cast<std::uint32_t>(old >> 59u);
    return (xorshifted >> rot) | (xorshifted << ((-rot) & 31u));
  }

  /// Uniform in [0, 1) with 32-bit resolution.
  double next_unit() { return next_u32() * 0x1p-32; }

  double next_range(double lo, double hi) { return lo + (hi - lo) * next_unit(); }

  /// Standard normal, Box-Muller; consumes exactly two draws per call.
  double next_normal() {
    double u1;
    do {
      u1 = next_unit();
    } while (u1 <= 0.0);
    const double u2 = next_unit();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * 3.14159265358979323846 * u2);
  }

 private:
  std::uint64_t state_;
  std::uint64_t inc_;
};

}  // namespace memseconv
