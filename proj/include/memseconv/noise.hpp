#pragma once

#include <cstdint>

#include "memseconv/errors.hpp"
#include "memseconv/grid.hpp"
#include "memseconv/rng.hpp"

namespace memseconv {

struct NoiseSpec {
  double density = 0.0;        // total corruption probability per pixel
  double salt_fraction = 0.5;  // P(corrupted pixel takes 255) vs 0
  std::uint64_t seed = 0;

  void validate() const {
    if (density < 0.0 || density > 1.0)
      throw ConfigError("noise density must lie in [0, 1]");
    if (salt_fraction < 0.0 || salt_fraction > 1.0)
      throw ConfigError("salt fraction must lie in [0, 1]");
  }
};

struct NoisyImage {
  Image8 noisy;
  PixelMask corrupted;  // ground truth: 1 where a pixel was overwritten
};

/// Independent per-pixel Bernoulli(density) corruption; corrupted pixels take
/// 255 with probability salt_fraction, else 0. Pixels are visited in row-major
/// order and the salt/pepper draw is consumed only for corrupted pixels, so a
/// given seed always yields the same image.
inline NoisyImage inject_sap(const Image8& clean, const NoiseSpec& spec) {
  spec.validate();
  NoisyImage out{clean, PixelMask(clean.width, clean.height, 0)};
  Pcg32 rng(spec.seed);
  for (std::size_t i = 0; i < clean.size(); ++i) {
    if (rng.next_unit() < spec.density) {
      out.noisy.data[i] = rng.next_unit() < spec.salt_fraction ? 255 : 0;
      out.corrupted.data[i] = 1;
    }
  }
  return out;
}

}  // namespace memseconv
