#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>

#include "memseconv/grid.hpp"
#include "memseconv/rng.hpp"

namespace memseconv {

/// Procedural grayscale test texture: a seeded mix of plane waves, a radial
/// blob and a linear ramp. Values stay inside roughly [15, 240] so that clean
/// pixels are never mistaken for salt or pepper by the preprocessing step.
inline Image8 make_texture(int width, int height, std::uint64_t seed) {
  Pcg32 rng(seed, 0x7465787475726531ULL);

  struct Wave {
    double kx, ky, phase, amp;
  };
  Wave waves[3];
  for (Wave& w : waves) {
    const double wavelength = rng.next_range(8.0, 40.0);
    const double angle = rng.next_range(0.0, 2.0 * 3.14159265358979323846);
    w.kx = std::cos(angle) / wavelength;
    w.ky = std::sin(angle) / wavelength;
    w.phase = rng.next_range(0.0, 1.0);
    w.amp = rng.next_range(0.05, 0.13);
  }
  const double ramp = rng.next_range(-0.15, 0.15);
  const double bx = rng.next_range(0.2, 0.8) * width;
  const double by = rng.next_range(0.2, 0.8) * height;
  const double br = rng.next_range(0.2, 0.5) * std::min(width, height);
  const double bamp = rng.next_range(-0.18, 0.18);

  Image8 out(width, height);
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      double v = 0.5 + ramp * (static_cast<double>(x) / width - 0.5);
      for (const Wave& w : waves)
        v += w.amp * std::cos(2.0 * 3.14159265358979323846 * (w.kx * x + w.ky * y + w.phase));
      const double dx = x - bx, dy = y - by;
      v += bamp * std::exp(-(dx * dx + dy * dy) / (2.0 * br * br));
      v = std::clamp(v, 0.06, 0.94);
      out.at(x, y) = static_cast<std::uint8_t>(std::llround(v * 255.0));
    }
  }
  return out;
}

}  // namespace memseconv
