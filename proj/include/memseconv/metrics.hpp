#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "memseconv/grid.hpp"

namespace memseconv {

inline double mse(const Image8& a, const Image8& b) {
  if (!a.same_shape(b)) throw std::invalid_argument("mse: shape mismatch");
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = static_cast<double>(a.data[i]) - static_cast<double>(b.data[i]);
    acc += d * d;
  }
  return acc / static_cast<double>(a.size());
}

/// Peak signal-to-noise ratio in dB against an 8-bit peak of 255. Identical
/// images report +infinity (serialized as "inf" in reports).
inline double psnr(const Image8& reference, const Image8& test) {
  const double m = mse(reference, test);
  if (m == 0.0) return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(255.0 * 255.0 / m);
}

/// Normalized 2-D Gaussian tap weights, size x size, row-major.
inline std::vector<double> gaussian_window(int size, double sigma) {
  std::vector<double> w(static_cast<std::size_t>(size) * size);
  const int c = size / 2;
  double sum = 0.0;
  for (int y = 0; y < size; ++y)
    for (int x = 0; x < size; ++x) {
      const double dx = x - c, dy = y - c;
      const double g = std::exp(-(dx * dx + dy * dy) / (2.0 * sigma * sigma));
      w[static_cast<std::size_t>(y) * size + x] = g;
      sum += g;
    }
  for (double& v : w) v /= sum;
  return w;
}

struct SsimParams {
  int window = 11;
  double sigma = 1.5;
  double k1 = 0.01;
  double k2 = 0.03;
  double dynamic_range = 255.0;
};

/// Mean structural similarity with the standard parameterization: Gaussian
/// 11x11 window (sigma 1.5), K1 = 0.01, K2 = 0.03, L = 255, evaluated on
/// windows that lie fully inside both images.
inline double ssim(const Image8& reference, const Image8& test, const SsimParams& p = {}) {
  if (!reference.same_shape(test)) throw std::invalid_argument("ssim: shape mismatch");
  if (reference.width < p.window || reference.height < p.window)
    throw std::invalid_argument("ssim: image smaller than the local window");

  const std::vector<double> w = gaussian_window(p.window, p.sigma);
  const double c1 = (p.k1 * p.dynamic_range) * (p.k1 * p.dynamic_range);
  const double c2 = (p.k2 * p.dynamic_range) * (p.k2 * p.dynamic_range);

  double total = 0.0;
  long long count = 0;
  for (int y = 0; y + p.window <= reference.height; ++y) {
    for (int x = 0; x + p.window <= reference.width; ++x) {
      double mu_x = 0.0, mu_y = 0.0, xx = 0.0, yy = 0.0, xy = 0.0;
      std::size_t k = 0;
      for (int wy = 0; wy < p.window; ++wy)
        for (int wx = 0; wx < p.window; ++wx, ++k) {
          const double a = reference.at(x + wx, y + wy);
          const double b = test.at(x + wx, y + wy);
          mu_x += w[k] * a;
          mu_y += w[k] * b;
          xx += w[k] * a * a;
          yy += w[k] * b * b;
          xy += w[k] * a * b;
        }
      const double var_x = xx - mu_x * mu_x;
      const double var_y = yy - mu_y * mu_y;
      const double cov = xy - mu_x * mu_y;
      const double value = ((2.0 * mu_x * mu_y + c1) * (2.0 * cov + c2)) /
                           ((mu_x * mu_x + mu_y * mu_y + c1) * (var_x + var_y + c2));
      total += value;
      ++count;
    }
  }
  return total / static_cast<double>(count);
}

}  // namespace memseconv
