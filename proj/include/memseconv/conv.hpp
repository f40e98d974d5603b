#pragma once

#include <span>

#include "memseconv/grid.hpp"
#include "memseconv/kernel.hpp"

namespace memseconv {

/// 'Same'-size sliding-window correlation with zero padding and no kernel
/// flip; this is the deep-learning convention all weight files assume. Taps
/// are accumulated in row-major order so results do not depend on how the
/// caller parallelizes over output pixels.
inline ImageTensor conv2d_same(const ImageTensor& input, std::span<const double> weights, int s) {
  validate_kernel_shape(s, weights.size());
  const int c = s / 2;
  ImageTensor out(input.width, input.height);
  for (int y = 0; y < input.height; ++y) {
    for (int x = 0; x < input.width; ++x) {
      double acc = 0.0;
      std::size_t k = 0;
      for (int ky = 0; ky < s; ++ky)
        for (int kx = 0; kx < s; ++kx, ++k)
          acc += weights[k] * input.at_or(x + kx - c, y + ky - c, 0.0);
      out.at(x, y) = acc;
    }
  }
  return out;
}

inline ImageTensor conv2d_same(const ImageTensor& input, const FullPrecisionKernel& k) {
  return conv2d_same(input, k.weights, k.size);
}

inline ImageTensor conv2d_same(const ImageTensor& input, const TernaryKernel& k) {
  return conv2d_same(input, to_full(k).weights, k.size);
}

inline ImageTensor conv2d_same(const ImageTensor& input, const AnyKernel& k) {
  return conv2d_same(input, kernel_weights(k), kernel_size(k));
}

inline ImageTensor mask_to_tensor(const PixelMask& mask) {
  ImageTensor out(mask.width, mask.height);
  for (std::size_t i = 0; i < mask.size(); ++i) out.data[i] = mask.data[i];
  return out;
}

inline ImageTensor conv2d_same(const PixelMask& mask, const AnyKernel& k) {
  return conv2d_same(mask_to_tensor(mask), k);
}

/// Correlation with the uniform all-ones s x s kernel; on a binary mask this
/// counts the non-noisy pixels covered by each window.
inline ImageTensor fixed_conv(const PixelMask& mask, int s) {
  return conv2d_same(mask_to_tensor(mask), ones_kernel(s).weights, s);
}

}  // namespace memseconv
