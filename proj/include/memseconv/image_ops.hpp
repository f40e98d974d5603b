#pragma once

#include <algorithm>
#include <cmath>

#include "memseconv/grid.hpp"

namespace memseconv {

/// 8-bit grid -> normalized tensor, v / 255.
inline ImageTensor normalize(const Image8& image) {
  ImageTensor out(image.width, image.height);
  for (std::size_t i = 0; i < image.size(); ++i) out.data[i] = image.data[i] / 255.0;
  return out;
}

/// Normalized tensor -> 8-bit grid: clamp to [0, 1], scale by 255, round half
/// away from zero.
inline Image8 denormalize(const ImageTensor& tensor) {
  Image8 out(tensor.width, tensor.height);
  for (std::size_t i = 0; i < tensor.size(); ++i) {
    const double clamped = std::clamp(tensor.data[i], 0.0, 1.0);
    out.data[i] = static_cast<std::uint8_t>(std::llround(clamped * 255.0));
  }
  return out;
}

/// Zero out candidate noise: elements equal to 1 become 0, others pass through.
inline ImageTensor preprocess(const ImageTensor& tensor) {
  ImageTensor out = tensor;
  for (double& v : out.data)
    if (v == 1.0) v = 0.0;
  return out;
}

/// Non-noisy map: 1 where the element is nonzero, 0 elsewhere. Behavioral
/// stand-in for the gain limiter stage of the circuit.
inline PixelMask nonnoisy_mask(const ImageTensor& tensor) {
  PixelMask out(tensor.width, tensor.height);
  for (std::size_t i = 0; i < tensor.size(); ++i)
    out.data[i] = tensor.data[i] != 0.0 ? 1 : 0;
  return out;
}

/// Elementwise 1 - m.
inline PixelMask invert_mask(const PixelMask& mask) {
  PixelMask out(mask.width, mask.height);
  for (std::size_t i = 0; i < mask.size(); ++i)
    out.data[i] = static_cast<std::uint8_t>(1 - mask.data[i]);
  return out;
}

/// Center crop; cw/ch <= source dimensions.
inline Image8 center_crop(const Image8& image, int cw, int ch) {
  if (cw < 1 || ch < 1 || cw > image.width || ch > image.height)
    throw std::invalid_argument("center_crop: bad crop size");
  const int x0 = (image.width - cw) / 2;
  const int y0 = (image.height - ch) / 2;
  Image8 out(cw, ch);
  for (int y = 0; y < ch; ++y)
    for (int x = 0; x < cw; ++x) out.at(x, y) = image.at(x0 + x, y0 + y);
  return out;
}

}  // namespace memseconv
