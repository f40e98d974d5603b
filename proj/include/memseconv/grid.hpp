#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace memseconv {

/// Row-major 2-D grid; pixel (x, y) lives at data[y * width + x].
template <typename T>
struct Grid {
  int width = 0;
  int height = 0;
  std::vector<T> data;

  Grid() = default;

  Grid(int w, int h, T fill = T{}) : width(w), height(h) {
    if (w < 1 || h < 1) throw std::invalid_argument("Grid: width and height must be >= 1");
    data.assign(static_cast<std::size_t>(w) * static_cast<std::size_t>(h), fill);
  }

  T& at(int x, int y) { return data[static_cast<std::size_t>(y) * width + x]; }
  const T& at(int x, int y) const { return data[static_cast<std::size_t>(y) * width + x]; }

  /// Read with constant padding outside the grid bounds.
  T at_or(int x, int y, T outside) const {
    if (x < 0 || y < 0 || x >= width || y >= height) return outside;
    return at(x, y);
  }

  std::size_t size() const { return data.size(); }
  bool same_shape(const Grid& other) const {
    return width == other.width && height == other.height;
  }

  bool operator==(const Grid&) const = default;
};

/// Normalized pixel values. Nominally in [0, 1]; intermediate results of the
/// restoration algebra may leave that range.
using ImageTensor = Grid<double>;

/// 8-bit pixel grid as stored in PGM files.
using Image8 = Grid<std::uint8_t>;

/// Binary map with every element in {0, 1}.
using PixelMask = Grid<std::uint8_t>;

}  // namespace memseconv
