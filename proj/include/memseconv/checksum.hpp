#pragma once

#include <cstdint>
#include <span>

namespace memseconv {

/// FNV-1a 64-bit over raw bytes; pins the bundled data files in the manifest.
inline std::uint64_t fnv1a64(std::span<const std::uint8_t> bytes) {
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  for (const std::uint8_t b : bytes) {
    hash ^= b;
    hash *= 0x100000001b3ULL;
  }
  return hash;
}

}  // namespace memseconv
