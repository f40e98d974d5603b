#pragma once

#include <cmath>
#include <cstdint>
#include <fstream>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "memseconv/errors.hpp"

namespace memseconv {

/// s x s real-valued convolution weights, row-major; s is odd.
struct FullPrecisionKernel {
  int size = 0;
  std::vector<double> weights;
};

/// s x s weights restricted to {-1, 0, +1}.
struct TernaryKernel {
  int size = 0;
  std::vector<std::int8_t> weights;
};

using AnyKernel = std::variant<FullPrecisionKernel, TernaryKernel>;

inline void validate_kernel_shape(int size, std::size_t count) {
  if (size < 1 || size % 2 == 0)
    throw ConfigError("kernel domain error: size must be an odd positive integer, got " +
                      std::to_string(size));
  if (count != static_cast<std::size_t>(size) * static_cast<std::size_t>(size))
    throw ConfigError("kernel shape error: size " + std::to_string(size) + " needs " +
                      std::to_string(static_cast<std::size_t>(size) * size) + " weights, got " +
                      std::to_string(count));
}

/// Quantization threshold: 0.75 times the mean absolute weight.
inline double ternary_threshold(std::span<const double> weights) {
  if (weights.empty()) throw ConfigError("kernel domain error: empty kernel");
  double sum = 0.0;
  for (double w : weights) sum += std::abs(w);
  return 0.75 * sum / static_cast<double>(weights.size());
}

inline double ternary_threshold(const FullPrecisionKernel& kernel) {
  return ternary_threshold(std::span<const double>(kernel.weights));
}

/// +1 above the threshold, -1 below its negation, 0 in between (ties at the
/// threshold quantize to 0).
inline std::vector<std::int8_t> ternarize_values(std::span<const double> weights) {
  const double theta = ternary_threshold(weights);
  std::vector<std::int8_t> out(weights.size(), 0);
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (weights[i] > theta)
      out[i] = 1;
    else if (weights[i] < -theta)
      out[i] = -1;
  }
  return out;
}

inline TernaryKernel ternarize(const FullPrecisionKernel& kernel) {
  validate_kernel_shape(kernel.size, kernel.weights.size());
  return {kernel.size, ternarize_values(kernel.weights)};
}

inline FullPrecisionKernel to_full(const TernaryKernel& kernel) {
  FullPrecisionKernel out{kernel.size, {}};
  out.weights.assign(kernel.weights.begin(), kernel.weights.end());
  return out;
}

inline int count_nonzero(const TernaryKernel& kernel) {
  int n = 0;
  for (auto w : kernel.weights) n += w != 0;
  return n;
}

inline int kernel_size(const AnyKernel& kernel) {
  return std::visit([](const auto& k) { return k.size; }, kernel);
}

inline std::vector<double> kernel_weights(const AnyKernel& kernel) {
  if (const auto* f = std::get_if<FullPrecisionKernel>(&kernel)) return f->weights;
  return to_full(std::get<TernaryKernel>(kernel)).weights;
}

// ---- fixture kernels ------------------------------------------------------

/// Uniform all-ones kernel (the "fixed convolution" weights).
inline FullPrecisionKernel ones_kernel(int s) {
  validate_kernel_shape(s, static_cast<std::size_t>(s) * s);
  return {s, std::vector<double>(static_cast<std::size_t>(s) * s, 1.0)};
}

/// Plus-shaped ternary kernel: +1 on the center row and center column, 0
/// elsewhere. For s = 3 this gives 5 nonzero and 4 zero weights, i.e. ten
/// differential pairs carrying +/-1 and eight carrying 0 across the two
/// crossbar instances of a window circuit.
inline TernaryKernel cross_kernel(int s) {
  validate_kernel_shape(s, static_cast<std::size_t>(s) * s);
  TernaryKernel out{s, std::vector<std::int8_t>(static_cast<std::size_t>(s) * s, 0)};
  const int c = s / 2;
  for (int i = 0; i < s; ++i) {
    out.weights[static_cast<std::size_t>(c) * s + i] = 1;
    out.weights[static_cast<std::size_t>(i) * s + c] = 1;
  }
  return out;
}

/// Unnormalized Gaussian bump; sigma <= 0 selects s / 4. Restoration divides
/// two convolutions by the same kernel, so the overall scale cancels.
inline FullPrecisionKernel gaussian_kernel(int s, double sigma = 0.0) {
  validate_kernel_shape(s, static_cast<std::size_t>(s) * s);
  if (sigma <= 0.0) sigma = s / 4.0;
  FullPrecisionKernel out{s, std::vector<double>(static_cast<std::size_t>(s) * s, 0.0)};
  const int c = s / 2;
  for (int y = 0; y < s; ++y)
    for (int x = 0; x < s; ++x) {
      const double dx = x - c, dy = y - c;
      out.weights[static_cast<std::size_t>(y) * s + x] =
          std::exp(-(dx * dx + dy * dy) / (2.0 * sigma * sigma));
    }
  return out;
}

// ---- weight files ---------------------------------------------------------
//
// JSON schema: {"size": s, "precision": "full"|"ternary", "weights": [...]}
// with row-major weights. Ternary files are validated against {-1, 0, 1}.

inline AnyKernel parse_weights(const nlohmann::json& doc) {
  if (!doc.is_object() || !doc.contains("size") || !doc.contains("precision") ||
      !doc.contains("weights"))
    throw ConfigError("weight file must carry size, precision and weights fields");
  const int size = doc.at("size").get<int>();
  const std::string precision = doc.at("precision").get<std::string>();
  const auto& w = doc.at("weights");
  if (!w.is_array()) throw ConfigError("weights must be an array");
  validate_kernel_shape(size, w.size());

  if (precision == "full") {
    FullPrecisionKernel k{size, {}};
    k.weights.reserve(w.size());
    for (const auto& v : w) k.weights.push_back(v.get<double>());
    return k;
  }
  if (precision == "ternary") {
    TernaryKernel k{size, {}};
    k.weights.reserve(w.size());
    for (const auto& v : w) {
      const double x = v.get<double>();
      if (x != -1.0 && x != 0.0 && x != 1.0)
        throw ConfigError("kernel domain error: ternary weight " + v.dump() +
                          " is not in {-1, 0, 1}");
      k.weights.push_back(static_cast<std::int8_t>(x));
    }
    return k;
  }
  throw ConfigError("precision must be \"full\" or \"ternary\", got \"" + precision + "\"");
}

inline AnyKernel load_weights(const std::string& json_text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(std::string("weight file is not valid JSON: ") + e.what());
  }
  return parse_weights(doc);
}

inline nlohmann::json weights_to_json(const AnyKernel& kernel) {
  nlohmann::json doc;
  if (const auto* f = std::get_if<FullPrecisionKernel>(&kernel)) {
    doc["size"] = f->size;
    doc["precision"] = "full";
    doc["weights"] = f->weights;
  } else {
    const auto& t = std::get<TernaryKernel>(kernel);
    doc["size"] = t.size;
    doc["precision"] = "ternary";
    doc["weights"] = nlohmann::json::array();
    for (auto w : t.weights) doc["weights"].push_back(static_cast<int>(w));
  }
  return doc;
}

inline std::string save_weights(const AnyKernel& kernel) { return weights_to_json(kernel).dump(2) + "\n"; }

inline AnyKernel load_weights_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open for reading: " + path);
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return load_weights(text);
}

inline void save_weights_file(const AnyKernel& kernel, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open for writing: " + path);
  out << save_weights(kernel);
  if (!out) throw IoError("write failed: " + path);
}

}  // namespace memseconv
