#pragma once

#include <cctype>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <string>
#include <vector>

#include <json.hpp>

#include "memseconv/circuit.hpp"
#include "memseconv/errors.hpp"

namespace memseconv {

enum class ModelId { Fpsc, Tsc, Msc, Msce };

inline const char* model_name(ModelId m) {
  switch (m) {
    case ModelId::Fpsc: return "FPSC";
    case ModelId::Tsc: return "TSC";
    case ModelId::Msc: return "MSC";
    case ModelId::Msce: return "MSCE";
  }
  return "?";
}

inline ModelId parse_model(std::string name) {
  for (char& c : name) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  if (name == "fpsc") return ModelId::Fpsc;
  if (name == "tsc") return ModelId::Tsc;
  if (name == "msc") return ModelId::Msc;
  if (name == "msce") return ModelId::Msce;
  throw ConfigError("unknown model \"" + name + "\" (expected fpsc, tsc, msc or msce)");
}

inline bool is_circuit_model(ModelId m) { return m == ModelId::Msc || m == ModelId::Msce; }

/// Metrics may be +inf (identical images); JSON has no inf, so serialize it as
/// the string "inf".
inline nlohmann::json json_metric(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (std::isnan(v)) return nullptr;
  return v;
}

inline std::string format_metric(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (std::isnan(v)) return "";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

struct DenoiseReport {
  ModelId model = ModelId::Tsc;
  std::vector<int> stage_sizes;
  std::string kernel_name;
  double density = std::numeric_limits<double>::quiet_NaN();  // configured, if known
  double measured_noisy_fraction = 0.0;  // zero pixels after preprocessing
  double salt_fraction = 0.5;
  std::uint64_t seed = 0;
  double psnr_db = std::numeric_limits<double>::quiet_NaN();
  double ssim_score = std::numeric_limits<double>::quiet_NaN();
  long long restored_pixels = 0;
  DivergenceCounters counters;
  double power_estimate_W = std::numeric_limits<double>::quiet_NaN();  // circuit models only
  nlohmann::json effective_config;  // full config after defaults; regenerates the run
};

inline nlohmann::json report_to_json(const DenoiseReport& r) {
  nlohmann::json j;
  j["model"] = model_name(r.model);
  j["stage_sizes"] = r.stage_sizes;
  j["kernel"] = r.kernel_name;
  j["density"] = std::isnan(r.density) ? nlohmann::json(nullptr) : nlohmann::json(r.density);
  j["measured_noisy_fraction"] = r.measured_noisy_fraction;
  j["salt_fraction"] = r.salt_fraction;
  j["seed"] = r.seed;
  j["psnr_db"] = json_metric(r.psnr_db);
  j["ssim"] = json_metric(r.ssim_score);
  j["restored_pixels"] = r.restored_pixels;
  j["divergence"] = {
      {"nonpositive_denominator_windows", r.counters.nonpositive_denominator_windows},
      {"clamped_nodes", r.counters.clamped_nodes},
      {"floored_denominators", r.counters.floored_denominators},
      {"over_threshold_inputs", r.counters.over_threshold_inputs},
  };
  j["power_estimate_W"] = json_metric(r.power_estimate_W);
  j["effective_config"] = r.effective_config;
  return j;
}

inline std::string report_csv_header() {
  return "model,stages,kernel,density,measured_noisy_fraction,salt_fraction,seed,psnr_db,"
         "ssim,restored_pixels,nonpositive_denominator_windows,clamped_nodes,"
         "floored_denominators,over_threshold_inputs,power_estimate_W";
}

inline std::string report_csv_row(const DenoiseReport& r) {
  std::string stages;
  for (std::size_t i = 0; i < r.stage_sizes.size(); ++i) {
    if (i) stages += ' ';
    stages += std::to_string(r.stage_sizes[i]);
  }
  char num[64];
  std::string row;
  row += model_name(r.model);
  row += ',' + stages + ',' + r.kernel_name + ',';
  if (!std::isnan(r.density)) {
    std::snprintf(num, sizeof num, "%.4f", r.density);
    row += num;
  }
  row += ',';
  std::snprintf(num, sizeof num, "%.6f", r.measured_noisy_fraction);
  row += num;
  row += ',';
  std::snprintf(num, sizeof num, "%.4f", r.salt_fraction);
  row += num;
  row += ',' + std::to_string(r.seed);
  row += ',' + format_metric(r.psnr_db);
  row += ',' + format_metric(r.ssim_score);
  row += ',' + std::to_string(r.restored_pixels);
  row += ',' + std::to_string(r.counters.nonpositive_denominator_windows);
  row += ',' + std::to_string(r.counters.clamped_nodes);
  row += ',' + std::to_string(r.counters.floored_denominators);
  row += ',' + std::to_string(r.counters.over_threshold_inputs);
  row += ',' + format_metric(r.power_estimate_W);
  return row;
}

}  // namespace memseconv
