#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "memseconv/errors.hpp"
#include "memseconv/grid.hpp"
#include "memseconv/image_ops.hpp"
#include "memseconv/kernel.hpp"
#include "memseconv/memristor.hpp"
#include "memseconv/parallel.hpp"
#include "memseconv/restore.hpp"
#include "memseconv/rng.hpp"

namespace memseconv {

/// Differential: each ternary weight is a conductance pair and zero weights
/// cancel exactly. Single: one memristor per weight (non-negative kernels
/// only); zero-weight taps leak with ratio G_OFF / G_ON.
enum class WeightMode { Differential, Single };

enum class CircuitModel { Msc, Msce };

inline const char* weight_mode_name(WeightMode m) {
  return m == WeightMode::Differential ? "differential" : "single";
}

inline const char* circuit_model_name(CircuitModel m) {
  return m == CircuitModel::Msc ? "MSC" : "MSCE";
}

struct CircuitConfig {
  DeviceParams device;
  WeightMode weight_mode = WeightMode::Differential;
  double transimpedance_gain = 0.0;  // <= 0 selects the mode default
  double comparator_ref = 0.0;       // volts, zero-to-one conversion reference
  double rail = 15.0;                // volts, op-amp output clamp
  double divider_floor = 1e-6;       // volts, minimum divider denominator
  double conductance_sigma = 0.0;    // relative std-dev of programmed conductance
  std::uint64_t sigma_seed = 1;

  /// Current-to-voltage feedback. The defaults give a +/-1 weight unit gain so
  /// circuit outputs are directly comparable to the mathematical pipeline.
  double gain() const {
    if (transimpedance_gain > 0.0) return transimpedance_gain;
    return weight_mode == WeightMode::Differential
               ? 1.0 / (device.g_on() - device.g_off())
               : 1.0 / device.g_on();
  }

  void validate() const {
    device.validate();
    if (transimpedance_gain < 0.0) throw ConfigError("transimpedance gain must be >= 0");
    if (!(rail > 0.0)) throw ConfigError("rail voltage must be positive");
    if (!(divider_floor > 0.0)) throw ConfigError("divider floor must be positive");
    if (conductance_sigma < 0.0) throw ConfigError("conductance sigma must be >= 0");
  }
};

/// One programmed differential pair; each conductance is nominally G_ON or
/// G_OFF (plus optional programming spread).
struct ConductancePair {
  double g_plus = 0.0;
  double g_minus = 0.0;
};

inline ConductancePair pair_for_weight(int w, const DeviceParams& d) {
  switch (w) {
    case 1:
      return {d.g_on(), d.g_off()};
    case 0:
      return {d.g_off(), d.g_off()};
    case -1:
      return {d.g_off(), d.g_on()};
    default:
      throw ConfigError("ternary weight out of range: " + std::to_string(w));
  }
}

inline std::vector<ConductancePair> map_conductance(const TernaryKernel& k,
                                                    const DeviceParams& d) {
  std::vector<ConductancePair> pairs;
  pairs.reserve(k.weights.size());
  for (auto w : k.weights) pairs.push_back(pair_for_weight(w, d));
  return pairs;
}

/// Single-memristor encoding used by the ablation study: G_ON represents 1,
/// G_OFF represents 0, no negative column.
inline std::vector<ConductancePair> map_conductance_single(const TernaryKernel& k,
                                                           const DeviceParams& d) {
  std::vector<ConductancePair> pairs;
  pairs.reserve(k.weights.size());
  for (auto w : k.weights) {
    if (w < 0)
      throw ConfigError("single-memristor mode cannot represent negative weights");
    pairs.push_back({w == 1 ? d.g_on() : d.g_off(), 0.0});
  }
  return pairs;
}

/// Multiplicative programming spread: g *= 1 + sigma * z, clamped positive.
inline void perturb_conductance(std::vector<ConductancePair>& pairs, double sigma,
                                Pcg32& rng) {
  if (sigma <= 0.0) return;
  for (auto& p : pairs) {
    p.g_plus = std::max(p.g_plus * (1.0 + sigma * rng.next_normal()), 0.0);
    if (p.g_minus > 0.0)
      p.g_minus = std::max(p.g_minus * (1.0 + sigma * rng.next_normal()), 0.0);
  }
}

/// Per-image divergence bookkeeping: where the circuit can differ from the
/// mathematical reference, and which protections engaged.
struct DivergenceCounters {
  long long nonpositive_denominator_windows = 0;  // mask convolution <= 0 at the divider
  long long clamped_nodes = 0;                    // op-amp outputs hitting +/- rail
  long long floored_denominators = 0;             // divider floor engaged
  long long over_threshold_inputs = 0;            // crossbar read inputs beyond V_th
  long long restored_pixels = 0;

  DivergenceCounters& operator+=(const DivergenceCounters& o) {
    nonpositive_denominator_windows += o.nonpositive_denominator_windows;
    clamped_nodes += o.clamped_nodes;
    floored_denominators += o.floored_denominators;
    over_threshold_inputs += o.over_threshold_inputs;
    restored_pixels += o.restored_pixels;
    return *this;
  }
};

inline double clamp_rail(double v, const CircuitConfig& cfg, DivergenceCounters* c) {
  if (v > cfg.rail) {
    if (c) ++c->clamped_nodes;
    return cfg.rail;
  }
  if (v < -cfg.rail) {
    if (c) ++c->clamped_nodes;
    return -cfg.rail;
  }
  return v;
}

/// Crossbar dot product: inputs drive two conductance columns, the column
/// currents are converted to voltages and subtracted. Accumulation order is
/// fixed (tap order) for run-to-run determinism.
inline double crossbar_conv(std::span<const double> signals,
                            std::span<const ConductancePair> pairs, const CircuitConfig& cfg,
                            DivergenceCounters* c = nullptr) {
  if (signals.size() != pairs.size())
    throw std::invalid_argument("crossbar_conv: signal/pair count mismatch");
  double i_plus = 0.0, i_minus = 0.0;
  for (std::size_t i = 0; i < signals.size(); ++i) {
    i_plus += signals[i] * pairs[i].g_plus;
    i_minus += signals[i] * pairs[i].g_minus;
  }
  return clamp_rail(cfg.gain() * (i_plus - i_minus), cfg, c);
}

/// Fixed all-ones convolution realized with resistor pairs (R_ON, R_OFF).
/// Resistors are not part of the weight ablation, so this stays differential
/// with the differential gain in every weight mode.
inline double rc_fixed_conv(std::span<const double> signals, const CircuitConfig& cfg,
                            DivergenceCounters* c = nullptr) {
  const double g_on = cfg.device.g_on(), g_off = cfg.device.g_off();
  double i_plus = 0.0, i_minus = 0.0;
  for (const double v : signals) {
    i_plus += v * g_on;
    i_minus += v * g_off;
  }
  return clamp_rail((i_plus - i_minus) / (g_on - g_off), cfg, c);
}

/// Comparator + MOSFET source follower: values above the reference pass
/// through, everything else (zero or negative) becomes 1 V.
inline double signal_convert_zero2one(double v, const CircuitConfig& cfg) {
  return v > cfg.comparator_ref ? v : 1.0;
}

/// Grounded-source comparator variant used on the reliability path; the 1e-9
/// band absorbs the roundoff of the preceding resistor network.
inline double comparator_threshold(double v, double eta) {
  return v >= eta - 1e-9 ? 1.0 : 0.0;
}

/// Op-amp/multiplier divider. The denominator must arrive positive; the
/// conversion stage upstream guarantees it, so anything else is a wiring bug.
inline double divider(double v1, double v2, const CircuitConfig& cfg,
                      DivergenceCounters* c = nullptr) {
  if (v2 <= 0.0)
    throw InternalError("divider: non-positive denominator " + std::to_string(v2) +
                        " reached the divider");
  double den = v2;
  if (den < cfg.divider_floor) {
    if (c) ++c->floored_denominators;
    den = cfg.divider_floor;
  }
  return clamp_rail(v1 / den, cfg, c);
}

/// V_out = 1 - V_in.
inline double inverter(double v) { return 1.0 - v; }

/// One window's input voltages: v from the preprocessed tensor, m from the
/// non-noisy map; m is binary and v is zero wherever m is zero.
struct WindowSignals {
  int size = 0;
  std::vector<double> v;
  std::vector<double> m;

  int center() const { return (size * size) / 2; }

  void validate() const {
    const auto n = static_cast<std::size_t>(size) * size;
    if (v.size() != n || m.size() != n)
      throw std::invalid_argument("WindowSignals: need s*s voltages on both lines");
    for (std::size_t i = 0; i < n; ++i) {
      if (m[i] != 0.0 && m[i] != 1.0)
        throw std::invalid_argument("WindowSignals: mask line must be binary");
      if (m[i] == 0.0 && v[i] != 0.0)
        throw std::invalid_argument("WindowSignals: v must be zero where m is zero");
    }
  }
};

/// Full window circuit with the reliability path: two crossbar convolutions,
/// the fixed resistor convolution, zero-to-one conversion, divider,
/// comparator, inverter on the central mask tap, multiplier and adder.
inline double window_msc(std::span<const double> v, std::span<const double> m, int s,
                         std::span<const ConductancePair> pairs, const CircuitConfig& cfg,
                         DivergenceCounters* c = nullptr) {
  const double a_conv = crossbar_conv(v, pairs, cfg, c);
  const double m_conv = crossbar_conv(m, pairs, cfg, c);
  const double f_conv = rc_fixed_conv(m, cfg, c);
  if (c && m_conv <= 0.0) ++c->nonpositive_denominator_windows;
  const double n = divider(a_conv, signal_convert_zero2one(m_conv, cfg), cfg, c);
  const double f = comparator_threshold(f_conv, static_cast<double>(s - 2));
  const int center = (s * s) / 2;
  const double update = n * inverter(m[center]) * f;
  if (c && update != 0.0) ++c->restored_pixels;
  return v[center] + update;
}

/// Reduced window circuit: no resistor convolution and no reliability gate.
inline double window_msce(std::span<const double> v, std::span<const double> m, int s,
                          std::span<const ConductancePair> pairs, const CircuitConfig& cfg,
                          DivergenceCounters* c = nullptr) {
  const double a_conv = crossbar_conv(v, pairs, cfg, c);
  const double m_conv = crossbar_conv(m, pairs, cfg, c);
  if (c && m_conv <= 0.0) ++c->nonpositive_denominator_windows;
  const double n = divider(a_conv, signal_convert_zero2one(m_conv, cfg), cfg, c);
  const int center = (s * s) / 2;
  const double update = n * inverter(m[center]);
  if (c && update != 0.0) ++c->restored_pixels;
  return v[center] + update;
}

inline double window_msc(const WindowSignals& w, std::span<const ConductancePair> pairs,
                         const CircuitConfig& cfg, DivergenceCounters* c = nullptr) {
  w.validate();
  return window_msc(w.v, w.m, w.size, pairs, cfg, c);
}

inline double window_msce(const WindowSignals& w, std::span<const ConductancePair> pairs,
                          const CircuitConfig& cfg, DivergenceCounters* c = nullptr) {
  w.validate();
  return window_msce(w.v, w.m, w.size, pairs, cfg, c);
}

struct CircuitStageResult {
  ImageTensor output;
  StageTrace trace;
};

/// Slide the window circuit over every pixel of the preprocessed tensor.
/// Window evaluations are independent, so rows fan out across threads and the
/// result is bit-identical to the sequential evaluation.
inline CircuitStageResult circuit_stage(const ImageTensor& a, const PixelMask& mask,
                                        const TernaryKernel& kernel, CircuitModel model,
                                        const CircuitConfig& cfg, int threads,
                                        DivergenceCounters* counters = nullptr) {
  if (a.width != mask.width || a.height != mask.height)
    throw std::invalid_argument("circuit_stage: tensor/mask shape mismatch");
  cfg.validate();
  const int s = kernel.size;
  const int c0 = s / 2;
  const auto taps = static_cast<std::size_t>(s) * s;

  std::vector<ConductancePair> pairs = cfg.weight_mode == WeightMode::Differential
                                           ? map_conductance(kernel, cfg.device)
                                           : map_conductance_single(kernel, cfg.device);
  if (cfg.conductance_sigma > 0.0) {
    Pcg32 rng(cfg.sigma_seed, 0x636f6e6475637431ULL);
    perturb_conductance(pairs, cfg.conductance_sigma, rng);
  }

  CircuitStageResult res{ImageTensor(a.width, a.height), StageTrace{}};
  res.trace.size = s;

  const int n_threads = std::clamp(threads <= 0 ? default_thread_count() : threads, 1, 64);
  std::vector<DivergenceCounters> per_thread(static_cast<std::size_t>(n_threads));

  parallel_for_rows(a.height, n_threads, [&](int worker, int y0, int y1) {
    std::vector<double> v(taps), m(taps);
    DivergenceCounters& dc = per_thread[static_cast<std::size_t>(worker)];
    for (int y = y0; y < y1; ++y) {
      for (int x = 0; x < a.width; ++x) {
        std::size_t k = 0;
        for (int ky = 0; ky < s; ++ky)
          for (int kx = 0; kx < s; ++kx, ++k) {
            const double mv = mask.at_or(x + kx - c0, y + ky - c0, 0);
            const double av = mv != 0.0 ? a.at(x + kx - c0, y + ky - c0) : 0.0;
            if (std::abs(av) > cfg.device.v_th) ++dc.over_threshold_inputs;
            v[k] = av;
            m[k] = mv;
          }
        res.output.at(x, y) = model == CircuitModel::Msc
                                  ? window_msc(v, m, s, pairs, cfg, &dc)
                                  : window_msce(v, m, s, pairs, cfg, &dc);
      }
    }
  });

  DivergenceCounters total;
  for (const auto& dc : per_thread) total += dc;
  if (counters) *counters += total;

  StageTrace& tr = res.trace;
  for (int y = 0; y < a.height; ++y)
    for (int x = 0; x < a.width; ++x)
      if (mask.at(x, y) == 0) {
        ++tr.noisy_pixels;
        if (res.output.at(x, y) != a.at(x, y)) {
          tr.restored.emplace_back(x, y);
          ++tr.restored_count;
        }
      }
  return res;
}

struct CircuitRunResult {
  ImageTensor output;
  std::vector<StageTrace> stages;
  DivergenceCounters counters;
};

/// Cascade driver for the circuit models; stage kernels must be ternary.
inline CircuitRunResult denoise_image_circuit(const ImageTensor& a_tilde,
                                              const StagePlan& plan, CircuitModel model,
                                              const CircuitConfig& cfg, int threads = 0) {
  plan.validate();
  CircuitRunResult run{a_tilde, {}, {}};
  for (const auto& stage : plan.stages) {
    const auto* ternary = std::get_if<TernaryKernel>(&stage.kernel);
    if (!ternary)
      throw ConfigError("circuit models require ternary stage kernels; quantize first");
    const PixelMask mask = nonnoisy_mask(run.output);
    CircuitStageResult sr =
        circuit_stage(run.output, mask, *ternary, model, cfg, threads, &run.counters);
    run.output = std::move(sr.output);
    run.stages.push_back(std::move(sr.trace));
  }
  return run;
}

}  // namespace memseconv
