#pragma once

#include <string>
#include <utility>
#include <vector>

#include "memseconv/conv.hpp"
#include "memseconv/errors.hpp"
#include "memseconv/grid.hpp"
#include "memseconv/image_ops.hpp"
#include "memseconv/kernel.hpp"

namespace memseconv {

/// Gate controlling which noisy pixels a stage may restore: Thresholded
/// requires at least eta = s - 2 non-noisy pixels in the window, AlwaysOne
/// restores every noisy pixel that receives a nonzero estimate.
enum class ReliabilityRule { Thresholded, AlwaysOne };

struct StageSpec {
  int size = 3;
  AnyKernel kernel;
  ReliabilityRule rule = ReliabilityRule::Thresholded;
};

struct StagePlan {
  std::vector<StageSpec> stages;

  void validate() const {
    if (stages.empty()) throw ConfigError("stage plan must contain at least one stage");
    for (const auto& st : stages) {
      if (st.size < 3 || st.size % 2 == 0)
        throw ConfigError("stage size must be an odd integer >= 3, got " +
                          std::to_string(st.size));
      if (kernel_size(st.kernel) != st.size)
        throw ConfigError("stage kernel size does not match stage size");
      if (st.rule == ReliabilityRule::Thresholded && st.size - 2 < 1)
        throw ConfigError("thresholded rule needs s - 2 >= 1");
    }
  }
};

/// Per-stage record of what a restoration pass did. Tensors are retained only
/// when requested; the restored coordinate list is always kept.
struct StageTrace {
  int size = 0;
  long long noisy_pixels = 0;
  long long restored_count = 0;
  long long negative_denominators = 0;  // windows with a negative mask convolution
  long long zero_denominators = 0;      // windows with an exactly zero mask convolution
  std::vector<std::pair<int, int>> restored;  // (x, y), row-major order
  bool has_tensors = false;
  ImageTensor n, a_conv, m_conv, f_conv;
  PixelMask m_a, f_m;
};

struct StageResult {
  ImageTensor output;
  StageTrace trace;
};

namespace detail {

inline StageResult reference_stage(const ImageTensor& a, const PixelMask& mask,
                                   const AnyKernel& kernel, ReliabilityRule rule,
                                   bool zero2one_division, bool keep_tensors) {
  if (a.width != mask.width || a.height != mask.height)
    throw std::invalid_argument("reference_stage: tensor/mask shape mismatch");
  const int s = kernel_size(kernel);

  ImageTensor a_conv = conv2d_same(a, kernel);
  ImageTensor m_conv = conv2d_same(mask, kernel);
  ImageTensor f_conv = fixed_conv(mask, s);
  const double eta = s - 2;

  StageResult res{a, StageTrace{}};
  StageTrace& tr = res.trace;
  tr.size = s;
  if (keep_tensors) {
    tr.has_tensors = true;
    tr.n = ImageTensor(a.width, a.height);
    tr.a_conv = a_conv;
    tr.m_conv = m_conv;
    tr.f_conv = f_conv;
    tr.m_a = invert_mask(mask);
    tr.f_m = PixelMask(a.width, a.height);
  }

  for (int y = 0; y < a.height; ++y) {
    for (int x = 0; x < a.width; ++x) {
      const double mc = m_conv.at(x, y);
      if (mc < 0.0) ++tr.negative_denominators;
      if (mc == 0.0) ++tr.zero_denominators;

      double n;
      if (zero2one_division) {
        n = a_conv.at(x, y) / (mc == 0.0 ? 1.0 : mc);
      } else {
        n = mc != 0.0 ? a_conv.at(x, y) / mc : 0.0;
      }
      const double f =
          rule == ReliabilityRule::AlwaysOne ? 1.0 : (f_conv.at(x, y) >= eta ? 1.0 : 0.0);
      if (keep_tensors) {
        tr.n.at(x, y) = n;
        tr.f_m.at(x, y) = f != 0.0 ? 1 : 0;
      }

      if (mask.at(x, y) == 0) {
        ++tr.noisy_pixels;
        const double update = n * f;  // M_A = 1 here
        if (update != 0.0) {
          res.output.at(x, y) = a.at(x, y) + update;
          tr.restored.emplace_back(x, y);
          ++tr.restored_count;
        }
      }
    }
  }
  return res;
}

}  // namespace detail

/// One selective-restoration pass with the thresholded reliability gate and
/// the literal division rule (divide only where the mask convolution is
/// nonzero, keeping its sign). This is the mathematical benchmark the circuit
/// models are compared against.
inline StageResult restore_tsc(const ImageTensor& a, const PixelMask& mask,
                               const AnyKernel& kernel,
                               ReliabilityRule rule = ReliabilityRule::Thresholded,
                               bool keep_tensors = false) {
  return detail::reference_stage(a, mask, kernel, rule, /*zero2one_division=*/false,
                                 keep_tensors);
}

/// One pass of the reformulated pipeline: exact zeros in the mask convolution
/// are replaced by 1 before dividing (negative values are kept), and the
/// reliability gate is dropped.
inline StageResult restore_theory_msce(const ImageTensor& a, const PixelMask& mask,
                                       const AnyKernel& kernel, bool keep_tensors = false) {
  return detail::reference_stage(a, mask, kernel, ReliabilityRule::AlwaysOne,
                                 /*zero2one_division=*/true, keep_tensors);
}

enum class ReferenceModel { SeConv, TheoryMsce };

struct RunResult {
  ImageTensor output;
  std::vector<StageTrace> stages;
};

/// Apply the plan's stages in order. The non-noisy mask is recomputed from
/// each stage's output (nonzero -> 1) before the next stage runs; outputs are
/// not clamped between stages.
inline RunResult cascade_reference(const ImageTensor& a_tilde, const StagePlan& plan,
                                   ReferenceModel model, bool keep_tensors = false) {
  plan.validate();
  RunResult run{a_tilde, {}};
  for (const auto& stage : plan.stages) {
    const PixelMask mask = nonnoisy_mask(run.output);
    StageResult sr = model == ReferenceModel::TheoryMsce
                         ? restore_theory_msce(run.output, mask, stage.kernel, keep_tensors)
                         : restore_tsc(run.output, mask, stage.kernel, stage.rule, keep_tensors);
    run.output = std::move(sr.output);
    run.stages.push_back(std::move(sr.trace));
  }
  return run;
}

}  // namespace memseconv
