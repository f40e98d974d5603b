#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "memseconv/circuit.hpp"
#include "memseconv/grid.hpp"
#include "memseconv/image_ops.hpp"
#include "memseconv/kernel.hpp"
#include "memseconv/metrics.hpp"
#include "memseconv/noise.hpp"
#include "memseconv/power.hpp"
#include "memseconv/report.hpp"
#include "memseconv/restore.hpp"
#include "memseconv/texture.hpp"

namespace memseconv {

/// One stage request: a size plus optional per-stage kernel and reliability
/// rule overriding the plan-wide defaults.
struct StageChoice {
  int size = 3;
  std::string kernel;                    // empty: use the plan default
  std::optional<ReliabilityRule> rule;   // empty: use the plan default
};

/// How per-stage kernels are chosen: a named fixture family or a weight-file
/// path, applied to every stage size unless a stage carries its own choice.
struct PlanSpec {
  std::vector<StageChoice> stages = {{3, {}, {}},  {5, {}, {}},  {7, {}, {}},
                                     {9, {}, {}},  {11, {}, {}}, {13, {}, {}},
                                     {15, {}, {}}};
  std::string kernel = "ones";  // ones | cross | gauss | path to a weight file
  bool quantize = false;        // ternarize full-precision kernels for ternary models
  ReliabilityRule rule = ReliabilityRule::Thresholded;

  void set_sizes(const std::vector<int>& sizes) {
    stages.clear();
    for (const int s : sizes) stages.push_back(StageChoice{s, {}, {}});
  }
};

inline bool is_kernel_fixture(const std::string& name) {
  return name == "ones" || name == "cross" || name == "gauss";
}

inline ReliabilityRule parse_rule(const std::string& name) {
  if (name == "thresholded") return ReliabilityRule::Thresholded;
  if (name == "always-one") return ReliabilityRule::AlwaysOne;
  throw ConfigError("unknown reliability rule \"" + name +
                    "\" (expected thresholded or always-one)");
}

inline AnyKernel fixture_kernel(const std::string& name, int size) {
  if (name == "ones") {
    validate_kernel_shape(size, static_cast<std::size_t>(size) * size);
    return TernaryKernel{size,
                         std::vector<std::int8_t>(static_cast<std::size_t>(size) * size, 1)};
  }
  if (name == "cross") return cross_kernel(size);
  if (name == "gauss") return gaussian_kernel(size);
  throw ConfigError("unknown kernel fixture \"" + name + "\"");
}

/// Materialize the plan for a model. Ternary models need ternary weights:
/// full-precision kernels pass through the quantizer only when `quantize` is
/// set, otherwise the mismatch is a configuration error. The always-restore
/// model has no reliability path, so its stages are always rule always-one.
inline StagePlan build_plan(const PlanSpec& spec, ModelId model) {
  if (spec.stages.empty()) throw ConfigError("stage plan must name at least one size");
  const bool needs_ternary = model != ModelId::Fpsc;

  StagePlan plan;
  for (const StageChoice& choice : spec.stages) {
    const int s = choice.size;
    const std::string& kname = choice.kernel.empty() ? spec.kernel : choice.kernel;
    AnyKernel k =
        is_kernel_fixture(kname) ? fixture_kernel(kname, s) : load_weights_file(kname);
    if (!is_kernel_fixture(kname) && kernel_size(k) != s)
      throw ConfigError("weight file size " + std::to_string(kernel_size(k)) +
                        " does not match stage size " + std::to_string(s));
    if (needs_ternary && std::holds_alternative<FullPrecisionKernel>(k)) {
      if (!spec.quantize)
        throw ConfigError(std::string(model_name(model)) +
                          " needs ternary weights; pass --quantize to ternarize "
                          "full-precision kernels");
      k = ternarize(std::get<FullPrecisionKernel>(k));
    }
    const ReliabilityRule rule = model == ModelId::Msce
                                     ? ReliabilityRule::AlwaysOne
                                     : choice.rule.value_or(spec.rule);
    plan.stages.push_back(StageSpec{s, std::move(k), rule});
  }
  plan.validate();
  return plan;
}

struct DenoiseOutcome {
  Image8 restored;
  DenoiseReport report;
  std::vector<StageTrace> stages;
};

/// Run one model over a noisy 8-bit image: normalize, preprocess, restore
/// (reference pipeline for FPSC/TSC, window circuit for MSC/MSCE),
/// denormalize, and score against the clean reference when provided.
inline DenoiseOutcome run_denoise(const Image8& noisy, const Image8* reference, ModelId model,
                                  const StagePlan& plan, const CircuitConfig& cfg,
                                  int threads = 0) {
  const ImageTensor a_tilde = preprocess(normalize(noisy));
  const PixelMask mask = nonnoisy_mask(a_tilde);
  long long noisy_count = 0;
  for (auto m : mask.data) noisy_count += m == 0;

  DenoiseOutcome out;
  out.report.model = model;
  for (const auto& st : plan.stages) out.report.stage_sizes.push_back(st.size);
  out.report.measured_noisy_fraction =
      static_cast<double>(noisy_count) / static_cast<double>(mask.size());

  ImageTensor restored_tensor(noisy.width, noisy.height);
  if (is_circuit_model(model)) {
    const CircuitModel cm = model == ModelId::Msc ? CircuitModel::Msc : CircuitModel::Msce;
    CircuitRunResult run = denoise_image_circuit(a_tilde, plan, cm, cfg, threads);
    restored_tensor = std::move(run.output);
    out.stages = std::move(run.stages);
    out.report.counters = run.counters;

    const auto* k3 = std::get_if<TernaryKernel>(&plan.stages.front().kernel);
    const PowerModel pm = model == ModelId::Msc ? PowerModel::Msc : PowerModel::Msce;
    if (k3)
      out.report.power_estimate_W =
          image_power_W(static_cast<long long>(mask.size()),
                        out.report.measured_noisy_fraction, *k3, pm, cfg.device);
  } else {
    const ReferenceModel rm =
        model == ModelId::Msce ? ReferenceModel::TheoryMsce : ReferenceModel::SeConv;
    RunResult run = cascade_reference(a_tilde, plan, rm);
    restored_tensor = std::move(run.output);
    out.stages = std::move(run.stages);
  }

  for (const auto& st : out.stages) out.report.restored_pixels += st.restored_count;
  out.restored = denormalize(restored_tensor);
  if (reference) {
    out.report.psnr_db = psnr(*reference, out.restored);
    out.report.ssim_score = ssim(*reference, out.restored);
  }
  return out;
}

// ---- experiment drivers -----------------------------------------------------

/// Seed layout for sweep-style experiments: the same (density, image) cell
/// uses the same noisy input for every model, so model columns are comparable.
inline std::uint64_t cell_seed(std::uint64_t base, std::size_t density_index,
                               std::size_t image_index) {
  return base + 7919ULL * density_index + image_index;
}

struct SweepCell {
  ModelId model;
  double density;
  int images;
  std::uint64_t base_seed;
  double mean_psnr_db;
  double mean_ssim;
  double mean_restored;
  double mean_power_W;  // NaN for the reference models
};

struct SweepSettings {
  std::vector<ModelId> models = {ModelId::Fpsc, ModelId::Tsc, ModelId::Msc, ModelId::Msce};
  std::vector<double> densities = {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8};
  int images = 3;
  int image_size = 100;
  std::uint64_t base_seed = 1;
  double salt_fraction = 0.5;
};

inline std::vector<SweepCell> run_sweep(const SweepSettings& s, const PlanSpec& plan_spec,
                                        const CircuitConfig& cfg, int threads = 0,
                                        const std::vector<Image8>* clean_images = nullptr) {
  std::vector<SweepCell> cells;
  for (const ModelId model : s.models) {
    const StagePlan plan = build_plan(plan_spec, model);
    for (std::size_t di = 0; di < s.densities.size(); ++di) {
      const double density = s.densities[di];
      double sum_psnr = 0.0, sum_ssim = 0.0, sum_restored = 0.0, sum_power = 0.0;
      int power_terms = 0;
      for (int i = 0; i < s.images; ++i) {
        // same clean image set at every density; noise reseeded per cell
        const std::uint64_t seed = cell_seed(s.base_seed, di, static_cast<std::size_t>(i));
        const Image8 clean = clean_images
                                 ? (*clean_images)[static_cast<std::size_t>(i) %
                                                   clean_images->size()]
                                 : make_texture(s.image_size, s.image_size,
                                                s.base_seed + static_cast<std::uint64_t>(i));
        const NoisyImage noisy =
            inject_sap(clean, NoiseSpec{density, s.salt_fraction, seed});
        DenoiseOutcome out = run_denoise(noisy.noisy, &clean, model, plan, cfg, threads);
        sum_psnr += out.report.psnr_db;
        sum_ssim += out.report.ssim_score;
        sum_restored += static_cast<double>(out.report.restored_pixels);
        if (!std::isnan(out.report.power_estimate_W)) {
          sum_power += out.report.power_estimate_W;
          ++power_terms;
        }
      }
      const double n = s.images;
      cells.push_back(SweepCell{model, density, s.images, s.base_seed, sum_psnr / n,
                                sum_ssim / n, sum_restored / n,
                                power_terms ? sum_power / power_terms
                                            : std::numeric_limits<double>::quiet_NaN()});
    }
  }
  return cells;
}

struct AblationRow {
  std::uint64_t seed;
  double psnr_differential;
  double psnr_single;
  double ssim_differential;
  double ssim_single;
};

struct AblationSettings {
  ModelId model = ModelId::Msce;
  double density = 0.6;
  int images = 50;
  int image_size = 100;
  std::uint64_t base_seed = 1;
  double salt_fraction = 0.5;
};

/// Differential pairs versus single memristors, same noisy input per row.
/// Requires a non-negative kernel (single mode cannot encode -1).
inline std::vector<AblationRow> run_ablation(const AblationSettings& s,
                                             const PlanSpec& plan_spec,
                                             const CircuitConfig& cfg, int threads = 0) {
  if (!is_circuit_model(s.model))
    throw ConfigError("the weight-mode ablation applies to the circuit models only");
  const StagePlan plan = build_plan(plan_spec, s.model);
  for (const auto& st : plan.stages)
    for (auto w : std::get<TernaryKernel>(st.kernel).weights)
      if (w < 0)
        throw ConfigError("the weight-mode ablation needs a non-negative kernel");

  CircuitConfig diff_cfg = cfg;
  diff_cfg.weight_mode = WeightMode::Differential;
  diff_cfg.transimpedance_gain = 0.0;
  CircuitConfig single_cfg = cfg;
  single_cfg.weight_mode = WeightMode::Single;
  single_cfg.transimpedance_gain = 0.0;

  std::vector<AblationRow> rows;
  for (int i = 0; i < s.images; ++i) {
    const std::uint64_t seed = cell_seed(s.base_seed, 0, static_cast<std::size_t>(i));
    const Image8 clean = make_texture(s.image_size, s.image_size, seed);
    const NoisyImage noisy = inject_sap(clean, NoiseSpec{s.density, s.salt_fraction, seed});
    DenoiseOutcome d = run_denoise(noisy.noisy, &clean, s.model, plan, diff_cfg, threads);
    DenoiseOutcome g = run_denoise(noisy.noisy, &clean, s.model, plan, single_cfg, threads);
    rows.push_back(AblationRow{seed, d.report.psnr_db, g.report.psnr_db,
                               d.report.ssim_score, g.report.ssim_score});
  }
  return rows;
}

/// Union of per-stage restored coordinates.
inline std::set<std::pair<int, int>> restored_set(const std::vector<StageTrace>& stages) {
  std::set<std::pair<int, int>> coords;
  for (const auto& st : stages) coords.insert(st.restored.begin(), st.restored.end());
  return coords;
}

}  // namespace memseconv
