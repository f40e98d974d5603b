// Acceptance suite: one function per criterion, one pass/fail line each.
//
// Usage: acceptance [criterion-number ...] [--cli <path-to-cli-binary>]
// With no numbers, all criteria run. Criterion 11 exercises the CLI binary
// and needs --cli.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "memseconv/circuit.hpp"
#include "memseconv/conv.hpp"
#include "memseconv/harness.hpp"
#include "memseconv/image_ops.hpp"
#include "memseconv/kernel.hpp"
#include "memseconv/memristor.hpp"
#include "memseconv/noise.hpp"
#include "memseconv/pgm.hpp"
#include "memseconv/power.hpp"
#include "memseconv/restore.hpp"
#include "memseconv/texture.hpp"

namespace fs = std::filesystem;
using namespace memseconv;

namespace {

struct Criterion {
  bool pass = true;
  std::vector<std::string> notes;

  void check(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      notes.push_back("FAILED: " + what);
    }
  }
  void note(const std::string& s) { notes.push_back(s); }
};

std::string fmt(const char* f, double a, double b = 0, double c = 0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

// ---------------------------------------------------------------------------
// C1: power profile reproduces the published per-voltage table except the two
// internally inconsistent 0.1 V weight +/-1 cells, which are flagged with
// both values.
Criterion c1() {
  Criterion c;
  const VoltagePowerTable t = voltage_power_table();
  const double published[4][9] = {
      {103.02, 103.08, 103.18, 103.32, 103.5, 103.72, 103.98, 104.28, 104.62},  // MSC 0
      {2.02, 2.08, 2.18, 2.32, 2.5, 2.72, 2.98, 3.28, 3.62},                    // MSCE 0
      {204.01, 206.04, 211.09, 218.16, 227.25, 238.36, 251.49, 266.64, 283.81}, // MSC 1
      {103.01, 105.04, 110.09, 117.16, 126.25, 137.36, 150.49, 165.64, 182.81}, // MSCE 1
  };
  int matched = 0;
  for (int r = 0; r < 4; ++r)
    for (int v = 0; v < 9; ++v) {
      const bool flagged_cell = (r == 2 || r == 3) && v == 0;
      const double model = t.rows[static_cast<std::size_t>(r)].cells_uW[static_cast<std::size_t>(v)];
      if (flagged_cell) continue;
      if (std::abs(model - published[r][v]) <= 0.01) ++matched;
    }
  c.check(matched == 34, fmt("34 of 36 cells within 0.01 uW (matched %.0f)", matched));
  // flagged cells assert the model-consistent value and carry the published one
  c.check(std::abs(t.rows[2].cells_uW[0] - 203.01) <= 0.01, "MSC 0.1V cell = 203.01 uW");
  c.check(std::abs(t.rows[3].cells_uW[0] - 102.01) <= 0.01, "MSCE 0.1V cell = 102.01 uW");
  bool msc_flag = false, msce_flag = false;
  for (const auto& f : t.flags) {
    if (f.row == "MSC w=+/-1" && f.column == "0.1V")
      msc_flag = std::abs(f.published_value - 204.01) <= 1e-9 &&
                 std::abs(f.model_value - 203.01) <= 1e-9;
    if (f.row == "MSCE w=+/-1" && f.column == "0.1V")
      msce_flag = std::abs(f.published_value - 103.01) <= 1e-9 &&
                  std::abs(f.model_value - 102.01) <= 1e-9;
  }
  c.check(msc_flag && msce_flag, "0.1V cells flagged with published and model values");
  c.note("published 0.1V cells 204.01/103.01 uW; conductance model gives 203.01/102.01 uW");
  return c;
}

// ---------------------------------------------------------------------------
// C2: whole-image power table. The 16 cells reproduce within 0.01 W. The
// published power-reduction claim (57.6%, i.e. ratio 0.424) is checked as
// stated; the conductance model that reproduces every cell gives a constant
// ratio of 0.4263, so this sub-check documents a discrepancy in the published
// figure rather than a tunable tolerance.
Criterion c2() {
  Criterion c;
  const TernaryKernel kernel = cross_kernel(3);
  const ImagePowerTable t = image_power_table(kernel);
  const double published_msc[8] = {1.58, 1.41, 1.23, 1.06, 0.88, 0.70, 0.53, 0.35};
  const double published_msce[8] = {0.67, 0.60, 0.52, 0.45, 0.37, 0.30, 0.22, 0.15};
  int matched = 0;
  for (int i = 0; i < 8; ++i) {
    if (std::abs(t.msc_W[static_cast<std::size_t>(i)] - published_msc[i]) <= 0.01) ++matched;
    if (std::abs(t.msce_W[static_cast<std::size_t>(i)] - published_msce[i]) <= 0.01) ++matched;
  }
  c.check(matched == 16, fmt("16 of 16 cells within 0.01 W (matched %.0f)", matched));

  bool ratio_ok = true;
  double ratio = 0;
  for (int i = 0; i < 8; ++i) {
    ratio = t.msce_W[static_cast<std::size_t>(i)] / t.msc_W[static_cast<std::size_t>(i)];
    if (std::abs(ratio - 0.424) > 0.001) ratio_ok = false;
  }
  c.check(ratio_ok, fmt("MSCE/MSC ratio = 0.424 +/- 0.001 at every density (model: %.4f)",
                        ratio));
  if (!ratio_ok) {
    c.note("the model that reproduces all 16 cells gives MSCE/MSC = 0.4263 (57.4% "
           "reduction) at every density");
    c.note("the published 57.6% figure equals 0.67/1.58, the two-decimal rounding of the "
           "10% column, and is inconsistent with the same source's per-voltage table");
  }
  return c;
}

// ---------------------------------------------------------------------------
// C3: programming oracle, closed form vs Euler.
Criterion c3() {
  Criterion c;
  const DeviceParams p;
  const ProgramResult exact = program_constant(MemristorDevice(p, p.r_on), 2.0);
  c.check(std::abs(exact.switch_time - 0.198) <= 1e-9,
          fmt("switch time 0.198 s (got %.9f)", exact.switch_time));
  const double energy_closed = 4.0 / 5.0e6 * std::log(100.0);
  c.check(std::abs(exact.switch_energy - energy_closed) <= 1e-15,
          "energy equals the closed-form integral");
  c.check(std::abs(exact.switch_energy - 3.684e-6) <= 1e-9,
          fmt("energy 3.684 uJ (got %.6f uJ)", exact.switch_energy * 1e6));

  const ProgramResult euler = program_euler(MemristorDevice(p, p.r_on), 2.0, 1e-4);
  c.check(std::abs(euler.switch_time - exact.switch_time) / exact.switch_time < 0.01,
          "Euler switch time within 1%");
  c.check(std::abs(euler.switch_energy - exact.switch_energy) / exact.switch_energy < 0.01,
          "Euler energy within 1%");

  const ProgramResult sub = program_constant(MemristorDevice(p, p.r_on), 1.0);
  c.check(!sub.switched && std::isinf(sub.switch_time), "1 V pulse is a no-switch outcome");

  c.note(fmt("switching-window mean power %.2f uW; published programming figure 15.7 uW "
             "rests on an unspecified averaging window and is reported, not asserted",
             exact.mean_power * 1e6));
  return c;
}

// ---------------------------------------------------------------------------
// C4: circuit models match their mathematical references on 1000 seeded
// 10x10 preprocessed images with the all-ones 3x3 kernel.
Criterion c4() {
  Criterion c;
  const CircuitConfig cfg;
  const TernaryKernel tern3{3, std::vector<std::int8_t>(9, 1)};
  const AnyKernel ones3 = AnyKernel{tern3};
  Pcg32 rng(20240001);
  double worst_msc = 0.0, worst_msce = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    const double density = rng.next_range(0.05, 0.95);
    ImageTensor a(10, 10);
    for (auto& v : a.data)
      v = rng.next_unit() < density ? 0.0 : rng.next_range(0.004, 0.996);
    const PixelMask m = nonnoisy_mask(a);

    const ImageTensor msc = circuit_stage(a, m, tern3, CircuitModel::Msc, cfg, 1).output;
    const ImageTensor tsc = restore_tsc(a, m, ones3).output;
    for (std::size_t i = 0; i < a.size(); ++i)
      worst_msc = std::max(worst_msc, std::abs(msc.data[i] - tsc.data[i]));

    const ImageTensor msce = circuit_stage(a, m, tern3, CircuitModel::Msce, cfg, 1).output;
    const ImageTensor theory = restore_theory_msce(a, m, ones3).output;
    for (std::size_t i = 0; i < a.size(); ++i)
      worst_msce = std::max(worst_msce, std::abs(msce.data[i] - theory.data[i]));
  }
  c.check(worst_msc <= 1e-6, fmt("max |MSC - TSC| = %.3g <= 1e-6", worst_msc));
  c.check(worst_msce <= 1e-6, fmt("max |MSCE - theory| = %.3g <= 1e-6", worst_msce));
  return c;
}

// ---------------------------------------------------------------------------
// C5: sliding-window correlation against an independent scatter-form oracle,
// exhaustive over shapes up to 8x8.
Criterion c5() {
  Criterion c;
  Pcg32 rng(20240002);
  long long cases = 0;
  double worst = 0.0;
  for (int w = 1; w <= 8; ++w)
    for (int h = 1; h <= 8; ++h)
      for (int s : {3, 5, 7})
        for (int rep = 0; rep < 60; ++rep) {
          ImageTensor in(w, h);
          for (auto& v : in.data) v = rng.next_range(-1.0, 1.0);
          std::vector<double> weights(static_cast<std::size_t>(s) * s);
          const bool ternary = rep % 2 == 0;
          for (auto& v : weights)
            v = ternary ? static_cast<double>(static_cast<int>(rng.next_u32() % 3) - 1)
                        : rng.next_range(-1.0, 1.0);
          const ImageTensor got = conv2d_same(in, weights, s);

          // scatter-form oracle
          ImageTensor want(w, h, 0.0);
          const int c0 = s / 2;
          for (int y = 0; y < h; ++y)
            for (int x = 0; x < w; ++x)
              for (int ky = 0; ky < s; ++ky)
                for (int kx = 0; kx < s; ++kx) {
                  const int oy = y - (ky - c0), ox = x - (kx - c0);
                  if (ox >= 0 && oy >= 0 && ox < w && oy < h)
                    want.at(ox, oy) +=
                        weights[static_cast<std::size_t>(ky) * s + kx] * in.at(x, y);
                }
          for (std::size_t i = 0; i < got.size(); ++i)
            worst = std::max(worst, std::abs(got.data[i] - want.data[i]));
          ++cases;
        }
  c.check(cases >= 10000, fmt("case count %.0f >= 10000", static_cast<double>(cases)));
  c.check(worst <= 1e-12, fmt("max deviation %.3g <= 1e-12", worst));
  return c;
}

// ---------------------------------------------------------------------------
// C6: weight-mode ablation. Differential pairs beat single memristors at 60%
// density with the plus-shaped (zero-bearing, non-negative) kernel cascade.
Criterion c6() {
  Criterion c;
  AblationSettings s;
  s.model = ModelId::Msce;
  s.density = 0.6;
  s.images = 50;
  s.image_size = 100;
  s.base_seed = 1;
  PlanSpec spec;
  spec.kernel = "cross";
  const CircuitConfig cfg;
  const std::vector<AblationRow> rows = run_ablation(s, spec, cfg, 0);
  int wins = 0;
  for (const auto& r : rows) wins += r.psnr_differential > r.psnr_single;
  c.check(wins >= 48, fmt("differential PSNR strictly above single on %.0f of 50 "
                          "(needs >= 48, i.e. 95%%)",
                          static_cast<double>(wins)));
  double mean_margin = 0;
  for (const auto& r : rows) mean_margin += r.psnr_differential - r.psnr_single;
  c.note(fmt("mean margin %+.3f dB over 50 seeded images", mean_margin / 50.0));
  return c;
}

// ---------------------------------------------------------------------------
// C7: the always-restore mechanism. Single 5x5 plus-kernel stage, where the
// reliability gate actually blocks restorations at high density: the MSCE
// restored set must contain the TSC restored set on every image, and MSCE
// PSNR must be at least TSC PSNR on at least 90% of images.
Criterion c7() {
  Criterion c;
  const CircuitConfig cfg;
  for (const double density : {0.6, 0.7, 0.8}) {
    int wins = 0, containment_failures = 0;
    for (int i = 0; i < 50; ++i) {
      StagePlan tsc_plan, msce_plan;
      tsc_plan.stages.push_back(
          StageSpec{5, AnyKernel{cross_kernel(5)}, ReliabilityRule::Thresholded});
      msce_plan.stages.push_back(
          StageSpec{5, AnyKernel{cross_kernel(5)}, ReliabilityRule::AlwaysOne});
      const Image8 clean = make_texture(100, 100, 3000 + static_cast<std::uint64_t>(i));
      const NoisyImage noisy = inject_sap(
          clean, NoiseSpec{density, 0.5, 4000 + static_cast<std::uint64_t>(i)});
      const DenoiseOutcome tsc =
          run_denoise(noisy.noisy, &clean, ModelId::Tsc, tsc_plan, cfg, 0);
      const DenoiseOutcome msce =
          run_denoise(noisy.noisy, &clean, ModelId::Msce, msce_plan, cfg, 0);

      const auto tsc_set = restored_set(tsc.stages);
      const auto msce_set = restored_set(msce.stages);
      for (const auto& coord : tsc_set)
        if (!msce_set.count(coord)) {
          ++containment_failures;
          break;
        }
      wins += msce.report.psnr_db >= tsc.report.psnr_db;
    }
    c.check(containment_failures == 0,
            fmt("restored-set containment at D=%.1f (%.0f failures)", density,
                static_cast<double>(containment_failures)));
    c.check(wins >= 45, fmt("MSCE PSNR >= TSC PSNR at D=%.1f on %.0f of 50 (needs 45)",
                            density, static_cast<double>(wins)));
  }
  return c;
}

// ---------------------------------------------------------------------------
// C8: mean PSNR over 20 seeds is monotone non-increasing in density for each
// model.
Criterion c8() {
  Criterion c;
  SweepSettings s;
  s.images = 20;
  s.image_size = 100;
  PlanSpec spec;
  spec.kernel = "gauss";  // distinct full-precision and ternary kernels per model
  spec.quantize = true;
  const CircuitConfig cfg;
  const std::vector<SweepCell> cells = run_sweep(s, spec, cfg, 0);
  for (int m = 0; m < 4; ++m) {
    std::string curve;
    bool monotone = true;
    double prev = std::numeric_limits<double>::infinity();
    for (int d = 0; d < 8; ++d) {
      const SweepCell& cell = cells[static_cast<std::size_t>(m * 8 + d)];
      curve += fmt(" %.2f", cell.mean_psnr_db);
      if (cell.mean_psnr_db > prev) monotone = false;
      prev = cell.mean_psnr_db;
    }
    c.check(monotone, std::string("mean PSNR non-increasing for ") +
                          model_name(cells[static_cast<std::size_t>(m * 8)].model) + ":" +
                          curve);
  }
  return c;
}

// ---------------------------------------------------------------------------
// C9: ternary quantizer properties.
Criterion c9() {
  Criterion c;
  const std::vector<double> hand = {0.8, -0.2, 0.1, -0.9};
  c.check(std::abs(ternary_threshold(std::span<const double>(hand)) - 0.375) <= 1e-12,
          "threshold oracle: theta = 0.375");
  c.check(ternarize_values(hand) == std::vector<std::int8_t>{1, 0, 0, -1},
          "hand example quantizes to [1, 0, 0, -1]");

  Pcg32 rng(20240003);
  bool range_ok = true, scale_ok = true;
  for (int trial = 0; trial < 200; ++trial) {
    const int s = 3 + 2 * static_cast<int>(rng.next_u32() % 3);
    FullPrecisionKernel k{s, {}};
    k.weights.resize(static_cast<std::size_t>(s) * s);
    for (auto& w : k.weights) w = rng.next_range(-1.5, 1.5);
    const TernaryKernel t = ternarize(k);
    for (auto w : t.weights)
      if (w != -1 && w != 0 && w != 1) range_ok = false;
    FullPrecisionKernel scaled = k;
    const double factor = rng.next_range(0.01, 50.0);
    for (auto& w : scaled.weights) w *= factor;
    if (ternarize(scaled).weights != t.weights) scale_ok = false;
  }
  c.check(range_ok, "range is exactly {-1, 0, +1} on 200 random kernels");
  c.check(scale_ok, "positive scaling leaves the ternary pattern unchanged");
  return c;
}

// ---------------------------------------------------------------------------
// C10: scope statement.
Criterion c10() {
  Criterion c;
  c.note("absolute published PSNR/SSIM table values (e.g. TSC 34.35 dB at 10% density) "
         "require the original pre-trained network weights, which are not public;");
  c.note("they are out of reach at desk scale by design, and criteria 6-8 stand in "
         "with property-based checks of the same mechanisms.");
  return c;  // an acknowledgment, not a computation
}

// ---------------------------------------------------------------------------
// C11: CLI determinism: rerunning any command with an identical config
// produces byte-identical artifacts, and thread count never changes output
// bytes.

std::map<std::string, std::string> snapshot_dir(const fs::path& dir) {
  std::map<std::string, std::string> files;
  for (const auto& entry : fs::recursive_directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    std::ifstream in(entry.path(), std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    files[fs::relative(entry.path(), dir).string()] = ss.str();
  }
  return files;
}

Criterion c11(const std::string& cli) {
  Criterion c;
  if (cli.empty()) {
    c.check(false, "no CLI binary path (pass --cli)");
    return c;
  }
  const fs::path base = fs::temp_directory_path() / "memseconv_acceptance";
  fs::remove_all(base);
  fs::create_directories(base / "in");

  // fixture inputs
  save_pgm_file(make_texture(48, 48, 11), (base / "in" / "input.pgm").string());
  save_weights_file(AnyKernel{gaussian_kernel(3)}, (base / "in" / "gauss3.json").string());
  {
    ImageTensor t(5, 5, 0.5);
    t.at(2, 2) = 1.0;
    t.at(1, 1) = 0.0;
    std::ofstream out(base / "in" / "tensor.json");
    out << "{\"width\":5,\"height\":5,\"data\":[";
    for (std::size_t i = 0; i < t.size(); ++i) out << (i ? "," : "") << t.data[i];
    out << "]}\n";
  }

  const std::string in_dir = (base / "in").string();
  const std::string work = (base / "work").string();
  auto cmd = [&](const std::string& args, int threads) {
    std::string full = "\"" + cli + "\" " + args + " --threads " +
                       std::to_string(threads) + " --out \"" + work +
                       "\" > /dev/null 2>&1";
    return std::system(full.c_str());
  };
  const std::vector<std::string> commands = {
      "add-noise --input \"" + in_dir + "/input.pgm\" --density 0.3 --seed 42",
      "denoise --provenance \"" + work + "/input_noise.json\" --model msce --kernel ones "
          "--stages 3,5",
      "denoise --input \"" + work + "/input_noisy.pgm\" --model tsc --kernel cross "
          "--stages 3 --format csv",
      "sweep --models tsc,msce --densities 0.3,0.6 --images 2 --size 40 --kernel cross "
          "--format csv",
      "ablation-fig7 --images 2 --size 40 --stages 3,5",
      "power",
      "trace --input \"" + in_dir + "/tensor.json\" --model msc --kernel ones --stages 3",
      "quantize --input \"" + in_dir + "/gauss3.json\"",
  };

  auto run_all = [&](int threads) {
    fs::remove_all(work);
    fs::create_directories(work);
    for (const auto& a : commands)
      if (cmd(a, threads) != 0) return false;
    return true;
  };

  c.check(run_all(1), "all commands exit 0 (threads=1, first run)");
  const auto first = snapshot_dir(work);
  c.check(run_all(1), "all commands exit 0 (threads=1, rerun)");
  const auto second = snapshot_dir(work);
  c.check(run_all(4), "all commands exit 0 (threads=4)");
  const auto threaded = snapshot_dir(work);

  c.check(!first.empty(), fmt("artifacts produced (%.0f files)",
                              static_cast<double>(first.size())));
  c.check(first == second, "rerun artifacts are byte-identical");
  c.check(first == threaded, "thread count does not change artifact bytes");
  fs::remove_all(base);
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<int> selected;
  std::string cli;
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--cli" && i + 1 < argc) {
      cli = argv[++i];
    } else {
      selected.push_back(std::atoi(arg.c_str()));
    }
  }
  if (selected.empty())
    for (int i = 1; i <= 11; ++i) selected.push_back(i);

  const char* labels[] = {
      "",
      "per-voltage power table: 34 of 36 cells within 0.01 uW, two cells flagged",
      "whole-image power table: 16 cells within 0.01 W and the published ratio claim",
      "programming oracle: 0.198 s / 3.684 uJ closed form, Euler within 1%",
      "circuit equals mathematical reference within 1e-6 on 1000 seeded images",
      "correlation equals the scatter oracle within 1e-12 on >= 10^4 cases",
      "differential beats single-memristor weights at 60% density (>= 95% of 50)",
      "always-restore mechanism: restored-set containment and PSNR >= on >= 90%",
      "mean PSNR monotone non-increasing in density for every model (20 seeds)",
      "ternary quantizer: hand example, range, positive-scale invariance",
      "statement: published absolute PSNR/SSIM tables need unavailable weights",
      "CLI determinism: byte-identical artifacts across reruns and thread counts",
  };

  int failures = 0;
  for (const int n : selected) {
    const auto start = std::chrono::steady_clock::now();
    Criterion result;
    switch (n) {
      case 1: result = c1(); break;
      case 2: result = c2(); break;
      case 3: result = c3(); break;
      case 4: result = c4(); break;
      case 5: result = c5(); break;
      case 6: result = c6(); break;
      case 7: result = c7(); break;
      case 8: result = c8(); break;
      case 9: result = c9(); break;
      case 10: result = c10(); break;
      case 11: result = c11(cli); break;
      default:
        std::cout << "[FAIL] C" << n << ": unknown criterion\n";
        ++failures;
        continue;
    }
    const double ms = std::chrono::duration<double, std::milli>(
                          std::chrono::steady_clock::now() - start)
                          .count();
    std::printf("[%s] C%d: %s (%.0f ms)\n", result.pass ? "PASS" : "FAIL", n, labels[n],
                ms);
    for (const auto& note : result.notes) std::printf("       %s\n", note.c_str());
    if (!result.pass) ++failures;
  }
  return failures == 0 ? 0 : 1;
}
