// Command-line driver for the selective-convolution denoising toolkit:
// noise injection, the four restoration models, density sweeps, the
// weight-mode ablation, power tables and single-window traces.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "memseconv/circuit.hpp"
#include "memseconv/errors.hpp"
#include "memseconv/harness.hpp"
#include "memseconv/image_ops.hpp"
#include "memseconv/kernel.hpp"
#include "memseconv/memristor.hpp"
#include "memseconv/metrics.hpp"
#include "memseconv/noise.hpp"
#include "memseconv/pgm.hpp"
#include "memseconv/power.hpp"
#include "memseconv/report.hpp"
#include "memseconv/texture.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace memseconv;

namespace {

struct CliConfig {
  std::string out_dir = ".";
  std::string format = "json";  // json | csv
  int threads = 0;              // 0 = hardware concurrency
  std::string model = "msce";
  std::vector<StageChoice> stage_choices = PlanSpec{}.stages;
  std::vector<int> stages_flag;  // --stages shorthand; overrides stage_choices
  std::string kernel = "ones";   // ones | cross | gauss | weight-file path
  bool quantize = false;
  double density = 0.3;
  double salt_fraction = 0.5;
  std::uint64_t seed = 1;
  int images = 3;
  int image_size = 100;
  std::vector<double> densities = {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8};
  int crop_w = 0, crop_h = 0;
  bool random_crop = false;
  double euler_dt = 1e-4;
  CircuitConfig circuit;  // carries DeviceParams

  PlanSpec plan_spec() const {
    PlanSpec p;
    if (!stages_flag.empty())
      p.set_sizes(stages_flag);
    else
      p.stages = stage_choices;
    p.kernel = kernel;
    p.quantize = quantize;
    return p;
  }

  std::vector<int> stage_sizes() const {
    std::vector<int> sizes;
    for (const auto& st : plan_spec().stages) sizes.push_back(st.size);
    return sizes;
  }

  /// Full effective configuration; embedded in every report so a run can be
  /// regenerated from its own header. The thread count is excluded: results
  /// are thread-count invariant by construction.
  json to_json() const {
    json j;
    j["out_dir"] = out_dir;
    j["format"] = format;
    j["model"] = model;
    j["stages"] = json::array();
    for (const auto& st : plan_spec().stages) {
      json stage;
      stage["size"] = st.size;
      stage["kernel"] = st.kernel.empty() ? kernel : st.kernel;
      if (st.rule)
        stage["rule"] =
            *st.rule == ReliabilityRule::AlwaysOne ? "always-one" : "thresholded";
      j["stages"].push_back(stage);
    }
    j["kernel"] = kernel;
    j["quantize"] = quantize;
    j["noise"] = {{"density", density}, {"salt_fraction", salt_fraction}, {"seed", seed}};
    j["images"] = images;
    j["image_size"] = image_size;
    j["densities"] = densities;
    j["crop"] = {{"width", crop_w}, {"height", crop_h}, {"random", random_crop}};
    j["device"] = {{"r_on", circuit.device.r_on},   {"r_off", circuit.device.r_off},
                   {"v_th", circuit.device.v_th},   {"alpha", circuit.device.alpha},
                   {"beta", circuit.device.beta},   {"euler_dt", euler_dt}};
    j["circuit"] = {{"weight_mode", weight_mode_name(circuit.weight_mode)},
                    {"transimpedance_gain", circuit.transimpedance_gain},
                    {"comparator_ref", circuit.comparator_ref},
                    {"rail", circuit.rail},
                    {"divider_floor", circuit.divider_floor},
                    {"conductance_sigma", circuit.conductance_sigma},
                    {"sigma_seed", circuit.sigma_seed}};
    return j;
  }

  void apply_json(const json& j) {
    if (j.contains("out_dir")) out_dir = j.at("out_dir").get<std::string>();
    if (j.contains("format")) format = j.at("format").get<std::string>();
    if (j.contains("threads")) threads = j.at("threads").get<int>();
    if (j.contains("model")) model = j.at("model").get<std::string>();
    if (j.contains("stages")) {
      // either a list of sizes, or a list of {size, kernel?, rule?} objects
      stage_choices.clear();
      for (const auto& entry : j.at("stages")) {
        StageChoice choice;
        if (entry.is_number()) {
          choice.size = entry.get<int>();
        } else if (entry.is_object()) {
          choice.size = entry.at("size").get<int>();
          if (entry.contains("kernel")) choice.kernel = entry.at("kernel").get<std::string>();
          if (entry.contains("rule"))
            choice.rule = parse_rule(entry.at("rule").get<std::string>());
        } else {
          throw ConfigError("stages entries must be sizes or {size, kernel, rule} objects");
        }
        stage_choices.push_back(choice);
      }
    }
    if (j.contains("kernel")) kernel = j.at("kernel").get<std::string>();
    if (j.contains("quantize")) quantize = j.at("quantize").get<bool>();
    if (j.contains("noise")) {
      const auto& n = j.at("noise");
      if (n.contains("density")) density = n.at("density").get<double>();
      if (n.contains("salt_fraction")) salt_fraction = n.at("salt_fraction").get<double>();
      if (n.contains("seed")) seed = n.at("seed").get<std::uint64_t>();
    }
    if (j.contains("images")) images = j.at("images").get<int>();
    if (j.contains("image_size")) image_size = j.at("image_size").get<int>();
    if (j.contains("densities")) densities = j.at("densities").get<std::vector<double>>();
    if (j.contains("crop")) {
      const auto& c = j.at("crop");
      if (c.contains("width")) crop_w = c.at("width").get<int>();
      if (c.contains("height")) crop_h = c.at("height").get<int>();
      if (c.contains("random")) random_crop = c.at("random").get<bool>();
    }
    if (j.contains("device")) {
      const auto& d = j.at("device");
      if (d.contains("r_on")) circuit.device.r_on = d.at("r_on").get<double>();
      if (d.contains("r_off")) circuit.device.r_off = d.at("r_off").get<double>();
      if (d.contains("v_th")) circuit.device.v_th = d.at("v_th").get<double>();
      if (d.contains("alpha")) circuit.device.alpha = d.at("alpha").get<double>();
      if (d.contains("beta")) circuit.device.beta = d.at("beta").get<double>();
      if (d.contains("euler_dt")) euler_dt = d.at("euler_dt").get<double>();
    }
    if (j.contains("circuit")) {
      const auto& c = j.at("circuit");
      if (c.contains("weight_mode")) {
        const auto m = c.at("weight_mode").get<std::string>();
        if (m == "differential")
          circuit.weight_mode = WeightMode::Differential;
        else if (m == "single")
          circuit.weight_mode = WeightMode::Single;
        else
          throw ConfigError("weight_mode must be differential or single");
      }
      if (c.contains("transimpedance_gain"))
        circuit.transimpedance_gain = c.at("transimpedance_gain").get<double>();
      if (c.contains("comparator_ref"))
        circuit.comparator_ref = c.at("comparator_ref").get<double>();
      if (c.contains("rail")) circuit.rail = c.at("rail").get<double>();
      if (c.contains("divider_floor"))
        circuit.divider_floor = c.at("divider_floor").get<double>();
      if (c.contains("conductance_sigma"))
        circuit.conductance_sigma = c.at("conductance_sigma").get<double>();
      if (c.contains("sigma_seed"))
        circuit.sigma_seed = c.at("sigma_seed").get<std::uint64_t>();
    }
  }
};

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open for reading: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open for writing: " + path);
  out << text;
  if (!out) throw IoError("write failed: " + path);
}

json parse_json_file(const std::string& path) {
  try {
    return json::parse(slurp(path));
  } catch (const json::parse_error& e) {
    throw ConfigError(path + " is not valid JSON: " + e.what());
  }
}

std::string out_path(const CliConfig& cfg, const std::string& name) {
  fs::create_directories(cfg.out_dir);
  return (fs::path(cfg.out_dir) / name).string();
}

std::string stem_of(const std::string& path) { return fs::path(path).stem().string(); }

json grid_to_json(const ImageTensor& g) {
  return json{{"width", g.width}, {"height", g.height}, {"data", g.data}};
}

json grid_to_json(const PixelMask& g) {
  json j{{"width", g.width}, {"height", g.height}};
  j["data"] = json::array();
  for (auto v : g.data) j["data"].push_back(static_cast<int>(v));
  return j;
}

ImageTensor tensor_from_json(const json& j) {
  const int w = j.at("width").get<int>();
  const int h = j.at("height").get<int>();
  ImageTensor t(w, h);
  const auto& data = j.at("data");
  if (static_cast<std::size_t>(data.size()) != t.size())
    throw ConfigError("tensor data length does not match width * height");
  for (std::size_t i = 0; i < t.size(); ++i) t.data[i] = data[i].get<double>();
  return t;
}

Image8 load_input_image(const CliConfig& cfg, const std::string& path) {
  Image8 img = load_pgm_file(path);
  if (cfg.crop_w > 0 && cfg.crop_h > 0) {
    if (cfg.random_crop) {
      Pcg32 rng(cfg.seed, 0x63726f7000000001ULL);
      if (cfg.crop_w > img.width || cfg.crop_h > img.height)
        throw ConfigError("crop larger than image");
      const int x0 = static_cast<int>(rng.next_u32() %
                                      static_cast<std::uint32_t>(img.width - cfg.crop_w + 1));
      const int y0 = static_cast<int>(rng.next_u32() %
                                      static_cast<std::uint32_t>(img.height - cfg.crop_h + 1));
      Image8 out(cfg.crop_w, cfg.crop_h);
      for (int y = 0; y < cfg.crop_h; ++y)
        for (int x = 0; x < cfg.crop_w; ++x) out.at(x, y) = img.at(x0 + x, y0 + y);
      return out;
    }
    return center_crop(img, cfg.crop_w, cfg.crop_h);
  }
  return img;
}

// ---- add-noise --------------------------------------------------------------

int cmd_add_noise(const CliConfig& cfg, const std::string& input) {
  const Image8 clean = load_input_image(cfg, input);
  const NoiseSpec spec{cfg.density, cfg.salt_fraction, cfg.seed};
  const NoisyImage result = inject_sap(clean, spec);

  const std::string stem = stem_of(input);
  const std::string noisy_path = out_path(cfg, stem + "_noisy.pgm");
  const std::string mask_path = out_path(cfg, stem + "_mask.pgm");
  const std::string prov_path = out_path(cfg, stem + "_noise.json");
  save_pgm_file(result.noisy, noisy_path);

  Image8 mask_img(result.corrupted.width, result.corrupted.height);
  for (std::size_t i = 0; i < mask_img.size(); ++i)
    mask_img.data[i] = result.corrupted.data[i] ? 255 : 0;
  save_pgm_file(mask_img, mask_path);

  json prov;
  prov["source"] = input;
  prov["noisy"] = noisy_path;
  prov["mask"] = mask_path;
  prov["density"] = cfg.density;
  prov["salt_fraction"] = cfg.salt_fraction;
  prov["seed"] = cfg.seed;
  prov["corrupted_coordinates"] = json::array();
  for (int y = 0; y < result.corrupted.height; ++y)
    for (int x = 0; x < result.corrupted.width; ++x)
      if (result.corrupted.at(x, y)) prov["corrupted_coordinates"].push_back({x, y});
  prov["effective_config"] = cfg.to_json();
  write_text(prov_path, prov.dump(2) + "\n");

  std::cout << "wrote " << noisy_path << ", " << mask_path << ", " << prov_path << "\n";
  return kExitOk;
}

// ---- denoise ----------------------------------------------------------------

int cmd_denoise(CliConfig cfg, std::string input, std::string reference,
                const std::string& provenance) {
  if (!provenance.empty()) {
    const json prov = parse_json_file(provenance);
    if (input.empty() && prov.contains("noisy")) input = prov.at("noisy").get<std::string>();
    if (reference.empty() && prov.contains("source"))
      reference = prov.at("source").get<std::string>();
    if (prov.contains("density")) cfg.density = prov.at("density").get<double>();
    if (prov.contains("salt_fraction"))
      cfg.salt_fraction = prov.at("salt_fraction").get<double>();
    if (prov.contains("seed")) cfg.seed = prov.at("seed").get<std::uint64_t>();
  }
  if (input.empty()) throw ConfigError("denoise needs --input or --provenance");

  const ModelId model = parse_model(cfg.model);
  const StagePlan plan = build_plan(cfg.plan_spec(), model);
  const Image8 noisy = load_pgm_file(input);
  Image8 ref_img;
  const Image8* ref_ptr = nullptr;
  if (!reference.empty()) {
    ref_img = load_pgm_file(reference);
    ref_ptr = &ref_img;
  }

  DenoiseOutcome out = run_denoise(noisy, ref_ptr, model, plan, cfg.circuit, cfg.threads);
  out.report.density = cfg.density;
  out.report.salt_fraction = cfg.salt_fraction;
  out.report.seed = cfg.seed;
  out.report.kernel_name = cfg.kernel;
  out.report.effective_config = cfg.to_json();

  const std::string stem = stem_of(input);
  const std::string restored_path =
      out_path(cfg, stem + "_restored_" + model_name(model) + ".pgm");
  save_pgm_file(out.restored, restored_path);

  std::string report_path;
  if (cfg.format == "csv") {
    report_path = out_path(cfg, stem + "_report_" + model_name(model) + ".csv");
    write_text(report_path, report_csv_header() + "\n" + report_csv_row(out.report) + "\n");
  } else {
    report_path = out_path(cfg, stem + "_report_" + model_name(model) + ".json");
    write_text(report_path, report_to_json(out.report).dump(2) + "\n");
  }
  std::cout << "wrote " << restored_path << ", " << report_path << "\n";
  return kExitOk;
}

// ---- sweep ------------------------------------------------------------------

int cmd_sweep(const CliConfig& cfg, const std::string& models_arg,
              const std::string& input) {
  SweepSettings s;
  s.models.clear();
  std::stringstream ms(models_arg);
  for (std::string tok; std::getline(ms, tok, ',');)
    if (!tok.empty()) s.models.push_back(parse_model(tok));
  if (s.models.empty()) throw ConfigError("sweep needs at least one model");
  s.densities = cfg.densities;
  if (s.densities.empty()) throw ConfigError("sweep needs a nonempty density list");
  s.images = cfg.images;
  s.image_size = cfg.image_size;
  s.base_seed = cfg.seed;
  s.salt_fraction = cfg.salt_fraction;

  std::vector<Image8> inputs;
  const std::vector<Image8>* input_ptr = nullptr;
  if (!input.empty()) {
    inputs.push_back(load_input_image(cfg, input));
    input_ptr = &inputs;
  }

  const std::vector<SweepCell> cells =
      run_sweep(s, cfg.plan_spec(), cfg.circuit, cfg.threads, input_ptr);

  if (cfg.format == "csv") {
    std::string text =
        "model,density,images,base_seed,mean_psnr_db,mean_ssim,mean_restored_pixels,"
        "mean_power_W\n";
    for (const auto& c : cells) {
      char buf[256];
      std::snprintf(buf, sizeof buf, "%s,%.4f,%d,%llu,%s,%s,%.2f,%s\n",
                    model_name(c.model), c.density, c.images,
                    static_cast<unsigned long long>(c.base_seed),
                    format_metric(c.mean_psnr_db).c_str(),
                    format_metric(c.mean_ssim).c_str(), c.mean_restored,
                    format_metric(c.mean_power_W).c_str());
      text += buf;
    }
    const std::string path = out_path(cfg, "sweep.csv");
    write_text(path, text);
    std::cout << "wrote " << path << "\n";
  } else {
    json rows = json::array();
    for (const auto& c : cells)
      rows.push_back({{"model", model_name(c.model)},
                      {"density", c.density},
                      {"images", c.images},
                      {"base_seed", c.base_seed},
                      {"mean_psnr_db", json_metric(c.mean_psnr_db)},
                      {"mean_ssim", json_metric(c.mean_ssim)},
                      {"mean_restored_pixels", c.mean_restored},
                      {"mean_power_W", json_metric(c.mean_power_W)}});
    json doc;
    doc["rows"] = rows;
    doc["effective_config"] = cfg.to_json();
    const std::string path = out_path(cfg, "sweep.json");
    write_text(path, doc.dump(2) + "\n");
    std::cout << "wrote " << path << "\n";
  }
  return kExitOk;
}

// ---- ablation ---------------------------------------------------------------

int cmd_ablation(const CliConfig& cfg) {
  AblationSettings s;
  s.model = parse_model(cfg.model);
  s.density = cfg.density;
  s.images = cfg.images;
  s.image_size = cfg.image_size;
  s.base_seed = cfg.seed;
  s.salt_fraction = cfg.salt_fraction;

  const std::vector<AblationRow> rows = run_ablation(s, cfg.plan_spec(), cfg.circuit,
                                                     cfg.threads);
  int wins = 0;
  for (const auto& r : rows) wins += r.psnr_differential > r.psnr_single;

  if (cfg.format == "csv") {
    std::string text = "seed,psnr_differential,psnr_single,ssim_differential,ssim_single\n";
    for (const auto& r : rows) {
      char buf[256];
      std::snprintf(buf, sizeof buf, "%llu,%s,%s,%s,%s\n",
                    static_cast<unsigned long long>(r.seed),
                    format_metric(r.psnr_differential).c_str(),
                    format_metric(r.psnr_single).c_str(),
                    format_metric(r.ssim_differential).c_str(),
                    format_metric(r.ssim_single).c_str());
      text += buf;
    }
    const std::string path = out_path(cfg, "ablation.csv");
    write_text(path, text);
    std::cout << "wrote " << path << "\n";
  } else {
    json doc;
    doc["rows"] = json::array();
    for (const auto& r : rows)
      doc["rows"].push_back({{"seed", r.seed},
                             {"psnr_differential", json_metric(r.psnr_differential)},
                             {"psnr_single", json_metric(r.psnr_single)},
                             {"ssim_differential", json_metric(r.ssim_differential)},
                             {"ssim_single", json_metric(r.ssim_single)}});
    doc["differential_wins"] = wins;
    doc["images"] = static_cast<int>(rows.size());
    doc["effective_config"] = cfg.to_json();
    const std::string path = out_path(cfg, "ablation.json");
    write_text(path, doc.dump(2) + "\n");
    std::cout << "wrote " << path << "\n";
  }
  std::cout << "differential wins " << wins << " of " << rows.size() << " images\n";
  return kExitOk;
}

// ---- power ------------------------------------------------------------------

TernaryKernel power_kernel(const CliConfig& cfg) {
  const int s = cfg.stage_sizes().front();
  if (is_kernel_fixture(cfg.kernel)) {
    const AnyKernel k = fixture_kernel(cfg.kernel, s);
    if (const auto* t = std::get_if<TernaryKernel>(&k)) return *t;
    return ternarize(std::get<FullPrecisionKernel>(k));
  }
  const AnyKernel k = load_weights_file(cfg.kernel);
  if (const auto* t = std::get_if<TernaryKernel>(&k)) return *t;
  if (!cfg.quantize)
    throw ConfigError("power accounting needs ternary weights; pass --quantize");
  return ternarize(std::get<FullPrecisionKernel>(k));
}

int cmd_power(const CliConfig& cfg) {
  const TernaryKernel kernel = power_kernel(cfg);
  const DeviceParams& dev = cfg.circuit.device;
  const VoltagePowerTable t3 = voltage_power_table(dev);
  const ImagePowerTable t4 = image_power_table(kernel, dev);

  // table 3 CSV
  std::string t3_text = "weight,model";
  for (double v : t3.voltages) {
    char buf[16];
    std::snprintf(buf, sizeof buf, ",%.1fV", v);
    t3_text += buf;
  }
  t3_text += ",Mean\n";
  for (const auto& row : t3.rows) {
    t3_text += row.weight_class == 0 ? "0" : "1/-1";
    t3_text += ",";
    t3_text += power_model_name(row.model);
    for (double c : row.cells_uW) {
      char buf[32];
      std::snprintf(buf, sizeof buf, ",%.4f", c);
      t3_text += buf;
    }
    char buf[32];
    std::snprintf(buf, sizeof buf, ",%.4f\n", row.mean_uW);
    t3_text += buf;
  }
  const std::string t3_path = out_path(cfg, "power_per_voltage.csv");
  write_text(t3_path, t3_text);

  // table 4 CSV
  std::string t4_text = "model";
  for (double d : t4.densities) {
    char buf[16];
    std::snprintf(buf, sizeof buf, ",%.0f%%", d * 100.0);
    t4_text += buf;
  }
  t4_text += "\nMSC";
  for (double w : t4.msc_W) {
    char buf[32];
    std::snprintf(buf, sizeof buf, ",%.4f", w);
    t4_text += buf;
  }
  t4_text += "\nMSCE";
  for (double w : t4.msce_W) {
    char buf[32];
    std::snprintf(buf, sizeof buf, ",%.4f", w);
    t4_text += buf;
  }
  t4_text += "\n";
  const std::string t4_path = out_path(cfg, "power_per_image.csv");
  write_text(t4_path, t4_text);

  // JSON variant, full precision, with annotations and programming figures
  json doc;
  doc["voltages"] = t3.voltages;
  doc["per_voltage_uW"] = json::array();
  for (const auto& row : t3.rows)
    doc["per_voltage_uW"].push_back({{"model", power_model_name(row.model)},
                             {"weight", row.weight_class == 0 ? "0" : "1/-1"},
                             {"cells_uW", row.cells_uW},
                             {"mean_uW", row.mean_uW}});
  doc["flags"] = json::array();
  for (const auto& f : t3.flags)
    doc["flags"].push_back({{"row", f.row},
                            {"column", f.column},
                            {"model_value_uW", f.model_value},
                            {"published_value_uW", f.published_value}});
  doc["per_image_W"] = {{"densities", t4.densities},
                   {"MSC_W", t4.msc_W},
                   {"MSCE_W", t4.msce_W}};
  const KernelPowerProfile pe = kernel_power_profile(kernel, PowerModel::Msce, dev);
  const KernelPowerProfile pm = kernel_power_profile(kernel, PowerModel::Msc, dev);
  doc["kernel_profile"] = {
      {"nonzero", pe.nonzero},
      {"zero", pe.zero},
      {"MSCE", {{"total_uW", pe.total_uW}, {"per_input_mean_uW", pe.per_input_mean_uW}}},
      {"MSC", {{"total_uW", pm.total_uW}, {"per_input_mean_uW", pm.per_input_mean_uW}}},
      {"MSCE_over_MSC", pe.per_input_mean_uW / pm.per_input_mean_uW}};

  const ProgramResult prog = program_constant(MemristorDevice(dev, dev.r_on), 2.0);
  const long long devices = 4LL * kernel.size * kernel.size;  // two crossbars of pairs
  doc["programming"] = {
      {"pulse_volts", 2.0},
      {"per_device",
       {{"switch_time_s", prog.switch_time},
        {"switch_energy_J", prog.switch_energy},
        {"mean_power_uW", prog.mean_power * 1e6}}},
      {"devices", devices},
      {"total_uW", programming_power_total_uW(devices, prog.mean_power * 1e6)},
      {"published_per_device_uW", 15.7},
      {"published_total_uW", 565.2},
      {"note", "published per-device figure assumes an unspecified averaging window; "
               "the model value is switching energy over switching time"}};
  doc["effective_config"] = cfg.to_json();
  const std::string json_path = out_path(cfg, "power.json");
  write_text(json_path, doc.dump(2) + "\n");

  std::cout << "wrote " << t3_path << ", " << t4_path << ", " << json_path << "\n";
  return kExitOk;
}

// ---- trace ------------------------------------------------------------------

int cmd_trace(const CliConfig& cfg, const std::string& input) {
  ImageTensor a;
  if (fs::path(input).extension() == ".pgm") {
    a = normalize(load_pgm_file(input));
  } else {
    a = tensor_from_json(parse_json_file(input));
  }

  const ModelId model = parse_model(cfg.model);
  if (!is_circuit_model(model))
    throw ConfigError("trace compares a circuit model against its reference; "
                      "use --model msc or msce");
  PlanSpec spec = cfg.plan_spec();
  spec.stages.resize(1);  // the walkthrough covers a single stage
  const int s = spec.stages.front().size;
  const StagePlan plan = build_plan(spec, model);
  const TernaryKernel& kernel = std::get<TernaryKernel>(plan.stages.front().kernel);

  const ImageTensor a_tilde = preprocess(a);
  const PixelMask mask = nonnoisy_mask(a_tilde);

  // reference path, tensors kept
  const StageResult ref =
      model == ModelId::Msc
          ? restore_tsc(a_tilde, mask, plan.stages.front().kernel,
                        ReliabilityRule::Thresholded, true)
          : restore_theory_msce(a_tilde, mask, plan.stages.front().kernel, true);

  // circuit path, node maps collected per window
  const CircuitConfig& ccfg = cfg.circuit;
  const auto pairs = map_conductance(kernel, ccfg.device);
  const int c0 = s / 2;
  ImageTensor c_aconv(a.width, a.height), c_mconv(a.width, a.height),
      c_zero2one(a.width, a.height), c_n(a.width, a.height), c_f(a.width, a.height),
      c_out(a.width, a.height);
  DivergenceCounters counters;
  std::vector<double> wv(static_cast<std::size_t>(s) * s), wm(wv.size());
  for (int y = 0; y < a.height; ++y)
    for (int x = 0; x < a.width; ++x) {
      std::size_t k = 0;
      for (int ky = 0; ky < s; ++ky)
        for (int kx = 0; kx < s; ++kx, ++k) {
          const double mv = mask.at_or(x + kx - c0, y + ky - c0, 0);
          wm[k] = mv;
          wv[k] = mv != 0.0 ? a_tilde.at(x + kx - c0, y + ky - c0) : 0.0;
        }
      const double aconv = crossbar_conv(wv, pairs, ccfg, &counters);
      const double mconv = crossbar_conv(wm, pairs, ccfg, &counters);
      if (mconv <= 0.0) ++counters.nonpositive_denominator_windows;
      const double z = signal_convert_zero2one(mconv, ccfg);
      const double n = divider(aconv, z, ccfg, &counters);
      double f = 1.0;
      if (model == ModelId::Msc)
        f = comparator_threshold(rc_fixed_conv(wm, ccfg, &counters),
                                 static_cast<double>(s - 2));
      c_aconv.at(x, y) = aconv;
      c_mconv.at(x, y) = mconv;
      c_zero2one.at(x, y) = z;
      c_n.at(x, y) = n;
      c_f.at(x, y) = f;
      c_out.at(x, y) = wv[static_cast<std::size_t>(s) * s / 2] +
                       n * inverter(wm[static_cast<std::size_t>(s) * s / 2]) * f;
    }

  auto max_abs_delta = [](const ImageTensor& p, const ImageTensor& q) {
    double m = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i)
      m = std::max(m, std::abs(p.data[i] - q.data[i]));
    return m;
  };

  const int cx = a.width / 2, cy = a.height / 2;
  json doc;
  doc["model"] = model_name(model);
  doc["kernel"] = weights_to_json(AnyKernel{kernel});
  doc["input"] = grid_to_json(a);
  doc["preprocessed"] = grid_to_json(a_tilde);
  doc["nonnoisy_mask"] = grid_to_json(mask);
  doc["theory"] = {{"a_conv", grid_to_json(ref.trace.a_conv)},
                   {"m_conv", grid_to_json(ref.trace.m_conv)},
                   {"f_conv", grid_to_json(ref.trace.f_conv)},
                   {"n", grid_to_json(ref.trace.n)},
                   {"m_a", grid_to_json(ref.trace.m_a)},
                   {"f_m", grid_to_json(ref.trace.f_m)},
                   {"a_hat", grid_to_json(ref.output)}};
  doc["circuit"] = {{"a_conv", grid_to_json(c_aconv)},
                    {"m_conv", grid_to_json(c_mconv)},
                    {"zero2one", grid_to_json(c_zero2one)},
                    {"n", grid_to_json(c_n)},
                    {"f", grid_to_json(c_f)},
                    {"a_hat", grid_to_json(c_out)}};
  doc["center_window"] = {
      {"x", cx},
      {"y", cy},
      {"theory",
       {{"a_conv", ref.trace.a_conv.at(cx, cy)},
        {"m_conv", ref.trace.m_conv.at(cx, cy)},
        {"n", ref.trace.n.at(cx, cy)},
        {"a_hat", ref.output.at(cx, cy)}}},
      {"circuit",
       {{"a_conv", c_aconv.at(cx, cy)},
        {"m_conv", c_mconv.at(cx, cy)},
        {"zero2one", c_zero2one.at(cx, cy)},
        {"n", c_n.at(cx, cy)},
        {"a_hat", c_out.at(cx, cy)}}},
      {"delta",
       {{"a_conv", c_aconv.at(cx, cy) - ref.trace.a_conv.at(cx, cy)},
        {"n", c_n.at(cx, cy) - ref.trace.n.at(cx, cy)},
        {"a_hat", c_out.at(cx, cy) - ref.output.at(cx, cy)}}}};
  doc["max_abs_delta"] = {{"a_conv", max_abs_delta(c_aconv, ref.trace.a_conv)},
                          {"m_conv", max_abs_delta(c_mconv, ref.trace.m_conv)},
                          {"n", max_abs_delta(c_n, ref.trace.n)},
                          {"a_hat", max_abs_delta(c_out, ref.output)}};
  doc["divergence"] = {
      {"nonpositive_denominator_windows", counters.nonpositive_denominator_windows},
      {"clamped_nodes", counters.clamped_nodes},
      {"floored_denominators", counters.floored_denominators}};
  doc["effective_config"] = cfg.to_json();

  const std::string path = out_path(cfg, "trace.json");
  write_text(path, doc.dump(2) + "\n");
  std::cout << "wrote " << path << "\n";
  return kExitOk;
}

// ---- quantize ---------------------------------------------------------------

int cmd_quantize(const CliConfig& cfg, const std::string& input,
                 const std::string& output) {
  const AnyKernel k = load_weights_file(input);
  const auto* full = std::get_if<FullPrecisionKernel>(&k);
  if (!full) throw ConfigError("quantize expects a full-precision weight file");
  const double theta = ternary_threshold(*full);
  const TernaryKernel t = ternarize(*full);
  const std::string path =
      output.empty() ? out_path(cfg, stem_of(input) + "_ternary.json") : output;
  save_weights_file(AnyKernel{t}, path);
  std::cout << "theta = " << theta << ", nonzero = " << count_nonzero(t) << " of "
            << t.weights.size() << ", wrote " << path << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CliConfig cfg;

  // Config file first (flag or MEMSECONV_CONFIG), then flags override.
  std::string config_path;
  for (int i = 1; i + 1 < argc; ++i)
    if (std::string(argv[i]) == "--config") config_path = argv[i + 1];
  if (config_path.empty())
    if (const char* env = std::getenv("MEMSECONV_CONFIG")) config_path = env;

  try {
    if (!config_path.empty()) cfg.apply_json(parse_json_file(config_path));
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfigError;
  } catch (const IoError& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return kExitIoError;
  }

  CLI::App app{"behavioral simulator for memristive selective-convolution denoising"};
  app.require_subcommand(1);
  std::string config_dummy;
  app.add_option("--config", config_dummy, "JSON config file (or MEMSECONV_CONFIG)");

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_dummy, "JSON config file (or MEMSECONV_CONFIG)");
    sub->add_option("--out", cfg.out_dir, "output directory");
    sub->add_option("--format", cfg.format, "report format: json or csv")
        ->check(CLI::IsMember({"json", "csv"}));
    sub->add_option("--threads", cfg.threads, "worker threads (0 = auto)");
    sub->add_option("--model", cfg.model, "fpsc | tsc | msc | msce");
    sub->add_option("--stages", cfg.stages_flag, "stage kernel sizes, e.g. --stages 3,5,7")->delimiter(',');
    sub->add_option("--kernel", cfg.kernel, "ones | cross | gauss | weight-file path");
    sub->add_flag("--quantize", cfg.quantize, "ternarize full-precision kernels on load");
    sub->add_option("--density", cfg.density, "noise density in [0, 1]");
    sub->add_option("--salt-fraction", cfg.salt_fraction, "salt share of corrupted pixels");
    sub->add_option("--seed", cfg.seed, "base seed");
    sub->add_option("--weight-mode",
                    [&cfg](const std::vector<std::string>& v) {
                      if (v[0] == "differential")
                        cfg.circuit.weight_mode = WeightMode::Differential;
                      else if (v[0] == "single")
                        cfg.circuit.weight_mode = WeightMode::Single;
                      else
                        return false;
                      return true;
                    },
                    "differential | single");
    sub->add_option("--r-on", cfg.circuit.device.r_on, "device R_ON in ohms");
    sub->add_option("--r-off", cfg.circuit.device.r_off, "device R_OFF in ohms");
    sub->add_option("--v-th", cfg.circuit.device.v_th, "device threshold voltage");
    sub->add_option("--beta", cfg.circuit.device.beta, "device change rate");
    sub->add_option("--alpha", cfg.circuit.device.alpha, "sub-threshold change rate");
    sub->add_option("--dt", cfg.euler_dt, "Euler step in seconds");
    sub->add_option("--rail", cfg.circuit.rail, "op-amp rail voltage");
    sub->add_option("--divider-floor", cfg.circuit.divider_floor, "divider floor voltage");
    sub->add_option("--comparator-ref", cfg.circuit.comparator_ref,
                    "zero-to-one comparator reference");
    sub->add_option("--gain", cfg.circuit.transimpedance_gain,
                    "transimpedance gain (0 = mode default)");
    sub->add_option("--sigma", cfg.circuit.conductance_sigma,
                    "relative conductance spread");
    sub->add_option("--sigma-seed", cfg.circuit.sigma_seed, "conductance spread seed");
  };

  std::string input, reference, provenance, models_arg = "fpsc,tsc,msc,msce", quant_out;

  CLI::App* add_noise = app.add_subcommand("add-noise", "inject salt-and-pepper noise");
  add_common(add_noise);
  add_noise->add_option("--input", input, "clean PGM image")->required();
  add_noise->add_option("--crop-width", cfg.crop_w, "crop width (0 = none)");
  add_noise->add_option("--crop-height", cfg.crop_h, "crop height (0 = none)");
  add_noise->add_flag("--random-crop", cfg.random_crop, "seeded random crop offset");

  CLI::App* denoise = app.add_subcommand("denoise", "restore a noisy image");
  add_common(denoise);
  denoise->add_option("--input", input, "noisy PGM image");
  denoise->add_option("--reference", reference, "clean PGM for PSNR/SSIM");
  denoise->add_option("--provenance", provenance, "provenance JSON from add-noise");

  CLI::App* sweep = app.add_subcommand("sweep", "density sweep across models");
  add_common(sweep);
  sweep->add_option("--models", models_arg, "comma-separated model list");
  sweep->add_option("--densities", cfg.densities, "density list")->delimiter(',');
  sweep->add_option("--images", cfg.images, "images per cell");
  sweep->add_option("--size", cfg.image_size, "synthetic image size");
  sweep->add_option("--input", input, "use this PGM instead of synthetic textures");

  CLI::App* ablation =
      app.add_subcommand("ablation-fig7", "differential vs single weight mode");
  add_common(ablation);
  ablation->add_option("--images", cfg.images, "seeded images");
  ablation->add_option("--size", cfg.image_size, "synthetic image size");

  CLI::App* power = app.add_subcommand("power", "power tables and annotations");
  add_common(power);

  CLI::App* trace = app.add_subcommand("trace", "single-window walkthrough");
  add_common(trace);
  trace->add_option("--input", input, "tensor JSON or PGM")->required();

  CLI::App* quantize = app.add_subcommand("quantize", "ternarize a weight file");
  add_common(quantize);
  quantize->add_option("--input", input, "full-precision weight file")->required();
  quantize->add_option("--out-file", quant_out, "output weight file");

  // defaults tuned per subcommand
  ablation->parse_complete_callback([&]() {
    if (!ablation->count("--density")) cfg.density = 0.6;
    if (!ablation->count("--images")) cfg.images = 50;
    if (!ablation->count("--kernel")) cfg.kernel = "cross";
  });
  power->parse_complete_callback([&]() {
    if (!power->count("--kernel")) cfg.kernel = "cross";
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfigError;
  }

  try {
    if (app.got_subcommand(add_noise)) return cmd_add_noise(cfg, input);
    if (app.got_subcommand(denoise)) return cmd_denoise(cfg, input, reference, provenance);
    if (app.got_subcommand(sweep)) return cmd_sweep(cfg, models_arg, input);
    if (app.got_subcommand(ablation)) return cmd_ablation(cfg);
    if (app.got_subcommand(power)) return cmd_power(cfg);
    if (app.got_subcommand(trace)) return cmd_trace(cfg, input);
    if (app.got_subcommand(quantize)) return cmd_quantize(cfg, input, quant_out);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfigError;
  } catch (const PgmParseError& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return kExitIoError;
  } catch (const PgmUnsupportedError& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return kExitIoError;
  } catch (const IoError& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return kExitIoError;
  } catch (const InternalError& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kExitInternalError;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kExitInternalError;
  }
  return kExitConfigError;
}
