// ndf_cli.cpp
// Single entry point for the pipeline: dataset building, LS filter design,
// mask evaluation, probing/sweeps, the moving-source demos, and manifest
// validation.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>

#include "CLI11.hpp"
#include "json.hpp"

#include "ndf/beamformer.hpp"
#include "ndf/eval.hpp"
#include "ndf/experiments.hpp"
#include "ndf/scene.hpp"
#include "ndf/tensor_file.hpp"

namespace {

using nlohmann::json;

enum ExitCode {
  kExitOk = 0,
  kExitFailure = 1,
  kExitConfig = 2,
  kExitSampling = 3,
  kExitIo = 4,
  kExitMaskCardinality = 5,
  kExitDesign = 6,
};

json load_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ndf::IoError("cannot open config: " + path);
  try {
    json j;
    f >> j;
    return j;
  } catch (const json::exception& e) {
    throw ndf::ConfigError("config parse failure: " + std::string(e.what()));
  }
}

// key=value overrides on dotted paths; the key must already exist.
void apply_overrides(json& config, const std::vector<std::string>& overrides) {
  for (const std::string& ov : overrides) {
    const auto eq = ov.find('=');
    if (eq == std::string::npos)
      throw ndf::ConfigError("override must be key=value: " + ov);
    const std::string key = ov.substr(0, eq);
    const std::string value = ov.substr(eq + 1);

    json* node = &config;
    std::size_t pos = 0;
    while (true) {
      const std::size_t dot = key.find('.', pos);
      const std::string part = key.substr(pos, dot - pos);
      if (!node->is_object() || !node->contains(part))
        throw ndf::ConfigError("override addresses a missing config key: " + key);
      node = &(*node)[part];
      if (dot == std::string::npos) break;
      pos = dot + 1;
    }
    const json parsed = json::parse(value, nullptr, false);
    *node = parsed.is_discarded() ? json(value) : parsed;
  }
}

std::optional<std::uint64_t> env_seed() {
  const char* s = std::getenv("NDF_SEED");
  if (!s || !*s) return std::nullopt;
  return std::strtoull(s, nullptr, 10);
}

ndf::PatternDescriptor parse_pattern(const json& j) {
  ndf::PatternDescriptor p;
  if (j.is_string()) return ndf::PatternDescriptor::from_preset(j.get<std::string>());
  if (j.contains("preset")) {
    p = ndf::PatternDescriptor::from_preset(j["preset"].get<std::string>(),
                                            j.value("floor", ndf::kAttenuationFloor));
    return p;
  }
  p.kind = j.value("kind", std::string("dma"));
  p.floor = j.value("floor", ndf::kAttenuationFloor);
  if (p.kind == "dma") {
    p.coefficients = j.at("coefficients").get<std::vector<double>>();
  } else if (p.kind == "piecewise") {
    for (const auto& bp : j.at("breakpoints"))
      p.breakpoints.emplace_back(bp.at(0).get<double>(), bp.at(1).get<double>());
  } else {
    throw ndf::ConfigError("pattern kind must be dma or piecewise");
  }
  return p;
}

std::vector<double> parse_steering(const json& config) {
  if (config.contains("steering_deg"))
    return config["steering_deg"].get<std::vector<double>>();
  if (config.contains("steering_resolution_deg")) {
    const double step = config["steering_resolution_deg"].get<double>();
    if (!(step > 0.0)) throw ndf::ConfigError("steering_resolution_deg must be positive");
    std::vector<double> s;
    for (double a = 0.0; a < 360.0 - 1e-9; a += step) s.push_back(a);
    return s;
  }
  return {0.0};
}

ndf::DatasetConfig parse_dataset_config(const json& j) {
  ndf::DatasetConfig c;
  try {
    c.seed = j.value("seed", 1234ULL);
    c.sampling.role = j.value("role", std::string("test"));
    c.sampling.environment = j.value("environment", std::string("anechoic"));
    if (j.contains("scenes")) {
      const json& s = j["scenes"];
      c.scene_count = s.value("count", 100);
      c.sampling.num_sources_min = s.value("speakers_min", 1);
      c.sampling.num_sources_max = s.value("speakers_max", 3);
    }
    if (j.contains("pattern")) c.pattern = parse_pattern(j["pattern"]);
    c.sampling.steering_deg = parse_steering(j);
    if (j.contains("array"))
      c.sampling.array_diameter_m = j["array"].value("diameter_m", 0.03);
    c.sampling.snr_db = j.value("snr_db", 30.0);
    if (j.contains("distance")) {
      const json& d = j["distance"];
      if (d.contains("fixed_m") && !d["fixed_m"].is_null())
        c.sampling.fixed_distance_m = d["fixed_m"].get<double>();
      c.sampling.anechoic_distance_m = d.value("anechoic_m", 1.5);
      c.sampling.distance_min_m = d.value("min_m", 0.5);
      c.sampling.distance_max_m = d.value("max_m", 2.5);
    }
    if (j.contains("room")) {
      const json& r = j["room"];
      c.sampling.room_length_min = r.value("length_min_m", 6.0);
      c.sampling.room_length_max = r.value("length_max_m", 10.0);
      c.sampling.room_width_min = r.value("width_min_m", 4.0);
      c.sampling.room_width_max = r.value("width_max_m", 8.0);
      c.sampling.room_height_min = r.value("height_min_m", 3.0);
      c.sampling.room_height_max = r.value("height_max_m", 5.0);
      c.sampling.rt60_min = r.value("rt60_min_s", 0.2);
      c.sampling.rt60_max = r.value("rt60_max_s", 0.5);
      c.sampling.wall_margin_m = r.value("wall_margin_m", 1.2);
    }
    if (j.contains("loudness")) {
      c.sampling.loudness_min_dbfs = j["loudness"].value("min_dbfs", -33.0);
      c.sampling.loudness_max_dbfs = j["loudness"].value("max_dbfs", -25.0);
    }
    c.corpus_dir = j.at("corpus_dir").get<std::string>();
    c.output_dir = j.at("output_dir").get<std::string>();
    c.save_rirs = j.value("save_rirs", false);
    c.nonspeech = j.value("nonspeech", false);
    c.workers = j.value("workers", 0);
    if (j.contains("batch_plan") && !j["batch_plan"].is_null()) {
      ndf::BatchPlanSpec plan;
      plan.batch_size = j["batch_plan"].value("batch_size", 10);
      plan.vicinity_deg = j["batch_plan"].value("vicinity_deg", 20.0);
      plan.seed = j["batch_plan"].value("seed", 1ULL);
      c.batch_plan = plan;
    }
  } catch (const json::exception& e) {
    throw ndf::ConfigError("dataset config: " + std::string(e.what()));
  }
  return c;
}

std::optional<ndf::RoomSpec> parse_room(const json& j) {
  if (!j.contains("room") || j["room"].is_null()) return std::nullopt;
  const json& r = j["room"];
  ndf::RoomSpec room;
  room.length = r.at("length_m").get<double>();
  room.width = r.at("width_m").get<double>();
  room.height = r.at("height_m").get<double>();
  room.rt60 = r.at("rt60_s").get<double>();
  return room;
}

int cmd_dataset(const std::string& config_path, const std::vector<std::string>& overrides) {
  json j = load_config(config_path);
  apply_overrides(j, overrides);
  ndf::DatasetConfig config = parse_dataset_config(j);
  if (const auto seed = env_seed()) config.seed = *seed;
  const ndf::Manifest manifest = ndf::build_dataset(config);
  std::cout << (config.output_dir / "manifest.json").string() << "\n";
  std::cerr << "dataset: " << manifest.scenes.size() << " scenes under "
            << config.output_dir << "\n";
  return kExitOk;
}

int cmd_design(double diameter, const std::string& pattern_name, double steering_deg,
               double wng_min_db, const std::string& out_dir) {
  const ndf::ArrayGeometry array = ndf::build_array(diameter);
  const ndf::DirectivityPattern pattern =
      ndf::pattern_preset(pattern_name, ndf::Doa::from_deg(steering_deg));
  const auto freqs = ndf::stft_bin_frequencies();
  const auto angles = ndf::default_angle_grid_deg();
  const ndf::BeamformerWeights w =
      ndf::design_ls_beamformer(array, pattern, freqs, angles, wng_min_db);

  std::filesystem::create_directories(out_dir);
  ndf::write_complex_matrix(std::filesystem::path(out_dir) / "weights.ndfm", w.weights);

  std::ofstream wng(std::filesystem::path(out_dir) / "wng.csv");
  wng << "f_hz,wng_db,pattern_residual\n";
  for (std::size_t f = 0; f < freqs.size(); ++f)
    wng << freqs[f] << "," << w.achieved_wng_db[f] << "," << w.pattern_residual[f] << "\n";

  std::ofstream pat(std::filesystem::path(out_dir) / "beampattern.csv");
  pat << "theta_deg";
  for (double f : freqs) pat << ",f" << f;
  pat << "\n";
  std::vector<std::vector<std::complex<double>>> responses(freqs.size());
  for (std::size_t f = 0; f < freqs.size(); ++f)
    responses[f] = ndf::beampattern(w, f, angles);
  for (std::size_t a = 0; a < angles.size(); ++a) {
    pat << angles[a];
    for (std::size_t f = 0; f < freqs.size(); ++f) {
      const double mag = std::abs(responses[f][a]);
      pat << "," << (mag > 0.0 ? ndf::db_from_amplitude(mag) : -200.0);
    }
    pat << "\n";
  }
  std::cout << out_dir << "\n";
  return kExitOk;
}

int cmd_eval(const std::string& manifest_path, const std::string& filter,
             const std::string& mask_dir, const std::string& out_dir, double wng_min_db,
             int workers) {
  const ndf::Manifest manifest = ndf::load_manifest(manifest_path);
  ndf::EvalOptions opts;
  opts.source = ndf::filter_source_from_string(filter);
  opts.mask_dir = mask_dir;
  opts.wng_min_db = wng_min_db;
  opts.workers = workers;
  const ndf::EvalReport report = ndf::evaluate_manifest(manifest, opts);
  ndf::write_eval_report(report, out_dir);
  for (const auto& sr : report.per_steering)
    std::cerr << "eval: steering " << sr.steering_deg << " deg, SDR " << sr.sdr_db
              << " dB (reference " << sr.reference_sdr_db << " dB)\n";
  std::cout << (std::filesystem::path(out_dir) / "report.json").string() << "\n";
  return kExitOk;
}

int cmd_probe(const std::string& config_path, const std::vector<std::string>& overrides) {
  json j = load_config(config_path);
  apply_overrides(j, overrides);
  ndf::ProbeConfig config;
  try {
    config.manifest_path = j.at("manifest").get<std::string>();
    config.source = ndf::filter_source_from_string(j.value("filter", std::string("oracle")));
    config.mask_dir = j.value("mask_dir", std::string());
    config.output_dir = j.at("output_dir").get<std::string>();
    config.export_inputs = j.value("export_inputs", false);
    config.workers = j.value("workers", 0);
    for (const json& b : j.at("bands")) {
      ndf::ProbeBandSpec spec;
      spec.label = b.at("label").get<std::string>();
      if (b.contains("center_hz"))
        spec.bands.push_back({b["center_hz"].get<double>() - b.value("bandwidth_hz", 500.0) / 2.0,
                              b["center_hz"].get<double>() + b.value("bandwidth_hz", 500.0) / 2.0});
      if (b.contains("ranges"))
        for (const json& r : b["ranges"])
          spec.bands.push_back({r.at(0).get<double>(), r.at(1).get<double>()});
      config.band_specs.push_back(std::move(spec));
    }
  } catch (const json::exception& e) {
    throw ndf::ConfigError("probe config: " + std::string(e.what()));
  }
  ndf::run_bandpass_probe(config);
  std::cout << config.output_dir.string() << "\n";
  return kExitOk;
}

int cmd_sweep(const std::string& config_path, const std::vector<std::string>& overrides) {
  json j = load_config(config_path);
  apply_overrides(j, overrides);
  ndf::SweepConfig config;
  try {
    config.base = parse_dataset_config(j.at("dataset"));
    if (j.contains("diameters_m")) config.diameters_m = j["diameters_m"].get<std::vector<double>>();
    if (j.contains("snrs_db")) config.snrs_db = j["snrs_db"].get<std::vector<double>>();
    config.source = ndf::filter_source_from_string(j.value("filter", std::string("oracle")));
    config.mask_dir = j.value("mask_dir", std::string());
    config.output_dir = j.at("output_dir").get<std::string>();
  } catch (const json::exception& e) {
    throw ndf::ConfigError("sweep config: " + std::string(e.what()));
  }
  if (const auto seed = env_seed()) config.base.seed = *seed;
  ndf::run_aperture_sweep(config);
  std::cout << (config.output_dir / "summary.csv").string() << "\n";
  return kExitOk;
}

int cmd_demo_interferer(const std::string& config_path,
                        const std::vector<std::string>& overrides) {
  json j = load_config(config_path);
  apply_overrides(j, overrides);
  ndf::InterfererDemoConfig config;
  try {
    config.target_wav = j.at("target_wav").get<std::string>();
    config.interferer_wav = j.at("interferer_wav").get<std::string>();
    if (j.contains("pattern")) config.pattern = parse_pattern(j["pattern"]);
    config.steering_deg = j.value("steering_deg", 0.0);
    config.interferer_start_deg = j.value("interferer_start_deg", 90.0);
    config.rotation_s = j.value("rotation_s", 18.0);
    config.hop_s = j.value("hop_s", 0.25);
    config.distance_m = j.value("distance_m", 1.5);
    config.room = parse_room(j);
    config.array_diameter_m = j.value("diameter_m", 0.03);
    config.snr_db = j.value("snr_db", 30.0);
    config.seed = j.value("seed", 1ULL);
    config.external_mask = j.value("external_mask", std::string());
    config.output_dir = j.at("output_dir").get<std::string>();
  } catch (const json::exception& e) {
    throw ndf::ConfigError("demo-interferer config: " + std::string(e.what()));
  }
  if (const auto seed = env_seed()) config.seed = *seed;
  ndf::run_interferer_demo(config);
  std::cout << config.output_dir.string() << "\n";
  return kExitOk;
}

int cmd_demo_stereo(const std::string& config_path,
                    const std::vector<std::string>& overrides) {
  json j = load_config(config_path);
  apply_overrides(j, overrides);
  ndf::StereoDemoConfig config;
  try {
    config.source_wav = j.at("source_wav").get<std::string>();
    if (j.contains("pattern")) config.pattern = parse_pattern(j["pattern"]);
    config.theta_left_deg = j.value("theta_left_deg", 45.0);
    config.theta_right_deg = j.value("theta_right_deg", 135.0);
    config.pan_start_deg = j.value("pan_start_deg", 0.0);
    config.pan_end_deg = j.value("pan_end_deg", 180.0);
    config.duration_s = j.value("duration_s", 32.0);
    config.hop_s = j.value("hop_s", 0.25);
    config.distance_m = j.value("distance_m", 1.4);
    config.room = parse_room(j);
    config.array_diameter_m = j.value("diameter_m", 0.03);
    config.external_mask_left = j.value("external_mask_left", std::string());
    config.external_mask_right = j.value("external_mask_right", std::string());
    config.output_dir = j.at("output_dir").get<std::string>();
  } catch (const json::exception& e) {
    throw ndf::ConfigError("demo-stereo config: " + std::string(e.what()));
  }
  ndf::run_stereo_demo(config);
  std::cout << config.output_dir.string() << "\n";
  return kExitOk;
}

int cmd_validate(const std::string& manifest_path, bool check_all, std::size_t samples,
                 std::uint64_t seed) {
  ndf::ValidateOptions opts;
  opts.check_all = check_all;
  opts.sample_count = samples;
  opts.seed = seed;
  const ndf::ValidationReport report = ndf::validate_manifest(manifest_path, opts);
  for (const ndf::Violation& v : report.violations)
    std::cerr << "violation scene=" << v.scene_index << " kind=" << v.kind << " "
              << v.message << "\n";
  std::cout << (report.ok() ? "valid" : "invalid") << " (" << report.violations.size()
            << " violations, " << report.scenes_checked << " scenes spot-checked)\n";
  return report.ok() ? kExitOk : kExitFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Directional-filtering simulation and evaluation toolkit"};
  app.require_subcommand(1);
  std::vector<std::string> overrides;

  std::string config_path;
  auto* dataset = app.add_subcommand("dataset", "Build scenes, stems, and a manifest");
  dataset->add_option("--config", config_path, "JSON config")->required();
  dataset->add_option("--override", overrides, "key.path=value config override");

  double diameter = 0.03, steering = 0.0, wng_min = -15.0;
  std::string pattern_name = "dma1", out_dir = "design_out";
  auto* design = app.add_subcommand("design", "LS beamformer design + WNG/beampattern export");
  design->add_option("--diameter", diameter, "array diameter in meters");
  design->add_option("--pattern", pattern_name, "pattern preset (dma1|dma3|dma6|omni)");
  design->add_option("--steering", steering, "steering azimuth in degrees");
  design->add_option("--wng-min", wng_min, "WNG floor in dB");
  design->add_option("--out", out_dir, "output directory");

  std::string manifest_path, filter = "oracle", mask_dir, eval_out = "eval_out";
  int workers = 0;
  auto* eval = app.add_subcommand("eval", "Run the metric suite over a test manifest");
  eval->add_option("--manifest", manifest_path, "manifest path")->required();
  eval->add_option("--filter", filter, "oracle|ls|external|identity");
  eval->add_option("--mask-dir", mask_dir, "external NDFM mask directory");
  eval->add_option("--out", eval_out, "output directory");
  eval->add_option("--wng-min", wng_min, "LS WNG floor in dB");
  eval->add_option("--workers", workers, "worker threads (0 = all cores)");

  auto* probe = app.add_subcommand("probe", "Bandpass probing of a filter source");
  probe->add_option("--config", config_path, "JSON config")->required();
  probe->add_option("--override", overrides, "config override");

  auto* sweep = app.add_subcommand("sweep", "Aperture/SNR sweep");
  sweep->add_option("--config", config_path, "JSON config")->required();
  sweep->add_option("--override", overrides, "config override");

  auto* demo_i = app.add_subcommand("demo-interferer", "Static target, circling interferer");
  demo_i->add_option("--config", config_path, "JSON config")->required();
  demo_i->add_option("--override", overrides, "config override");

  auto* demo_s = app.add_subcommand("demo-stereo", "Steered stereo capture of a panning source");
  demo_s->add_option("--config", config_path, "JSON config")->required();
  demo_s->add_option("--override", overrides, "config override");

  bool check_all = false;
  std::size_t samples = 8;
  std::uint64_t vseed = 1;
  auto* validate = app.add_subcommand("validate", "Validate a dataset manifest");
  validate->add_option("--manifest", manifest_path, "manifest path")->required();
  validate->add_flag("--check-all", check_all, "check every scene");
  validate->add_option("--samples", samples, "spot-check sample count");
  validate->add_option("--seed", vseed, "spot-check selection seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) ? kExitConfig : kExitOk;
  }

  try {
    if (dataset->parsed()) return cmd_dataset(config_path, overrides);
    if (design->parsed())
      return cmd_design(diameter, pattern_name, steering, wng_min, out_dir);
    if (eval->parsed())
      return cmd_eval(manifest_path, filter, mask_dir, eval_out, wng_min, workers);
    if (probe->parsed()) return cmd_probe(config_path, overrides);
    if (sweep->parsed()) return cmd_sweep(config_path, overrides);
    if (demo_i->parsed()) return cmd_demo_interferer(config_path, overrides);
    if (demo_s->parsed()) return cmd_demo_stereo(config_path, overrides);
    if (validate->parsed()) return cmd_validate(manifest_path, check_all, samples, vseed);
  } catch (const ndf::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const ndf::SamplingError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitSampling;
  } catch (const ndf::MaskCardinalityError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitMaskCardinality;
  } catch (const ndf::DesignError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitDesign;
  } catch (const ndf::IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const ndf::FormatError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitConfig;
}
