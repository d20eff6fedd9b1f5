// eval.cpp

#include "ndf/eval.hpp"

#include <cmath>
#include <fstream>
#include <mutex>

#include "json.hpp"
#include "ndf/masks.hpp"
#include "ndf/parallel.hpp"
#include "ndf/scene.hpp"
#include "ndf/signal_ops.hpp"
#include "ndf/tensor_file.hpp"
#include "ndf/wav.hpp"

namespace ndf {

using nlohmann::json;

FilterSource filter_source_from_string(const std::string& name) {
  if (name == "oracle") return FilterSource::kOracle;
  if (name == "ls") return FilterSource::kLs;
  if (name == "external") return FilterSource::kExternal;
  if (name == "identity") return FilterSource::kIdentity;
  throw ConfigError("unknown filter source: " + name +
                    " (expected oracle|ls|external|identity)");
}

std::string to_string(FilterSource source) {
  switch (source) {
    case FilterSource::kOracle: return "oracle";
    case FilterSource::kLs: return "ls";
    case FilterSource::kExternal: return "external";
    case FilterSource::kIdentity: return "identity";
  }
  return "?";
}

std::filesystem::path external_mask_path(const std::filesystem::path& mask_dir,
                                         int scene_index, double steering_deg) {
  char name[64];
  std::snprintf(name, sizeof(name), "scene%05d_steer%06d.ndfm", scene_index,
                steering_centideg(steering_deg));
  return mask_dir / name;
}

namespace {

// Steering-independent inputs of one rendered scene.
struct ScenePart {
  std::vector<Spectrogram> direct_stem_specs;  // per source
  Spectrogram reverb_sum_spec;                 // cumulative Y_rvb
  std::vector<double> doas_deg;
  std::vector<double> reference;  // unprocessed reference channel
};

// Per (scene, steering) evaluation products.
struct SteerPart {
  Mask mask;
  Spectrogram vdm_spec;
  std::vector<double> target;    // time-domain z
  std::vector<double> estimate;  // time-domain zhat
};

}  // namespace

EvalReport evaluate_manifest(const Manifest& manifest, const EvalOptions& options) {
  if (manifest.scenes.empty()) throw InvalidArgument("manifest has no scenes");
  const std::size_t n_scenes = manifest.scenes.size();
  const std::vector<double>& steerings = manifest.pattern.steering_deg;
  if (steerings.empty()) throw InvalidArgument("manifest lists no steering directions");

  // One LS design per steering direction, shared across scenes.
  std::vector<BeamformerWeights> ls_designs;
  if (options.source == FilterSource::kLs) {
    const auto freqs = stft_bin_frequencies();
    const auto angles = default_angle_grid_deg();
    for (double sd : steerings) {
      const DirectivityPattern p = manifest.pattern.build(sd);
      ls_designs.push_back(design_ls_beamformer(manifest.array, p, freqs, angles,
                                                options.wng_min_db));
    }
  }

  std::vector<ScenePart> scene_parts(n_scenes);
  std::vector<std::vector<SteerPart>> steer_parts(n_scenes);
  parallel_for(n_scenes, options.workers, [&](std::size_t k) {
    const SceneRecord& scene = manifest.scenes[k];
    const int ref_index = manifest.array.reference_index;
    ScenePart& sp = scene_parts[k];

    std::vector<Spectrogram> mic_specs;
    for (const std::string& rel : scene.files.mics)
      mic_specs.push_back(stft(read_wav_mono(manifest.resolve(rel))));
    const Spectrogram& ref_spec = mic_specs.at(ref_index);
    sp.reference = read_wav_mono(manifest.resolve(scene.files.mics.at(ref_index)));

    std::vector<Doa> doas;
    for (std::size_t s = 0; s < scene.files.stems.size(); ++s) {
      sp.direct_stem_specs.push_back(
          stft(read_wav_mono(manifest.resolve(scene.files.stems[s].first))));
      const Spectrogram rs =
          stft(read_wav_mono(manifest.resolve(scene.files.stems[s].second)));
      if (s == 0) {
        sp.reverb_sum_spec = rs;
      } else {
        for (std::size_t i = 0; i < sp.reverb_sum_spec.bins.size(); ++i)
          sp.reverb_sum_spec.bins[i] += rs.bins[i];
      }
      doas.push_back(Doa::from_deg(scene.sources.at(s).azimuth_deg));
      sp.doas_deg.push_back(scene.sources.at(s).azimuth_deg);
    }

    // Probe hook: the filter only sees the band-limited input.
    std::vector<Spectrogram> filter_mics = mic_specs;
    std::vector<Spectrogram> filter_stems = sp.direct_stem_specs;
    if (!options.band_keep.empty()) {
      for (auto& s : filter_mics) apply_band_bins(s, options.band_keep);
      for (auto& s : filter_stems) apply_band_bins(s, options.band_keep);
    }

    steer_parts[k].resize(steerings.size());
    for (std::size_t p = 0; p < steerings.size(); ++p) {
      SteerPart& ev = steer_parts[k][p];
      const int centideg = steering_centideg(steerings[p]);
      const auto vdm_it = scene.files.vdm.find(centideg);
      if (vdm_it == scene.files.vdm.end())
        throw FormatError("scene " + std::to_string(scene.index) +
                          " lacks a VDM target for steering " +
                          std::to_string(steerings[p]) + " deg");
      ev.target = read_wav_mono(manifest.resolve(vdm_it->second));
      ev.vdm_spec = stft(ev.target);

      switch (options.source) {
        case FilterSource::kOracle: {
          const DirectivityPattern pat = manifest.pattern.build(steerings[p]);
          ev.mask = oracle_parametric_mask(filter_stems, doas, pat);
          break;
        }
        case FilterSource::kIdentity:
          ev.mask = Mask::ones(ref_spec.num_bins, ref_spec.num_frames);
          break;
        case FilterSource::kExternal: {
          const auto path = external_mask_path(options.mask_dir, scene.index, steerings[p]);
          if (!std::filesystem::exists(path))
            throw MaskCardinalityError("missing external mask for scene " +
                                       std::to_string(scene.index) + " steering " +
                                       std::to_string(steerings[p]) + " deg: " +
                                       path.string());
          ev.mask = read_mask(path);
          if (ev.mask.num_frames != ref_spec.num_frames)
            throw MaskCardinalityError("external mask frame count mismatch for scene " +
                                       std::to_string(scene.index));
          break;
        }
        case FilterSource::kLs: {
          const Spectrogram out = apply_beamformer(ls_designs[p], filter_mics);
          const Spectrogram& filter_ref = filter_mics.at(ref_index);
          ev.mask = beamformer_equivalent_mask(out, filter_ref, options.mask_clip_db);
          break;
        }
      }

      // The mask always acts on the unprocessed reference channel.
      ev.estimate = istft(apply_mask(ev.mask, ref_spec));
    }
  });

  EvalReport report;
  report.filter = to_string(options.source);
  report.manifest_role = manifest.role;
  report.environment = manifest.environment;
  report.num_scenes = n_scenes;

  for (std::size_t p = 0; p < steerings.size(); ++p) {
    SteeringReport sr;
    sr.steering_deg = steerings[p];

    std::vector<PatternSample> pattern_samples;
    std::vector<Mask> df_masks;
    std::vector<Spectrogram> rvb_specs;
    std::vector<Spectrogram> vdm_specs;
    std::vector<double> sdrs;
    std::vector<double> ref_sdrs;
    std::vector<std::vector<double>> batch_z;
    std::vector<std::vector<double>> batch_zhat;

    for (std::size_t k = 0; k < n_scenes; ++k) {
      const ScenePart& sp = scene_parts[k];
      SteerPart& ev = steer_parts[k][p];
      for (std::size_t s = 0; s < sp.direct_stem_specs.size(); ++s)
        pattern_samples.push_back({sp.doas_deg[s], &ev.mask, &sp.direct_stem_specs[s]});
      df_masks.push_back(ev.mask);
      rvb_specs.push_back(sp.reverb_sum_spec);
      vdm_specs.push_back(ev.vdm_spec);
      sdrs.push_back(sdr_db(ev.target, ev.estimate));
      ref_sdrs.push_back(sdr_db(ev.target, sp.reference));
      batch_z.push_back(ev.target);
      batch_zhat.push_back(ev.estimate);
    }

    sr.pattern = estimate_power_pattern(pattern_samples, manifest.candidate_grid_deg);
    try {
      sr.df_db = estimate_df_db(df_masks, rvb_specs);
      sr.df_target_db = estimate_df_target_db(vdm_specs, rvb_specs);
    } catch (const DegenerateSignalError&) {
      // Anechoic sets carry no reverberant energy; DF is undefined there.
    }
    sr.per_scene_sdr_db = sdrs;
    sr.sdr_db = aggregate_sdr_db(sdrs);
    sr.reference_sdr_db = aggregate_sdr_db(ref_sdrs);
    sr.loss_tsdr = loss_tsdr(batch_z, batch_zhat);
    sr.loss_l1 = loss_l1(batch_z, batch_zhat);
    report.per_steering.push_back(std::move(sr));
  }
  return report;
}

namespace {

json json_finite(double v) {
  if (std::isnan(v)) return nullptr;
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

void write_csv(const std::filesystem::path& path, const std::string& content) {
  std::ofstream f(path);
  if (!f) throw IoError("cannot write " + path.string());
  f << content;
}

}  // namespace

void write_eval_report(const EvalReport& report, const std::filesystem::path& out_dir) {
  std::filesystem::create_directories(out_dir);
  json j;
  j["toolkit_version"] = kToolkitVersion;
  j["filter"] = report.filter;
  j["role"] = report.manifest_role;
  j["environment"] = report.environment;
  j["num_scenes"] = report.num_scenes;
  j["per_steering"] = json::array();

  for (const SteeringReport& sr : report.per_steering) {
    json js;
    js["steering_deg"] = sr.steering_deg;
    js["sdr_db"] = sr.sdr_db;
    js["reference_sdr_db"] = sr.reference_sdr_db;
    js["loss_tsdr"] = sr.loss_tsdr;
    js["loss_l1"] = sr.loss_l1;
    json pattern;
    pattern["grid_deg"] = sr.pattern.grid_deg;
    pattern["counts"] = sr.pattern.counts;
    json wb = json::array();
    for (double v : sr.pattern.wideband_db) wb.push_back(json_finite(v));
    pattern["wideband_db"] = wb;
    pattern["wideband_std"] = sr.pattern.wideband_std;
    js["pattern"] = pattern;
    if (!sr.df_db.empty()) {
      json df = json::array();
      for (double v : sr.df_db) df.push_back(json_finite(v));
      js["df_db"] = df;
      json dft = json::array();
      for (double v : sr.df_target_db) dft.push_back(json_finite(v));
      js["df_target_db"] = dft;
    }
    js["per_scene_sdr_db"] = sr.per_scene_sdr_db;
    j["per_steering"].push_back(js);
  }
  std::ofstream f(out_dir / "report.json");
  if (!f) throw IoError("cannot write report.json");
  f << j.dump(2) << "\n";

  for (const SteeringReport& sr : report.per_steering) {
    char suffix[32];
    std::snprintf(suffix, sizeof(suffix), "steer%06d", steering_centideg(sr.steering_deg));

    std::string polar = "theta_deg,db,std_lin,count\n";
    for (std::size_t i = 0; i < sr.pattern.grid_deg.size(); ++i) {
      polar += std::to_string(sr.pattern.grid_deg[i]) + "," +
               (std::isnan(sr.pattern.wideband_db[i])
                    ? "nan"
                    : std::to_string(sr.pattern.wideband_db[i])) +
               "," + std::to_string(sr.pattern.wideband_std[i]) + "," +
               std::to_string(sr.pattern.counts[i]) + "\n";
    }
    write_csv(out_dir / ("pattern_polar_" + std::string(suffix) + ".csv"), polar);

    if (!sr.pattern.narrowband_db.empty()) {
      std::string heat = "theta_deg";
      const std::size_t F = sr.pattern.narrowband_db[0].size();
      for (std::size_t f = 0; f < F; ++f)
        heat += ",f" + std::to_string(f * kBinSpacingHz);
      heat += "\n";
      for (std::size_t i = 0; i < sr.pattern.grid_deg.size(); ++i) {
        heat += std::to_string(sr.pattern.grid_deg[i]);
        for (std::size_t f = 0; f < F; ++f) {
          const double v = sr.pattern.narrowband_db[i][f];
          heat += ",";
          heat += std::isnan(v) ? "nan" : std::to_string(v);
        }
        heat += "\n";
      }
      write_csv(out_dir / ("pattern_heatmap_" + std::string(suffix) + ".csv"), heat);
    }

    if (!sr.df_db.empty()) {
      std::string df = "f_hz,df_db,df_target_db\n";
      for (std::size_t f = 0; f < sr.df_db.size(); ++f)
        df += std::to_string(f * kBinSpacingHz) + "," + std::to_string(sr.df_db[f]) +
              "," + std::to_string(sr.df_target_db[f]) + "\n";
      write_csv(out_dir / ("df_" + std::string(suffix) + ".csv"), df);
    }

    std::string sdr = "scene,sdr_db\n";
    for (std::size_t k = 0; k < sr.per_scene_sdr_db.size(); ++k)
      sdr += std::to_string(k) + "," + std::to_string(sr.per_scene_sdr_db[k]) + "\n";
    write_csv(out_dir / ("sdr_" + std::string(suffix) + ".csv"), sdr);
  }
}

}  // namespace ndf
