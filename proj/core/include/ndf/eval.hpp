// eval.hpp
// Runs the metric suite over a dataset manifest for one filter source:
// oracle parametric masks, the LS beamformer, externally produced masks
// (NDFM tensors), or the unprocessed reference.

#pragma once

#include <filesystem>

#include "ndf/beamformer.hpp"
#include "ndf/manifest.hpp"
#include "ndf/metrics.hpp"

namespace ndf {

enum class FilterSource { kOracle, kLs, kExternal, kIdentity };

FilterSource filter_source_from_string(const std::string& name);
std::string to_string(FilterSource source);

struct EvalOptions {
  FilterSource source = FilterSource::kOracle;
  // External masks: <mask_dir>/scene%05d_steer%06d.ndfm (steering in
  // centidegrees).
  std::filesystem::path mask_dir;
  double wng_min_db = -15.0;
  double mask_clip_db = 20.0;
  int workers = 0;
  // Bandpass-probe hook: restrict the filter input to these STFT bins; the
  // resulting mask is still applied to the unprocessed reference.
  std::vector<bool> band_keep;
};

struct SteeringReport {
  double steering_deg = 0.0;
  PatternEstimate pattern;
  std::vector<double> df_db;         // empty when the set carries no reverb energy
  std::vector<double> df_target_db;
  std::vector<double> per_scene_sdr_db;
  double sdr_db = 0.0;
  double reference_sdr_db = 0.0;  // unprocessed reference channel vs target
  double loss_tsdr = 0.0;
  double loss_l1 = 0.0;
};

struct EvalReport {
  std::string filter;
  std::string manifest_role;
  std::string environment;
  std::size_t num_scenes = 0;
  std::vector<SteeringReport> per_steering;
};

EvalReport evaluate_manifest(const Manifest& manifest, const EvalOptions& options);

// report.json plus plot-ready CSVs per steering direction: polar pattern
// (theta, dB, std, count), narrowband heatmap (theta x f), DF (f, dB), and
// per-scene SDR.
void write_eval_report(const EvalReport& report, const std::filesystem::path& out_dir);

std::filesystem::path external_mask_path(const std::filesystem::path& mask_dir,
                                         int scene_index, double steering_deg);

}  // namespace ndf
