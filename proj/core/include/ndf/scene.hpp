// scene.hpp
// Acoustic-scene sampling and rendering: candidate DOA grids, source
// placement, VDM target synthesis, dataset building, and mini-batch planning.

#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <span>

#include "ndf/manifest.hpp"
#include "ndf/room.hpp"

namespace ndf {

// train: 72 azimuths at 5 deg from 0; val: the same grid offset by 2.5 deg;
// test: 144 azimuths at 2.5 deg from 1.25.
std::vector<double> candidate_grid(const std::string& role);

struct SceneSource {
  Doa doa;
  double distance_m = 0.0;
  std::string audio;  // corpus-relative path
  double loudness_dbfs = -29.0;
};

struct SceneSpec {
  std::string environment = "anechoic";  // "anechoic" | "reverberant"
  std::optional<RoomSpec> room;
  Vec3 array_center;
  ArrayGeometry array;
  std::vector<SceneSource> sources;
  std::vector<double> steering_deg = {0.0};
  double snr_db = 30.0;
  std::uint64_t rng_seed = 0;
};

struct SceneRender {
  std::vector<std::vector<double>> mic_signals;   // Q channels, sensor noise added
  std::vector<std::vector<double>> vdm_targets;   // per steering direction, clean
  std::vector<std::vector<double>> direct_stems;  // per source at the reference mic
  std::vector<std::vector<double>> reverb_stems;
  std::vector<ImpulseResponse> rirs;              // source-major over mics, when kept
};

struct SceneSamplingConfig {
  std::string role = "test";
  std::string environment = "anechoic";
  int num_sources_min = 1;
  int num_sources_max = 3;
  double anechoic_distance_m = 1.5;
  double distance_min_m = 0.5;
  double distance_max_m = 2.5;
  std::optional<double> fixed_distance_m;  // overrides the range
  double room_length_min = 6.0, room_length_max = 10.0;
  double room_width_min = 4.0, room_width_max = 8.0;
  double room_height_min = 3.0, room_height_max = 5.0;
  double rt60_min = 0.2, rt60_max = 0.5;
  double wall_margin_m = 1.2;     // array distance to every wall
  double source_margin_m = 0.05;  // sources strictly inside
  double snr_db = 30.0;
  double array_diameter_m = 0.03;
  double loudness_min_dbfs = -33.0;
  double loudness_max_dbfs = -25.0;
  std::vector<double> steering_deg = {0.0};
  int max_retries = 10000;
};

// Hands out grid directions with uniform coverage (round-robin over seeded
// shuffles); scenes never repeat a direction internally.
class DirectionScheduler {
 public:
  DirectionScheduler(std::vector<double> grid_deg, std::uint64_t seed);
  std::vector<double> draw(std::size_t n);

 private:
  void refill();
  std::vector<double> grid_;
  std::vector<double> queue_;
  std::mt19937_64 rng_;
};

// Samples one scene; DOAs come from the scheduler, everything else from rng.
// Rejection-samples reverberant placements until the array keeps the wall
// margin and all sources fit strictly inside the room.
SceneSpec sample_scene(const SceneSamplingConfig& config, std::mt19937_64& rng,
                       DirectionScheduler& scheduler,
                       std::span<const std::string> corpus_files);

// Renders microphone mixtures, VDM targets per steering direction, and
// per-source direct/reverberant stems at the reference mic. The reference
// channel is assembled from the stems, so their sum matches it sample-exactly
// before sensor noise.
SceneRender render_scene(const SceneSpec& spec, const DirectivityPattern& base_pattern,
                         const std::filesystem::path& corpus_dir,
                         bool keep_rirs = false, bool nonspeech = false);

// A prepared 4-second clip: loudest 4 s window of longer files, zero-padded
// shorter ones.
struct PreparedClip {
  std::vector<double> samples;         // exactly 4 s at 16 kHz
  std::size_t original_length = 0;     // before trim/pad
};
PreparedClip prepare_clip(const std::filesystem::path& path);

// Loudness screen used when picking corpus clips (reject below -42 dBFS).
bool clip_admissible(const PreparedClip& clip, double min_dbfs = -42.0);

struct BatchPlanSpec {
  std::size_t batch_size = 10;
  double vicinity_deg = 20.0;
  std::uint64_t seed = 1;
};

struct DatasetConfig {
  SceneSamplingConfig sampling;
  PatternDescriptor pattern;
  int scene_count = 100;
  std::uint64_t seed = 1234;
  std::filesystem::path corpus_dir;
  std::filesystem::path output_dir;
  bool save_rirs = false;
  bool nonspeech = false;
  int workers = 0;
  std::optional<BatchPlanSpec> batch_plan;
};

// Builds, renders, and persists a dataset; returns the manifest (also written
// to output_dir/manifest.json). Deterministic in the seed regardless of the
// worker count.
Manifest build_dataset(const DatasetConfig& config);

// One trainable sample: a scene paired with one steering direction.
struct BatchSample {
  int scene_index = 0;
  double steering_deg = 0.0;
  std::vector<double> source_doas_deg;
};

std::vector<BatchSample> batch_samples_from_manifest(const Manifest& manifest);

// Permutation of the samples cut into batches of batch_size, each containing
// at least one sample with a source within +-vicinity of its steering
// direction. Throws PlanningError (with the deficit) when impossible.
std::vector<std::vector<std::size_t>> plan_minibatches(
    std::span<const BatchSample> samples, std::size_t batch_size, double vicinity_deg,
    std::uint64_t seed);

}  // namespace ndf
