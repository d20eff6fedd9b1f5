// manifest.hpp
// JSON scene/dataset manifests and their validation.

#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ndf/directivity.hpp"
#include "ndf/geometry.hpp"
#include "ndf/room.hpp"

namespace ndf {

// Serializable pattern description; build() instantiates it at a steering
// azimuth.
struct PatternDescriptor {
  std::string kind = "dma";  // "dma" | "piecewise"
  std::string preset;        // informative name when built from one
  std::vector<double> coefficients;
  std::vector<std::pair<double, double>> breakpoints;
  double floor = kAttenuationFloor;
  std::vector<double> steering_deg = {0.0};

  DirectivityPattern build(double steering_azimuth_deg = 0.0) const;
  static PatternDescriptor from_preset(const std::string& name,
                                       double floor = kAttenuationFloor);
};

struct SourceRecord {
  double azimuth_deg = 0.0;
  double elevation_deg = 0.0;
  double distance_m = 0.0;
  std::string audio;  // corpus-relative path
  double loudness_dbfs = 0.0;
};

struct SceneFiles {
  std::vector<std::string> mics;       // Q channels
  std::map<int, std::string> vdm;      // steering centidegrees -> path
  std::vector<std::pair<std::string, std::string>> stems;  // (direct, reverb)
  std::vector<std::string> rirs;       // optional, source-major over mics
};

struct SceneRecord {
  int index = 0;
  std::uint64_t seed = 0;
  std::optional<RoomSpec> room;  // absent for anechoic
  Vec3 array_center;
  std::vector<SourceRecord> sources;
  double snr_db = 30.0;
  SceneFiles files;
};

struct Manifest {
  std::string role = "test";  // train | val | test
  std::string environment = "anechoic";
  std::uint64_t seed = 0;
  double snr_db = 30.0;
  double sample_rate = kSampleRate;
  ArrayGeometry array;
  PatternDescriptor pattern;
  std::vector<double> candidate_grid_deg;
  std::vector<SceneRecord> scenes;

  // Directory the manifest was loaded from / saved to; file paths in scene
  // records are relative to it. Not serialized.
  std::filesystem::path base_dir;

  std::filesystem::path resolve(const std::string& rel) const { return base_dir / rel; }
};

void save_manifest(const std::filesystem::path& path, const Manifest& manifest);
Manifest load_manifest(const std::filesystem::path& path);

inline int steering_centideg(double deg) {
  return static_cast<int>(std::lround(wrap_deg(deg) * 100.0));
}

struct Violation {
  int scene_index = -1;
  std::string kind;  // "missing-path" | "stem-consistency" | "schema"
  std::string message;
};

struct ValidationReport {
  std::vector<Violation> violations;
  std::size_t scenes_checked = 0;
  bool ok() const { return violations.empty(); }
};

struct ValidateOptions {
  bool check_all = false;       // otherwise a seeded sample of scenes
  std::size_t sample_count = 8;
  std::uint64_t seed = 1;
};

// Checks schema (via load), file existence for every referenced path, and
// stem-vs-reference consistency on the selected scenes. Violations are
// collected, not thrown.
ValidationReport validate_manifest(const std::filesystem::path& path,
                                   const ValidateOptions& options = {});

}  // namespace ndf
