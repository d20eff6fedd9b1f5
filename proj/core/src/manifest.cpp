// manifest.cpp

#include "ndf/manifest.hpp"

#include <algorithm>
#include <fstream>
#include <random>

#include "json.hpp"
#include "ndf/wav.hpp"

namespace ndf {

using nlohmann::json;

DirectivityPattern PatternDescriptor::build(double steering_azimuth_deg) const {
  const Doa steer = Doa::from_deg(steering_azimuth_deg);
  if (kind == "dma")
    return dma_pattern(static_cast<int>(coefficients.size()) - 1, coefficients, steer,
                       floor);
  if (kind == "piecewise") {
    DirectivityPattern p = piecewise_pattern(breakpoints, floor);
    p.steering = steer;
    return p;
  }
  throw FormatError("unknown pattern kind: " + kind);
}

PatternDescriptor PatternDescriptor::from_preset(const std::string& name, double floor) {
  const DirectivityPattern p = pattern_preset(name, {}, floor);
  PatternDescriptor d;
  d.kind = "dma";
  d.preset = name;
  d.coefficients = p.dma_coefficients;
  d.floor = floor;
  return d;
}

namespace {

json pattern_to_json(const PatternDescriptor& p) {
  json j;
  j["kind"] = p.kind;
  if (!p.preset.empty()) j["preset"] = p.preset;
  if (p.kind == "dma") j["coefficients"] = p.coefficients;
  if (p.kind == "piecewise") {
    json bp = json::array();
    for (const auto& [deg, gain] : p.breakpoints) bp.push_back({deg, gain});
    j["breakpoints"] = bp;
  }
  j["floor"] = p.floor;
  j["steering_deg"] = p.steering_deg;
  return j;
}

PatternDescriptor pattern_from_json(const json& j) {
  PatternDescriptor p;
  p.kind = j.at("kind").get<std::string>();
  p.preset = j.value("preset", std::string());
  if (j.contains("coefficients")) p.coefficients = j["coefficients"].get<std::vector<double>>();
  if (j.contains("breakpoints"))
    for (const auto& bp : j["breakpoints"])
      p.breakpoints.emplace_back(bp.at(0).get<double>(), bp.at(1).get<double>());
  p.floor = j.value("floor", kAttenuationFloor);
  if (j.contains("steering_deg")) p.steering_deg = j["steering_deg"].get<std::vector<double>>();
  return p;
}

json vec3_to_json(const Vec3& v) { return json::array({v.x, v.y, v.z}); }

Vec3 vec3_from_json(const json& j) {
  return {j.at(0).get<double>(), j.at(1).get<double>(), j.at(2).get<double>()};
}

}  // namespace

void save_manifest(const std::filesystem::path& path, const Manifest& m) {
  json j;
  j["format"] = "ndf-manifest";
  j["version"] = 1;
  j["toolkit_version"] = kToolkitVersion;
  j["role"] = m.role;
  j["environment"] = m.environment;
  j["seed"] = m.seed;
  j["snr_db"] = m.snr_db;
  j["sample_rate"] = m.sample_rate;

  json arr;
  arr["diameter_m"] = m.array.diameter;
  arr["reference_index"] = m.array.reference_index;
  json pos = json::array();
  for (const Vec3& p : m.array.mic_positions) pos.push_back(vec3_to_json(p));
  arr["mic_positions"] = pos;
  j["array"] = arr;

  j["pattern"] = pattern_to_json(m.pattern);
  j["candidate_grid_deg"] = m.candidate_grid_deg;

  json scenes = json::array();
  for (const SceneRecord& s : m.scenes) {
    json js;
    js["index"] = s.index;
    js["seed"] = s.seed;
    if (s.room) {
      js["room"] = {{"length_m", s.room->length},
                    {"width_m", s.room->width},
                    {"height_m", s.room->height},
                    {"rt60_s", s.room->rt60}};
    } else {
      js["room"] = nullptr;
    }
    js["array_center_m"] = vec3_to_json(s.array_center);
    js["snr_db"] = s.snr_db;
    json sources = json::array();
    for (const SourceRecord& src : s.sources)
      sources.push_back({{"azimuth_deg", src.azimuth_deg},
                         {"elevation_deg", src.elevation_deg},
                         {"distance_m", src.distance_m},
                         {"audio", src.audio},
                         {"loudness_dbfs", src.loudness_dbfs}});
    js["sources"] = sources;

    json files;
    files["mics"] = s.files.mics;
    json vdm;
    for (const auto& [centideg, p] : s.files.vdm) vdm[std::to_string(centideg)] = p;
    files["vdm"] = vdm;
    json stems = json::array();
    for (const auto& [d, r] : s.files.stems) stems.push_back({{"dir", d}, {"rvb", r}});
    files["stems"] = stems;
    if (!s.files.rirs.empty()) files["rirs"] = s.files.rirs;
    js["files"] = files;
    scenes.push_back(js);
  }
  j["scenes"] = scenes;

  std::ofstream f(path);
  if (!f) throw IoError("cannot write manifest: " + path.string());
  f << j.dump(2) << "\n";
  if (!f) throw IoError("manifest write failed: " + path.string());
}

Manifest load_manifest(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) throw IoError("cannot open manifest: " + path.string());
  json j;
  try {
    f >> j;
  } catch (const json::exception& e) {
    throw FormatError("manifest parse error: " + std::string(e.what()));
  }
  try {
    if (j.value("format", std::string()) != "ndf-manifest")
      throw FormatError("not an ndf manifest: " + path.string());
    Manifest m;
    m.role = j.at("role").get<std::string>();
    m.environment = j.at("environment").get<std::string>();
    m.seed = j.at("seed").get<std::uint64_t>();
    m.snr_db = j.at("snr_db").get<double>();
    m.sample_rate = j.value("sample_rate", kSampleRate);

    const json& arr = j.at("array");
    m.array.diameter = arr.at("diameter_m").get<double>();
    m.array.reference_index = arr.at("reference_index").get<int>();
    for (const auto& p : arr.at("mic_positions"))
      m.array.mic_positions.push_back(vec3_from_json(p));

    m.pattern = pattern_from_json(j.at("pattern"));
    m.candidate_grid_deg = j.at("candidate_grid_deg").get<std::vector<double>>();

    for (const auto& js : j.at("scenes")) {
      SceneRecord s;
      s.index = js.at("index").get<int>();
      s.seed = js.at("seed").get<std::uint64_t>();
      if (!js.at("room").is_null()) {
        RoomSpec r;
        r.length = js["room"].at("length_m").get<double>();
        r.width = js["room"].at("width_m").get<double>();
        r.height = js["room"].at("height_m").get<double>();
        r.rt60 = js["room"].at("rt60_s").get<double>();
        s.room = r;
      }
      s.array_center = vec3_from_json(js.at("array_center_m"));
      s.snr_db = js.at("snr_db").get<double>();
      for (const auto& src : js.at("sources")) {
        SourceRecord rec;
        rec.azimuth_deg = src.at("azimuth_deg").get<double>();
        rec.elevation_deg = src.value("elevation_deg", 0.0);
        rec.distance_m = src.at("distance_m").get<double>();
        rec.audio = src.at("audio").get<std::string>();
        rec.loudness_dbfs = src.at("loudness_dbfs").get<double>();
        s.sources.push_back(rec);
      }
      const json& files = js.at("files");
      s.files.mics = files.at("mics").get<std::vector<std::string>>();
      for (auto it = files.at("vdm").begin(); it != files.at("vdm").end(); ++it)
        s.files.vdm[std::stoi(it.key())] = it.value().get<std::string>();
      for (const auto& st : files.at("stems"))
        s.files.stems.emplace_back(st.at("dir").get<std::string>(),
                                   st.at("rvb").get<std::string>());
      if (files.contains("rirs")) s.files.rirs = files["rirs"].get<std::vector<std::string>>();
      m.scenes.push_back(std::move(s));
    }
    m.base_dir = path.parent_path();
    return m;
  } catch (const json::exception& e) {
    throw FormatError("manifest schema error: " + std::string(e.what()));
  }
}

ValidationReport validate_manifest(const std::filesystem::path& path,
                                   const ValidateOptions& options) {
  ValidationReport report;
  Manifest m;
  try {
    m = load_manifest(path);
  } catch (const Error& e) {
    report.violations.push_back({-1, "schema", e.what()});
    return report;
  }

  auto check_exists = [&](int scene, const std::string& rel) {
    if (!std::filesystem::exists(m.resolve(rel)))
      report.violations.push_back({scene, "missing-path", rel});
  };
  for (const SceneRecord& s : m.scenes) {
    for (const auto& p : s.files.mics) check_exists(s.index, p);
    for (const auto& [_, p] : s.files.vdm) check_exists(s.index, p);
    for (const auto& [d, r] : s.files.stems) {
      check_exists(s.index, d);
      check_exists(s.index, r);
    }
    for (const auto& p : s.files.rirs) check_exists(s.index, p);
  }

  // Stem-consistency spot checks: the clean stems must reassemble the noisy
  // reference channel up to the sensor-noise energy.
  std::vector<std::size_t> picks;
  if (options.check_all || m.scenes.size() <= options.sample_count) {
    picks.resize(m.scenes.size());
    for (std::size_t i = 0; i < picks.size(); ++i) picks[i] = i;
  } else {
    std::vector<std::size_t> all(m.scenes.size());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
    std::mt19937_64 rng(options.seed);
    std::shuffle(all.begin(), all.end(), rng);
    picks.assign(all.begin(), all.begin() + options.sample_count);
    std::sort(picks.begin(), picks.end());
  }

  for (std::size_t idx : picks) {
    const SceneRecord& s = m.scenes[idx];
    const int ref_index = m.array.reference_index;
    if (s.files.mics.size() <= static_cast<std::size_t>(ref_index) ||
        s.files.stems.size() != s.sources.size())
      continue;  // existence violations already recorded
    try {
      const auto ref = read_wav_mono(m.resolve(s.files.mics[ref_index]));
      std::vector<double> sum(ref.size(), 0.0);
      for (const auto& [d, r] : s.files.stems) {
        const auto dir = read_wav_mono(m.resolve(d));
        const auto rvb = read_wav_mono(m.resolve(r));
        if (dir.size() != ref.size() || rvb.size() != ref.size())
          throw FormatError("stem length mismatch");
        for (std::size_t i = 0; i < sum.size(); ++i) sum[i] += dir[i] + rvb[i];
      }
      double res = 0.0;
      double sig = 0.0;
      for (std::size_t i = 0; i < sum.size(); ++i) {
        const double d = ref[i] - sum[i];
        res += d * d;
        sig += ref[i] * ref[i];
      }
      const double expected = std::isinf(s.snr_db) ? 0.0
                                                   : std::pow(10.0, -s.snr_db / 10.0);
      const double threshold = std::max(10.0 * expected, 1e-6);
      if (sig > 0.0 && res / sig > threshold)
        report.violations.push_back(
            {s.index, "stem-consistency",
             "residual/reference energy " + std::to_string(res / sig) +
                 " exceeds " + std::to_string(threshold)});
    } catch (const Error& e) {
      report.violations.push_back({s.index, "stem-consistency", e.what()});
    }
    ++report.scenes_checked;
  }
  return report;
}

}  // namespace ndf
