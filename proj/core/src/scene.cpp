// scene.cpp

#include "ndf/scene.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>

#include "ndf/parallel.hpp"
#include "ndf/signal_ops.hpp"
#include "ndf/wav.hpp"

namespace ndf {

namespace {

constexpr std::size_t kClipSamples = 4 * 16000;

std::string scene_dir_name(int index) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "scene%05d", index);
  return buf;
}

}  // namespace

std::vector<double> candidate_grid(const std::string& role) {
  std::vector<double> grid;
  if (role == "train") {
    for (int i = 0; i < 72; ++i) grid.push_back(5.0 * i);
  } else if (role == "val") {
    for (int i = 0; i < 72; ++i) grid.push_back(2.5 + 5.0 * i);
  } else if (role == "test") {
    for (int i = 0; i < 144; ++i) grid.push_back(1.25 + 2.5 * i);
  } else {
    throw InvalidArgument("unknown grid role: " + role);
  }
  return grid;
}

DirectionScheduler::DirectionScheduler(std::vector<double> grid_deg, std::uint64_t seed)
    : grid_(std::move(grid_deg)), rng_(seed) {
  if (grid_.empty()) throw InvalidArgument("empty candidate grid");
}

void DirectionScheduler::refill() {
  std::vector<double> fresh = grid_;
  std::shuffle(fresh.begin(), fresh.end(), rng_);
  queue_.insert(queue_.begin(), fresh.begin(), fresh.end());
}

std::vector<double> DirectionScheduler::draw(std::size_t n) {
  if (n > grid_.size())
    throw InvalidArgument("cannot draw more directions than the grid holds");
  std::vector<double> out;
  std::vector<double> deferred;
  while (out.size() < n) {
    if (queue_.empty()) refill();
    const double v = queue_.back();
    queue_.pop_back();
    if (std::find(out.begin(), out.end(), v) != out.end())
      deferred.push_back(v);  // duplicate within this scene, keep for later
    else
      out.push_back(v);
  }
  queue_.insert(queue_.end(), deferred.rbegin(), deferred.rend());
  return out;
}

SceneSpec sample_scene(const SceneSamplingConfig& config, std::mt19937_64& rng,
                       DirectionScheduler& scheduler,
                       std::span<const std::string> corpus_files) {
  if (corpus_files.empty()) throw SamplingError("no corpus files to sample from");
  const bool reverberant = config.environment == "reverberant";
  if (!reverberant && config.environment != "anechoic")
    throw InvalidArgument("environment must be anechoic or reverberant");

  SceneSpec spec;
  spec.environment = config.environment;
  spec.array = build_array(config.array_diameter_m);
  spec.snr_db = config.snr_db;
  spec.steering_deg = config.steering_deg;

  std::uniform_int_distribution<int> n_dist(config.num_sources_min,
                                            config.num_sources_max);
  const int n = n_dist(rng);
  const std::vector<double> doas = scheduler.draw(static_cast<std::size_t>(n));

  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto uniform = [&](double lo, double hi) { return lo + (hi - lo) * unit(rng); };

  std::vector<double> distances(n);
  if (reverberant) {
    bool placed = false;
    for (int attempt = 0; attempt < config.max_retries && !placed; ++attempt) {
      RoomSpec room;
      room.length = uniform(config.room_length_min, config.room_length_max);
      room.width = uniform(config.room_width_min, config.room_width_max);
      room.height = uniform(config.room_height_min, config.room_height_max);
      room.rt60 = uniform(config.rt60_min, config.rt60_max);

      const double m = config.wall_margin_m;
      if (room.length <= 2 * m || room.width <= 2 * m || room.height <= 2 * m) continue;
      Vec3 center{uniform(m, room.length - m), uniform(m, room.width - m),
                  uniform(m, room.height - m)};

      bool ok = true;
      for (int i = 0; i < n; ++i) {
        distances[i] = config.fixed_distance_m
                           ? *config.fixed_distance_m
                           : uniform(config.distance_min_m, config.distance_max_m);
        const Vec3 u = doa_unit_vector(Doa::from_deg(doas[i]));
        const Vec3 p = center + u * distances[i];
        const double sm = config.source_margin_m;
        if (!(p.x > sm && p.x < room.length - sm && p.y > sm && p.y < room.width - sm &&
              p.z > sm && p.z < room.height - sm)) {
          ok = false;
          break;
        }
      }
      if (!ok) continue;
      spec.room = room;
      spec.array_center = center;
      placed = true;
    }
    if (!placed)
      throw SamplingError("scene placement rejection sampling exhausted " +
                          std::to_string(config.max_retries) + " retries");
  } else {
    spec.array_center = {0.0, 0.0, 0.0};
    for (int i = 0; i < n; ++i)
      distances[i] = config.fixed_distance_m ? *config.fixed_distance_m
                                             : config.anechoic_distance_m;
  }

  // Audio picks: distinct clips within a scene when the corpus allows it.
  std::vector<std::size_t> picks;
  std::uniform_int_distribution<std::size_t> pick_dist(0, corpus_files.size() - 1);
  for (int i = 0; i < n; ++i) {
    std::size_t p = pick_dist(rng);
    if (corpus_files.size() >= static_cast<std::size_t>(n)) {
      while (std::find(picks.begin(), picks.end(), p) != picks.end())
        p = pick_dist(rng);
    }
    picks.push_back(p);
  }

  for (int i = 0; i < n; ++i) {
    SceneSource src;
    src.doa = Doa::from_deg(doas[i]);
    src.distance_m = distances[i];
    src.audio = corpus_files[picks[i]];
    src.loudness_dbfs = uniform(config.loudness_min_dbfs, config.loudness_max_dbfs);
    spec.sources.push_back(std::move(src));
  }
  spec.rng_seed = rng();
  return spec;
}

PreparedClip prepare_clip(const std::filesystem::path& path) {
  std::vector<double> x = read_wav_mono(path);
  PreparedClip clip;
  clip.original_length = x.size();
  if (x.size() == kClipSamples) {
    clip.samples = std::move(x);
    return clip;
  }
  if (x.size() < kClipSamples) {
    x.resize(kClipSamples, 0.0);
    clip.samples = std::move(x);
    return clip;
  }
  // Longer clips: take the most energetic 4 s window (0.25 s hop) so the
  // retained segment is louder than the clip average.
  std::vector<double> prefix(x.size() + 1, 0.0);
  for (std::size_t i = 0; i < x.size(); ++i) prefix[i + 1] = prefix[i] + x[i] * x[i];
  const std::size_t hop = 4000;
  std::size_t best_start = 0;
  double best_energy = -1.0;
  for (std::size_t s = 0; s + kClipSamples <= x.size(); s += hop) {
    const double e = prefix[s + kClipSamples] - prefix[s];
    if (e > best_energy) {
      best_energy = e;
      best_start = s;
    }
  }
  clip.samples.assign(x.begin() + best_start, x.begin() + best_start + kClipSamples);
  return clip;
}

bool clip_admissible(const PreparedClip& clip, double min_dbfs) {
  return loudness_dbfs(clip.samples) >= min_dbfs;
}

SceneRender render_scene(const SceneSpec& spec, const DirectivityPattern& base_pattern,
                         const std::filesystem::path& corpus_dir, bool keep_rirs,
                         bool nonspeech) {
  const std::size_t n_src = spec.sources.size();
  if (n_src == 0) throw InvalidArgument("render_scene: no sources");
  const std::size_t n_mic = spec.array.num_mics();
  const int ref = spec.array.reference_index;
  const RoomSpec room = spec.room.value_or(RoomSpec{});

  // Source audio, trimmed/padded to 4 s. Multi-source non-speech scenes are
  // first cut to the shortest original clip.
  std::vector<PreparedClip> clips;
  for (const SceneSource& s : spec.sources) clips.push_back(prepare_clip(corpus_dir / s.audio));
  if (nonspeech && n_src > 1) {
    std::size_t shortest = kClipSamples;
    for (const auto& c : clips)
      shortest = std::min(shortest, std::min(c.original_length, kClipSamples));
    for (auto& c : clips)
      std::fill(c.samples.begin() + shortest, c.samples.end(), 0.0);
  }

  std::vector<DirectivityPattern> steered_patterns;
  for (double sd : spec.steering_deg)
    steered_patterns.push_back(steered(base_pattern, Doa::from_deg(sd)));

  SceneRender out;
  out.mic_signals.assign(n_mic, std::vector<double>(kClipSamples, 0.0));
  out.vdm_targets.assign(steered_patterns.size(), std::vector<double>(kClipSamples, 0.0));
  out.direct_stems.assign(n_src, {});
  out.reverb_stems.assign(n_src, {});

  for (std::size_t s = 0; s < n_src; ++s) {
    const SceneSource& src = spec.sources[s];
    const Vec3 src_pos = spec.array_center + doa_unit_vector(src.doa) * src.distance_m;
    const std::vector<double>& x = clips[s].samples;

    std::vector<ImpulseResponse> mic_rirs(n_mic);
    for (std::size_t q = 0; q < n_mic; ++q) {
      const Vec3 mic_pos = spec.array_center + spec.array.mic_positions[q];
      mic_rirs[q] = simulate_rir(room, src_pos, mic_pos, {});
    }
    const Vec3 ref_pos = spec.array_center + spec.array.mic_positions[ref];
    const double direct_delay = (src_pos - ref_pos).norm() / kSpeedOfSound;
    auto [rir_dir, rir_rvb] = split_direct_reverb(mic_rirs[ref], direct_delay);

    std::vector<double> dir_stem = convolve_trim(x, rir_dir.samples, kClipSamples);
    std::vector<double> rvb_stem = convolve_trim(x, rir_rvb.samples, kClipSamples);

    // Per-source loudness placement, measured on the reference-mic signal.
    std::vector<double> ref_sig(kClipSamples);
    for (std::size_t i = 0; i < kClipSamples; ++i) ref_sig[i] = dir_stem[i] + rvb_stem[i];
    const double gain = gain_for_loudness(ref_sig, src.loudness_dbfs);

    for (std::size_t i = 0; i < kClipSamples; ++i) {
      dir_stem[i] *= gain;
      rvb_stem[i] *= gain;
      // The reference channel is the stem sum, bit-exactly.
      out.mic_signals[ref][i] += dir_stem[i] + rvb_stem[i];
    }
    for (std::size_t q = 0; q < n_mic; ++q) {
      if (static_cast<int>(q) == ref) continue;
      const std::vector<double> y = convolve_trim(x, mic_rirs[q].samples, kClipSamples);
      for (std::size_t i = 0; i < kClipSamples; ++i)
        out.mic_signals[q][i] += gain * y[i];
    }
    for (std::size_t p = 0; p < steered_patterns.size(); ++p) {
      const ImpulseResponse vdm =
          simulate_vdm_rir(room, src_pos, ref_pos, steered_patterns[p], {});
      const std::vector<double> z = convolve_trim(x, vdm.samples, kClipSamples);
      for (std::size_t i = 0; i < kClipSamples; ++i)
        out.vdm_targets[p][i] += gain * z[i];
    }

    out.direct_stems[s] = std::move(dir_stem);
    out.reverb_stems[s] = std::move(rvb_stem);
    if (keep_rirs)
      for (auto& r : mic_rirs) out.rirs.push_back(std::move(r));
  }

  add_sensor_noise(out.mic_signals, spec.snr_db, spec.rng_seed);
  return out;
}

Manifest build_dataset(const DatasetConfig& config) {
  if (config.scene_count <= 0) throw InvalidArgument("scene_count must be positive");
  namespace fs = std::filesystem;
  if (!fs::exists(config.corpus_dir))
    throw IoError("corpus directory not found: " + config.corpus_dir.string());

  // Scan and screen the corpus once; picks only come from admissible clips.
  std::vector<std::string> corpus_files;
  {
    std::vector<std::string> all;
    for (const auto& entry : fs::directory_iterator(config.corpus_dir))
      if (entry.is_regular_file() && entry.path().extension() == ".wav")
        all.push_back(entry.path().filename().string());
    std::sort(all.begin(), all.end());
    for (const std::string& f : all)
      if (clip_admissible(prepare_clip(config.corpus_dir / f))) corpus_files.push_back(f);
    if (corpus_files.empty())
      throw IoError("no admissible corpus clips (16 kHz mono wav, >= -42 dBFS) in " +
                    config.corpus_dir.string());
  }

  // Scene specs are sampled serially so the RNG stream is worker-independent.
  std::mt19937_64 rng(config.seed);
  DirectionScheduler scheduler(candidate_grid(config.sampling.role),
                               mix_seed(config.seed, 0xD0A));
  std::vector<SceneSpec> specs;
  specs.reserve(config.scene_count);
  for (int i = 0; i < config.scene_count; ++i) {
    SceneSpec spec = sample_scene(config.sampling, rng, scheduler, corpus_files);
    spec.rng_seed = mix_seed(config.seed, static_cast<std::uint64_t>(i));
    specs.push_back(std::move(spec));
  }

  fs::create_directories(config.output_dir / "scenes");
  const DirectivityPattern base = config.pattern.build(0.0);

  Manifest manifest;
  manifest.role = config.sampling.role;
  manifest.environment = config.sampling.environment;
  manifest.seed = config.seed;
  manifest.snr_db = config.sampling.snr_db;
  manifest.array = build_array(config.sampling.array_diameter_m);
  manifest.pattern = config.pattern;
  manifest.pattern.steering_deg = config.sampling.steering_deg;
  manifest.candidate_grid_deg = candidate_grid(config.sampling.role);
  manifest.scenes.resize(config.scene_count);
  manifest.base_dir = config.output_dir;

  parallel_for(specs.size(), config.workers, [&](std::size_t i) {
    const SceneSpec& spec = specs[i];
    const SceneRender render = render_scene(spec, base, config.corpus_dir,
                                            config.save_rirs, config.nonspeech);
    const std::string dir = std::string("scenes/") + scene_dir_name(static_cast<int>(i));
    fs::create_directories(config.output_dir / dir);

    SceneRecord rec;
    rec.index = static_cast<int>(i);
    rec.seed = spec.rng_seed;
    rec.room = spec.room;
    rec.array_center = spec.array_center;
    rec.snr_db = spec.snr_db;
    for (const SceneSource& s : spec.sources)
      rec.sources.push_back({s.doa.azimuth_deg(), rad2deg(s.doa.elevation), s.distance_m,
                             s.audio, s.loudness_dbfs});

    char name[64];
    for (std::size_t q = 0; q < render.mic_signals.size(); ++q) {
      std::snprintf(name, sizeof(name), "%s/mic%zu.wav", dir.c_str(), q);
      write_wav(config.output_dir / name, render.mic_signals[q]);
      rec.files.mics.push_back(name);
    }
    for (std::size_t p = 0; p < spec.steering_deg.size(); ++p) {
      const int cd = steering_centideg(spec.steering_deg[p]);
      std::snprintf(name, sizeof(name), "%s/vdm_steer%06d.wav", dir.c_str(), cd);
      write_wav(config.output_dir / name, render.vdm_targets[p]);
      rec.files.vdm[cd] = name;
    }
    for (std::size_t s = 0; s < render.direct_stems.size(); ++s) {
      std::snprintf(name, sizeof(name), "%s/src%zu_dir.wav", dir.c_str(), s);
      write_wav(config.output_dir / name, render.direct_stems[s]);
      std::string dir_path = name;
      std::snprintf(name, sizeof(name), "%s/src%zu_rvb.wav", dir.c_str(), s);
      write_wav(config.output_dir / name, render.reverb_stems[s]);
      rec.files.stems.emplace_back(std::move(dir_path), name);
    }
    if (config.save_rirs) {
      const std::size_t n_mic = render.mic_signals.size();
      for (std::size_t k = 0; k < render.rirs.size(); ++k) {
        std::snprintf(name, sizeof(name), "%s/rir_src%zu_mic%zu.wav", dir.c_str(),
                      k / n_mic, k % n_mic);
        write_wav(config.output_dir / name, render.rirs[k].samples);
        rec.files.rirs.push_back(name);
      }
    }
    manifest.scenes[i] = std::move(rec);
  });

  save_manifest(config.output_dir / "manifest.json", manifest);

  if (config.batch_plan) {
    const auto samples = batch_samples_from_manifest(manifest);
    const auto batches = plan_minibatches(samples, config.batch_plan->batch_size,
                                          config.batch_plan->vicinity_deg,
                                          config.batch_plan->seed);
    std::ofstream f(config.output_dir / "batches.json");
    if (!f) throw IoError("cannot write batch plan");
    f << "{\n  \"batch_size\": " << config.batch_plan->batch_size
      << ",\n  \"vicinity_deg\": " << config.batch_plan->vicinity_deg
      << ",\n  \"batches\": [\n";
    for (std::size_t b = 0; b < batches.size(); ++b) {
      f << "    [";
      for (std::size_t k = 0; k < batches[b].size(); ++k) {
        const BatchSample& s = samples[batches[b][k]];
        f << (k ? ", " : "") << "{\"scene\": " << s.scene_index
          << ", \"steering_deg\": " << s.steering_deg << "}";
      }
      f << "]" << (b + 1 < batches.size() ? "," : "") << "\n";
    }
    f << "  ]\n}\n";
  }
  return manifest;
}

std::vector<BatchSample> batch_samples_from_manifest(const Manifest& manifest) {
  std::vector<BatchSample> samples;
  for (const SceneRecord& s : manifest.scenes) {
    std::vector<double> doas;
    for (const SourceRecord& src : s.sources) doas.push_back(src.azimuth_deg);
    for (const auto& [centideg, _] : s.files.vdm)
      samples.push_back({s.index, centideg / 100.0, doas});
  }
  return samples;
}

std::vector<std::vector<std::size_t>> plan_minibatches(
    std::span<const BatchSample> samples, std::size_t batch_size, double vicinity_deg,
    std::uint64_t seed) {
  if (batch_size == 0) throw InvalidArgument("batch_size must be >= 1");
  if (samples.empty()) throw InvalidArgument("no samples to plan");

  auto is_near = [&](const BatchSample& s) {
    for (double doa : s.source_doas_deg)
      if (angular_distance_deg(doa, s.steering_deg) <= vicinity_deg) return true;
    return false;
  };

  std::vector<std::size_t> order(samples.size());
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(seed);
  std::shuffle(order.begin(), order.end(), rng);

  const std::size_t num_batches = (samples.size() + batch_size - 1) / batch_size;
  std::vector<std::size_t> near;
  std::vector<std::size_t> rest;
  for (std::size_t idx : order)
    (is_near(samples[idx]) ? near : rest).push_back(idx);
  if (near.size() < num_batches)
    throw PlanningError("mini-batch plan infeasible: " + std::to_string(num_batches) +
                        " batches need a near-target sample but only " +
                        std::to_string(near.size()) + " exist (deficit " +
                        std::to_string(num_batches - near.size()) + ")");

  // Seed every batch with one near-target sample, then fill from the rest of
  // the shuffled order.
  std::vector<std::vector<std::size_t>> batches(num_batches);
  for (std::size_t b = 0; b < num_batches; ++b) batches[b].push_back(near[b]);
  std::vector<std::size_t> pool(near.begin() + num_batches, near.end());
  pool.insert(pool.end(), rest.begin(), rest.end());
  std::shuffle(pool.begin(), pool.end(), rng);
  std::size_t next = 0;
  for (std::size_t b = 0; b < num_batches && next < pool.size(); ++b) {
    const std::size_t want = std::min(batch_size, samples.size() - b * batch_size);
    while (batches[b].size() < want && next < pool.size())
      batches[b].push_back(pool[next++]);
  }
  return batches;
}

}  // namespace ndf
