// experiments.cpp

#include "ndf/experiments.hpp"

#include <cmath>
#include <fstream>

#include "json.hpp"
#include "ndf/masks.hpp"
#include "ndf/parallel.hpp"
#include "ndf/tensor_file.hpp"
#include "ndf/wav.hpp"

namespace ndf {

using nlohmann::json;

namespace {

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream f(path);
  if (!f) throw IoError("cannot write " + path.string());
  f << text;
}

std::string spectrogram_db_csv(const Spectrogram& spec) {
  std::string out;
  out.reserve(spec.bins.size() * 8);
  for (std::size_t f = 0; f < spec.num_bins; ++f) {
    for (std::size_t t = 0; t < spec.num_frames; ++t) {
      const double mag = std::abs(spec.at(f, t));
      out += std::to_string(mag > 0.0 ? db_from_amplitude(mag) : -200.0);
      out += (t + 1 < spec.num_frames) ? ',' : '\n';
    }
  }
  return out;
}

}  // namespace

void run_bandpass_probe(const ProbeConfig& config) {
  if (config.band_specs.empty()) throw InvalidArgument("probe: no bands configured");
  const Manifest manifest = load_manifest(config.manifest_path);
  std::filesystem::create_directories(config.output_dir);

  json index;
  index["manifest"] = config.manifest_path.string();
  index["filter"] = to_string(config.source);
  index["bands"] = json::array();

  for (const ProbeBandSpec& spec : config.band_specs) {
    if (spec.label.empty()) throw InvalidArgument("probe: band spec needs a label");
    const std::vector<bool> keep = band_bins(spec.bands);

    if (config.export_inputs) {
      const auto input_dir = config.output_dir / spec.label / "inputs";
      std::filesystem::create_directories(input_dir);
      parallel_for(manifest.scenes.size(), config.workers, [&](std::size_t k) {
        const SceneRecord& scene = manifest.scenes[k];
        for (std::size_t q = 0; q < scene.files.mics.size(); ++q) {
          const auto y = read_wav_mono(manifest.resolve(scene.files.mics[q]));
          Spectrogram s = stft(y);
          apply_band_bins(s, keep);
          char name[64];
          std::snprintf(name, sizeof(name), "scene%05d_mic%zu.wav", scene.index, q);
          write_wav(input_dir / name, istft(s));
        }
      });
    }

    EvalOptions opts;
    opts.source = config.source;
    opts.mask_dir = config.mask_dir / spec.label;
    opts.workers = config.workers;
    opts.band_keep = keep;
    const EvalReport report = evaluate_manifest(manifest, opts);
    write_eval_report(report, config.output_dir / spec.label);

    json jb;
    jb["label"] = spec.label;
    json bands = json::array();
    for (const BandHz& b : spec.bands) bands.push_back({b.low_hz, b.high_hz});
    jb["bands_hz"] = bands;
    jb["sdr_db"] = report.per_steering.front().sdr_db;
    index["bands"].push_back(jb);
  }
  write_text(config.output_dir / "index.json", index.dump(2) + "\n");
}

void run_aperture_sweep(const SweepConfig& config) {
  if (config.diameters_m.empty() || config.snrs_db.empty())
    throw InvalidArgument("sweep: need at least one diameter and one SNR");
  std::filesystem::create_directories(config.output_dir);

  std::string summary = "diameter_m,snr_db,sdr_db,reference_sdr_db,loss_l1\n";
  json index;
  index["cells"] = json::array();

  for (double d : config.diameters_m) {
    for (double snr : config.snrs_db) {
      char label[48];
      std::snprintf(label, sizeof(label), "d%03d_snr%g", static_cast<int>(d * 1000.0), snr);

      DatasetConfig cell = config.base;
      cell.sampling.array_diameter_m = d;
      cell.sampling.snr_db = snr;
      cell.output_dir = config.output_dir / "cells" / label;
      const Manifest manifest = build_dataset(cell);

      EvalOptions opts;
      opts.source = config.source;
      opts.mask_dir = config.mask_dir / label;
      opts.workers = config.base.workers;
      const EvalReport report = evaluate_manifest(manifest, opts);
      write_eval_report(report, config.output_dir / "reports" / label);

      const SteeringReport& sr = report.per_steering.front();
      summary += std::to_string(d) + "," + std::to_string(snr) + "," +
                 std::to_string(sr.sdr_db) + "," + std::to_string(sr.reference_sdr_db) +
                 "," + std::to_string(sr.loss_l1) + "\n";
      json jc;
      jc["label"] = label;
      jc["diameter_m"] = d;
      jc["snr_db"] = snr;
      jc["sdr_db"] = sr.sdr_db;
      index["cells"].push_back(jc);
    }
  }
  write_text(config.output_dir / "summary.csv", summary);
  write_text(config.output_dir / "index.json", index.dump(2) + "\n");
}

MovingSourceRender render_moving_source(
    std::span<const double> signal, const ArrayGeometry& array,
    const std::optional<RoomSpec>& room, const Vec3& array_center, double distance_m,
    const std::function<double(double)>& azimuth_deg_at,
    std::span<const DirectivityPattern> patterns, double hop_s) {
  const std::size_t length = signal.size();
  if (length == 0) throw InvalidArgument("render_moving_source: empty signal");
  const RoomSpec room_spec = room.value_or(RoomSpec{});
  const std::size_t n_mic = array.num_mics();
  const int ref = array.reference_index;
  const Vec3 ref_pos = array_center + array.mic_positions[ref];

  const std::size_t hop = static_cast<std::size_t>(std::lround(hop_s * kSampleRate));
  const std::size_t ramp = std::min<std::size_t>(320, hop / 2);  // 20 ms crossfade
  const std::size_t n_hops = (length + hop - 1) / hop;

  MovingSourceRender out;
  out.mic_signals.assign(n_mic, std::vector<double>(length, 0.0));
  out.vdm_signals.assign(patterns.size(), std::vector<double>(length, 0.0));
  out.ref_direct.assign(length, 0.0);
  out.ref_full.assign(length, 0.0);

  for (std::size_t h = 0; h < n_hops; ++h) {
    const std::size_t seg_start = h * hop;
    const std::size_t seg_end = std::min(length, (h + 1) * hop);
    // Complementary linear ramps across hop boundaries keep the sum at 1.
    const std::size_t lo = (h == 0) ? 0 : seg_start - ramp / 2;
    const std::size_t hi = (h + 1 >= n_hops) ? length : std::min(length, seg_end + ramp / 2);

    std::vector<double> piece(hi - lo, 0.0);
    for (std::size_t i = lo; i < hi; ++i) {
      double w = 1.0;
      if (h > 0 && i < seg_start + ramp / 2)
        w = (static_cast<double>(i) - (seg_start - ramp / 2.0) + 0.5) / ramp;
      if (h + 1 < n_hops && i >= seg_end - (ramp - ramp / 2))
        w = ((seg_end + ramp / 2.0) - static_cast<double>(i) - 0.5) / ramp;
      piece[i - lo] = signal[i] * std::clamp(w, 0.0, 1.0);
    }

    const double t_center = (static_cast<double>(seg_start + seg_end) / 2.0) / kSampleRate;
    const double az = azimuth_deg_at(t_center);
    const Vec3 src_pos = array_center + doa_unit_vector(Doa::from_deg(az)) * distance_m;

    auto add = [&](const std::vector<double>& rir, std::vector<double>& dst) {
      const std::vector<double> y = convolve(piece, rir);
      const std::size_t n = std::min(y.size(), length - lo);
      for (std::size_t i = 0; i < n; ++i) dst[lo + i] += y[i];
    };

    for (std::size_t q = 0; q < n_mic; ++q) {
      const ImpulseResponse rir =
          simulate_rir(room_spec, src_pos, array_center + array.mic_positions[q], {});
      add(rir.samples, out.mic_signals[q]);
      if (static_cast<int>(q) == ref) {
        const double delay = (src_pos - ref_pos).norm() / kSpeedOfSound;
        const auto [dir, rvb] = split_direct_reverb(rir, delay);
        add(dir.samples, out.ref_direct);
        add(rir.samples, out.ref_full);
      }
    }
    for (std::size_t p = 0; p < patterns.size(); ++p) {
      const ImpulseResponse vdm = simulate_vdm_rir(room_spec, src_pos, ref_pos, patterns[p], {});
      add(vdm.samples, out.vdm_signals[p]);
    }
  }
  return out;
}

void run_interferer_demo(const InterfererDemoConfig& config) {
  namespace fs = std::filesystem;
  fs::create_directories(config.output_dir);
  const ArrayGeometry array = build_array(config.array_diameter_m);
  const Vec3 center = config.room
                          ? Vec3{config.room->length / 2.0, config.room->width / 2.0,
                                 config.room->height / 2.0}
                          : Vec3{};
  const std::size_t length =
      static_cast<std::size_t>(std::lround(config.rotation_s * kSampleRate));

  auto load_looped = [&](const fs::path& p) {
    const std::vector<double> x = read_wav_mono(p);
    if (x.empty()) throw DegenerateSignalError("empty demo source: " + p.string());
    std::vector<double> out(length);
    for (std::size_t i = 0; i < length; ++i) out[i] = x[i % x.size()];
    return out;
  };
  const std::vector<double> target_sig = load_looped(config.target_wav);
  const std::vector<double> interferer_sig = load_looped(config.interferer_wav);

  const DirectivityPattern pattern =
      config.pattern.build(config.steering_deg);
  const DirectivityPattern patterns[1] = {pattern};

  // Static target: a one-hop "moving" source with a constant trajectory.
  const MovingSourceRender target_render = render_moving_source(
      target_sig, array, config.room, center, config.distance_m,
      [&](double) { return config.steering_deg; }, patterns, config.rotation_s);

  const double start = config.interferer_start_deg;
  const double rate = 360.0 / config.rotation_s;  // clockwise
  const MovingSourceRender interferer_render = render_moving_source(
      interferer_sig, array, config.room, center, config.distance_m,
      [&](double t) { return wrap_deg(start - rate * t); }, patterns, config.hop_s);

  // Loudness placement per source, measured at the clean reference component.
  const double g_target =
      gain_for_loudness(target_render.ref_full, config.loudness_dbfs);
  const double g_interf =
      gain_for_loudness(interferer_render.ref_full, config.loudness_dbfs);

  std::vector<std::vector<double>> mics(array.num_mics(),
                                        std::vector<double>(length, 0.0));
  std::vector<double> vdm(length, 0.0);
  for (std::size_t q = 0; q < mics.size(); ++q)
    for (std::size_t i = 0; i < length; ++i)
      mics[q][i] = g_target * target_render.mic_signals[q][i] +
                   g_interf * interferer_render.mic_signals[q][i];
  for (std::size_t i = 0; i < length; ++i)
    vdm[i] = g_target * target_render.vdm_signals[0][i] +
             g_interf * interferer_render.vdm_signals[0][i];
  add_sensor_noise(mics, config.snr_db, config.seed);

  const int ref = array.reference_index;
  const Spectrogram ref_spec = stft(mics[ref]);

  // Filtered output: external mask when provided, otherwise the oracle with
  // per-frame interferer DOA.
  Mask mask;
  if (!config.external_mask.empty()) {
    mask = read_mask(config.external_mask);
    if (mask.num_frames != ref_spec.num_frames)
      throw MaskCardinalityError("external demo mask frame count mismatch");
  } else {
    Spectrogram target_dir = stft(target_render.ref_direct);
    Spectrogram interf_dir = stft(interferer_render.ref_direct);
    mask = Mask::ones(ref_spec.num_bins, ref_spec.num_frames);
    for (std::size_t t = 0; t < ref_spec.num_frames; ++t) {
      const double t_s =
          (static_cast<double>(t) * kHop + kFrameLen / 2.0) / kSampleRate;
      const double az_interf = wrap_deg(start - rate * t_s);
      const double gain_t = std::fabs(evaluate(pattern, deg2rad(config.steering_deg), 0.0));
      const double gain_i = std::fabs(evaluate(pattern, deg2rad(az_interf), 0.0));
      for (std::size_t f = 0; f < ref_spec.num_bins; ++f) {
        const double mt = g_target * std::abs(target_dir.at(f, t));
        const double mi = g_interf * std::abs(interf_dir.at(f, t));
        if (mt == 0.0 && mi == 0.0) continue;
        mask.at(f, t) = (mt >= mi) ? gain_t : gain_i;
      }
    }
  }
  const std::vector<double> output = istft(apply_mask(mask, ref_spec));

  write_wav(config.output_dir / "reference.wav", mics[ref]);
  write_wav(config.output_dir / "target_vdm.wav", vdm);
  write_wav(config.output_dir / "output.wav", output);
  {
    std::vector<double> scaled = interferer_render.ref_full;
    for (double& v : scaled) v *= g_interf;
    write_wav(config.output_dir / "interferer_ref.wav", scaled);
    std::vector<double> vdm_i = interferer_render.vdm_signals[0];
    for (double& v : vdm_i) v *= g_interf;
    write_wav(config.output_dir / "interferer_vdm.wav", vdm_i);
    std::vector<double> ref_t = target_render.ref_full;
    for (double& v : ref_t) v *= g_target;
    write_wav(config.output_dir / "target_ref.wav", ref_t);
    std::vector<double> vdm_t = target_render.vdm_signals[0];
    for (double& v : vdm_t) v *= g_target;
    write_wav(config.output_dir / "target_vdm_component.wav", vdm_t);
  }
  write_text(config.output_dir / "reference_spec_db.csv", spectrogram_db_csv(ref_spec));
  write_text(config.output_dir / "target_spec_db.csv", spectrogram_db_csv(stft(vdm)));
  write_text(config.output_dir / "output_spec_db.csv", spectrogram_db_csv(stft(output)));

  json meta;
  meta["rotation_s"] = config.rotation_s;
  meta["hop_s"] = config.hop_s;
  meta["steering_deg"] = config.steering_deg;
  meta["interferer_start_deg"] = config.interferer_start_deg;
  meta["distance_m"] = config.distance_m;
  meta["anechoic"] = !config.room.has_value();
  write_text(config.output_dir / "demo.json", meta.dump(2) + "\n");
}

void run_stereo_demo(const StereoDemoConfig& config) {
  namespace fs = std::filesystem;
  fs::create_directories(config.output_dir);
  const ArrayGeometry array = build_array(config.array_diameter_m);
  const Vec3 center = config.room
                          ? Vec3{config.room->length / 2.0, config.room->width / 2.0,
                                 config.room->height / 2.0}
                          : Vec3{};
  const std::size_t length =
      static_cast<std::size_t>(std::lround(config.duration_s * kSampleRate));

  const std::vector<double> raw = read_wav_mono(config.source_wav);
  if (raw.empty()) throw DegenerateSignalError("empty demo source");
  std::vector<double> sig(length);
  for (std::size_t i = 0; i < length; ++i) sig[i] = raw[i % raw.size()];

  const DirectivityPattern patterns[2] = {
      config.pattern.build(config.theta_left_deg),
      config.pattern.build(config.theta_right_deg)};

  const double span = config.pan_end_deg - config.pan_start_deg;
  const MovingSourceRender render = render_moving_source(
      sig, array, config.room, center, config.distance_m,
      [&](double t) {
        return config.pan_start_deg + span * std::clamp(t / config.duration_s, 0.0, 1.0);
      },
      patterns, config.hop_s);

  const double gain = gain_for_loudness(render.ref_full, config.loudness_dbfs);
  std::vector<double> left(length);
  std::vector<double> right(length);

  if (!config.external_mask_left.empty() || !config.external_mask_right.empty()) {
    const Spectrogram ref_spec = stft(render.ref_full);
    const Mask ml = read_mask(config.external_mask_left);
    const Mask mr = read_mask(config.external_mask_right);
    left = istft(apply_mask(ml, ref_spec));
    right = istft(apply_mask(mr, ref_spec));
    for (std::size_t i = 0; i < length; ++i) {
      left[i] *= gain;
      right[i] *= gain;
    }
  } else {
    for (std::size_t i = 0; i < length; ++i) {
      left[i] = gain * render.vdm_signals[0][i];
      right[i] = gain * render.vdm_signals[1][i];
    }
  }

  write_wav_multi(config.output_dir / "stereo.wav", {left, right});
  const auto trace =
      stereo_level_difference(left, right, config.segment_s, config.overlap);
  std::string csv = "time_s,level_diff_db,defined\n";
  for (const SegmentLevelDiff& d : trace)
    csv += std::to_string(d.time_s) + "," +
           (d.defined ? std::to_string(d.diff_db) : "nan") + "," +
           (d.defined ? "1" : "0") + "\n";
  write_text(config.output_dir / "level_difference.csv", csv);
}

}  // namespace ndf
