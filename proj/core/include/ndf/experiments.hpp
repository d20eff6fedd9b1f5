// experiments.hpp
// Scripted analysis procedures: bandpass probing, aperture/SNR sweeps, and the
// moving-source demos (piecewise-static approximation).

#pragma once

#include <functional>

#include "ndf/eval.hpp"
#include "ndf/scene.hpp"
#include "ndf/signal_ops.hpp"

namespace ndf {

struct ProbeBandSpec {
  std::string label;
  std::vector<BandHz> bands;  // union of bands
};

struct ProbeConfig {
  std::filesystem::path manifest_path;
  FilterSource source = FilterSource::kOracle;
  // External masks live under <mask_dir>/<band label>/scene..._steer....ndfm.
  std::filesystem::path mask_dir;
  std::vector<ProbeBandSpec> band_specs;
  std::filesystem::path output_dir;
  // Write the band-limited mic signals so an external model can be run on them.
  bool export_inputs = false;
  int workers = 0;
};

// For each band spec: band-limit the filter input, apply the resulting mask to
// the unprocessed reference, and compute power patterns. One report directory
// per band plus a summary index.
void run_bandpass_probe(const ProbeConfig& config);

struct SweepConfig {
  DatasetConfig base;  // corpus, counts, sampling; diameter/SNR overridden per cell
  std::vector<double> diameters_m = {0.03, 0.06, 0.09};
  std::vector<double> snrs_db = {30.0, 20.0, 10.0};
  FilterSource source = FilterSource::kOracle;
  std::filesystem::path mask_dir;  // external masks per cell directory
  std::filesystem::path output_dir;
};

// Renders one dataset per (diameter, SNR) cell with identical scene sampling
// seeds and evaluates the filter source on each; emits per-cell reports and a
// summary CSV.
void run_aperture_sweep(const SweepConfig& config);

struct InterfererDemoConfig {
  std::filesystem::path target_wav;
  std::filesystem::path interferer_wav;
  PatternDescriptor pattern = PatternDescriptor::from_preset("dma1");
  double steering_deg = 0.0;         // static target direction
  double interferer_start_deg = 90.0;
  double rotation_s = 18.0;          // one full clockwise circle
  double hop_s = 0.25;
  double distance_m = 1.5;
  std::optional<RoomSpec> room;      // absent = anechoic
  double array_diameter_m = 0.03;
  double snr_db = 30.0;
  double loudness_dbfs = -29.0;
  std::uint64_t seed = 1;
  std::filesystem::path external_mask;  // optional full-length NDFM mask
  std::filesystem::path output_dir;
};

// Static target plus an interferer circling the array, rendered as 250 ms
// piecewise-static hops with raised-cosine crossfades. Emits the reference,
// per-source components, the VDM target, the filtered output, and
// magnitude-dB spectrogram CSVs.
void run_interferer_demo(const InterfererDemoConfig& config);

struct StereoDemoConfig {
  std::filesystem::path source_wav;
  PatternDescriptor pattern = PatternDescriptor::from_preset("dma1");
  double theta_left_deg = 45.0;
  double theta_right_deg = 135.0;
  double pan_start_deg = 0.0;
  double pan_end_deg = 180.0;
  double duration_s = 32.0;
  double hop_s = 0.25;
  double distance_m = 1.4;
  std::optional<RoomSpec> room;
  double array_diameter_m = 0.03;
  double loudness_dbfs = -29.0;
  std::filesystem::path external_mask_left;   // optional NDFM masks
  std::filesystem::path external_mask_right;
  std::filesystem::path output_dir;
  double segment_s = 1.0;
  double overlap = 0.75;
};

// One source panning across the front half-plane captured by two steered VDM
// targets; emits the stereo WAV and the segmental level-difference trace.
void run_stereo_demo(const StereoDemoConfig& config);

// Shared piecewise-static renderer for the demos (exposed for tests).
struct MovingSourceRender {
  std::vector<std::vector<double>> mic_signals;   // Q clean channels
  std::vector<std::vector<double>> vdm_signals;   // one per pattern
  std::vector<double> ref_direct;                 // direct stem at the reference
  std::vector<double> ref_full;                   // full clean reference component
};

MovingSourceRender render_moving_source(
    std::span<const double> signal, const ArrayGeometry& array,
    const std::optional<RoomSpec>& room, const Vec3& array_center,
    double distance_m, const std::function<double(double)>& azimuth_deg_at,
    std::span<const DirectivityPattern> patterns, double hop_s = 0.25);

}  // namespace ndf
