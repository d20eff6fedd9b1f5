// metrics.hpp
// Data-dependent evaluation suite: masked power ratios and power patterns,
// directivity factors from reverberant stems, aggregated SDR, the two training
// losses, and the segmental stereo level difference.

#pragma once

#include <limits>
#include <span>
#include <vector>

#include "ndf/stft.hpp"

namespace ndf {

struct PowerRatios {
  std::vector<double> narrowband;  // xi[f]; NaN where the stem has no energy
  std::vector<bool> defined;       // per-frequency validity
  double wideband = 0.0;
};

// Ratio of masked to unmasked direct-stem power, per frequency and full-grid.
PowerRatios power_ratios(const Mask& mask, const Spectrogram& direct_stem);

// One (sample, source) pair: the mask of that sample, the source's direct stem
// at the reference mic, and the source DOA.
struct PatternSample {
  double doa_deg = 0.0;
  const Mask* mask = nullptr;
  const Spectrogram* direct_stem = nullptr;
};

struct PatternEstimate {
  std::vector<double> grid_deg;
  std::vector<std::size_t> counts;                // |H_theta|
  std::vector<double> wideband_db;                // NaN where count = 0
  std::vector<double> wideband_std;               // std of the linear ratios
  std::vector<std::vector<double>> narrowband_db;  // [p][f]
};

// Eq.-style grid averaging: mean of the linear ratios over all pairs at each
// grid direction, reported in dB. Simulated DOAs match the grid exactly; a
// nearest-bin fallback (half-width degrees) exists for external data.
PatternEstimate estimate_power_pattern(std::span<const PatternSample> samples,
                                       std::span<const double> grid_deg,
                                       double bin_half_width_deg = 1.25);

// DF[f] = sum_k,t |Y_rvb|^2 / sum_k,t |M Y_rvb|^2 in dB; +inf where the
// masked power underflows to zero; throws if the stems carry no energy at all.
std::vector<double> estimate_df_db(std::span<const Mask> masks,
                                   std::span<const Spectrogram> reverb_stems);

// Same numerator against the target VDM signal power.
std::vector<double> estimate_df_target_db(std::span<const Spectrogram> vdm_targets,
                                          std::span<const Spectrogram> reverb_stems);

double sdr_db(std::span<const double> target, std::span<const double> estimate,
              double eps = kSdrEpsilon);
double aggregate_sdr_db(std::span<const double> per_sample_sdr_db);

using SignalBatch = std::span<const std::vector<double>>;

// 10 log10(sum ||z - zhat||^2 / (sum ||z||^2 + eps) + tau), tau = 1e-4.
double loss_tsdr(SignalBatch target, SignalBatch estimate, double eps = kSdrEpsilon);

// sum ||z - zhat||_1 / (sum ||z||_1 + eps).
double loss_l1(SignalBatch target, SignalBatch estimate, double eps = kSdrEpsilon);

struct SegmentLevelDiff {
  double time_s = 0.0;  // segment start
  double diff_db = 0.0;
  bool defined = true;  // false for silent segments
};

std::vector<SegmentLevelDiff> stereo_level_difference(std::span<const double> left,
                                                      std::span<const double> right,
                                                      double segment_s = 1.0,
                                                      double overlap = 0.75,
                                                      double sample_rate = kSampleRate);

inline constexpr double kUndefinedDb = std::numeric_limits<double>::quiet_NaN();

}  // namespace ndf
