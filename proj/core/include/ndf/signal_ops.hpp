// signal_ops.hpp
// Loudness normalization, sensor-noise mixing, bandpass probing, convolution.

#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "ndf/stft.hpp"

namespace ndf {

double rms(std::span<const double> signal);

// Full-signal RMS expressed in dBFS.
double loudness_dbfs(std::span<const double> signal);

// Gain that places the signal at the target loudness; throws on all-zero input.
double gain_for_loudness(std::span<const double> signal, double target_dbfs);

std::vector<double> normalize_loudness(std::span<const double> signal, double target_dbfs);

// Adds white Gaussian sensor noise, independent per channel. The common noise
// power is set from the mean power of the clean mixture across channels so
// that 10 log10(mixture power / noise power) = snr_db. snr_db = +inf leaves
// the channels untouched. Deterministic in the seed.
void add_sensor_noise(std::vector<std::vector<double>>& channels, double snr_db,
                      std::uint64_t seed);

struct BandHz {
  double low_hz = 0.0;
  double high_hz = 0.0;
};

// STFT-domain brick wall: bins whose center lies inside any band are kept,
// everything else is zeroed, then the signal is resynthesized.
std::vector<double> bandpass(std::span<const double> signal,
                             std::span<const BandHz> bands);
std::vector<double> bandpass(std::span<const double> signal, double center_hz,
                             double bandwidth_hz);

// Per-bin keep flags for a band union; throws if no bin survives.
std::vector<bool> band_bins(std::span<const BandHz> bands);

// Zeroes masked-out bins of a spectrogram in place.
void apply_band_bins(Spectrogram& spec, const std::vector<bool>& keep);

// Full linear convolution (x.size() + h.size() - 1), FFT-based above a small
// kernel size.
std::vector<double> convolve(std::span<const double> x, std::span<const double> h);

// Convolution truncated/zero-padded to out_len samples.
std::vector<double> convolve_trim(std::span<const double> x, std::span<const double> h,
                                  std::size_t out_len);

}  // namespace ndf
