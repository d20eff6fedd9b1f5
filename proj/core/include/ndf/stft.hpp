// stft.hpp
// STFT analysis/synthesis: 512-sample frames, 256 hop, sqrt-Hann on both sides.

#pragma once

#include <complex>
#include <span>
#include <vector>

#include "ndf/common.hpp"

namespace ndf {

// Complex time-frequency grid, row-major (F, T).
struct Spectrogram {
  std::size_t num_bins = 0;    // F
  std::size_t num_frames = 0;  // T
  std::vector<std::complex<double>> bins;
  double sample_rate = kSampleRate;
  std::size_t frame_len = kFrameLen;
  std::size_t hop = kHop;
  std::size_t num_samples = 0;  // original signal length

  std::complex<double>& at(std::size_t f, std::size_t t) {
    return bins[f * num_frames + t];
  }
  const std::complex<double>& at(std::size_t f, std::size_t t) const {
    return bins[f * num_frames + t];
  }
  double bin_hz(std::size_t f) const {
    return sample_rate * static_cast<double>(f) / static_cast<double>(frame_len);
  }
};

// Single-channel complex mask on the same (F, T) grid.
struct Mask {
  std::size_t num_bins = 0;
  std::size_t num_frames = 0;
  std::vector<std::complex<double>> values;

  static Mask ones(std::size_t num_bins, std::size_t num_frames);
  std::complex<double>& at(std::size_t f, std::size_t t) {
    return values[f * num_frames + t];
  }
  const std::complex<double>& at(std::size_t f, std::size_t t) const {
    return values[f * num_frames + t];
  }
};

// Frames fully cover the signal: T = ceil((L - frame)/hop) + 1 with the last
// frame zero-padded. 64000 samples -> 249 frames.
std::size_t stft_num_frames(std::size_t num_samples);

Spectrogram stft(std::span<const double> signal, double sample_rate = kSampleRate);

// Overlap-add synthesis normalized by the accumulated squared window, then
// trimmed to the original length. Round trip is exact up to rounding wherever
// the window envelope is nonzero (everywhere except the very first sample).
std::vector<double> istft(const Spectrogram& spec);

// Window-compensated signal energy implied by the spectrogram (one-sided bins
// counted twice except DC/Nyquist, divided by N and the overlap factor).
double spectrogram_energy(const Spectrogram& spec);

}  // namespace ndf
