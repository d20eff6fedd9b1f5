// stft.cpp

#include "ndf/stft.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "ndf/fft.hpp"

namespace ndf {

namespace {

// sqrt of the periodic Hann window; hann + shifted hann sums to 1 at 50% overlap.
const std::vector<double>& analysis_window() {
  static const std::vector<double> w = [] {
    std::vector<double> v(kFrameLen);
    for (std::size_t n = 0; n < kFrameLen; ++n) {
      const double hann =
          0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(n) /
                               static_cast<double>(kFrameLen));
      v[n] = std::sqrt(hann);
    }
    return v;
  }();
  return w;
}

}  // namespace

Mask Mask::ones(std::size_t num_bins, std::size_t num_frames) {
  Mask m;
  m.num_bins = num_bins;
  m.num_frames = num_frames;
  m.values.assign(num_bins * num_frames, std::complex<double>(1.0, 0.0));
  return m;
}

std::size_t stft_num_frames(std::size_t num_samples) {
  if (num_samples <= kFrameLen) return 1;
  return (num_samples - kFrameLen + kHop - 1) / kHop + 1;
}

Spectrogram stft(std::span<const double> signal, double sample_rate) {
  if (sample_rate != kSampleRate)
    throw InvalidArgument("stft expects 16 kHz input, got " + std::to_string(sample_rate));
  if (signal.empty()) throw InvalidArgument("stft: empty signal");

  const std::vector<double>& w = analysis_window();
  const std::size_t T = stft_num_frames(signal.size());

  Spectrogram spec;
  spec.num_bins = kNumBins;
  spec.num_frames = T;
  spec.num_samples = signal.size();
  spec.sample_rate = sample_rate;
  spec.bins.assign(kNumBins * T, {});

  std::vector<double> frame(kFrameLen);
  for (std::size_t t = 0; t < T; ++t) {
    const std::size_t start = t * kHop;
    for (std::size_t n = 0; n < kFrameLen; ++n) {
      const std::size_t i = start + n;
      frame[n] = (i < signal.size()) ? signal[i] * w[n] : 0.0;
    }
    const auto bins = fft::rfft(frame, kFrameLen);
    for (std::size_t f = 0; f < kNumBins; ++f) spec.at(f, t) = bins[f];
  }
  return spec;
}

std::vector<double> istft(const Spectrogram& spec) {
  if (spec.num_bins != kNumBins || spec.frame_len != kFrameLen || spec.hop != kHop)
    throw InvalidArgument("istft: inconsistent framing metadata");
  if (spec.num_frames == 0) throw InvalidArgument("istft: empty spectrogram");

  const std::vector<double>& w = analysis_window();
  const std::size_t padded = (spec.num_frames - 1) * kHop + kFrameLen;
  std::vector<double> acc(padded, 0.0);
  std::vector<double> env(padded, 0.0);

  std::vector<std::complex<double>> col(kNumBins);
  for (std::size_t t = 0; t < spec.num_frames; ++t) {
    for (std::size_t f = 0; f < kNumBins; ++f) col[f] = spec.at(f, t);
    const std::vector<double> frame = fft::irfft(col, kFrameLen);
    const std::size_t start = t * kHop;
    for (std::size_t n = 0; n < kFrameLen; ++n) {
      acc[start + n] += frame[n] * w[n];
      env[start + n] += w[n] * w[n];
    }
  }

  const std::size_t out_len = spec.num_samples ? spec.num_samples : padded;
  std::vector<double> out(out_len, 0.0);
  const std::size_t n = std::min(out_len, padded);
  for (std::size_t i = 0; i < n; ++i) out[i] = acc[i] / std::max(env[i], 1e-12);
  return out;
}

double spectrogram_energy(const Spectrogram& spec) {
  double e = 0.0;
  for (std::size_t f = 0; f < spec.num_bins; ++f) {
    const double c = (f == 0 || f == spec.num_bins - 1) ? 1.0 : 2.0;
    double row = 0.0;
    for (std::size_t t = 0; t < spec.num_frames; ++t) row += std::norm(spec.at(f, t));
    e += c * row;
  }
  return e / static_cast<double>(spec.frame_len);
}

}  // namespace ndf
