// signal_ops.cpp

#include "ndf/signal_ops.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "ndf/fft.hpp"

namespace ndf {

double rms(std::span<const double> signal) {
  if (signal.empty()) return 0.0;
  double acc = 0.0;
  for (double s : signal) acc += s * s;
  return std::sqrt(acc / static_cast<double>(signal.size()));
}

double loudness_dbfs(std::span<const double> signal) {
  const double r = rms(signal);
  if (r <= 0.0) return -std::numeric_limits<double>::infinity();
  return db_from_amplitude(r);
}

double gain_for_loudness(std::span<const double> signal, double target_dbfs) {
  const double current = loudness_dbfs(signal);
  if (!std::isfinite(current))
    throw DegenerateSignalError("cannot normalize an all-zero signal");
  return std::pow(10.0, (target_dbfs - current) / 20.0);
}

std::vector<double> normalize_loudness(std::span<const double> signal, double target_dbfs) {
  const double g = gain_for_loudness(signal, target_dbfs);
  std::vector<double> out(signal.begin(), signal.end());
  for (double& s : out) s *= g;
  return out;
}

void add_sensor_noise(std::vector<std::vector<double>>& channels, double snr_db,
                      std::uint64_t seed) {
  if (channels.empty()) throw InvalidArgument("add_sensor_noise: no channels");
  if (std::isinf(snr_db) && snr_db > 0.0) return;

  double power = 0.0;
  std::size_t count = 0;
  for (const auto& ch : channels) {
    for (double s : ch) power += s * s;
    count += ch.size();
  }
  if (count == 0) throw InvalidArgument("add_sensor_noise: empty channels");
  power /= static_cast<double>(count);

  const double noise_power = power / std::pow(10.0, snr_db / 10.0);
  const double sigma = std::sqrt(noise_power);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (auto& ch : channels)
    for (double& s : ch) s += sigma * normal(rng);
}

std::vector<bool> band_bins(std::span<const BandHz> bands) {
  if (bands.empty()) throw InvalidArgument("bandpass: no bands given");
  std::vector<bool> keep(kNumBins, false);
  std::size_t kept = 0;
  for (const BandHz& b : bands) {
    if (!(b.high_hz > b.low_hz))
      throw InvalidArgument("bandpass: empty band");
    for (std::size_t f = 0; f < kNumBins; ++f) {
      const double hz = kBinSpacingHz * static_cast<double>(f);
      if (hz >= b.low_hz && hz <= b.high_hz && !keep[f]) {
        keep[f] = true;
        ++kept;
      }
    }
  }
  if (kept == 0) throw InvalidArgument("bandpass: no STFT bin falls inside the bands");
  return keep;
}

void apply_band_bins(Spectrogram& spec, const std::vector<bool>& keep) {
  if (keep.size() != spec.num_bins)
    throw InvalidArgument("apply_band_bins: bin-count mismatch");
  for (std::size_t f = 0; f < spec.num_bins; ++f) {
    if (keep[f]) continue;
    for (std::size_t t = 0; t < spec.num_frames; ++t) spec.at(f, t) = {};
  }
}

std::vector<double> bandpass(std::span<const double> signal,
                             std::span<const BandHz> bands) {
  const std::vector<bool> keep = band_bins(bands);
  Spectrogram spec = stft(signal);
  apply_band_bins(spec, keep);
  return istft(spec);
}

std::vector<double> bandpass(std::span<const double> signal, double center_hz,
                             double bandwidth_hz) {
  if (!(center_hz > 0.0 && center_hz < kSampleRate / 2.0))
    throw InvalidArgument("bandpass center must lie in (0, 8000) Hz");
  const BandHz band{center_hz - bandwidth_hz / 2.0, center_hz + bandwidth_hz / 2.0};
  return bandpass(signal, std::span<const BandHz>(&band, 1));
}

std::vector<double> convolve(std::span<const double> x, std::span<const double> h) {
  if (x.empty() || h.empty()) throw InvalidArgument("convolve: empty input");
  const std::size_t out_len = x.size() + h.size() - 1;

  if (h.size() <= 128 || x.size() <= 128) {
    std::vector<double> out(out_len, 0.0);
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double xi = x[i];
      if (xi == 0.0) continue;
      for (std::size_t j = 0; j < h.size(); ++j) out[i + j] += xi * h[j];
    }
    return out;
  }

  const std::size_t n = fft::next_pow2(out_len);
  auto X = fft::rfft(x, n);
  const auto H = fft::rfft(h, n);
  for (std::size_t k = 0; k < X.size(); ++k) X[k] *= H[k];
  std::vector<double> full = fft::irfft(X, n);
  full.resize(out_len);
  return full;
}

std::vector<double> convolve_trim(std::span<const double> x, std::span<const double> h,
                                  std::size_t out_len) {
  std::vector<double> full = convolve(x, h);
  full.resize(out_len, 0.0);
  return full;
}

}  // namespace ndf
