// test_support.cpp

#include "test_support.hpp"

#include <atomic>
#include <cmath>
#include <numbers>
#include <random>

#include "ndf/wav.hpp"

namespace ndf::testing {

std::vector<double> speechlike(std::uint64_t seed, std::size_t num_samples, double peak) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double fs = 16000.0;
  std::vector<double> x(num_samples, 0.0);

  std::size_t pos = static_cast<std::size_t>(u(rng) * 800);
  while (pos < num_samples) {
    const std::size_t burst = static_cast<std::size_t>((0.15 + 0.35 * u(rng)) * fs);
    const std::size_t gap = static_cast<std::size_t>((0.04 + 0.16 * u(rng)) * fs);
    const double f0 = 90.0 + 160.0 * u(rng);
    const double vibrato = 2.0 + 4.0 * u(rng);
    const int harmonics = static_cast<int>(3600.0 / f0);
    std::vector<double> amp(harmonics + 1, 0.0);
    for (int k = 1; k <= harmonics; ++k) {
      const double f = k * f0;
      // crude spectral envelope with two formant-like bumps
      const double formants = 1.0 + 2.0 * std::exp(-std::pow((f - 550.0) / 250.0, 2)) +
                              1.2 * std::exp(-std::pow((f - 1700.0) / 400.0, 2));
      amp[k] = formants / k;
    }
    double phase = 2.0 * std::numbers::pi * u(rng);
    for (std::size_t i = 0; i < burst && pos + i < num_samples; ++i) {
      const double t = static_cast<double>(i) / fs;
      const double env =
          std::pow(std::sin(std::numbers::pi * static_cast<double>(i) / burst), 2.0);
      const double inst_f0 = f0 * (1.0 + 0.01 * std::sin(2 * std::numbers::pi * vibrato * t));
      phase += 2.0 * std::numbers::pi * inst_f0 / fs;
      double s = 0.0;
      for (int k = 1; k <= harmonics; ++k) s += amp[k] * std::sin(k * phase);
      x[pos + i] += env * s;
    }
    pos += burst + gap;
  }

  // faint wideband component so no STFT bin is dead
  std::normal_distribution<double> n(0.0, 1.0);
  double mx = 0.0;
  for (double v : x) mx = std::max(mx, std::fabs(v));
  if (mx <= 0.0) mx = 1.0;
  for (double& v : x) v = v / mx * peak + 1e-4 * peak * n(rng);
  return x;
}

std::vector<double> white_noise(std::uint64_t seed, std::size_t num_samples, double sigma) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> dist(0.0, sigma);
  std::vector<double> x(num_samples);
  for (double& v : x) v = dist(rng);
  return x;
}

std::vector<double> tone(double freq_hz, std::size_t num_samples, double amp) {
  std::vector<double> x(num_samples);
  for (std::size_t i = 0; i < num_samples; ++i)
    x[i] = amp * std::sin(2.0 * std::numbers::pi * freq_hz * i / 16000.0);
  return x;
}

TempDir::TempDir(const std::string& tag) {
  static std::atomic<int> counter{0};
  path_ = std::filesystem::temp_directory_path() /
          ("ndf_test_" + tag + "_" + std::to_string(::getpid()) + "_" +
           std::to_string(counter.fetch_add(1)));
  std::filesystem::create_directories(path_);
}

TempDir::~TempDir() {
  std::error_code ec;
  std::filesystem::remove_all(path_, ec);
}

std::vector<std::string> make_corpus(const std::filesystem::path& dir, int count,
                                     std::uint64_t seed) {
  std::filesystem::create_directories(dir);
  std::vector<std::string> names;
  for (int i = 0; i < count; ++i) {
    char name[32];
    std::snprintf(name, sizeof(name), "clip%03d.wav", i);
    write_wav(dir / name, speechlike(seed + i));
    names.push_back(name);
  }
  return names;
}

double measure_t60(const std::vector<double>& rir, double sample_rate) {
  // classic 100 Hz high-pass; the raw image sum carries a coherent DC buildup
  // whose decay is not exponential
  const double w = 2.0 * std::numbers::pi * 100.0 / sample_rate;
  const double r1 = std::exp(-w);
  const double b1 = 2.0 * r1 * std::cos(w), b2 = -r1 * r1;
  const double a1 = -(1.0 + r1);
  std::vector<double> h(rir.size());
  double y1 = 0, y2 = 0, y3 = 0;
  for (std::size_t i = 0; i < rir.size(); ++i) {
    y3 = y2;
    y2 = y1;
    y1 = b1 * y2 + b2 * y3 + rir[i];
    h[i] = y1 + a1 * y2 + r1 * y3;
  }

  std::vector<double> edc(h.size() + 1, 0.0);
  for (std::size_t i = h.size(); i-- > 0;) edc[i] = edc[i + 1] + h[i] * h[i];
  if (edc[0] <= 0.0) return -1.0;
  double t1 = -1.0, t2 = -1.0;
  for (std::size_t i = 0; i < h.size(); ++i) {
    const double db = edc[i] > 0.0 ? 10.0 * std::log10(edc[i] / edc[0]) : -400.0;
    if (t1 < 0.0 && db <= -5.0) t1 = i / sample_rate;
    if (db <= -45.0) {
      t2 = i / sample_rate;
      break;
    }
  }
  if (t1 < 0.0 || t2 < 0.0) return -1.0;
  return (t2 - t1) * 60.0 / 40.0;
}

double energy(const std::vector<double>& x) {
  double e = 0.0;
  for (double v : x) e += v * v;
  return e;
}

}  // namespace ndf::testing
