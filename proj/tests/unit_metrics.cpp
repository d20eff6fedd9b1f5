// unit_metrics.cpp

#include <random>

#include "doctest.h"
#include "ndf/masks.hpp"
#include "ndf/metrics.hpp"
#include "test_support.hpp"

using namespace ndf;
namespace ts = ndf::testing;

namespace {

Mask constant_mask(const Spectrogram& like, double value) {
  Mask m = Mask::ones(like.num_bins, like.num_frames);
  for (auto& v : m.values) v = value;
  return m;
}

}  // namespace

TEST_CASE("power ratios: identity, constant scaling, degeneracy") {
  const Spectrogram stem = stft(ts::speechlike(7));
  const PowerRatios unity = power_ratios(Mask::ones(stem.num_bins, stem.num_frames), stem);
  CHECK(unity.wideband == 1.0);
  for (std::size_t f = 0; f < stem.num_bins; ++f)
    if (unity.defined[f]) CHECK(unity.narrowband[f] == 1.0);

  const PowerRatios half = power_ratios(constant_mask(stem, 0.5), stem);
  CHECK(half.wideband == doctest::Approx(0.25).epsilon(1e-12));

  Spectrogram zero = stem;
  for (auto& b : zero.bins) b = 0.0;
  CHECK_THROWS_AS(power_ratios(Mask::ones(stem.num_bins, stem.num_frames), zero),
                  DegenerateSignalError);
}

TEST_CASE("frequencies without stem energy are reported absent") {
  Spectrogram stem = stft(ts::tone(1000.0, 16000));
  // wipe a band entirely
  for (std::size_t t = 0; t < stem.num_frames; ++t) stem.at(100, t) = 0.0;
  const PowerRatios r = power_ratios(Mask::ones(stem.num_bins, stem.num_frames), stem);
  CHECK_FALSE(r.defined[100]);
  CHECK(std::isnan(r.narrowband[100]));
  CHECK(r.defined[32]);
}

TEST_CASE("power pattern over a grid: identity masks give exact zeros") {
  const std::vector<double> grid = {0.0, 90.0, 180.0, 270.0};
  std::vector<Spectrogram> stems;
  std::vector<Mask> masks;
  for (int k = 0; k < 4; ++k) {
    stems.push_back(stft(ts::speechlike(100 + k)));
    masks.push_back(Mask::ones(stems.back().num_bins, stems.back().num_frames));
  }
  std::vector<PatternSample> samples;
  for (int k = 0; k < 4; ++k)
    samples.push_back({grid[k % 4], &masks[k], &stems[k]});
  const PatternEstimate est = estimate_power_pattern(samples, grid);
  for (std::size_t p = 0; p < grid.size(); ++p) {
    CHECK(est.counts[p] == 1);
    CHECK(est.wideband_db[p] == 0.0);
    CHECK(est.wideband_std[p] == 0.0);
  }
}

TEST_CASE("directions with no samples are flagged missing; off-grid DOAs throw") {
  const std::vector<double> grid = {0.0, 90.0};
  const Spectrogram stem = stft(ts::speechlike(1));
  const Mask m = Mask::ones(stem.num_bins, stem.num_frames);
  std::vector<PatternSample> samples = {{0.0, &m, &stem}};
  const PatternEstimate est = estimate_power_pattern(samples, grid);
  CHECK(est.counts[1] == 0);
  CHECK(std::isnan(est.wideband_db[1]));

  std::vector<PatternSample> bad = {{45.0, &m, &stem}};
  CHECK_THROWS_AS(estimate_power_pattern(bad, grid), InvalidArgument);
  // nearest-bin fallback within the half-width
  std::vector<PatternSample> near = {{0.9, &m, &stem}};
  CHECK(estimate_power_pattern(near, grid).counts[0] == 1);
}

TEST_CASE("directivity factor estimators") {
  std::vector<Spectrogram> rvb = {stft(ts::speechlike(11)), stft(ts::speechlike(12))};
  std::vector<Mask> ones = {Mask::ones(rvb[0].num_bins, rvb[0].num_frames),
                            Mask::ones(rvb[1].num_bins, rvb[1].num_frames)};
  const auto df0 = estimate_df_db(ones, rvb);
  for (std::size_t f = 0; f < df0.size(); ++f)
    if (std::isfinite(df0[f])) CHECK(df0[f] == 0.0);

  std::vector<Mask> halves = {constant_mask(rvb[0], 0.5), constant_mask(rvb[1], 0.5)};
  const auto df6 = estimate_df_db(halves, rvb);
  for (std::size_t f = 0; f < df6.size(); ++f)
    if (std::isfinite(df6[f]))
      CHECK(df6[f] == doctest::Approx(10.0 * std::log10(4.0)).epsilon(1e-9));

  // anechoic sets carry no reverberant energy
  std::vector<Spectrogram> silent = rvb;
  for (auto& s : silent)
    for (auto& b : s.bins) b = 0.0;
  CHECK_THROWS_AS(estimate_df_db(ones, silent), DegenerateSignalError);

  // target variant: Z == Y_rvb gives exactly 0 dB
  const auto dft = estimate_df_target_db(rvb, rvb);
  for (std::size_t f = 0; f < dft.size(); ++f)
    if (std::isfinite(dft[f])) CHECK(dft[f] == 0.0);
}

TEST_CASE("df estimates are invariant to a global stem scale") {
  std::vector<Spectrogram> rvb = {stft(ts::speechlike(21))};
  std::vector<Spectrogram> z = {stft(ts::speechlike(22))};
  const auto base = estimate_df_target_db(z, rvb);
  for (auto& s : rvb)
    for (auto& b : s.bins) b *= 7.0;
  for (auto& s : z)
    for (auto& b : s.bins) b *= 7.0;
  const auto scaled = estimate_df_target_db(z, rvb);
  for (std::size_t f = 0; f < base.size(); ++f)
    if (std::isfinite(base[f]))
      CHECK(scaled[f] == doctest::Approx(base[f]).epsilon(0).scale(1e-9));
}

TEST_CASE("sdr reference points") {
  const auto z = ts::speechlike(31, 16000);
  CHECK(sdr_db(z, z) == doctest::Approx(10.0 * std::log10(ts::energy(z) / 1e-7)));
  std::vector<double> unit = z;
  const double g = 1.0 / std::sqrt(ts::energy(z));
  for (double& v : unit) v *= g;
  const std::vector<double> zeros(unit.size(), 0.0);
  CHECK(sdr_db(unit, zeros) == doctest::Approx(0.0).epsilon(1e-6));
  std::vector<double> off = z;
  for (double& v : off) v *= 1.1;
  CHECK(sdr_db(z, off) == doctest::Approx(20.0).epsilon(1e-3));
  CHECK_THROWS_AS(sdr_db({}, {}), InvalidArgument);
}

TEST_CASE("loss reference points") {
  std::vector<std::vector<double>> z = {ts::speechlike(41, 16000),
                                        ts::speechlike(42, 16000)};
  CHECK(loss_tsdr(z, z) == -40.0);
  CHECK(loss_l1(z, z) == 0.0);
  std::vector<std::vector<double>> zeros = {std::vector<double>(16000, 0.0),
                                            std::vector<double>(16000, 0.0)};
  CHECK(loss_tsdr(z, zeros) == doctest::Approx(0.0).epsilon(1e-3));
  const double l1_zero = loss_l1(z, zeros);
  CHECK(l1_zero <= 1.0);
  CHECK(l1_zero >= 1.0 - 1e-6);
  std::vector<std::vector<double>> twice = z;
  for (auto& v : twice)
    for (double& s : v) s *= 2.0;
  CHECK(loss_l1(z, twice) == doctest::Approx(1.0).epsilon(1e-6));

  // half the batch perfect, half zeroed, equal energies -> ~ -3.01 dB
  std::vector<double> a = ts::white_noise(43, 8000, 0.1);
  std::vector<std::vector<double>> tz = {a, a};
  std::vector<std::vector<double>> th = {a, std::vector<double>(8000, 0.0)};
  CHECK(loss_tsdr(tz, th) == doctest::Approx(10.0 * std::log10(0.5 + 1e-4)).epsilon(1e-6));
}

TEST_CASE("losses are permutation-invariant over the batch") {
  std::mt19937_64 rng(55);
  std::vector<std::vector<double>> z, zh;
  for (int b = 0; b < 6; ++b) {
    z.push_back(ts::white_noise(200 + b, 4000, 0.2));
    zh.push_back(ts::white_noise(300 + b, 4000, 0.2));
  }
  const double t0 = loss_tsdr(z, zh);
  const double l0 = loss_l1(z, zh);
  std::vector<std::size_t> order = {0, 1, 2, 3, 4, 5};
  for (int trial = 0; trial < 20; ++trial) {
    std::shuffle(order.begin(), order.end(), rng);
    std::vector<std::vector<double>> pz, pzh;
    for (std::size_t i : order) {
      pz.push_back(z[i]);
      pzh.push_back(zh[i]);
    }
    CHECK(loss_tsdr(pz, pzh) == doctest::Approx(t0).epsilon(0).scale(1e-12));
    CHECK(loss_l1(pz, pzh) == doctest::Approx(l0).epsilon(0).scale(1e-12));
  }
}

TEST_CASE("stereo level difference") {
  const auto right = ts::white_noise(61, 48000, 0.1);
  std::vector<double> left = right;
  SUBCASE("identical channels") {
    const auto trace = stereo_level_difference(left, right);
    CHECK(trace.size() == 9);  // 3 s at 1 s segments, 0.25 s hop
    for (const auto& d : trace) {
      CHECK(d.defined);
      CHECK(d.diff_db == 0.0);
    }
  }
  SUBCASE("fixed gain of 4 is about 12.04 dB") {
    for (double& v : left) v *= 4.0;
    for (const auto& d : stereo_level_difference(left, right))
      CHECK(d.diff_db == doctest::Approx(12.0412).epsilon(1e-4));
  }
  SUBCASE("silent segments are flagged undefined") {
    std::fill(left.begin(), left.begin() + 16000, 0.0);
    const auto trace = stereo_level_difference(left, right);
    CHECK_FALSE(trace.front().defined);
    CHECK(trace.back().defined);
  }
}
