// unit_filters.cpp

#include <random>

#include "doctest.h"
#include "ndf/beamformer.hpp"
#include "ndf/masks.hpp"
#include "test_support.hpp"

using namespace ndf;
namespace ts = ndf::testing;

namespace {

std::vector<double> sparse_freqs() {
  std::vector<double> f;
  for (int k = 8; k < 257; k += 16) f.push_back(k * kBinSpacingHz);
  return f;
}

}  // namespace

TEST_CASE("steering vectors have unit-magnitude elements") {
  const auto array = build_array(0.03);
  const auto d = steering_vector(array, Doa::from_deg(33.0), 4000.0);
  REQUIRE(d.size() == 4);
  CHECK(std::abs(d[0]) == doctest::Approx(1.0));  // reference: zero phase
  CHECK(d[0].real() == doctest::Approx(1.0));
  for (const auto& v : d) CHECK(std::abs(v) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("wng reference values") {
  const auto array = build_array(0.03);
  const Doa steer = Doa::from_deg(0.0);
  // reference-only weights: 0 dB
  std::vector<std::complex<double>> e1 = {1.0, 0.0, 0.0, 0.0};
  CHECK(wng_db(e1, array, steer, 2000.0) == doctest::Approx(0.0).epsilon(1e-9));
  // delay-and-sum: 10 log10(Q)
  auto d = steering_vector(array, steer, 2000.0);
  for (auto& v : d) v /= 4.0;
  CHECK(wng_db(d, array, steer, 2000.0) == doctest::Approx(10.0 * std::log10(4.0)));
  std::vector<std::complex<double>> zeros(4, 0.0);
  CHECK_THROWS_AS(wng_db(zeros, array, steer, 2000.0), DesignError);
}

TEST_CASE("ls design honors the WNG floor and stays distortionless") {
  const auto array = build_array(0.03);
  const auto pattern = pattern_preset("dma1");
  const auto freqs = sparse_freqs();
  const auto angles = default_angle_grid_deg();
  const auto w = design_ls_beamformer(array, pattern, freqs, angles, -15.0);
  for (std::size_t f = 0; f < freqs.size(); ++f) {
    CHECK(wng_db(w.weights[f], array, pattern.steering, freqs[f]) >= -15.0 - 1e-6);
    const auto resp = beampattern(w, f, std::vector<double>{0.0});
    CHECK(std::abs(resp[0]) == doctest::Approx(1.0).epsilon(1e-9));
  }
}

TEST_CASE("the WNG upper bound forces delay-and-sum; beyond it the design fails") {
  const auto array = build_array(0.03);
  const auto pattern = pattern_preset("dma1");
  const std::vector<double> freqs = {2000.0};
  const auto angles = default_angle_grid_deg();
  const double cap = 10.0 * std::log10(4.0);
  const auto w = design_ls_beamformer(array, pattern, freqs, angles, cap);
  const auto d = steering_vector(array, pattern.steering, 2000.0);
  for (std::size_t q = 0; q < 4; ++q)
    CHECK(std::abs(w.weights[0][q] - d[q] / 4.0) < 1e-12);
  CHECK_THROWS_AS(design_ls_beamformer(array, pattern, freqs, angles, 7.0), DesignError);
}

TEST_CASE("achieved WNG responds monotonically to a tightening floor") {
  const auto array = build_array(0.03);
  const auto pattern = pattern_preset("dma1");
  const std::vector<double> freqs = {500.0};  // constraint active down here
  const auto angles = default_angle_grid_deg();
  double prev_wng = -1e9;
  double prev_res = -1.0;
  for (double floor_db : {-30.0, -20.0, -10.0, -3.0}) {
    const auto w = design_ls_beamformer(array, pattern, freqs, angles, floor_db);
    CHECK(w.achieved_wng_db[0] >= floor_db - 1e-6);
    CHECK(w.achieved_wng_db[0] >= prev_wng - 0.02);
    if (prev_res >= 0.0) CHECK(w.pattern_residual[0] >= prev_res - 1e-12);
    prev_wng = w.achieved_wng_db[0];
    prev_res = w.pattern_residual[0];
  }
}

TEST_CASE("higher-order targets leave a larger wideband residual on the 3 cm array") {
  const auto array = build_array(0.03);
  const auto freqs = sparse_freqs();
  const auto angles = default_angle_grid_deg();
  const auto w1 = design_ls_beamformer(array, pattern_preset("dma1"), freqs, angles, -15.0);
  const auto w3 = design_ls_beamformer(array, pattern_preset("dma3"), freqs, angles, -15.0);
  double r1 = 0.0, r3 = 0.0;
  for (std::size_t f = 0; f < freqs.size(); ++f) {
    r1 += w1.pattern_residual[f];
    r3 += w3.pattern_residual[f];
  }
  CHECK(r3 > r1);
}

TEST_CASE("unconstrained solutions are locally optimal on the constraint manifold") {
  const auto array = build_array(0.03);
  const auto pattern = pattern_preset("dma1");
  const std::vector<double> freqs = {6000.0};  // WNG floor inactive up here
  const auto angles = default_angle_grid_deg();
  const auto design = design_ls_beamformer(array, pattern, freqs, angles, -40.0);

  auto residual_of = [&](const std::vector<std::complex<double>>& w) {
    double acc = 0.0;
    for (double a : angles) {
      const auto d = steering_vector(array, Doa::from_deg(a), freqs[0]);
      std::complex<double> resp = 0.0;
      for (std::size_t q = 0; q < 4; ++q) resp += std::conj(w[q]) * d[q];
      const double g = evaluate(pattern, deg2rad(a), 0.0);
      acc += std::norm(resp - g);
    }
    return acc;
  };

  const auto& w0 = design.weights[0];
  const double base = residual_of(w0);
  const auto ds = steering_vector(array, pattern.steering, freqs[0]);
  std::mt19937_64 rng(4);
  std::normal_distribution<double> n(0.0, 1.0);
  for (int trial = 0; trial < 16; ++trial) {
    std::vector<std::complex<double>> delta(4);
    for (auto& v : delta) v = {n(rng), n(rng)};
    // project so the perturbed weights stay distortionless
    std::complex<double> along = 0.0;
    for (std::size_t q = 0; q < 4; ++q) along += std::conj(ds[q]) * delta[q];
    for (std::size_t q = 0; q < 4; ++q) delta[q] -= ds[q] * (along / 4.0);
    auto w = w0;
    for (std::size_t q = 0; q < 4; ++q) w[q] += 0.02 * delta[q];
    CHECK(residual_of(w) >= base - 1e-9);
  }
}

TEST_CASE("beampattern special cases") {
  const auto array = build_array(0.03);
  BeamformerWeights w;
  w.array = array;
  w.steering = Doa::from_deg(0.0);
  w.frequencies_hz = {12000.0};
  w.weights = {{1.0, 0.0, 0.0, 0.0}};  // reference-only
  const auto angles = default_angle_grid_deg();
  const auto resp = beampattern(w, 0, angles);
  for (const auto& r : resp) CHECK(std::abs(r) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK_THROWS_AS(beampattern(w, 3, angles), InvalidArgument);
}

TEST_CASE("spatial aliasing shows up at 12 kHz on the 3 cm array") {
  const auto array = build_array(0.03);
  const auto pattern = pattern_preset("dma1");
  const std::vector<double> freqs = {12000.0};
  const auto angles = default_angle_grid_deg();
  const auto w = design_ls_beamformer(array, pattern, freqs, angles, -15.0);
  const auto resp = beampattern(w, 0, angles);
  double main_lobe = std::abs(resp[0]);
  double off = 0.0;
  for (std::size_t a = 0; a < angles.size(); ++a)
    if (angular_distance_deg(angles[a], 0.0) > 60.0)
      off = std::max(off, std::abs(resp[a]));
  CHECK(20.0 * std::log10(off / main_lobe) > -6.0);
}

TEST_CASE("apply_beamformer basics") {
  const auto array = build_array(0.03);
  const auto x = ts::speechlike(61, 16000);
  std::vector<Spectrogram> specs;
  for (int q = 0; q < 4; ++q) specs.push_back(stft(ts::speechlike(61 + q, 16000)));

  BeamformerWeights w;
  w.array = array;
  w.frequencies_hz = stft_bin_frequencies();
  w.weights.assign(kNumBins, {1.0, 0.0, 0.0, 0.0});
  const Spectrogram out = apply_beamformer(w, specs);
  for (std::size_t i = 0; i < out.bins.size(); ++i)
    CHECK(out.bins[i] == specs[0].bins[i]);

  // a global phase leaves the output magnitude unchanged
  BeamformerWeights w2 = w;
  const std::complex<double> rot = std::polar(1.0, 0.7);
  for (auto& row : w2.weights)
    for (auto& v : row) v *= rot;
  const Spectrogram out2 = apply_beamformer(w2, specs);
  for (std::size_t i = 0; i < out.bins.size(); ++i)
    CHECK(std::abs(out2.bins[i]) == doctest::Approx(std::abs(out.bins[i])).epsilon(0).scale(1e-9));

  std::vector<Spectrogram> three(specs.begin(), specs.begin() + 3);
  CHECK_THROWS_AS(apply_beamformer(w, three), InvalidArgument);
}

TEST_CASE("equivalent mask reproduces the beamformer output away from clipping") {
  const Spectrogram ref = stft(ts::speechlike(71, 16000));
  Spectrogram out = ref;
  for (auto& b : out.bins) b *= std::complex<double>(0.3, 0.1);
  const Mask m = beamformer_equivalent_mask(out, ref, 20.0);
  for (std::size_t i = 0; i < m.values.size(); ++i)
    if (std::abs(ref.bins[i]) > 0)
      CHECK(std::abs(m.values[i] - std::complex<double>(0.3, 0.1)) < 1e-9);
  // magnitude clip at +20 dB
  for (auto& b : out.bins) b *= 100.0;
  const Mask clipped = beamformer_equivalent_mask(out, ref, 20.0);
  for (std::size_t i = 0; i < clipped.values.size(); ++i)
    CHECK(std::abs(clipped.values[i]) <= 10.0 + 1e-9);
}

TEST_CASE("oracle parametric mask") {
  const auto pattern = pattern_preset("dma1");

  SUBCASE("single source at the steering direction passes unity") {
    const std::vector<Spectrogram> stems = {stft(ts::speechlike(81))};
    const std::vector<Doa> doas = {Doa::from_deg(0.0)};
    const Mask m = oracle_parametric_mask(stems, doas, pattern);
    const Spectrogram out = apply_mask(m, stems[0]);
    for (std::size_t i = 0; i < out.bins.size(); ++i)
      CHECK(std::abs(out.bins[i] - stems[0].bins[i]) <= 1e-15);
  }

  SUBCASE("single source at the null clamps to the floor") {
    const std::vector<Spectrogram> stems = {stft(ts::speechlike(82))};
    const std::vector<Doa> doas = {Doa::from_deg(180.0)};
    const Mask m = oracle_parametric_mask(stems, doas, pattern);
    for (std::size_t i = 0; i < m.values.size(); ++i)
      if (std::abs(stems[0].bins[i]) > 0.0) CHECK(m.values[i].real() == 0.01);
  }

  SUBCASE("disjoint supports get their own gains; dominance is per bin") {
    const std::vector<Spectrogram> stems = {stft(ts::tone(500.0, 16000)),
                                            stft(ts::tone(3000.0, 16000))};
    const std::vector<Doa> doas = {Doa::from_deg(90.0), Doa::from_deg(180.0)};
    const Mask m = oracle_parametric_mask(stems, doas, pattern);
    // brute-force per-bin dominance as an independent check
    for (std::size_t i = 0; i < m.values.size(); ++i) {
      const double m0 = std::abs(stems[0].bins[i]);
      const double m1 = std::abs(stems[1].bins[i]);
      double expect = 1.0;
      if (m0 > 0.0 || m1 > 0.0) expect = (m0 >= m1) ? 0.5 : 0.01;
      CHECK(m.values[i].real() == expect);
    }
  }

  SUBCASE("oracle gains stay within [floor, 1] for unit-max patterns") {
    const std::vector<Spectrogram> stems = {stft(ts::speechlike(83)),
                                            stft(ts::speechlike(84))};
    const std::vector<Doa> doas = {Doa::from_deg(35.0), Doa::from_deg(312.5)};
    for (const char* name : {"dma1", "dma3", "dma6"}) {
      const Mask m = oracle_parametric_mask(stems, doas, pattern_preset(name));
      for (const auto& v : m.values) {
        CHECK(v.real() >= 0.01);
        CHECK(v.real() <= 1.0 + 1e-12);
      }
    }
  }

  SUBCASE("missing stems raise the oracle error") {
    CHECK_THROWS_AS(oracle_parametric_mask({}, {}, pattern), OracleError);
  }
}

TEST_CASE("apply_mask edge behavior") {
  const Spectrogram s = stft(ts::speechlike(91, 16000));
  Mask zero = Mask::ones(s.num_bins, s.num_frames);
  for (auto& v : zero.values) v = 0.0;
  const Spectrogram out = apply_mask(zero, s);
  for (const auto& b : out.bins) CHECK(std::abs(b) == 0.0);

  // conj(Y)/|Y| zeroes the phase and keeps the magnitude
  Mask phase = Mask::ones(s.num_bins, s.num_frames);
  for (std::size_t i = 0; i < phase.values.size(); ++i) {
    const double mag = std::abs(s.bins[i]);
    phase.values[i] = mag > 0 ? std::conj(s.bins[i]) / mag : 0.0;
  }
  const Spectrogram flat = apply_mask(phase, s);
  for (std::size_t i = 0; i < flat.bins.size(); ++i) {
    CHECK(std::fabs(flat.bins[i].imag()) <= 1e-12 * (1.0 + std::abs(s.bins[i])));
    CHECK(flat.bins[i].real() == doctest::Approx(std::abs(s.bins[i])).epsilon(0).scale(1e-9));
  }

  Mask wrong = Mask::ones(s.num_bins, s.num_frames - 1);
  CHECK_THROWS_AS(apply_mask(wrong, s), InvalidArgument);
}
