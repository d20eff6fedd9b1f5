// beamformer.cpp

#include "ndf/beamformer.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <numbers>

namespace ndf {

namespace {

using cd = std::complex<double>;
using Eigen::MatrixXcd;
using Eigen::VectorXcd;
using Eigen::VectorXd;

MatrixXcd steering_matrix(const ArrayGeometry& array, std::span<const double> angles_deg,
                          double freq_hz, double c) {
  const std::size_t q = array.num_mics();
  MatrixXcd d(q, angles_deg.size());
  for (std::size_t a = 0; a < angles_deg.size(); ++a) {
    const auto col = steering_vector(array, Doa::from_deg(angles_deg[a]), freq_hz, c);
    for (std::size_t i = 0; i < q; ++i) d(i, a) = col[i];
  }
  return d;
}

// Loaded LS with the distortionless equality constraint:
//   w(mu) = A^{-1} (D g - lambda d_s),  A = D D^H + mu I,
//   lambda chosen so d_s^H w = 1.
VectorXcd solve_loaded(const MatrixXcd& ddh, const VectorXcd& dg, const VectorXcd& d_s,
                       double mu) {
  const Eigen::Index q = ddh.rows();
  MatrixXcd a = ddh + mu * MatrixXcd::Identity(q, q);
  Eigen::LDLT<MatrixXcd> ldlt(a);
  const VectorXcd a_inv_dg = ldlt.solve(dg);
  const VectorXcd a_inv_ds = ldlt.solve(d_s);
  const cd denom = d_s.dot(a_inv_ds);  // d_s^H A^{-1} d_s, real positive
  const cd lambda = (d_s.dot(a_inv_dg) - cd(1.0, 0.0)) / denom;
  return a_inv_dg - lambda * a_inv_ds;
}

double wng_of(const VectorXcd& w) {
  // Distortionless by construction, so WNG = 1 / ||w||^2.
  return -10.0 * std::log10(w.squaredNorm());
}

}  // namespace

std::vector<cd> steering_vector(const ArrayGeometry& array, const Doa& doa,
                                double freq_hz, double speed_of_sound) {
  const std::vector<double> delays = far_field_delays(array, doa, speed_of_sound);
  std::vector<cd> d(delays.size());
  for (std::size_t q = 0; q < delays.size(); ++q) {
    const double phase = -2.0 * std::numbers::pi * freq_hz * delays[q];
    d[q] = cd(std::cos(phase), std::sin(phase));
  }
  return d;
}

std::vector<double> stft_bin_frequencies() {
  std::vector<double> f(kNumBins);
  for (std::size_t k = 0; k < kNumBins; ++k) f[k] = kBinSpacingHz * static_cast<double>(k);
  return f;
}

std::vector<double> default_angle_grid_deg() {
  std::vector<double> a(360);
  for (int i = 0; i < 360; ++i) a[i] = static_cast<double>(i);
  return a;
}

BeamformerWeights design_ls_beamformer(const ArrayGeometry& array,
                                       const DirectivityPattern& pattern,
                                       std::span<const double> frequencies_hz,
                                       std::span<const double> angles_deg,
                                       double wng_min_db, double speed_of_sound) {
  if (angles_deg.empty() || frequencies_hz.empty())
    throw InvalidArgument("design grids must be non-empty");
  const std::size_t q = array.num_mics();
  const double wng_cap_db = 10.0 * std::log10(static_cast<double>(q));
  if (wng_min_db > wng_cap_db + 1e-9)
    throw DesignError("WNG floor " + std::to_string(wng_min_db) +
                      " dB exceeds the array bound 10 log10(Q) = " +
                      std::to_string(wng_cap_db) + " dB");

  VectorXd g(static_cast<Eigen::Index>(angles_deg.size()));
  for (std::size_t a = 0; a < angles_deg.size(); ++a)
    g(static_cast<Eigen::Index>(a)) = evaluate(pattern, deg2rad(angles_deg[a]), 0.0);

  BeamformerWeights out;
  out.array = array;
  out.steering = pattern.steering;
  out.frequencies_hz.assign(frequencies_hz.begin(), frequencies_hz.end());
  out.wng_min_db = wng_min_db;
  out.weights.resize(frequencies_hz.size());
  out.achieved_wng_db.resize(frequencies_hz.size());
  out.pattern_residual.resize(frequencies_hz.size());

  constexpr double kTolDb = 0.01;
  const bool at_cap = wng_min_db >= wng_cap_db - 2.0 * kTolDb;

  for (std::size_t fi = 0; fi < frequencies_hz.size(); ++fi) {
    const double f = frequencies_hz[fi];
    const MatrixXcd d = steering_matrix(array, angles_deg, f, speed_of_sound);
    const auto ds_std = steering_vector(array, pattern.steering, f, speed_of_sound);
    VectorXcd d_s(static_cast<Eigen::Index>(q));
    for (std::size_t i = 0; i < q; ++i) d_s(static_cast<Eigen::Index>(i)) = ds_std[i];

    VectorXcd w;
    if (at_cap) {
      // Delay-and-sum is the unique WNG maximizer for unit-magnitude elements.
      w = d_s / static_cast<double>(q);
    } else {
      const MatrixXcd ddh = d * d.adjoint();
      const VectorXcd dg = d * g.cast<cd>();
      const double mu_floor = 1e-10 * ddh.trace().real() / static_cast<double>(q);
      w = solve_loaded(ddh, dg, d_s, mu_floor);
      if (wng_of(w) < wng_min_db) {
        // WNG is nondecreasing in the loading; bracket then bisect in log mu.
        double lo = mu_floor;
        double hi = mu_floor;
        VectorXcd w_hi;
        bool bracketed = false;
        for (int grow = 0; grow < 60; ++grow) {
          hi *= 10.0;
          w_hi = solve_loaded(ddh, dg, d_s, hi);
          if (wng_of(w_hi) >= wng_min_db) {
            bracketed = true;
            break;
          }
          lo = hi;
        }
        if (!bracketed)
          throw DesignError("WNG floor unreachable by diagonal loading at " +
                            std::to_string(f) + " Hz");
        w = w_hi;
        for (int it = 0; it < 200; ++it) {
          const double mid = std::sqrt(lo * hi);
          const VectorXcd w_mid = solve_loaded(ddh, dg, d_s, mid);
          if (wng_of(w_mid) >= wng_min_db) {
            hi = mid;
            w = w_mid;
            if (wng_of(w_mid) <= wng_min_db + kTolDb) break;
          } else {
            lo = mid;
          }
        }
      }
    }

    const VectorXcd resp = d.adjoint() * w;  // d(theta)^H w = conj(response)
    double res = 0.0;
    for (Eigen::Index a = 0; a < resp.size(); ++a)
      res += std::norm(std::conj(resp(a)) - cd(g(a), 0.0));
    out.pattern_residual[fi] = std::sqrt(res / static_cast<double>(resp.size()));
    out.achieved_wng_db[fi] = wng_of(w);
    out.weights[fi].assign(w.data(), w.data() + w.size());
  }
  return out;
}

std::vector<cd> beampattern(const BeamformerWeights& weights, std::size_t freq_index,
                            std::span<const double> angles_deg) {
  if (freq_index >= weights.weights.size())
    throw InvalidArgument("beampattern: frequency index out of range");
  const auto& w = weights.weights[freq_index];
  const double f = weights.frequencies_hz[freq_index];
  std::vector<cd> resp(angles_deg.size());
  for (std::size_t a = 0; a < angles_deg.size(); ++a) {
    const auto d = steering_vector(weights.array, Doa::from_deg(angles_deg[a]), f);
    cd acc = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) acc += std::conj(w[i]) * d[i];
    resp[a] = acc;
  }
  return resp;
}

double wng_db(std::span<const cd> w, const ArrayGeometry& array, const Doa& steering,
              double freq_hz, double speed_of_sound) {
  double norm2 = 0.0;
  for (const cd& v : w) norm2 += std::norm(v);
  if (norm2 <= 0.0) throw DesignError("WNG undefined for zero weights");
  const auto d = steering_vector(array, steering, freq_hz, speed_of_sound);
  cd resp = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) resp += std::conj(w[i]) * d[i];
  return 10.0 * std::log10(std::norm(resp) / norm2);
}

Spectrogram apply_beamformer(const BeamformerWeights& weights,
                             std::span<const Spectrogram> mic_specs) {
  if (mic_specs.empty()) throw InvalidArgument("apply_beamformer: no channels");
  if (mic_specs.size() != weights.array.num_mics())
    throw InvalidArgument("apply_beamformer: channel count does not match the array");
  const Spectrogram& ref = mic_specs[0];
  if (weights.weights.size() != ref.num_bins)
    throw InvalidArgument("apply_beamformer: weight grid does not match the STFT bins");
  for (const Spectrogram& s : mic_specs)
    if (s.num_bins != ref.num_bins || s.num_frames != ref.num_frames)
      throw InvalidArgument("apply_beamformer: spectrogram shape mismatch");

  Spectrogram out = ref;
  for (std::size_t f = 0; f < ref.num_bins; ++f) {
    const auto& w = weights.weights[f];
    for (std::size_t t = 0; t < ref.num_frames; ++t) {
      cd acc = 0.0;
      for (std::size_t q = 0; q < mic_specs.size(); ++q)
        acc += std::conj(w[q]) * mic_specs[q].at(f, t);
      out.at(f, t) = acc;
    }
  }
  return out;
}

Mask beamformer_equivalent_mask(const Spectrogram& output, const Spectrogram& reference,
                                double clip_db) {
  if (output.num_bins != reference.num_bins || output.num_frames != reference.num_frames)
    throw InvalidArgument("equivalent mask: shape mismatch");
  const double clip = std::pow(10.0, clip_db / 20.0);
  Mask m;
  m.num_bins = output.num_bins;
  m.num_frames = output.num_frames;
  m.values.resize(output.bins.size());
  for (std::size_t i = 0; i < output.bins.size(); ++i) {
    const cd ref = reference.bins[i];
    if (std::abs(ref) == 0.0) {
      m.values[i] = 0.0;
      continue;
    }
    cd ratio = output.bins[i] / ref;
    const double mag = std::abs(ratio);
    if (mag > clip) ratio *= clip / mag;
    m.values[i] = ratio;
  }
  return m;
}

}  // namespace ndf
