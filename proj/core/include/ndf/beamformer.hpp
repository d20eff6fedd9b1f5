// beamformer.hpp
// Least-squares beamformer with a white-noise-gain floor, beampattern and WNG
// evaluation, and spectrogram-domain application.

#pragma once

#include <complex>
#include <span>

#include "ndf/directivity.hpp"
#include "ndf/geometry.hpp"
#include "ndf/stft.hpp"

namespace ndf {

struct BeamformerWeights {
  ArrayGeometry array;
  Doa steering;
  std::vector<double> frequencies_hz;
  std::vector<std::vector<std::complex<double>>> weights;  // [f][q]
  std::vector<double> achieved_wng_db;                     // per frequency
  std::vector<double> pattern_residual;                    // rms over the design grid
  double wng_min_db = 0.0;
};

// Unit-magnitude far-field steering vector, element q = exp(-j 2 pi f tau_q).
std::vector<std::complex<double>> steering_vector(const ArrayGeometry& array,
                                                  const Doa& doa, double freq_hz,
                                                  double speed_of_sound = kSpeedOfSound);

// Per frequency: minimize the grid residual sum |w^H d(theta) - gain(theta)|^2
// subject to an exact distortionless response at the steering direction, with
// Tikhonov loading raised by bisection until WNG >= wng_min_db (0.01 dB
// tolerance). wng_min_db above 10 log10(Q) is infeasible.
BeamformerWeights design_ls_beamformer(const ArrayGeometry& array,
                                       const DirectivityPattern& pattern,
                                       std::span<const double> frequencies_hz,
                                       std::span<const double> angles_deg,
                                       double wng_min_db,
                                       double speed_of_sound = kSpeedOfSound);

// Design/evaluation grids used throughout: all 257 STFT bin centers and 360
// azimuths at 1 degree.
std::vector<double> stft_bin_frequencies();
std::vector<double> default_angle_grid_deg();

// Complex response w[f]^H d(theta, f) over an angle grid.
std::vector<std::complex<double>> beampattern(const BeamformerWeights& weights,
                                              std::size_t freq_index,
                                              std::span<const double> angles_deg);

// 10 log10(|w^H d|^2 / w^H w).
double wng_db(std::span<const std::complex<double>> w, const ArrayGeometry& array,
              const Doa& steering, double freq_hz,
              double speed_of_sound = kSpeedOfSound);

// out[f, t] = w[f]^H y[f, t]; the weight grid must match the spectrogram bins.
Spectrogram apply_beamformer(const BeamformerWeights& weights,
                             std::span<const Spectrogram> mic_specs);

// Equivalent single-channel mask out/reference with the magnitude clipped at
// +clip_db; guards division near reference-spectrum zeros.
Mask beamformer_equivalent_mask(const Spectrogram& output, const Spectrogram& reference,
                                double clip_db = 20.0);

}  // namespace ndf
