// directivity.hpp
// Steerable directivity patterns: DMA cosine polynomials, user-defined
// piecewise shapes, attenuation floor, and the theoretical directivity factor.

#pragma once

#include <string>
#include <utility>
#include <vector>

#include "ndf/geometry.hpp"

namespace ndf {

enum class PatternKind { kDma, kPiecewise };

struct DirectivityPattern {
  PatternKind kind = PatternKind::kDma;
  // DMA: gain = sum_j a_j cos^j(el - el_s) cos^j(az - az_s), coefficients sum to 1.
  std::vector<double> dma_coefficients;
  // Piecewise: (azimuth degrees, linear gain), sorted, step-interpolated,
  // circular; independent of elevation.
  std::vector<std::pair<double, double>> breakpoints;
  Doa steering;
  double floor = kAttenuationFloor;

  int order() const { return static_cast<int>(dma_coefficients.size()) - 1; }
};

// Validates len(coefficients) == order+1 and sum == 1 within 1e-12, then nudges
// a_0 by at most one rounding step so the response at the steering direction is
// exactly 1 in double arithmetic.
DirectivityPattern dma_pattern(int order, std::vector<double> coefficients,
                               Doa steering = {}, double floor = kAttenuationFloor);

DirectivityPattern piecewise_pattern(std::vector<std::pair<double, double>> breakpoints,
                                     double floor = kAttenuationFloor);

// Named presets: "dma1", "dma3", "dma6", "omni".
DirectivityPattern pattern_preset(const std::string& name, Doa steering = {},
                                  double floor = kAttenuationFloor);

// Copy of the pattern with a different steering direction.
DirectivityPattern steered(const DirectivityPattern& pattern, Doa steering);

// Unclamped pattern value (may be negative for high-order lobes).
double evaluate_raw(const DirectivityPattern& pattern, double azimuth, double elevation);

// Magnitude clamped to >= floor, sign preserved.
double evaluate(const DirectivityPattern& pattern, double azimuth, double elevation);
double evaluate(const DirectivityPattern& pattern, const Doa& doa);

// 1 / mean over the sphere of |gain|^2, by a product quadrature grid with
// cos(elevation) weights. Relative error < 1e-4 at the default step.
double theoretical_df(const DirectivityPattern& pattern, double grid_step_deg = 1.0);

}  // namespace ndf
