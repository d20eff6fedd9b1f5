// directivity.cpp

#include "ndf/directivity.hpp"

#include <algorithm>
#include <cmath>

namespace ndf {

namespace {

// Horner evaluation of sum_j a_j c^j.
double horner(const std::vector<double>& a, double c) {
  double acc = 0.0;
  for (std::size_t j = a.size(); j-- > 0;) acc = acc * c + a[j];
  return acc;
}

double clamp_floor(double raw, double floor) {
  if (std::fabs(raw) < floor) return std::copysign(floor, raw);
  return raw;
}

}  // namespace

DirectivityPattern dma_pattern(int order, std::vector<double> coefficients,
                               Doa steering, double floor) {
  if (order < 0) throw InvalidArgument("DMA order must be >= 0");
  if (coefficients.size() != static_cast<std::size_t>(order) + 1)
    throw InvalidArgument("DMA pattern needs order+1 coefficients");
  if (!(floor > 0.0 && floor <= 1.0))
    throw InvalidArgument("attenuation floor must be in (0, 1]");
  double sum = 0.0;
  for (double a : coefficients) sum += a;
  if (std::fabs(sum - 1.0) > 1e-12)
    throw InvalidArgument("DMA coefficients must sum to 1, got " + std::to_string(sum));

  // Pin the on-axis response to exactly 1.0: the polynomial at c = 1 is the
  // coefficient sum, which may sit one rounding step off unity.
  for (int guard = 0; guard < 4; ++guard) {
    const double s = horner(coefficients, 1.0);
    if (s == 1.0) break;
    coefficients[0] += 1.0 - s;
  }

  DirectivityPattern p;
  p.kind = PatternKind::kDma;
  p.dma_coefficients = std::move(coefficients);
  p.steering = steering;
  p.floor = floor;
  return p;
}

DirectivityPattern piecewise_pattern(std::vector<std::pair<double, double>> breakpoints,
                                     double floor) {
  if (breakpoints.empty())
    throw InvalidArgument("piecewise pattern needs at least one breakpoint");
  if (!(floor > 0.0 && floor <= 1.0))
    throw InvalidArgument("attenuation floor must be in (0, 1]");
  for (std::size_t i = 0; i < breakpoints.size(); ++i) {
    auto& [deg, gain] = breakpoints[i];
    if (deg < 0.0 || deg >= 360.0)
      throw InvalidArgument("breakpoint azimuth must lie in [0, 360) degrees");
    if (i > 0 && deg <= breakpoints[i - 1].first)
      throw InvalidArgument("breakpoints must be strictly increasing");
    if (gain < floor || gain > 1.0)
      throw InvalidArgument("breakpoint gains must lie in [floor, 1]");
  }
  DirectivityPattern p;
  p.kind = PatternKind::kPiecewise;
  p.breakpoints = std::move(breakpoints);
  p.floor = floor;
  return p;
}

DirectivityPattern pattern_preset(const std::string& name, Doa steering, double floor) {
  if (name == "dma1") return dma_pattern(1, {0.5, 0.5}, steering, floor);
  if (name == "dma3")
    return dma_pattern(3, {0.0, 1.0 / 6.0, 0.5, 1.0 / 3.0}, steering, floor);
  if (name == "dma6")
    return dma_pattern(6,
                       {1.0 / 49.0, 8.0 / 49.0, 8.0 / 49.0, -48.0 / 49.0,
                        -48.0 / 49.0, 64.0 / 49.0, 64.0 / 49.0},
                       steering, floor);
  if (name == "omni") return dma_pattern(0, {1.0}, steering, floor);
  throw InvalidArgument("unknown pattern preset: " + name);
}

DirectivityPattern steered(const DirectivityPattern& pattern, Doa steering) {
  DirectivityPattern p = pattern;
  p.steering = steering;
  return p;
}

double evaluate_raw(const DirectivityPattern& pattern, double azimuth, double elevation) {
  if (pattern.kind == PatternKind::kDma) {
    const double c = std::cos(elevation - pattern.steering.elevation) *
                     std::cos(azimuth - pattern.steering.azimuth);
    return horner(pattern.dma_coefficients, c);
  }
  // Step lookup at the steering-relative azimuth; wraps below the first
  // breakpoint to the last one.
  const double rel = wrap_deg(rad2deg(azimuth - pattern.steering.azimuth));
  const auto& bp = pattern.breakpoints;
  auto it = std::upper_bound(bp.begin(), bp.end(), rel,
                             [](double v, const auto& b) { return v < b.first; });
  if (it == bp.begin()) return bp.back().second;
  return std::prev(it)->second;
}

double evaluate(const DirectivityPattern& pattern, double azimuth, double elevation) {
  return clamp_floor(evaluate_raw(pattern, azimuth, elevation), pattern.floor);
}

double evaluate(const DirectivityPattern& pattern, const Doa& doa) {
  return evaluate(pattern, doa.azimuth, doa.elevation);
}

double theoretical_df(const DirectivityPattern& pattern, double grid_step_deg) {
  if (!(grid_step_deg > 0.0 && grid_step_deg <= 10.0))
    throw InvalidArgument("quadrature step must be in (0, 10] degrees");
  const std::size_t n_az = static_cast<std::size_t>(std::lround(360.0 / grid_step_deg));
  const std::size_t n_el = static_cast<std::size_t>(std::lround(180.0 / grid_step_deg));
  double wsum = 0.0;
  double gsum = 0.0;
  for (std::size_t j = 0; j < n_el; ++j) {
    const double el = deg2rad(-90.0 + (j + 0.5) * 180.0 / n_el);
    const double w_el = std::cos(el);
    for (std::size_t i = 0; i < n_az; ++i) {
      const double az = deg2rad((i + 0.5) * 360.0 / n_az);
      const double g = evaluate(pattern, az, el);
      wsum += w_el;
      gsum += w_el * g * g;
    }
  }
  return wsum / gsum;
}

}  // namespace ndf
