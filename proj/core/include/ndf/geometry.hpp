// geometry.hpp
// Microphone array construction, DOA vectors, and far-field delays.

#pragma once

#include <vector>

#include "ndf/common.hpp"

namespace ndf {

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
  Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
  Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
  double dot(const Vec3& o) const { return x * o.x + y * o.y + z * o.z; }
  double norm() const { return std::sqrt(dot(*this)); }
};

// Azimuth in [0, 2pi), elevation in [-pi/2, pi/2]; radians.
struct Doa {
  double azimuth = 0.0;
  double elevation = 0.0;

  static Doa from_deg(double azimuth_deg, double elevation_deg = 0.0) {
    return {deg2rad(azimuth_deg), deg2rad(elevation_deg)};
  }
  double azimuth_deg() const { return rad2deg(azimuth); }
};

// Planar UCA of three mics plus a center reference mic at the origin.
struct ArrayGeometry {
  std::vector<Vec3> mic_positions;
  int reference_index = 0;
  double diameter = 0.0;

  std::size_t num_mics() const { return mic_positions.size(); }
};

// Ring mics sit at azimuths 0/120/240 degrees on a circle of radius
// diameter/2 in the x-y plane; index 0 is the center reference.
ArrayGeometry build_array(double diameter_m);

// (cos el cos az, cos el sin az, sin el)
Vec3 doa_unit_vector(const Doa& doa);

// Per-mic arrival time relative to the reference mic, delay_q = -(p_q . u)/c.
// Negative for mics closer to the source than the reference.
std::vector<double> far_field_delays(const ArrayGeometry& array, const Doa& doa,
                                     double speed_of_sound = kSpeedOfSound);

}  // namespace ndf
