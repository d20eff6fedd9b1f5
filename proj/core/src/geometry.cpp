// geometry.cpp

#include "ndf/geometry.hpp"

namespace ndf {

ArrayGeometry build_array(double diameter_m) {
  if (!(diameter_m > 0.0))
    throw InvalidArgument("array diameter must be positive, got " +
                          std::to_string(diameter_m));
  ArrayGeometry g;
  g.diameter = diameter_m;
  g.reference_index = 0;
  const double radius = diameter_m / 2.0;
  g.mic_positions.push_back({0.0, 0.0, 0.0});
  for (int k = 0; k < 3; ++k) {
    const double az = deg2rad(120.0 * k);
    g.mic_positions.push_back({radius * std::cos(az), radius * std::sin(az), 0.0});
  }
  return g;
}

Vec3 doa_unit_vector(const Doa& doa) {
  const double ce = std::cos(doa.elevation);
  return {ce * std::cos(doa.azimuth), ce * std::sin(doa.azimuth),
          std::sin(doa.elevation)};
}

std::vector<double> far_field_delays(const ArrayGeometry& array, const Doa& doa,
                                     double speed_of_sound) {
  if (!(speed_of_sound > 0.0))
    throw InvalidArgument("speed of sound must be positive");
  const Vec3 u = doa_unit_vector(doa);
  const Vec3 ref = array.mic_positions.at(array.reference_index);
  std::vector<double> delays;
  delays.reserve(array.num_mics());
  for (const Vec3& p : array.mic_positions)
    delays.push_back(-(p - ref).dot(u) / speed_of_sound);
  return delays;
}

}  // namespace ndf
